#![no_main]

use libfuzzer_sys::fuzz_target;

// The JSON instance parser must never panic, and any accepted dump must
// either build a graph or fail with a structured error — never abort.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(dump) = rkgrgg::formats::parse_instance(text) {
        match dump.to_graph() {
            Ok(graph) => {
                let report = rkgrgg::connectivity::analyze(&graph);
                assert!(report.largest_component <= graph.n());
                // A dump that built once must round-trip bit-exactly.
                let rewritten = rkgrgg::formats::instance_json(&dump);
                let reparsed = rkgrgg::formats::parse_instance(&rewritten)
                    .expect("writer output must parse");
                assert_eq!(dump, reparsed);
            }
            Err(_) => {}
        }
    }
});
