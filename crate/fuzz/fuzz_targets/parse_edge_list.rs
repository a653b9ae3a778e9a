#![no_main]

use libfuzzer_sys::fuzz_target;

// The edge-list parser must never panic on untrusted text, and anything it
// accepts must satisfy the documented invariants and be analyzable.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(parsed) = rkgrgg::formats::parse_edge_list(text) {
        assert!(parsed.edges.windows(2).all(|w| w[0] < w[1]), "edges sorted, unique");
        assert!(parsed
            .edges
            .iter()
            .all(|&(i, j)| i < j && (j as usize) < parsed.n));
        let report = rkgrgg::connectivity::analyze_edge_list(parsed.n, &parsed.edges);
        assert!(report.component_count <= parsed.n.max(1));
        assert!(report.largest_component <= parsed.n);
    }
});
