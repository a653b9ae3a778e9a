#![no_main]

use libfuzzer_sys::fuzz_target;

use rkgrgg_cli::SweepConfig;

// Sweep configs come from user files: deserialization plus validation must
// reject garbage with errors, never panics, and accepted configs must have
// solvable-or-cleanly-rejected regime points.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(config) = serde_json::from_str::<SweepConfig>(text) {
        if config.validate().is_ok() {
            // Validation passed, so the solver must not panic; it may still
            // return a structured error or an infeasible point. A few points
            // per input keep iterations fast.
            for point in config.points.iter().take(4) {
                let _ = rkgrgg::harness::solve_regime(point);
            }
        }
    }
});
