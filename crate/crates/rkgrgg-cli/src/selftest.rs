//! Fast internal cross-validation: every check pits one implementation
//! against an independent route and must agree before the binary is
//! trusted for real sweeps.

use rkgrgg::bounds;
use rkgrgg::combinatorics::{self, KeyPoolParams};
use rkgrgg::connectivity;
use rkgrgg::formats;
use rkgrgg::graph::{self, Boundary, EdgeRule, ModelParams};
use rkgrgg::harness::{self, Regime, RegimeSpec};

type CheckResult = Result<(), String>;

fn ensure(label: &str, condition: bool, detail: String) -> CheckResult {
    if condition {
        Ok(())
    } else {
        Err(format!("{label}: {detail}"))
    }
}

fn close(label: &str, got: f64, want: f64, tolerance: f64) -> CheckResult {
    ensure(
        label,
        (got - want).abs() <= tolerance,
        format!("got {got}, want {want} within {tolerance}"),
    )
}

fn link_probability_exact() -> CheckResult {
    let beta = combinatorics::link_probability(&KeyPoolParams::new(5, 2).unwrap())
        .map_err(|err| format!("link_probability(5,2): {err}"))?;
    close("link_probability(5,2)", beta.value, 0.7, 1e-12)?;
    let beta = combinatorics::link_probability(&KeyPoolParams::new(17, 1).unwrap())
        .map_err(|err| format!("link_probability(17,1): {err}"))?;
    close("link_probability(17,1)", beta.value, 1.0 / 17.0, 1e-12)?;
    let ratio = combinatorics::beta_ratio(&KeyPoolParams::new(1000, 1).unwrap())
        .map_err(|err| format!("beta_ratio(1000,1): {err}"))?;
    ensure(
        "beta_ratio at ring 1",
        ratio == 2.0,
        format!("got {ratio}, want exactly 2"),
    )
}

fn sandwich_strict() -> CheckResult {
    for &x in &[1e-6, 1e-3, 0.1, 0.5, 0.9, 0.999] {
        for &n in &[1.0, 7.0, 100.0, 1e4, 1e6] {
            let s = combinatorics::exp_sandwich(x, n)
                .map_err(|err| format!("exp_sandwich({x},{n}): {err}"))?;
            ensure(
                "exp_sandwich ordering",
                s.is_strictly_ordered(),
                format!("x={x} n={n}: {} !< {} !< {}", s.lower(), s.value(), s.upper()),
            )?;
            let direct = n * f64::ln_1p(-x);
            close("exp_sandwich vs direct log", s.log_value, direct, 1e-9 * direct.abs().max(1.0))?;
        }
    }
    Ok(())
}

fn grid_matches_all_pairs() -> CheckResult {
    let pool = KeyPoolParams::new(12, 3).unwrap();
    for seed in 0..8u64 {
        let n = 40 + 13 * seed as usize;
        let radius = 0.05 + 0.03 * (seed % 4) as f64;
        for boundary in [Boundary::Square, Boundary::Torus] {
            for rule in [EdgeRule::Intersection, EdgeRule::GeometricOnly, EdgeRule::KeyOnly] {
                let params = ModelParams::new(n, pool, radius, boundary)
                    .map_err(|err| format!("params: {err}"))?;
                let fast = graph::sample_graph(&params, rule, seed)
                    .map_err(|err| format!("sample: {err}"))?;
                let positions = fast.positions.clone();
                let rings = fast.key_rings.clone();
                let slow = graph::build_graph_all_pairs(positions, rings, radius, boundary, rule)
                    .map_err(|err| format!("all-pairs: {err}"))?;
                ensure(
                    "grid vs all-pairs edges",
                    fast.edges().eq(slow.edges()),
                    format!("seed {seed} n {n} r {radius} {boundary} {rule}"),
                )?;
                let report_fast = connectivity::analyze(&fast);
                let labels = connectivity::components_oracle(&fast);
                let union_find = connectivity::components(&fast);
                ensure(
                    "union-find vs BFS labels",
                    labels == union_find,
                    format!("seed {seed} n {n}"),
                )?;
                let degrees: Vec<usize> = (0..fast.n()).map(|v| fast.degree(v)).collect();
                let isolated = degrees.iter().filter(|&&d| d == 0).count();
                ensure(
                    "isolated count",
                    report_fast.isolated_nodes == isolated,
                    format!("seed {seed}"),
                )?;
            }
        }
    }
    Ok(())
}

fn wilson_reference() -> CheckResult {
    let (lo, hi) = harness::wilson_interval(10, 10, harness::Z95);
    ensure(
        "wilson 10/10 lower",
        (0.70..0.74).contains(&lo) && hi <= 1.0 + 1e-12,
        format!("got ({lo}, {hi})"),
    )?;
    let (lo, hi) = harness::wilson_interval(0, 100, harness::Z95);
    ensure(
        "wilson 0/100 upper",
        lo == 0.0 && (0.030..0.045).contains(&hi),
        format!("got ({lo}, {hi})"),
    )
}

fn bound_identities() -> CheckResult {
    close(
        "disconnect floor at c1=1",
        bounds::disconnect_floor(1.0),
        0.09196986029286058,
        1e-16,
    )?;
    let pool = KeyPoolParams::new(40, 4).unwrap();
    let beta = combinatorics::link_probability(&pool).unwrap().value;
    let (n, area) = (200usize, 0.02f64);
    let far = bounds::joint_isolation_bound(n, area, &pool, bounds::IsolationCase::Far)
        .map_err(|err| format!("joint bound: {err}"))?;
    let direct = (1.0 - 2.0 * area * beta).powi(n as i32 - 2);
    close("joint far bound closed form", far.value, direct, 1e-12)?;
    let single = bounds::single_isolation_probability(n, area * beta)
        .map_err(|err| format!("single isolation: {err}"))?;
    ensure(
        "single isolation sandwich brackets",
        single.sandwich.lower() < single.probability && single.probability < single.sandwich.upper(),
        format!(
            "{} !< {} !< {}",
            single.sandwich.lower(),
            single.probability,
            single.sandwich.upper()
        ),
    )
}

fn format_round_trips() -> CheckResult {
    let pool = KeyPoolParams::new(20, 3).unwrap();
    let params = ModelParams::new(60, pool, 0.15, Boundary::Square).unwrap();
    let graph = graph::sample_graph(&params, EdgeRule::Intersection, 99)
        .map_err(|err| format!("sample: {err}"))?;
    let text = formats::edge_list_string(&graph);
    let parsed = formats::parse_edge_list(&text).map_err(|err| format!("parse: {err}"))?;
    let from_list = connectivity::analyze_edge_list(parsed.n, &parsed.edges);
    let direct = connectivity::analyze(&graph);
    ensure(
        "edge-list report round trip",
        from_list == direct,
        format!("{from_list:?} != {direct:?}"),
    )?;
    let dump = formats::InstanceDump::from_graph(&graph, &pool, 99);
    let rebuilt = formats::parse_instance(&formats::instance_json(&dump))
        .map_err(|err| format!("instance parse: {err}"))?
        .to_graph()
        .map_err(|err| format!("instance rebuild: {err}"))?;
    ensure(
        "instance JSON round trip",
        rebuilt.edges().eq(graph.edges()),
        "rebuilt edge set differs".to_owned(),
    )
}

fn solver_smoke() -> CheckResult {
    let spec = RegimeSpec {
        n: 500,
        regime: Regime::Critical { c1: 1.0 },
        density_law: harness::DensityLaw::LogPower { exponent: 1.5 },
        sigma: 1.0,
        delta: 0.5,
        boundary: Boundary::Torus,
        forced_ring: None,
    };
    let solved = harness::solve_regime(&spec).map_err(|err| format!("solve: {err}"))?;
    ensure(
        "solver feasibility",
        solved.feasible && solved.relative_error < 0.05,
        format!(
            "feasible {} relative_error {}",
            solved.feasible, solved.relative_error
        ),
    )?;
    let trial = harness::run_trial(
        &solved.params,
        solved.edge_rule,
        7,
        &harness::TrialOptions::default(),
    )
    .map_err(|err| format!("trial: {err}"))?;
    let again = harness::run_trial(
        &solved.params,
        solved.edge_rule,
        7,
        &harness::TrialOptions::default(),
    )
    .map_err(|err| format!("trial: {err}"))?;
    ensure(
        "trial determinism",
        trial.deterministic_view() == again.deterministic_view(),
        "same seed produced different outcomes".to_owned(),
    )
}

/// Run every check; returns the number passed, or the first failure.
pub fn run(verbose: bool) -> Result<usize, String> {
    let checks: Vec<(&str, fn() -> CheckResult)> = vec![
        ("link probability exact values", link_probability_exact),
        ("exponential sandwich strictness", sandwich_strict),
        ("grid builder vs all-pairs and union-find vs BFS", grid_matches_all_pairs),
        ("Wilson interval reference points", wilson_reference),
        ("closed-form bound identities", bound_identities),
        ("format round trips", format_round_trips),
        ("regime solver and trial determinism", solver_smoke),
    ];
    let total = checks.len();
    for (name, check) in checks {
        if verbose {
            println!("selftest: running {name}");
        }
        check()?;
        if verbose {
            println!("selftest: {name} ok");
        }
    }
    Ok(total)
}
