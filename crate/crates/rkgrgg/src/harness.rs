//! Regime solving, seeded Monte Carlo trials, and sweep aggregation.
//!
//! A [`RegimeSpec`] names a point on a connectivity-threshold curve
//! (critical, supercritical, geometry-only, or keys-only). [`solve_regime`]
//! turns it into concrete integer parameters whose exact link probability
//! hits the regime's target, [`run_trial`] runs one seeded instance, and
//! [`sweep`] aggregates many trials per point into frequency estimates with
//! Wilson intervals next to the matching closed-form bounds.
//!
//! Determinism contract: every trial's seed is a pure function of
//! `(base seed, spec content, trial index)`, and per-point aggregation is a
//! commutative integer merge, so results are byte-identical across worker
//! counts and grid orderings.

use std::f64::consts::PI;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::bounds::{self, CellIsolationBound};
use crate::combinatorics::{self, KeyPoolParams};
use crate::connectivity;
use crate::graph::{self, Boundary, EdgeRule, ModelParams};
use crate::tessellation::{self, DualConnectivity, DualTessellations};

#[derive(Debug, Error)]
pub enum Error {
    #[error("node count must be at least 2, got {0}")]
    TooFewNodes(usize),
    #[error("sigma must be nonnegative, got {0}")]
    SigmaNegative(f64),
    #[error("delta must lie in (0,1), got {0}")]
    DeltaOutOfRange(f64),
    #[error("density d_n must be positive and at most 2*pi*n (unit-square radius), got {0}")]
    DensityOutOfRange(f64),
    #[error("target edge mass {0} must lie in (0,1)")]
    TargetOutOfRange(f64),
    #[error("forced ring size must be at least 1, got {0}")]
    ForcedRingInvalid(u64),
    #[error("estimate requires at least one outcome")]
    EmptyOutcomeSet,
    #[error("sweep grid must be nonempty")]
    EmptyGrid,
    #[error("sweep needs at least one trial per point")]
    NoTrials,
    #[error("worker pool construction failed: {0}")]
    WorkerPool(String),
    #[error(transparent)]
    Graph(#[from] graph::Error),
    #[error(transparent)]
    Tessellation(#[from] tessellation::Error),
    #[error(transparent)]
    Combinatorics(#[from] combinatorics::Error),
    #[error(transparent)]
    Bounds(#[from] bounds::Error),
}

/// Which threshold curve a sweep point sits on.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Regime {
    /// Target `a*beta = (log n + c1)/n`: the disconnection probability has
    /// the floor `exp(-c1)/4`.
    Critical { c1: f64 },
    /// Target `a*beta = (2 pi / (1-delta)) * (1+margin) * log n / n`:
    /// connectivity probability tends to 1.
    Supercritical { margin: f64 },
    /// Geometry alone (no key constraint), `pi r^2 = (log n + c)/n`.
    RggOnly { c: f64 },
    /// Key rings alone (no geometric constraint), `beta = (log n + c)/n`.
    RkgOnly { c: f64 },
}

impl Regime {
    pub fn kind(&self) -> &'static str {
        match self {
            Regime::Critical { .. } => "critical",
            Regime::Supercritical { .. } => "supercritical",
            Regime::RggOnly { .. } => "rgg_only",
            Regime::RkgOnly { .. } => "rkg_only",
        }
    }

    /// The regime's free scalar (`c1`, `margin`, or `c`).
    pub fn parameter(&self) -> f64 {
        match *self {
            Regime::Critical { c1 } => c1,
            Regime::Supercritical { margin } => margin,
            Regime::RggOnly { c } | Regime::RkgOnly { c } => c,
        }
    }
}

/// Geometric degree schedule `d_n = n pi r_n^2`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensityLaw {
    /// `d_n = (log n)^exponent`.
    LogPower { exponent: f64 },
    /// Fixed `d_n`.
    Absolute { value: f64 },
}

impl DensityLaw {
    pub fn value(&self, n: usize) -> f64 {
        match *self {
            DensityLaw::LogPower { exponent } => (n as f64).ln().powf(exponent),
            DensityLaw::Absolute { value } => value,
        }
    }
}

fn default_sigma() -> f64 {
    1.0
}

fn default_delta() -> f64 {
    0.5
}

fn default_boundary() -> Boundary {
    Boundary::Torus
}

/// One sweep point: a regime plus the knobs the solver needs.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeSpec {
    pub n: usize,
    pub regime: Regime,
    pub density_law: DensityLaw,
    /// Pool floor multiplier: the solver enforces `P >= sigma * n * r^2`.
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    /// Denseness tolerance used for tessellation events and bounds.
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_boundary")]
    pub boundary: Boundary,
    /// Pin the ring size instead of searching; `Some(1)` selects the
    /// closed-form `P = round(1/target beta)` solution.
    #[serde(default)]
    pub forced_ring: Option<u64>,
}

impl RegimeSpec {
    pub fn validate(&self) -> Result<(), Error> {
        if self.n < 2 {
            return Err(Error::TooFewNodes(self.n));
        }
        if !(self.sigma >= 0.0) {
            return Err(Error::SigmaNegative(self.sigma));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::DeltaOutOfRange(self.delta));
        }
        if let Some(k) = self.forced_ring {
            if k < 1 {
                return Err(Error::ForcedRingInvalid(k));
            }
        }
        Ok(())
    }

    /// The adjacency rule the regime verifies.
    pub fn edge_rule(&self) -> EdgeRule {
        match self.regime {
            Regime::RggOnly { .. } => EdgeRule::GeometricOnly,
            Regime::RkgOnly { .. } => EdgeRule::KeyOnly,
            _ => EdgeRule::Intersection,
        }
    }
}

/// Finite-n sanity floor for the superlogarithmic density requirement:
/// `d_n / log n` must reach at least this.
pub const DENSITY_LOG_FLOOR: f64 = 1.0;
/// Finite-n ceiling for the sublinear density requirement: `d_n / n` must
/// stay at or below this.
pub const DENSITY_LINEAR_CEILING: f64 = 0.25;
/// Ceiling on `ring^2 / pool` beyond which the small-overlap formulas are
/// outside their intended range.
pub const RING_SQ_POOL_CEILING: f64 = 1.0;
/// Largest pool size the integer solver searches.
pub const POOL_SEARCH_CAP: u64 = 100_000_000;
/// Largest ring size the integer solver searches.
pub const RING_SEARCH_CAP: u64 = 64;

/// Finite-n recheck of the hypotheses behind the asymptotic statements.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RegimeFlags {
    pub ring_at_least_two: bool,
    pub pool_at_least_twice_ring: bool,
    /// `P >= sigma * n * r^2`.
    pub pool_scales_with_n: bool,
    /// `ring^2 / pool <= RING_SQ_POOL_CEILING`.
    pub ring_sq_over_pool_bounded: bool,
    /// `d_n / log n >= DENSITY_LOG_FLOOR`.
    pub density_superlogarithmic: bool,
    /// `d_n / n <= DENSITY_LINEAR_CEILING`.
    pub density_sublinear: bool,
    /// Supercritical only: `pi r^2 K^2/P >= (2 pi/(1-delta)) log n / n`.
    pub supercritical_margin_met: Option<bool>,
}

impl RegimeFlags {
    pub fn all_hold(&self) -> bool {
        self.ring_at_least_two
            && self.pool_at_least_twice_ring
            && self.pool_scales_with_n
            && self.ring_sq_over_pool_bounded
            && self.density_superlogarithmic
            && self.density_sublinear
            && self.supercritical_margin_met.unwrap_or(true)
    }
}

/// Concrete parameters for a regime, with the achieved-versus-target
/// accounting.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolvedRegime {
    pub spec: RegimeSpec,
    pub params: ModelParams,
    pub edge_rule: EdgeRule,
    /// The tessellation pair whose effective radius `params.radius` equals.
    pub duals: DualTessellations,
    /// Geometric degree scale actually used (`n pi r^2` after snapping).
    pub density: f64,
    /// Radius before snapping to an integer cell count.
    pub requested_radius: f64,
    pub target_ab: f64,
    pub achieved_beta: f64,
    pub achieved_ab: f64,
    pub achieved_ring_sq_over_pool: f64,
    pub relative_error: f64,
    /// False when the target could not be bracketed by any searched
    /// `(ring, pool)`; the reported point is then the closest achievable.
    pub feasible: bool,
    pub flags: RegimeFlags,
}

/// Exact link probability for candidate pools during the integer search.
fn beta_of(pool: u64, ring: u64) -> Result<f64, Error> {
    Ok(combinatorics::link_probability(&KeyPoolParams::new(pool, ring)?)?.value)
}

/// Best pool size for one ring size: the `P` in `[p_min, POOL_SEARCH_CAP]`
/// whose exact `beta` is closest to the target. `beta` is strictly
/// decreasing in `P`, so binary search brackets the target.
fn best_pool_for_ring(
    ring: u64,
    p_min: u64,
    target_beta: f64,
) -> Result<Option<(u64, f64, bool)>, Error> {
    if p_min > POOL_SEARCH_CAP {
        return Ok(None);
    }
    let beta_min_pool = beta_of(p_min, ring)?;
    if beta_min_pool <= target_beta {
        // Even the densest admissible pool undershoots: P_min is closest.
        return Ok(Some((p_min, beta_min_pool, false)));
    }
    let beta_cap = beta_of(POOL_SEARCH_CAP, ring)?;
    if beta_cap >= target_beta {
        return Ok(Some((POOL_SEARCH_CAP, beta_cap, false)));
    }
    // Invariant: beta(lo) > target >= beta(hi).
    let (mut lo, mut hi) = (p_min, POOL_SEARCH_CAP);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if beta_of(mid, ring)? > target_beta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (beta_lo, beta_hi) = (beta_of(lo, ring)?, beta_of(hi, ring)?);
    let best = if (beta_lo - target_beta).abs() <= (beta_hi - target_beta).abs() {
        (lo, beta_lo, true)
    } else {
        (hi, beta_hi, true)
    };
    Ok(Some(best))
}

/// Integer `(ring, pool)` search minimizing `|beta - target_beta|` subject
/// to `pool >= max(2 ring, pool_floor)`.
fn solve_pool(
    target_beta: f64,
    pool_floor: u64,
    forced_ring: Option<u64>,
) -> Result<(KeyPoolParams, f64, bool), Error> {
    if let Some(1) = forced_ring {
        // Single-key rings: beta = 1/P exactly.
        let p = (1.0 / target_beta).round().max(2.0).min(POOL_SEARCH_CAP as f64) as u64;
        let p = p.max(pool_floor).max(2);
        let pool = KeyPoolParams::new(p, 1)?;
        return Ok((pool, 1.0 / p as f64, true));
    }
    let rings: Vec<u64> = match forced_ring {
        Some(k) => vec![k],
        None => (2..=RING_SEARCH_CAP).collect(),
    };
    let mut best: Option<(KeyPoolParams, f64, bool)> = None;
    for ring in rings {
        let p_min = pool_floor.max(2 * ring);
        let Some((p, beta, bracketed)) = best_pool_for_ring(ring, p_min, target_beta)? else {
            continue;
        };
        let err = (beta - target_beta).abs();
        let better = match &best {
            None => true,
            Some((_, b, _)) => err < (b - target_beta).abs(),
        };
        if better {
            best = Some((KeyPoolParams::new(p, ring)?, beta, bracketed));
        }
    }
    best.ok_or(Error::TargetOutOfRange(target_beta))
}

/// Turn a regime spec into concrete `(n, P, K, r)` parameters.
///
/// The radius comes from the density law and is snapped to the dual
/// tessellations' effective radius (so same-cell reachability is exact);
/// the integer `(K, P)` search then compensates by targeting
/// `beta = target_ab / (pi r^2)` through the exact link probability.
pub fn solve_regime(spec: &RegimeSpec) -> Result<SolvedRegime, Error> {
    spec.validate()?;
    let n = spec.n;
    let nf = n as f64;
    let log_n = nf.ln();

    // Requested radius from the density schedule (keys-only regimes span
    // the whole square so geometry never censors an edge).
    let density_requested = match spec.regime {
        Regime::RggOnly { c } => log_n + c,
        _ => spec.density_law.value(n),
    };
    let requested_radius = match spec.regime {
        Regime::RkgOnly { .. } => std::f64::consts::SQRT_2,
        _ => {
            if !(density_requested > 0.0 && density_requested <= 2.0 * PI * nf) {
                return Err(Error::DensityOutOfRange(density_requested));
            }
            (density_requested / (PI * nf)).sqrt()
        }
    };
    let duals = tessellation::make_dual_tessellations(requested_radius)?;
    let radius = duals.effective_radius.min(std::f64::consts::SQRT_2);
    let area = PI * radius * radius;
    let density = nf * area;

    let target_ab = match spec.regime {
        Regime::Critical { c1 } => (log_n + c1) / nf,
        Regime::Supercritical { margin } => {
            (2.0 * PI / (1.0 - spec.delta)) * (1.0 + margin) * log_n / nf
        }
        Regime::RggOnly { c } => (log_n + c) / nf,
        Regime::RkgOnly { c } => (log_n + c) / nf,
    };
    if !(target_ab > 0.0 && target_ab < 1.0) {
        return Err(Error::TargetOutOfRange(target_ab));
    }

    // The floor sigma n r^2 lands exactly on an integer in common cases
    // (e.g. r = sqrt(2)); shave one part in 10^12 before the ceiling so
    // floating-point residue in r^2 cannot inflate the integer floor.
    let scale_floor = spec.sigma * nf * radius * radius;
    let pool_floor = (scale_floor * (1.0 - 1e-12)).ceil().max(2.0) as u64;
    let (pool, achieved_beta, achieved_ab, feasible) = match spec.regime {
        Regime::RggOnly { .. } => {
            // No key constraint: beta plays no role; keep a minimal valid pool.
            let pool = KeyPoolParams::new(pool_floor.max(2), 1)?;
            (pool, 1.0, area, true)
        }
        Regime::RkgOnly { .. } => {
            let (pool, beta, feasible) = solve_pool(target_ab, pool_floor, spec.forced_ring)?;
            (pool, beta, beta, feasible)
        }
        _ => {
            let target_beta = target_ab / area;
            if !(target_beta > 0.0 && target_beta < 1.0) {
                return Err(Error::TargetOutOfRange(target_beta));
            }
            let (pool, beta, feasible) = solve_pool(target_beta, pool_floor, spec.forced_ring)?;
            (pool, beta, area * beta, feasible)
        }
    };

    let params = ModelParams::new(n, pool, radius, spec.boundary)?;
    let ring_sq_over_pool = (pool.ring * pool.ring) as f64 / pool.pool as f64;
    let key_regime = spec.edge_rule() != EdgeRule::GeometricOnly;
    let flags = RegimeFlags {
        // Geometry-only regimes ignore keys; their key hypotheses pass
        // vacuously.
        ring_at_least_two: !key_regime || pool.ring >= 2,
        pool_at_least_twice_ring: pool.pool >= 2 * pool.ring,
        pool_scales_with_n: pool.pool as f64 >= scale_floor * (1.0 - 1e-12),
        ring_sq_over_pool_bounded: ring_sq_over_pool <= RING_SQ_POOL_CEILING,
        density_superlogarithmic: density / log_n >= DENSITY_LOG_FLOOR,
        density_sublinear: density / nf <= DENSITY_LINEAR_CEILING,
        supercritical_margin_met: match spec.regime {
            Regime::Supercritical { .. } => Some(
                area * ring_sq_over_pool >= (2.0 * PI / (1.0 - spec.delta)) * log_n / nf,
            ),
            _ => None,
        },
    };
    Ok(SolvedRegime {
        spec: spec.clone(),
        params,
        edge_rule: spec.edge_rule(),
        duals,
        density,
        requested_radius,
        target_ab,
        achieved_beta,
        achieved_ab,
        achieved_ring_sq_over_pool: ring_sq_over_pool,
        relative_error: (achieved_ab - target_ab).abs() / target_ab,
        feasible,
        flags,
    })
}

/// Per-trial analysis switches.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrialOptions {
    pub delta: f64,
    pub theta: f64,
    /// Skip tessellation analysis entirely when false.
    pub collect_cells: bool,
}

impl Default for TrialOptions {
    fn default() -> Self {
        Self {
            delta: 0.5,
            theta: 0.5,
            collect_cells: true,
        }
    }
}

/// Everything observed in one seeded instance.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrialOutcome {
    pub seed: u64,
    pub is_connected: bool,
    pub isolated_nodes: usize,
    pub min_degree: usize,
    pub component_count: usize,
    pub largest_component: usize,
    pub cells: Option<DualConnectivity>,
    /// Wall-clock duration; informational only, excluded from determinism
    /// comparisons.
    pub wall_time_secs: f64,
}

impl TrialOutcome {
    /// `T1 and T2` when tessellation analysis ran.
    pub fn t1_and_t2(&self) -> Option<bool> {
        self.cells.as_ref().map(|c| c.t1 && c.t2)
    }

    /// The certificate direction: true unless `T1 and T2` held on a
    /// disconnected graph.
    pub fn implication_holds(&self) -> bool {
        self.cells
            .as_ref()
            .map_or(true, |c| !(c.t1 && c.t2) || c.graph_connected)
    }

    /// Fields that must be identical across reruns of the same seed.
    pub fn deterministic_view(&self) -> (u64, bool, usize, usize, usize, usize, &Option<DualConnectivity>) {
        (
            self.seed,
            self.is_connected,
            self.isolated_nodes,
            self.min_degree,
            self.component_count,
            self.largest_component,
            &self.cells,
        )
    }
}

/// Sample one instance, analyze connectivity, and (optionally) evaluate the
/// dual-tessellation certificate. Deterministic given `(params, edge_rule,
/// seed, options)`.
pub fn run_trial(
    params: &ModelParams,
    edge_rule: EdgeRule,
    seed: u64,
    options: &TrialOptions,
) -> Result<TrialOutcome, Error> {
    let start = Instant::now();
    let graph = graph::sample_graph(params, edge_rule, seed)?;
    let report = connectivity::analyze(&graph);
    let cells = if options.collect_cells {
        let duals = tessellation::make_dual_tessellations_with_theta(graph.radius, options.theta)?;
        Some(tessellation::dual_tessellation_connectivity(
            &graph,
            &duals,
            options.delta,
        )?)
    } else {
        None
    };
    Ok(TrialOutcome {
        seed,
        is_connected: report.is_connected,
        isolated_nodes: report.isolated_nodes,
        min_degree: report.min_degree,
        component_count: report.component_count,
        largest_component: report.largest_component,
        cells,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

/// Whether one fixed node is isolated in the instance, without building the
/// full graph. Samples the same positions and rings as [`run_trial`] with
/// the same seed.
pub fn isolated_node_trial(
    params: &ModelParams,
    edge_rule: EdgeRule,
    seed: u64,
    node: usize,
) -> Result<bool, Error> {
    let positions = graph::sample_positions(params.n, seed);
    let rings = graph::sample_key_rings(params.n, &params.pool, seed)?;
    for j in 0..params.n {
        if j != node
            && graph::pair_adjacent(
                &positions,
                &rings,
                params.radius,
                params.boundary,
                edge_rule,
                node,
                j,
            )
        {
            return Ok(false);
        }
    }
    Ok(true)
}

pub const Z95: f64 = 1.959963984540054;
pub const Z99: f64 = 2.5758293035489004;

/// Wilson score interval for `successes` out of `trials`, clamped to [0,1].
/// At the extremes the score equation has exact endpoints (lower 0 at zero
/// successes, upper 1 at all successes), which are returned without
/// floating-point residue so the interval always contains the frequency.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    debug_assert!(trials >= 1 && successes <= trials);
    let nf = trials.max(1) as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    let lower = if successes == 0 {
        0.0
    } else {
        (center - half).clamp(0.0, p)
    };
    let upper = if successes == trials {
        1.0
    } else {
        (center + half).clamp(p, 1.0)
    };
    (lower, upper)
}

/// A binomial frequency with its Wilson intervals.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Estimate {
    pub successes: u64,
    pub trials: u64,
    pub frequency: f64,
    pub wilson95: (f64, f64),
    pub wilson99: (f64, f64),
}

impl Estimate {
    pub fn from_counts(successes: u64, trials: u64) -> Result<Self, Error> {
        if trials == 0 {
            return Err(Error::EmptyOutcomeSet);
        }
        Ok(Self {
            successes,
            trials,
            frequency: successes as f64 / trials as f64,
            wilson95: wilson_interval(successes, trials, Z95),
            wilson99: wilson_interval(successes, trials, Z99),
        })
    }

    pub fn width95(&self) -> f64 {
        self.wilson95.1 - self.wilson95.0
    }

    /// Whether `p` lies inside the 95% interval.
    pub fn covers95(&self, p: f64) -> bool {
        self.wilson95.0 <= p && p <= self.wilson95.1
    }

    /// Whether `p` lies inside the 99% interval.
    pub fn covers99(&self, p: f64) -> bool {
        self.wilson99.0 <= p && p <= self.wilson99.1
    }
}

/// Frequency of `predicate` over outcomes, with Wilson 95%/99% intervals.
pub fn estimate<T, F: Fn(&T) -> bool>(outcomes: &[T], predicate: F) -> Result<Estimate, Error> {
    if outcomes.is_empty() {
        return Err(Error::EmptyOutcomeSet);
    }
    let successes = outcomes.iter().filter(|o| predicate(o)).count() as u64;
    Estimate::from_counts(successes, outcomes.len() as u64)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Trial seed as a pure function of `(base, point key, trial index)`.
/// Points are keyed by content (see [`point_key`]), so reordering a grid
/// never changes any per-point stream.
pub fn derive_seed(base: u64, point: u64, trial: u64) -> u64 {
    let mut h = splitmix64(base);
    h = splitmix64(h ^ splitmix64(point));
    splitmix64(h ^ splitmix64(trial))
}

fn mix_field(h: u64, field: u64) -> u64 {
    splitmix64(h ^ splitmix64(field))
}

/// Content hash of a spec: two equal specs share trial seeds no matter
/// where they sit in a grid.
pub fn point_key(spec: &RegimeSpec) -> u64 {
    let mut h = mix_field(0x524B_4752_4747_0001, spec.n as u64);
    let (tag, value) = match spec.regime {
        Regime::Critical { c1 } => (1u64, c1),
        Regime::Supercritical { margin } => (2, margin),
        Regime::RggOnly { c } => (3, c),
        Regime::RkgOnly { c } => (4, c),
    };
    h = mix_field(h, tag);
    h = mix_field(h, value.to_bits());
    let (law_tag, law_value) = match spec.density_law {
        DensityLaw::LogPower { exponent } => (1u64, exponent),
        DensityLaw::Absolute { value } => (2, value),
    };
    h = mix_field(h, law_tag);
    h = mix_field(h, law_value.to_bits());
    h = mix_field(h, spec.sigma.to_bits());
    h = mix_field(h, spec.delta.to_bits());
    h = mix_field(h, matches!(spec.boundary, Boundary::Torus) as u64);
    mix_field(h, spec.forced_ring.map_or(u64::MAX, |k| k))
}

/// Integer tallies for one sweep point; merging is commutative and
/// associative, so parallel schedules cannot change totals.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
struct PointTally {
    trials: u64,
    disconnected: u64,
    any_isolated: u64,
    t1_and_t2: u64,
    implication_violations: u64,
    not_dense_full_cells: u64,
    full_cell_observations: u64,
}

impl PointTally {
    fn from_outcome(outcome: &TrialOutcome) -> Self {
        let mut tally = PointTally {
            trials: 1,
            disconnected: (!outcome.is_connected) as u64,
            any_isolated: (outcome.isolated_nodes > 0) as u64,
            t1_and_t2: matches!(outcome.t1_and_t2(), Some(true)) as u64,
            implication_violations: (!outcome.implication_holds()) as u64,
            ..Default::default()
        };
        if let Some(cells) = &outcome.cells {
            tally.not_dense_full_cells = cells.first.not_dense_cells() as u64;
            tally.full_cell_observations = cells.first.full_cells() as u64;
        }
        tally
    }

    fn merge(self, other: Self) -> Self {
        PointTally {
            trials: self.trials + other.trials,
            disconnected: self.disconnected + other.disconnected,
            any_isolated: self.any_isolated + other.any_isolated,
            t1_and_t2: self.t1_and_t2 + other.t1_and_t2,
            implication_violations: self.implication_violations + other.implication_violations,
            not_dense_full_cells: self.not_dense_full_cells + other.not_dense_full_cells,
            full_cell_observations: self.full_cell_observations + other.full_cell_observations,
        }
    }
}

/// Execution knobs for a sweep.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SweepOptions {
    pub trials: u64,
    pub base_seed: u64,
    /// 0 means "use [`default_workers`]".
    pub workers: usize,
    pub delta: f64,
    pub theta: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            trials: 100,
            base_seed: 0,
            workers: 0,
            delta: 0.5,
            theta: 0.5,
        }
    }
}

/// One aggregated sweep point.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SweepRow {
    pub solved: SolvedRegime,
    pub trials: u64,
    pub disconnected: Estimate,
    pub any_isolated: Estimate,
    pub t1_and_t2: Estimate,
    pub implication_counterexamples: u64,
    /// Not-dense observations over full cells of the aligned tessellation,
    /// summed across trials.
    pub not_dense_full_cells: u64,
    pub full_cell_observations: u64,
    /// `exp(-c1)/4` for critical points.
    pub bound_floor: Option<f64>,
    /// Per-cell two-sided Chernoff bound at the solved cell side.
    pub bound_denseness: f64,
    pub bound_cell_isolation: CellIsolationBound,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SweepResult {
    pub base_seed: u64,
    pub rows: Vec<SweepRow>,
}

/// Worker count: `RKGRGG_WORKERS` if set to a positive integer, else the
/// machine's available parallelism.
pub fn default_workers() -> usize {
    std::env::var("RKGRGG_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&w| w >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

fn build_row(solved: SolvedRegime, tally: PointTally, delta: f64) -> Result<SweepRow, Error> {
    let n = solved.params.n;
    let disconnected = Estimate::from_counts(tally.disconnected, tally.trials)?;
    let any_isolated = Estimate::from_counts(tally.any_isolated, tally.trials)?;
    let t1_and_t2 = Estimate::from_counts(tally.t1_and_t2, tally.trials)?;
    let bound_floor = match solved.spec.regime {
        Regime::Critical { c1 } => Some(bounds::disconnect_floor(c1)),
        _ => None,
    };
    let bound_denseness =
        bounds::denseness_bound(n, solved.duals.first.cell_side, delta)?.per_cell;
    let alpha = solved.achieved_ab * n as f64 / (n as f64).ln();
    let bound_cell_isolation = bounds::cell_isolation_bound(n, alpha, delta)?;
    Ok(SweepRow {
        solved,
        trials: tally.trials,
        disconnected,
        any_isolated,
        t1_and_t2,
        implication_counterexamples: tally.implication_violations,
        not_dense_full_cells: tally.not_dense_full_cells,
        full_cell_observations: tally.full_cell_observations,
        bound_floor,
        bound_denseness,
        bound_cell_isolation,
    })
}

/// Solve every grid point, run `trials` seeded instances per point, and
/// aggregate. Per-point numbers are invariant to worker count and grid
/// order.
pub fn sweep(grid: &[RegimeSpec], options: &SweepOptions) -> Result<SweepResult, Error> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if options.trials == 0 {
        return Err(Error::NoTrials);
    }
    let workers = if options.workers == 0 {
        default_workers()
    } else {
        options.workers
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::WorkerPool(e.to_string()))?;
    let trial_options = TrialOptions {
        delta: options.delta,
        theta: options.theta,
        collect_cells: true,
    };
    let mut rows = Vec::with_capacity(grid.len());
    for spec in grid {
        let solved = solve_regime(spec)?;
        let key = point_key(spec);
        let (params, edge_rule) = (solved.params, solved.edge_rule);
        let tally = pool.install(|| {
            (0..options.trials)
                .into_par_iter()
                .map(|t| {
                    let seed = derive_seed(options.base_seed, key, t);
                    run_trial(&params, edge_rule, seed, &trial_options)
                        .map(|outcome| PointTally::from_outcome(&outcome))
                })
                .try_reduce(PointTally::default, |a, b| Ok(a.merge(b)))
        })?;
        rows.push(build_row(solved, tally, options.delta)?);
    }
    Ok(SweepResult {
        base_seed: options.base_seed,
        rows,
    })
}
