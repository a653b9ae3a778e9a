//! Closed-form probability bounds on isolation, disconnection, denseness,
//! and small components.
//!
//! Each evaluator returns the bound value together with its log form (the
//! natural scale for the exponentially small regime) and flags parameter
//! combinations where a bound is vacuous instead of rejecting them: the
//! harness compares every bound against Monte Carlo estimates, including
//! outside a bound's sweet spot.

use std::f64::consts::PI;

use thiserror::Error;

use crate::combinatorics::{self, exp_sandwich, ExpSandwich, KeyPoolParams};
use crate::graph::{distance, Boundary, Point};

#[derive(Debug, Error, PartialEq)]
pub enum Error {
    #[error("expected a probability mass in (0,1), got {0}")]
    MassOutOfRange(f64),
    #[error("node count must be at least {required}, got {got}")]
    TooFewNodes { got: usize, required: usize },
    #[error("log n + c1 = {0} must stay below n = {1}")]
    CriticalScaleTooLarge(f64, usize),
    #[error("epsilon must lie in (0,1), got {0}")]
    EpsilonOutOfRange(f64),
    #[error("delta must lie in (0,1), got {0}")]
    DeltaOutOfRange(f64),
    #[error("cell side must lie in (0,1], got {0}")]
    CellSideOutOfRange(f64),
    #[error("beta must lie in [0,1], got {0}")]
    BetaOutOfRange(f64),
    #[error("radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("distance must be nonnegative, got {0}")]
    InvalidDistance(f64),
    #[error("component size l must satisfy 1 <= l <= occupancy/2, got l={l}, occupancy={occupancy}")]
    ComponentSizeOutOfRange { l: u64, occupancy: u64 },
    #[error("distinct-key count x must satisfy ring <= x <= min(l*ring, pool), got x={x}")]
    DistinctKeysOutOfRange { x: u64 },
    #[error(transparent)]
    Combinatorics(#[from] combinatorics::Error),
}

/// Probability that one fixed node is isolated: `(1 - a*beta)^(n-1)`,
/// with its exponential sandwich.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SingleIsolation {
    pub probability: f64,
    pub sandwich: ExpSandwich,
}

pub fn single_isolation_probability(n: usize, ab: f64) -> Result<SingleIsolation, Error> {
    if n < 2 {
        return Err(Error::TooFewNodes { got: n, required: 2 });
    }
    if !(ab > 0.0 && ab < 1.0) {
        return Err(Error::MassOutOfRange(ab));
    }
    let sandwich = exp_sandwich(ab, (n - 1) as f64)?;
    Ok(SingleIsolation {
        probability: sandwich.value(),
        sandwich,
    })
}

/// Lower bound on `n * P{fixed node isolated}` in the critical scaling
/// `a*beta = (log n + c1)/n`:
///
/// `exp(-c1) * exp(-(log n + c1)^2 / (n - (log n + c1)))`
pub fn scaled_isolation_lower_bound(n: usize, c1: f64) -> Result<f64, Error> {
    if n < 2 {
        return Err(Error::TooFewNodes { got: n, required: 2 });
    }
    let t = (n as f64).ln() + c1;
    if t >= n as f64 {
        return Err(Error::CriticalScaleTooLarge(t, n));
    }
    if !(t > 0.0) {
        return Err(Error::MassOutOfRange(t / n as f64));
    }
    Ok((-c1).exp() * (-(t * t) / (n as f64 - t)).exp())
}

/// Distance regime of a node pair relative to the radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsolationCase {
    /// `d > 2r`: neighborhoods disjoint.
    Far,
    /// `r <= d <= 2r`: neighborhoods overlap, the pair itself out of range.
    Mid,
    /// `d < r`: the pair is within range of each other.
    Near,
}

impl IsolationCase {
    pub fn from_distance(d: f64, radius: f64) -> Self {
        if d < radius {
            IsolationCase::Near
        } else if d <= 2.0 * radius {
            IsolationCase::Mid
        } else {
            IsolationCase::Far
        }
    }
}

/// Geometry of two radius-`r` disks at distance `d`: the regions covered by
/// exactly one disk, both, or neither, with areas from the lens formula and
/// optional node counts filled in from an instance.
///
/// On the torus the areas are exact whenever `d + 2r <= 1` (a single lens);
/// on the square they ignore border clipping. The area identity
/// `first + second + both + neither = 1` holds by construction; it is a
/// true partition only on the torus.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IsolationGeometry {
    pub distance: f64,
    pub radius: f64,
    pub case: IsolationCase,
    pub area_first_only: f64,
    pub area_second_only: f64,
    pub area_both: f64,
    pub area_neither: f64,
    pub count_first_only: usize,
    pub count_second_only: usize,
    pub count_both: usize,
    pub count_neither: usize,
}

/// Area of the intersection of two radius-`r` disks at center distance `d`.
pub fn lens_area(d: f64, r: f64) -> f64 {
    if d >= 2.0 * r {
        return 0.0;
    }
    2.0 * r * r * (d / (2.0 * r)).acos() - 0.5 * d * (4.0 * r * r - d * d).sqrt()
}

impl IsolationGeometry {
    pub fn from_distance(distance: f64, radius: f64) -> Result<Self, Error> {
        if !(radius > 0.0) {
            return Err(Error::InvalidRadius(radius));
        }
        if !(distance >= 0.0) {
            return Err(Error::InvalidDistance(distance));
        }
        let disk = PI * radius * radius;
        let both = lens_area(distance, radius);
        let first_only = disk - both;
        let neither = 1.0 - 2.0 * first_only - both;
        Ok(Self {
            distance,
            radius,
            case: IsolationCase::from_distance(distance, radius),
            area_first_only: first_only,
            area_second_only: first_only,
            area_both: both,
            area_neither: neither,
            count_first_only: 0,
            count_second_only: 0,
            count_both: 0,
            count_neither: 0,
        })
    }

    /// Classify every node other than `i` and `j` by which of the two
    /// disks (centered at nodes `i` and `j`) contains it.
    pub fn classify(
        positions: &[Point],
        i: usize,
        j: usize,
        radius: f64,
        boundary: Boundary,
    ) -> Result<Self, Error> {
        let d = distance(positions[i], positions[j], boundary);
        let mut geometry = Self::from_distance(d, radius)?;
        for (k, &p) in positions.iter().enumerate() {
            if k == i || k == j {
                continue;
            }
            let near_i = distance(p, positions[i], boundary) <= radius;
            let near_j = distance(p, positions[j], boundary) <= radius;
            match (near_i, near_j) {
                (true, true) => geometry.count_both += 1,
                (true, false) => geometry.count_first_only += 1,
                (false, true) => geometry.count_second_only += 1,
                (false, false) => geometry.count_neither += 1,
            }
        }
        Ok(geometry)
    }
}

/// Upper bound on the probability that two fixed nodes at a given distance
/// regime are both isolated.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct JointIsolationBound {
    pub case: IsolationCase,
    /// `|beta_tilde/beta - 2|`: how far the double-link probability is from
    /// its small-ring limit.
    pub gamma: f64,
    pub log_value: f64,
    pub value: f64,
}

/// Far pairs: exactly `(1 - 2 a beta)^(n-2)`. Mid and near pairs:
/// `exp(-(n-2) (2 - gamma) a beta)`.
pub fn joint_isolation_bound(
    n: usize,
    area: f64,
    pool: &KeyPoolParams,
    case: IsolationCase,
) -> Result<JointIsolationBound, Error> {
    if n < 2 {
        return Err(Error::TooFewNodes { got: n, required: 2 });
    }
    let beta = combinatorics::link_probability(pool)?.value;
    let gamma = combinatorics::beta_ratio_gap(pool)?.abs();
    let ab = area * beta;
    if !(ab > 0.0 && ab < 1.0) {
        return Err(Error::MassOutOfRange(ab));
    }
    let log_value = match case {
        IsolationCase::Far => {
            if 2.0 * ab >= 1.0 {
                return Err(Error::MassOutOfRange(2.0 * ab));
            }
            (n - 2) as f64 * f64::ln_1p(-2.0 * ab)
        }
        IsolationCase::Mid | IsolationCase::Near => -((n - 2) as f64) * (2.0 - gamma) * ab,
    };
    Ok(JointIsolationBound {
        case,
        gamma,
        log_value,
        value: log_value.exp(),
    })
}

/// Lower bound on the disconnection probability in the critical scaling
/// `a*beta = (log n + c1)/n`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DisconnectBound {
    /// Finite-n expression via inclusion-exclusion over isolated nodes.
    pub finite_n: f64,
    /// Asymptotic floor `exp(-c1)/4`.
    pub floor: f64,
    /// True when the finite-n expression is nonpositive (n too small for
    /// the second-moment terms to be controlled).
    pub vacuous: bool,
}

/// The asymptotic disconnection floor `exp(-c1)/4` alone.
pub fn disconnect_floor(c1: f64) -> f64 {
    (-c1).exp() / 4.0
}

pub fn disconnect_lower_bound(n: usize, c1: f64, epsilon: f64) -> Result<DisconnectBound, Error> {
    if n < 3 {
        return Err(Error::TooFewNodes { got: n, required: 3 });
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    let nf = n as f64;
    let t = nf.ln() + c1;
    if t >= nf {
        return Err(Error::CriticalScaleTooLarge(t, n));
    }
    let first_moment = (-(t * t) / (nf - t)).exp();
    let pair_term = (-c1 + 4.0 * t / nf).exp() / 2.0;
    let residual = (2.0 * c1).exp() / nf.powf(epsilon);
    let finite_n = (-c1).exp() * (first_moment - pair_term - residual);
    Ok(DisconnectBound {
        finite_n,
        floor: disconnect_floor(c1),
        vacuous: finite_n <= 0.0,
    })
}

/// Chernoff bounds on a cell being non-dense.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DensenessBound {
    /// `P{count <= (1-delta) n s^2} <= exp(-n s^2 delta^2 / 2)`.
    pub lower_tail: f64,
    /// `P{count >= (1+delta) n s^2} <= exp(-n s^2 delta^2 / 4)`.
    pub upper_tail: f64,
    /// Two-sided per-cell bound `2 exp(-n s^2 delta^2 / 4)`.
    pub per_cell: f64,
    pub cells: u64,
    /// Union bound over all `1/s^2` cells; may exceed 1 (vacuous).
    pub union: f64,
}

pub fn denseness_bound(n: usize, cell_side: f64, delta: f64) -> Result<DensenessBound, Error> {
    if n == 0 {
        return Err(Error::TooFewNodes { got: 0, required: 1 });
    }
    if !(cell_side > 0.0 && cell_side <= 1.0) {
        return Err(Error::CellSideOutOfRange(cell_side));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    let mass = n as f64 * cell_side * cell_side * delta * delta;
    let lower_tail = (-mass / 2.0).exp();
    let upper_tail = (-mass / 4.0).exp();
    let per_cell = 2.0 * upper_tail;
    let g = (1.0 / cell_side).round() as u64;
    let cells = g * g;
    Ok(DensenessBound {
        lower_tail,
        upper_tail,
        per_cell,
        cells,
        union: cells as f64 * per_cell,
    })
}

/// Parameters of the small-component bound inside one dense cell.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ComponentBoundParams {
    /// Node count of the cell (`floor(N_i)`).
    pub occupancy: u64,
    /// Component size `l`.
    pub component_size: u64,
    /// Threshold `x` on the number of distinct keys held by the component.
    pub distinct_keys: u64,
    pub pool: KeyPoolParams,
    pub beta: f64,
}

/// Upper bound on the probability that a fixed `l`-subset of a cell with
/// key-ring-decided edges forms a connected component:
///
/// `C(P,x) (x/P)^(lK) e^(-(N-l) K^2/P)
///  + l^(l-2) beta^(l-1) e^(-(N-l) K (x+1)/P)`
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ComponentBound {
    pub few_keys_log: f64,
    pub spanning_tree_log: f64,
    pub value: f64,
}

pub fn component_bound(params: &ComponentBoundParams) -> Result<ComponentBound, Error> {
    let ComponentBoundParams {
        occupancy,
        component_size: l,
        distinct_keys: x,
        pool,
        beta,
    } = *params;
    if l < 1 || 2 * l > occupancy {
        return Err(Error::ComponentSizeOutOfRange { l, occupancy });
    }
    let (p, k) = (pool.pool, pool.ring);
    if x < k || x > (l * k).min(p) {
        return Err(Error::DistinctKeysOutOfRange { x });
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::BetaOutOfRange(beta));
    }
    let (pf, kf, lf, xf) = (p as f64, k as f64, l as f64, x as f64);
    let outside = (occupancy - l) as f64;
    let few_keys_log = combinatorics::log_binomial(p, x)?
        + lf * kf * (xf / pf).ln()
        - outside * kf * kf / pf;
    let spanning_tree_log = if l == 1 {
        -outside * kf * (xf + 1.0) / pf
    } else {
        // beta = 0 sends the log to -inf and the term to 0.
        (lf - 2.0) * lf.ln() + (lf - 1.0) * beta.ln() - outside * kf * (xf + 1.0) / pf
    };
    Ok(ComponentBound {
        few_keys_log,
        spanning_tree_log,
        value: few_keys_log.exp() + spanning_tree_log.exp(),
    })
}

/// Upper bound on the probability that some dense cell contains an isolated
/// node when `n pi r^2 beta = alpha log n`:
///
/// `n^(-(alpha (1-delta) / (2 pi) - 1) / 2)`
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CellIsolationBound {
    pub exponent: f64,
    pub value: f64,
    /// True when `alpha <= 2 pi / (1 - delta)`, where the bound is at
    /// least 1 and says nothing.
    pub vacuous: bool,
}

pub fn cell_isolation_bound(n: usize, alpha: f64, delta: f64) -> Result<CellIsolationBound, Error> {
    if n < 2 {
        return Err(Error::TooFewNodes { got: n, required: 2 });
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    if !(alpha > 0.0) {
        return Err(Error::MassOutOfRange(alpha));
    }
    let factor = alpha * (1.0 - delta) / (2.0 * PI);
    let exponent = -(factor - 1.0) / 2.0;
    Ok(CellIsolationBound {
        exponent,
        value: (n as f64).powf(exponent),
        vacuous: factor <= 1.0,
    })
}

/// Constants of the supercritical (sufficiency) argument.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SufficiencyConstants {
    pub sigma: f64,
    pub lambda: f64,
    pub mu: f64,
    pub delta: f64,
    /// Key-threshold multiplier: components are split on holding more or
    /// fewer than `R * ring` distinct keys.
    pub big_r: f64,
    pub epsilon: f64,
    /// Edge-density multiplier in `n pi r^2 beta = alpha log n`.
    pub alpha: f64,
}

impl SufficiencyConstants {
    /// `Gamma(eps) = exp((1+eps)/(1-eps)) (1+eps)`, the constant absorbing
    /// the denseness fluctuation.
    pub fn gamma_eps(&self) -> f64 {
        ((1.0 + self.epsilon) / (1.0 - self.epsilon)).exp() * (1.0 + self.epsilon)
    }

    /// Largest component size the per-cell bound must cover:
    /// `min(floor(occupancy/2), floor(pool/ring) - 1)`.
    pub fn l1(&self, occupancy: u64, pool: &KeyPoolParams) -> u64 {
        (occupancy / 2).min(pool.pool / pool.ring - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    Less,
    Greater,
    GreaterOrEqual,
}

impl Comparison {
    fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            Comparison::Less => lhs < rhs,
            Comparison::Greater => lhs > rhs,
            Comparison::GreaterOrEqual => lhs >= rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::Less => "<",
            Comparison::Greater => ">",
            Comparison::GreaterOrEqual => ">=",
        }
    }
}

/// One evaluated inequality with both sides.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ConstraintCheck {
    pub name: String,
    pub lhs: f64,
    pub comparison: Comparison,
    pub rhs: f64,
    pub satisfied: bool,
}

fn check(name: &str, lhs: f64, comparison: Comparison, rhs: f64) -> ConstraintCheck {
    ConstraintCheck {
        name: name.to_owned(),
        lhs,
        comparison,
        rhs,
        satisfied: comparison.holds(lhs, rhs),
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SufficiencyReport {
    pub checks: Vec<ConstraintCheck>,
    pub all_satisfied: bool,
}

/// Evaluate every inequality the supercritical constants must satisfy,
/// reporting both sides of each. Violations are reported, never errors:
/// the caller decides whether a sweep point is in-regime.
pub fn sufficiency_constants_check(
    constants: &SufficiencyConstants,
    pool: &KeyPoolParams,
) -> SufficiencyReport {
    let c = constants;
    let (pf, kf) = (pool.pool as f64, pool.ring as f64);
    let ln2 = std::f64::consts::LN_2;
    let mut checks = vec![
        check("delta > 0", c.delta, Comparison::Greater, 0.0),
        check("delta < 1", c.delta, Comparison::Less, 1.0),
        check("mu > 0", c.mu, Comparison::Greater, 0.0),
        check("mu < 0.44", c.mu, Comparison::Less, 0.44),
        check("lambda > 0", c.lambda, Comparison::Greater, 0.0),
        check("lambda < 1/2", c.lambda, Comparison::Less, 0.5),
        check("epsilon > 0", c.epsilon, Comparison::Greater, 0.0),
        check("epsilon < 1", c.epsilon, Comparison::Less, 1.0),
        check("sigma > 0", c.sigma, Comparison::Greater, 0.0),
        check(
            "lambda R > alpha (1-delta) / (2 pi)",
            c.lambda * c.big_r,
            Comparison::Greater,
            c.alpha * (1.0 - c.delta) / (2.0 * PI),
        ),
        check(
            "ring > 2 ln2 / mu",
            kf,
            Comparison::Greater,
            2.0 * ln2 / c.mu,
        ),
        check(
            "sigma >= (1+delta) ln2 / (mu - (1+mu) ln mu)",
            c.sigma,
            Comparison::GreaterOrEqual,
            (1.0 + c.delta) * ln2 / (c.mu - (1.0 + c.mu) * c.mu.ln()),
        ),
    ];
    // Both product constraints are evaluated in the log domain to survive
    // large rings, then reported on the linear scale.
    let log_lhs_a = 2.0 + kf * kf / pf + (1.0 + c.delta).ln() - (kf - 2.0) * ln2 - c.sigma.ln();
    checks.push(check(
        "exp(2 + K^2/P) (1+delta) / (2^(K-2) sigma) < 1",
        log_lhs_a.exp(),
        Comparison::Less,
        1.0,
    ));
    let log_lhs_b = kf / pf
        + c.lambda * (2.0 + (1.0 + c.delta).ln() - c.sigma.ln())
        + (1.0 - 2.0 * c.lambda) * c.lambda.ln();
    checks.push(check(
        "exp(K/P) (e^2 (1+delta)/sigma)^lambda lambda^(1-2 lambda) < 1",
        log_lhs_b.exp(),
        Comparison::Less,
        1.0,
    ));
    let all_satisfied = checks.iter().all(|c| c.satisfied);
    SufficiencyReport {
        checks,
        all_satisfied,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::sample_positions;

    #[test]
    fn single_isolation_matches_closed_form() {
        let iso = single_isolation_probability(500, 0.01).unwrap();
        assert!((iso.probability - 0.99_f64.powi(499)).abs() < 1e-12);
        assert!(iso.sandwich.is_strictly_ordered());
        assert!(matches!(
            single_isolation_probability(500, 1.0),
            Err(Error::MassOutOfRange(_))
        ));
        assert!(matches!(
            single_isolation_probability(1, 0.5),
            Err(Error::TooFewNodes { .. })
        ));
    }

    #[test]
    fn scaled_isolation_lower_bound_approaches_exp_neg_c1() {
        // n P{Z_1} >= e^{-c1} (1 - o(1)); at n = 1e6 the correction factor
        // is within 0.1% of 1.
        let lb = scaled_isolation_lower_bound(1_000_000, 1.0).unwrap();
        let limit = (-1.0_f64).exp();
        assert!(lb < limit);
        assert!(lb > limit * 0.999);
        // And the bound is a true lower bound on n (1-ab)^{n-1}.
        for &n in &[100usize, 1000, 10_000] {
            let ab = ((n as f64).ln() + 1.0) / n as f64;
            let exact = n as f64 * (1.0 - ab).powi(n as i32 - 1);
            let bound = scaled_isolation_lower_bound(n, 1.0).unwrap();
            assert!(bound <= exact, "n={n}: {bound} > {exact}");
        }
    }

    #[test]
    fn isolation_case_boundaries() {
        assert_eq!(IsolationCase::from_distance(0.05, 0.1), IsolationCase::Near);
        assert_eq!(IsolationCase::from_distance(0.1, 0.1), IsolationCase::Mid);
        assert_eq!(IsolationCase::from_distance(0.2, 0.1), IsolationCase::Mid);
        assert_eq!(IsolationCase::from_distance(0.21, 0.1), IsolationCase::Far);
    }

    #[test]
    fn lens_area_endpoints() {
        let r = 0.1;
        assert!((lens_area(0.0, r) - PI * r * r).abs() < 1e-15);
        assert_eq!(lens_area(2.0 * r, r), 0.0);
        assert_eq!(lens_area(0.5, r), 0.0);
        // Monotone decreasing in d.
        let mut last = f64::INFINITY;
        for step in 0..=20 {
            let d = 2.0 * r * step as f64 / 20.0;
            let a = lens_area(d, r);
            assert!(a <= last);
            last = a;
        }
    }

    #[test]
    fn isolation_geometry_partitions_torus() {
        for &(d, r) in &[(0.05, 0.1), (0.15, 0.1), (0.25, 0.1), (0.0, 0.2)] {
            let g = IsolationGeometry::from_distance(d, r).unwrap();
            assert!((g.area_first_only - g.area_second_only).abs() < 1e-15);
            let total = g.area_first_only + g.area_second_only + g.area_both + g.area_neither;
            assert!((total - 1.0).abs() < 1e-12);
            assert!(g.area_both >= 0.0 && g.area_first_only >= 0.0);
            if g.case == IsolationCase::Far {
                assert_eq!(g.area_both, 0.0);
            }
        }
    }

    #[test]
    fn classify_counts_every_other_node() {
        let positions = sample_positions(50, 21);
        let g = IsolationGeometry::classify(&positions, 0, 1, 0.2, Boundary::Torus).unwrap();
        assert_eq!(
            g.count_first_only + g.count_second_only + g.count_both + g.count_neither,
            48
        );
    }

    #[test]
    fn joint_isolation_far_pair_of_two_nodes_is_certain() {
        let pool = KeyPoolParams::new(8, 2).unwrap();
        let b = joint_isolation_bound(2, 0.1, &pool, IsolationCase::Far).unwrap();
        assert_eq!(b.value, 1.0);
    }

    #[test]
    fn joint_isolation_bound_cases() {
        let pool = KeyPoolParams::new(1000, 10).unwrap();
        let beta = combinatorics::link_probability(&pool).unwrap().value;
        let far = joint_isolation_bound(100, 0.1, &pool, IsolationCase::Far).unwrap();
        assert!((far.value - (1.0 - 2.0 * 0.1 * beta).powi(98)).abs() < 1e-12);
        let mid = joint_isolation_bound(100, 0.1, &pool, IsolationCase::Mid).unwrap();
        let expected = (-(98.0) * (2.0 - mid.gamma) * 0.1 * beta).exp();
        assert!((mid.value - expected).abs() < 1e-12);
        assert!(mid.gamma < 0.31, "gamma should be small, got {}", mid.gamma);
        let near = joint_isolation_bound(100, 0.1, &pool, IsolationCase::Near).unwrap();
        assert_eq!(mid.value, near.value);
    }

    #[test]
    fn disconnect_floor_at_unit_c1() {
        let b = disconnect_lower_bound(10_000, 1.0, 0.5).unwrap();
        assert!((b.floor - 0.25 * (-1.0_f64).exp()).abs() < 1e-15);
        assert!((b.floor - 0.09196986029286058).abs() < 1e-15);
        // Large n: finite-n expression approaches e^{-c1}(1 - e^{-c1}/2) > floor.
        let big = disconnect_lower_bound(100_000_000, 1.0, 0.5).unwrap();
        assert!(!big.vacuous);
        assert!(big.finite_n > big.floor);
        // Tiny n: the pair and residual terms swamp the first moment.
        let tiny = disconnect_lower_bound(10, 1.0, 0.5).unwrap();
        assert!(tiny.vacuous);
    }

    #[test]
    fn denseness_bound_reference_value() {
        // n s^2 = 100, delta = 0.5: per-cell bound 2 exp(-6.25).
        let b = denseness_bound(1600, 0.25, 0.5).unwrap();
        assert!((b.per_cell - 2.0 * (-6.25_f64).exp()).abs() < 1e-15);
        assert!((b.per_cell - 3.8609082724554186e-3).abs() < 1e-12);
        assert_eq!(b.cells, 16);
        assert!((b.union - 16.0 * b.per_cell).abs() < 1e-15);
        assert!(b.lower_tail < b.upper_tail);
    }

    #[test]
    fn component_bound_single_node_case() {
        let pool = KeyPoolParams::new(100, 5).unwrap();
        let b = component_bound(&ComponentBoundParams {
            occupancy: 20,
            component_size: 1,
            distinct_keys: 5,
            pool,
            beta: 0.5,
        })
        .unwrap();
        // l = 1: spanning-tree factor collapses to the exponential alone.
        assert!((b.spanning_tree_log - (-(19.0) * 5.0 * 6.0 / 100.0)).abs() < 1e-12);
        assert!(b.value > 0.0);
    }

    #[test]
    fn component_bound_zero_beta_kills_tree_term() {
        let pool = KeyPoolParams::new(100, 5).unwrap();
        let b = component_bound(&ComponentBoundParams {
            occupancy: 20,
            component_size: 2,
            distinct_keys: 5,
            pool,
            beta: 0.0,
        })
        .unwrap();
        assert_eq!(b.spanning_tree_log, f64::NEG_INFINITY);
        assert_eq!(b.value, b.few_keys_log.exp());
    }

    #[test]
    fn component_bound_validates_domain() {
        let pool = KeyPoolParams::new(100, 5).unwrap();
        let base = ComponentBoundParams {
            occupancy: 20,
            component_size: 11,
            distinct_keys: 5,
            pool,
            beta: 0.5,
        };
        assert!(matches!(
            component_bound(&base),
            Err(Error::ComponentSizeOutOfRange { .. })
        ));
        assert!(matches!(
            component_bound(&ComponentBoundParams {
                component_size: 2,
                distinct_keys: 4,
                ..base
            }),
            Err(Error::DistinctKeysOutOfRange { .. })
        ));
        assert!(matches!(
            component_bound(&ComponentBoundParams {
                component_size: 2,
                distinct_keys: 11,
                ..base
            }),
            Err(Error::DistinctKeysOutOfRange { .. })
        ));
    }

    #[test]
    fn cell_isolation_bound_flags_vacuous_region() {
        // alpha = 8 pi, delta = 0.5: exponent -(2-1)/2 = -1/2.
        let b = cell_isolation_bound(10_000, 8.0 * PI, 0.5).unwrap();
        assert!(!b.vacuous);
        assert!((b.exponent + 0.5).abs() < 1e-12);
        assert!((b.value - 0.01).abs() < 1e-12);
        let v = cell_isolation_bound(10_000, 2.0 * PI, 0.5).unwrap();
        assert!(v.vacuous);
        assert!(v.value >= 1.0);
    }

    #[test]
    fn sufficiency_constants_satisfiable_assignment() {
        let constants = SufficiencyConstants {
            sigma: 0.7,
            lambda: 0.1,
            mu: 0.4,
            delta: 0.5,
            big_r: 25.0,
            epsilon: 0.5,
            alpha: 8.0 * PI,
        };
        let pool = KeyPoolParams::new(1000, 10).unwrap();
        let report = sufficiency_constants_check(&constants, &pool);
        assert!(
            report.all_satisfied,
            "violated: {:?}",
            report
                .checks
                .iter()
                .filter(|c| !c.satisfied)
                .collect::<Vec<_>>()
        );
        assert_eq!(report.checks.len(), 14);
    }

    #[test]
    fn sufficiency_constants_detect_violations() {
        let constants = SufficiencyConstants {
            sigma: 0.7,
            lambda: 0.25,
            mu: 0.5,
            delta: 0.5,
            big_r: 2.0,
            epsilon: 0.5,
            alpha: 8.0 * PI,
        };
        let pool = KeyPoolParams::new(1000, 4).unwrap();
        let report = sufficiency_constants_check(&constants, &pool);
        assert!(!report.all_satisfied);
        let violated: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.satisfied)
            .map(|c| c.name.as_str())
            .collect();
        assert!(violated.contains(&"mu < 0.44"));
        assert!(violated.contains(&"lambda R > alpha (1-delta) / (2 pi)"));
    }

    #[test]
    fn gamma_eps_and_l1_helpers() {
        let constants = SufficiencyConstants {
            sigma: 0.7,
            lambda: 0.1,
            mu: 0.4,
            delta: 0.5,
            big_r: 25.0,
            epsilon: 0.5,
            alpha: 8.0 * PI,
        };
        assert!((constants.gamma_eps() - 1.5 * 3.0_f64.exp()).abs() < 1e-12);
        let pool = KeyPoolParams::new(1000, 10).unwrap();
        assert_eq!(constants.l1(21, &pool), 10);
        assert_eq!(constants.l1(500, &pool), 99);
    }
}
