//! Exact key-sharing probabilities and their exponential sandwich bounds.
//!
//! Every quantity here is a function of the key pool size `P` and the ring
//! size `K`: the probability that two independently drawn `K`-subsets of a
//! `P`-element pool intersect (`beta`), the probability that a ring meets
//! the union of two disjoint rings (`beta_tilde`), and the classical
//! `(1-x)^n` exponential sandwiches that turn binomial ratios into
//! `exp(-K^2/P)`-style bounds. All heavy lifting happens in the log domain
//! so that pool sizes up to `1e9` are exact to near machine precision.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum Error {
    #[error("binomial coefficient requires k <= n, got n={n}, k={k}")]
    BinomialDomain { n: u64, k: u64 },
    #[error("ring size must be at least 1")]
    EmptyRing,
    #[error("pool must hold at least {required} keys for ring size {ring}, got pool={pool}")]
    PoolTooSmall { pool: u64, ring: u64, required: u64 },
    #[error("exponential sandwich requires 0 < x < 1, got x={x}")]
    SandwichDomain { x: f64 },
    #[error("exponential sandwich requires n > 0, got n={n}")]
    SandwichExponent { n: f64 },
    #[error("shared-key count must satisfy 0 <= x <= ring, got x={x}, ring={ring}")]
    SharedKeysDomain { x: u64, ring: u64 },
}

/// Key pool parameters: a pool of `pool` distinct keys from which every node
/// draws a ring of `ring` distinct keys uniformly at random.
///
/// `pool >= 2 * ring` is required so that two disjoint rings exist and the
/// single-overlap ratio `C(P-K,K)/C(P,K)` is meaningful.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct KeyPoolParams {
    pub pool: u64,
    pub ring: u64,
}

impl KeyPoolParams {
    pub fn new(pool: u64, ring: u64) -> Result<Self, Error> {
        if ring == 0 {
            return Err(Error::EmptyRing);
        }
        if pool < 2 * ring {
            return Err(Error::PoolTooSmall {
                pool,
                ring,
                required: 2 * ring,
            });
        }
        Ok(Self { pool, ring })
    }

    fn require_pool(&self, required: u64) -> Result<(), Error> {
        if self.pool < required {
            return Err(Error::PoolTooSmall {
                pool: self.pool,
                ring: self.ring,
                required,
            });
        }
        Ok(())
    }
}

/// Link probabilities of the key graph: `beta` is the probability that two
/// rings intersect, `beta_tilde` that a ring meets the union of two disjoint
/// rings, and `ratio_gap = beta_tilde / beta - 1`, which tends to 1 as the
/// ring-to-pool ratio vanishes.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LinkProbabilities {
    pub beta: f64,
    pub beta_tilde: f64,
    pub ratio_gap: f64,
}

impl LinkProbabilities {
    /// Requires `pool >= 3 * ring` so that `beta_tilde` is defined.
    pub fn compute(params: &KeyPoolParams) -> Result<Self, Error> {
        let beta = link_probability(params)?;
        let beta_tilde = double_link_probability(params)?;
        let ratio_gap = beta_ratio(params)? - 1.0;
        Ok(Self {
            beta: beta.value,
            beta_tilde: beta_tilde.value,
            ratio_gap,
        })
    }
}

/// A probability together with closed-form lower and upper bounds on it.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BoundedProbability {
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
}

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Everything past the `(z - 1/2) ln z - z` part of Stirling's series for
/// `ln z!`, truncated after the `z^-7` term. For `z >= 4096` the truncation
/// error is below 1e-30.
fn stirling_tail(z: f64) -> f64 {
    let w = 1.0 / (z * z);
    (1.0 / 12.0 + w * (-1.0 / 360.0 + w * (1.0 / 1260.0 + w * (-1.0 / 1680.0)))) / z
}

/// Switch point between the exact compensated summation and Stirling's
/// series. Both paths keep the relative error of `log_binomial` under 1e-12
/// across `n <= 1e9`.
const SUMMATION_MAX_K: u64 = 4096;

/// Natural log of the binomial coefficient `C(n, k)`.
///
/// Small `min(k, n-k)` uses a compensated sum of `ln((n-k+i)/i)`; larger
/// arguments use Stirling's series with the leading terms regrouped into
/// same-sign quantities so nothing cancels.
pub fn log_binomial(n: u64, k: u64) -> Result<f64, Error> {
    if k > n {
        return Err(Error::BinomialDomain { n, k });
    }
    let k = k.min(n - k);
    if k == 0 {
        return Ok(0.0);
    }
    if k <= SUMMATION_MAX_K {
        let mut sum = 0.0_f64;
        let mut comp = 0.0_f64;
        let m = n - k;
        for i in 1..=k {
            let term = ((m + i) as f64).ln() - (i as f64).ln();
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        return Ok(sum);
    }
    let nf = n as f64;
    let kf = k as f64;
    let mf = (n - k) as f64;
    let lead = kf * (nf / kf).ln() + mf * (kf / mf).ln_1p() + 0.5 * (nf / (kf * mf)).ln();
    Ok(lead - 0.5 * LN_2PI + stirling_tail(nf) - stirling_tail(kf) - stirling_tail(mf))
}

/// `ln` of the ratio `C(pool - ring, ring) / C(pool, ring)`, i.e. the log
/// probability that a fresh ring avoids one fixed ring.
fn log_avoid_single(params: &KeyPoolParams) -> Result<f64, Error> {
    Ok(log_binomial(params.pool - params.ring, params.ring)?
        - log_binomial(params.pool, params.ring)?)
}

/// `ln` of `C(pool - 2*ring, ring) / C(pool, ring)`: the log probability
/// that a fresh ring avoids two fixed disjoint rings.
fn log_avoid_double(params: &KeyPoolParams) -> Result<f64, Error> {
    params.require_pool(3 * params.ring)?;
    Ok(log_binomial(params.pool - 2 * params.ring, params.ring)?
        - log_binomial(params.pool, params.ring)?)
}

/// Probability `beta` that two independent rings share at least one key,
/// with the exponential sandwich `1 - exp(-K^2/P) <= beta <=
/// 1 - exp(-K^2/(P - 2K + 1))`.
pub fn link_probability(params: &KeyPoolParams) -> Result<BoundedProbability, Error> {
    params.require_pool(2 * params.ring)?;
    let kf = params.ring as f64;
    let pf = params.pool as f64;
    let value = -f64::exp_m1(log_avoid_single(params)?);
    let lower = -f64::exp_m1(-kf * kf / pf);
    let upper = -f64::exp_m1(-kf * kf / ((params.pool - 2 * params.ring + 1) as f64));
    Ok(BoundedProbability { lower, value, upper })
}

/// Probability `beta_tilde` that a ring meets the union of two disjoint
/// rings, with the sandwich induced by both binomial ratio bounds.
///
/// Requires `pool >= 3 * ring`.
pub fn double_link_probability(params: &KeyPoolParams) -> Result<BoundedProbability, Error> {
    params.require_pool(3 * params.ring)?;
    let kf = params.ring as f64;
    let pf = params.pool as f64;
    let value = -f64::exp_m1(log_avoid_double(params)?);
    // C(P-2K,K)/C(P,K) sandwiched by the product of the single and double
    // ratio bounds.
    let lower = -f64::exp_m1(-kf * kf / pf - kf * kf / ((params.pool - params.ring) as f64));
    let upper = -f64::exp_m1(
        -kf * kf / ((params.pool - 2 * params.ring + 1) as f64)
            - kf * kf / ((params.pool - 3 * params.ring + 1) as f64),
    );
    Ok(BoundedProbability { lower, value, upper })
}

/// The ratio `beta_tilde / beta`. Exactly 2 for single-key rings, where
/// `beta = 1/P` and `beta_tilde = 2/P` hold as identities.
pub fn beta_ratio(params: &KeyPoolParams) -> Result<f64, Error> {
    params.require_pool(3 * params.ring)?;
    if params.ring == 1 {
        return Ok(2.0);
    }
    let beta = -f64::exp_m1(log_avoid_single(params)?);
    let beta_tilde = -f64::exp_m1(log_avoid_double(params)?);
    Ok(beta_tilde / beta)
}

/// Deviation of `beta_tilde / beta` from its small-ring limit 2.
///
/// The magnitude is of order `K^2/P`; `3 K^2 / P` is a safe acceptance
/// threshold across the admissible parameter range.
pub fn beta_ratio_gap(params: &KeyPoolParams) -> Result<f64, Error> {
    Ok(beta_ratio(params)? - 2.0)
}

/// Closed-form bounds on `beta_tilde / beta - 1` obtained by replacing each
/// binomial ratio with its exponential sandwich side.
pub fn beta_ratio_bounds(params: &KeyPoolParams) -> Result<(f64, f64), Error> {
    params.require_pool(3 * params.ring)?;
    let kf = params.ring as f64;
    let k2 = kf * kf;
    let pf = params.pool as f64;
    let lower = -f64::exp_m1(-k2 / ((params.pool - params.ring) as f64))
        / f64::exp_m1(k2 / ((params.pool - 2 * params.ring + 1) as f64));
    let upper = -f64::exp_m1(-k2 / ((params.pool - 3 * params.ring + 1) as f64))
        / f64::exp_m1(k2 / pf);
    Ok((lower, upper))
}

/// The three-way inequality `exp(-n x/(1-x)) < (1-x)^n < exp(-n x)`,
/// evaluated in the log domain so the strict ordering survives even where
/// the linear values are closer than one ulp.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ExpSandwich {
    pub log_lower: f64,
    pub log_value: f64,
    pub log_upper: f64,
}

impl ExpSandwich {
    pub fn lower(&self) -> f64 {
        self.log_lower.exp()
    }

    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }

    pub fn upper(&self) -> f64 {
        self.log_upper.exp()
    }

    pub fn is_strictly_ordered(&self) -> bool {
        self.log_lower < self.log_value && self.log_value < self.log_upper
    }
}

/// Sandwich `exp(-n x/(1-x)) < (1-x)^n < exp(-n x)` for `x` in (0,1), `n > 0`.
pub fn exp_sandwich(x: f64, n: f64) -> Result<ExpSandwich, Error> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::SandwichDomain { x });
    }
    if !(n > 0.0) {
        return Err(Error::SandwichExponent { n });
    }
    Ok(ExpSandwich {
        log_lower: -n * x / (1.0 - x),
        log_value: n * f64::ln_1p(-x),
        log_upper: -n * x,
    })
}

/// Which binomial ratio a sandwich applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum RatioKind {
    /// `C(P-K, K) / C(P, K)`: one ring avoiding another.
    Single,
    /// `C(P-2K, K) / C(P-K, K)`: the increment from avoiding one ring to
    /// avoiding two disjoint rings.
    Double,
}

/// A binomial ratio with its exponential bounds, in the log domain.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RatioSandwich {
    pub log_lower: f64,
    pub log_value: f64,
    pub log_upper: f64,
}

impl RatioSandwich {
    pub fn lower(&self) -> f64 {
        self.log_lower.exp()
    }

    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }

    pub fn upper(&self) -> f64 {
        self.log_upper.exp()
    }

    pub fn is_ordered(&self) -> bool {
        self.log_lower <= self.log_value && self.log_value <= self.log_upper
    }

    pub fn is_strictly_ordered(&self) -> bool {
        self.log_lower < self.log_value && self.log_value < self.log_upper
    }
}

/// Exponential sandwich around a binomial ratio:
///
/// * single: `exp(-K^2/(P-2K+1)) <= C(P-K,K)/C(P,K) <= exp(-K^2/P)`
/// * double: `exp(-K^2/(P-3K+1)) <= C(P-2K,K)/C(P-K,K) <= exp(-K^2/(P-K))`
pub fn binomial_ratio_sandwich(
    params: &KeyPoolParams,
    kind: RatioKind,
) -> Result<RatioSandwich, Error> {
    let k2 = (params.ring as f64) * (params.ring as f64);
    match kind {
        RatioKind::Single => {
            params.require_pool(2 * params.ring)?;
            Ok(RatioSandwich {
                log_lower: -k2 / ((params.pool - 2 * params.ring + 1) as f64),
                log_value: log_avoid_single(params)?,
                log_upper: -k2 / (params.pool as f64),
            })
        }
        RatioKind::Double => {
            params.require_pool(3 * params.ring)?;
            Ok(RatioSandwich {
                log_lower: -k2 / ((params.pool - 3 * params.ring + 1) as f64),
                log_value: log_binomial(params.pool - 2 * params.ring, params.ring)?
                    - log_binomial(params.pool - params.ring, params.ring)?,
                log_upper: -k2 / ((params.pool - params.ring) as f64),
            })
        }
    }
}

/// Probability that two random rings share exactly `x` keys while `n3`
/// further rings avoid both:
///
/// `P_x = C(P,x) C(P-x,K-x) C(P-K,K-x) C(P-2K+x,K)^n3 / C(P,K)^(2+n3)`
///
/// Returns exactly 0 when `n3 > 0` and the pool left after excluding the
/// union of the two rings cannot supply a third ring.
pub fn joint_isolation_key_term(params: &KeyPoolParams, x: u64, n3: u64) -> Result<f64, Error> {
    let (p, k) = (params.pool, params.ring);
    if x > k {
        return Err(Error::SharedKeysDomain { x, ring: k });
    }
    let remaining = p - 2 * k + x;
    if n3 > 0 && remaining < k {
        return Ok(0.0);
    }
    let mut log_term = log_binomial(p, x)?
        + log_binomial(p - x, k - x)?
        + log_binomial(p - k, k - x)?
        - 2.0 * log_binomial(p, k)?;
    if n3 > 0 {
        log_term += n3 as f64 * (log_binomial(remaining, k)? - log_binomial(p, k)?);
    }
    Ok(log_term.exp())
}

/// Closed-form ratio `P_x / P_{x+1}` of consecutive shared-key terms:
///
/// `(x+1)(P-2K+x+1) / (K-x)^2 * ((P-3K+x+1)/(P-2K+x+1))^n3`
///
/// Infinite when the `x+1` term is impossible (third ring cannot avoid the
/// smaller union) while the `x` term is not. Requires `x < K`.
pub fn joint_isolation_key_ratio(params: &KeyPoolParams, x: u64, n3: u64) -> Result<f64, Error> {
    let (p, k) = (params.pool, params.ring);
    if x >= k {
        return Err(Error::SharedKeysDomain { x, ring: k });
    }
    let denom = (p - 2 * k + x + 1) as f64;
    let base = ((x + 1) as f64) * denom / (((k - x) as f64) * ((k - x) as f64));
    if n3 == 0 {
        return Ok(base);
    }
    if p + x + 1 < 3 * k {
        // The x+1 term has no admissible third ring; the ratio diverges.
        return Ok(f64::INFINITY);
    }
    let third = ((p + x + 1 - 3 * k) as f64) / denom;
    Ok(base * third.powf(n3 as f64))
}
