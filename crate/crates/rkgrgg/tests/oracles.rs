//! Exact-arithmetic oracles for the floating-point combinatorics kernel.
//!
//! Every claim the library makes about binomial quantities is re-derived
//! here with big-integer / big-rational arithmetic and compared at tight
//! tolerances. The float code never feeds its own answers back in.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive};

use rkgrgg::combinatorics::{
    beta_ratio, binomial_ratio_sandwich, double_link_probability, link_probability,
    log_binomial, KeyPoolParams, RatioKind,
};

/// Exact binomial coefficient; the running product stays integral because
/// every prefix is itself a binomial coefficient.
fn big_binomial(n: u64, k: u64) -> BigUint {
    assert!(k <= n);
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= BigUint::from(n - i);
        acc /= BigUint::from(i + 1);
    }
    acc
}

/// Natural log of a big integer with ~1 ulp accuracy: take the top 53 bits
/// as a float mantissa and add the discarded power of two.
fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 53 {
        return x.to_u64().map(|v| (v as f64).ln()).unwrap();
    }
    let shift = bits - 53;
    let top = (x >> shift).to_u64().unwrap();
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Correctly rounded (to ~2^-80) conversion of a big rational in [0, 1]
/// to f64, via an 80-bit scaled integer quotient.
fn ratio_to_f64(ratio: &Ratio<BigUint>) -> f64 {
    let num = ratio.numer();
    let den = ratio.denom();
    if num == &BigUint::from(0_u32) {
        return 0.0;
    }
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    let shift = 80 - (nb - db);
    let scaled = if shift >= 0 {
        num << shift as u64
    } else {
        num >> (-shift) as u64
    };
    let quotient = (scaled / den).to_f64().unwrap();
    quotient * (2.0_f64).powi(-shift as i32)
}

/// `C(P-mK, K) / C(P, K)` as an exact rational via the telescoping product
/// `prod_i (P - mK - i) / (P - i)`.
fn exact_avoid_ratio(pool: u64, ring: u64, m: u64) -> Ratio<BigUint> {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..ring {
        num *= BigUint::from(pool - m * ring - i);
        den *= BigUint::from(pool - i);
    }
    Ratio::new(num, den)
}

fn exact_link(pool: u64, ring: u64, m: u64) -> f64 {
    let ratio = exact_avoid_ratio(pool, ring, m);
    let one = Ratio::from_integer(BigUint::one());
    ratio_to_f64(&(one - ratio))
}

#[test]
fn log_binomial_matches_big_integer_logarithm() {
    // Straddles the summation/Stirling switchover (k = 4096) and reaches
    // the advertised n = 1e9 range.
    let cases: &[(u64, u64)] = &[
        (10, 3),
        (52, 5),
        (100, 50),
        (4096, 2048),
        (100_000, 4096),
        (100_000, 4097),
        (100_000, 20_000),
        (1_000_000, 12_345),
        (1_000_000_000, 3),
        (1_000_000_000, 4096),
        (1_000_000_000, 4097),
        (1_000_000_000, 20_000),
    ];
    for &(n, k) in cases {
        let got = log_binomial(n, k).unwrap();
        let want = ln_big(&big_binomial(n, k));
        let tolerance = 1e-12 * want.abs().max(1.0);
        assert!(
            (got - want).abs() <= tolerance,
            "log C({n},{k}): got {got}, exact {want}, err {}",
            (got - want).abs()
        );
    }
}

#[test]
fn log_binomial_edge_cases_are_exact() {
    assert_eq!(log_binomial(7, 0).unwrap(), 0.0);
    assert_eq!(log_binomial(7, 7).unwrap(), 0.0);
    assert!((log_binomial(7, 1).unwrap() - (7.0_f64).ln()).abs() < 1e-15);
    assert!(log_binomial(3, 5).is_err());
}

#[test]
fn link_probability_matches_exact_rational() {
    let cases: &[(u64, u64)] = &[
        (5, 2),
        (10, 3),
        (40, 4),
        (100, 10),
        (1_000, 30),
        (10_007, 17),
        (1_000_000, 100),
        (1_000_000, 500),
    ];
    for &(p, k) in cases {
        let params = KeyPoolParams::new(p, k).unwrap();
        let got = link_probability(&params).unwrap();
        let exact = exact_link(p, k, 1);
        // The value route subtracts two O(K log P)-sized log-binomials, so
        // its error scales with their magnitude, not with beta.
        assert!(
            (got.value - exact).abs() <= 1e-10 * exact + 1e-15,
            "beta(P={p},K={k}): got {}, exact {exact}",
            got.value
        );
        // The closed-form sandwich must genuinely bracket the exact value.
        assert!(
            got.lower <= exact * (1.0 + 1e-12) && exact <= got.upper * (1.0 + 1e-12),
            "sandwich P={p} K={k}: {} !<= {exact} !<= {}",
            got.lower,
            got.upper
        );
    }
}

#[test]
fn link_probability_known_fractions() {
    // 1 - C(3,2)/C(5,2) = 1 - 3/10.
    let beta = link_probability(&KeyPoolParams::new(5, 2).unwrap()).unwrap();
    assert!((beta.value - 0.7).abs() < 1e-14);
    // 1 - C(7,3)/C(10,3) = 1 - 35/120 = 17/24.
    let beta = link_probability(&KeyPoolParams::new(10, 3).unwrap()).unwrap();
    assert!((beta.value - 17.0 / 24.0).abs() < 1e-14);
    // Single-key rings: beta = 1/P up to log-route roundoff.
    let beta = link_probability(&KeyPoolParams::new(64, 1).unwrap()).unwrap();
    assert!((beta.value - 1.0 / 64.0).abs() < 1e-13);
}

#[test]
fn double_link_probability_matches_exact_rational() {
    let cases: &[(u64, u64)] = &[(6, 2), (10, 3), (40, 4), (100, 10), (1_000, 30), (1_000_000, 100)];
    for &(p, k) in cases {
        let params = KeyPoolParams::new(p, k).unwrap();
        let got = double_link_probability(&params).unwrap();
        let exact = exact_link(p, k, 2);
        assert!(
            (got.value - exact).abs() <= 1e-10 * exact + 1e-15,
            "beta~(P={p},K={k}): got {}, exact {exact}",
            got.value
        );
        assert!(
            got.lower <= exact * (1.0 + 1e-12) && exact <= got.upper * (1.0 + 1e-12),
            "double sandwich P={p} K={k}: {} !<= {exact} !<= {}",
            got.lower,
            got.upper
        );
    }
}

#[test]
fn beta_ratio_matches_exact_rational() {
    let one = || Ratio::from_integer(BigUint::one());
    for &(p, k) in &[(10_u64, 2_u64), (40, 4), (100, 10), (1_000, 30), (1_000_000, 100)] {
        let params = KeyPoolParams::new(p, k).unwrap();
        let got = beta_ratio(&params).unwrap();
        let single = one() - exact_avoid_ratio(p, k, 1);
        let double = one() - exact_avoid_ratio(p, k, 2);
        let exact = ratio_to_f64(&(double / single));
        assert!(
            (got - exact).abs() <= 2e-11 * exact,
            "ratio(P={p},K={k}): got {got}, exact {exact}"
        );
    }
}

#[test]
fn binomial_ratio_sandwich_brackets_exact_value() {
    for &(p, k) in &[(6_u64, 2_u64), (10, 3), (100, 10), (10_000, 60), (1_000_000, 500)] {
        let params = KeyPoolParams::new(p, k).unwrap();
        let single = binomial_ratio_sandwich(&params, RatioKind::Single).unwrap();
        let exact = ratio_to_f64(&exact_avoid_ratio(p, k, 1));
        assert!(
            single.lower() < exact && exact < single.upper(),
            "single P={p} K={k}: {} !< {exact} !< {}",
            single.lower(),
            single.upper()
        );
        let double = binomial_ratio_sandwich(&params, RatioKind::Double).unwrap();
        // The double kind tracks C(P-2K,K)/C(P-K,K).
        let exact = {
            let mut num = BigUint::one();
            let mut den = BigUint::one();
            for i in 0..k {
                num *= BigUint::from(p - 2 * k - i);
                den *= BigUint::from(p - k - i);
            }
            ratio_to_f64(&Ratio::new(num, den))
        };
        assert!(
            double.lower() < exact && exact < double.upper(),
            "double P={p} K={k}: {} !< {exact} !< {}",
            double.lower(),
            double.upper()
        );
    }
}

#[test]
fn component_bound_few_keys_term_matches_exact_combinatorics() {
    // few_keys_log = log C(P,x) + lK log(x/P) - (N-l) K^2/P; check the
    // binomial part against exact big-integer arithmetic.
    let pool = KeyPoolParams::new(200, 5).unwrap();
    let params = rkgrgg::bounds::ComponentBoundParams {
        occupancy: 30,
        component_size: 4,
        distinct_keys: 12,
        pool,
        beta: 0.3,
    };
    let bound = rkgrgg::bounds::component_bound(&params).unwrap();
    let exact_log_binom = ln_big(&big_binomial(200, 12));
    let want = exact_log_binom + 4.0 * 5.0 * (12.0_f64 / 200.0).ln() - 26.0 * 25.0 / 200.0;
    assert!(
        (bound.few_keys_log - want).abs() < 1e-10,
        "few_keys_log {} vs exact {want}",
        bound.few_keys_log
    );
}
