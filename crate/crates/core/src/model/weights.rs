//! Vertex weights for the colored and colorblind models.
//!
//! Colored vertices carry `x^|s_E| * t^d` with
//! `d = #{(i,j) : i < j, i in s_E, j in s_E u s_N}`: a factor `x` per east
//! exit and a factor `t` for every larger color present alongside an east
//! exit. Colorblind vertices carry the t-binomial weight
//! `binom(n_N + n_E, n_E)_t * t^(n_E (n_E - 1)/2) * x^(n_E)` subject to flow
//! conservation. The convention `0^0 = 1` keeps all `t = 0` weights finite.

use super::colorset::ColorSet;
use super::ModelError;
use num::{BigInt, BigRational, One, Zero};

/// t-binomial (Gaussian) coefficient `[a choose b]_t` via the product form
/// `prod_{i=1}^{b} (1 - t^(a-b+i)) / (1 - t^i)`; `t = 1` returns the ordinary
/// binomial (the limit value).
pub fn qbinom(a: u64, b: u64, t: f64) -> Result<f64, ModelError> {
    if b > a {
        return Err(ModelError::QBinomDomain {
            a: a as i64,
            b: b as i64,
        });
    }
    if t == 1.0 {
        return Ok(binomial(a, b));
    }
    let mut res = 1.0f64;
    for i in 1..=b {
        res *= (1.0 - t.powi((a - b + i) as i32)) / (1.0 - t.powi(i as i32));
    }
    Ok(res)
}

/// Exact-rational t-binomial.
pub fn qbinom_rational(a: u64, b: u64, t: &BigRational) -> Result<BigRational, ModelError> {
    use num::traits::Pow;
    if b > a {
        return Err(ModelError::QBinomDomain {
            a: a as i64,
            b: b as i64,
        });
    }
    if t.is_one() {
        return Ok(BigRational::from_integer(binomial_big(a, b)));
    }
    let one = BigRational::one();
    let mut res = BigRational::one();
    for i in 1..=b {
        let num = &one - t.clone().pow(a - b + i);
        let den = &one - t.clone().pow(i);
        res *= num / den;
    }
    Ok(res)
}

pub(crate) fn binomial(a: u64, b: u64) -> f64 {
    let b = if 2 * b > a { a - b } else { b };
    let mut res = 1.0f64;
    for i in 0..b {
        res = res * (a - i) as f64 / (i + 1) as f64;
    }
    res
}

fn binomial_big(a: u64, b: u64) -> BigInt {
    let b = if 2 * b > a { a - b } else { b };
    let mut res = BigInt::one();
    for i in 0..b {
        res = res * BigInt::from(a - i) / BigInt::from(i + 1);
    }
    res
}

/// `d(s_N, s_E) = #{(i, j) : i < j, i in s_E, j in s_E u s_N}`: for every
/// east-exiting color, the number of strictly larger colors present.
pub fn interaction_exponent(north: &ColorSet, east: &ColorSet) -> u32 {
    east.iter()
        .map(|c| east.count_greater(c) + north.count_greater(c))
        .sum()
}

/// Colored vertex weight `x^|s_E| * t^d`, or 0 when the occupancy violates
/// the conservation/disjointness constraints.
pub fn colored_vertex_weight(
    s_w: &ColorSet,
    s_s: &ColorSet,
    s_n: &ColorSet,
    s_e: &ColorSet,
    x: f64,
    t: f64,
) -> f64 {
    if !s_s.is_disjoint(s_w) || !s_n.is_disjoint(s_e) {
        return 0.0;
    }
    if !s_s.union(s_w).eq_as_sets(&s_n.union(s_e)) {
        return 0.0;
    }
    let d = interaction_exponent(s_n, s_e) as i32;
    x.powi(s_e.len() as i32) * t.powi(d)
}

/// Exact-rational colored vertex weight.
pub fn colored_vertex_weight_rational(
    s_w: &ColorSet,
    s_s: &ColorSet,
    s_n: &ColorSet,
    s_e: &ColorSet,
    x: &BigRational,
    t: &BigRational,
) -> BigRational {
    use num::traits::Pow;
    if !s_s.is_disjoint(s_w) || !s_n.is_disjoint(s_e) {
        return BigRational::zero();
    }
    if !s_s.union(s_w).eq_as_sets(&s_n.union(s_e)) {
        return BigRational::zero();
    }
    let d = interaction_exponent(s_n, s_e);
    x.clone().pow(s_e.len() as u64) * t.clone().pow(d as u64)
}

/// Colorblind vertex weight
/// `binom(n_N + n_E, n_E)_t * t^(n_E (n_E - 1)/2) * x^(n_E)` when
/// `n_W + n_S = n_N + n_E`, else 0.
pub fn colorblind_vertex_weight(n_w: u32, n_s: u32, n_n: u32, n_e: u32, x: f64, t: f64) -> f64 {
    if n_w + n_s != n_n + n_e {
        return 0.0;
    }
    let binom = qbinom((n_n + n_e) as u64, n_e as u64, t).expect("b <= a by construction");
    let pairs = (n_e as i32 * (n_e as i32 - 1)) / 2;
    binom * t.powi(pairs) * x.powi(n_e as i32)
}

/// Exact-rational colorblind vertex weight.
pub fn colorblind_vertex_weight_rational(
    n_w: u32,
    n_s: u32,
    n_n: u32,
    n_e: u32,
    x: &BigRational,
    t: &BigRational,
) -> BigRational {
    use num::traits::Pow;
    if n_w + n_s != n_n + n_e {
        return BigRational::zero();
    }
    let binom =
        qbinom_rational((n_n + n_e) as u64, n_e as u64, t).expect("b <= a by construction");
    let pairs = (n_e as u64 * (n_e as u64).saturating_sub(1)) / 2;
    binom * t.clone().pow(pairs) * x.clone().pow(n_e as u64)
}

/// Exact-rational weight parameters for brute-force oracle comparisons.
#[derive(Debug, Clone)]
pub struct RationalWeightParams {
    pub x: Vec<BigRational>,
    pub t: BigRational,
    pub q: BigRational,
}

impl RationalWeightParams {
    /// Rationals from `(numerator, denominator)` pairs.
    pub fn new(x: Vec<(i64, i64)>, t: (i64, i64), q: (i64, i64)) -> Self {
        let r = |(n, d): (i64, i64)| BigRational::new(n.into(), d.into());
        RationalWeightParams {
            x: x.into_iter().map(r).collect(),
            t: r(t),
            q: r(q),
        }
    }
}
