//! Brute-force enumeration oracle and closed-form partition functions.

use crate::model::{
    BoundarySpec, Coloring, ColorblindConfig, ColoredConfig, ModelError, RationalWeightParams,
    WeightParams,
};
use num::{BigInt, BigRational, One, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("enumeration refused: n = {n} exceeds cap {cap} (estimated {estimate} states)")]
    CapExceeded { n: usize, cap: usize, estimate: u128 },
    #[error("enumeration refused: estimated {estimate} states exceeds limit {limit}")]
    TooManyStates { estimate: u128, limit: u128 },
    #[error("permanent size {n} exceeds cap {cap}")]
    PermanentTooLarge { n: usize, cap: usize },
    #[error("endpoint sequence must be strictly increasing from a_0 = 0")]
    BadEndpoints,
    #[error("q must be positive")]
    BadQ,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Enumeration guard rails. `cap` bounds the path count, `max_states` the
/// estimated state-space size.
#[derive(Debug, Clone)]
pub struct EnumLimits {
    pub cap: usize,
    pub max_states: u128,
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits {
            cap: 5,
            max_states: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Colored,
    Colorblind,
}

// ---------------------------------------------------------------------------
// Colored enumeration
// ---------------------------------------------------------------------------

fn binom_u128(a: u64, b: u64) -> u128 {
    let b = if 2 * b > a { a - b } else { b };
    let mut res: u128 = 1;
    for i in 0..b {
        res = res.saturating_mul((a - i) as u128) / (i + 1) as u128;
    }
    res
}

/// Monotone non-increasing sequences of length `len` with values in `1..=top`.
fn monotone_sequences(top: u32, len: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![top; len];
    if len == 0 {
        return vec![vec![]];
    }
    loop {
        out.push(cur.clone());
        // Decrement like a monotone odometer: find the last position that can
        // go down, decrement it and reset the tail to the same value.
        let mut i = len;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] > 1 {
                let v = cur[i] - 1;
                for slot in cur.iter_mut().skip(i) {
                    *slot = v;
                }
                break;
            }
        }
    }
}

/// Distinct assignments of exit columns to colors respecting the boundary
/// multiset (multiset permutations).
fn color_assignments(b: &BoundarySpec) -> Vec<Vec<u32>> {
    match b.coloring() {
        Coloring::Fixed(sigma) => {
            let slots = b.exit_slots();
            let assign = sigma
                .iter()
                .map(|&s| slots[s as usize - 1])
                .collect::<Vec<_>>();
            vec![assign]
        }
        Coloring::Free => {
            let mut counts: Vec<(u32, u32)> = b.exits().to_vec();
            let mut out = Vec::new();
            let mut cur = vec![0u32; b.n()];
            fn rec(
                counts: &mut Vec<(u32, u32)>,
                cur: &mut Vec<u32>,
                pos: usize,
                out: &mut Vec<Vec<u32>>,
            ) {
                if pos == cur.len() {
                    out.push(cur.clone());
                    return;
                }
                for i in 0..counts.len() {
                    if counts[i].1 == 0 {
                        continue;
                    }
                    counts[i].1 -= 1;
                    cur[pos] = counts[i].0;
                    rec(counts, cur, pos + 1, out);
                    counts[i].1 += 1;
                }
            }
            rec(&mut counts, &mut cur, 0, &mut out);
            out
        }
    }
}

/// Streaming enumeration of colored configurations for a boundary.
#[derive(Debug)]
pub struct ColoredEnumeration {
    n: usize,
    m: usize,
    assignments: Vec<Vec<u32>>,
    /// Per assignment, per color: candidate height lists.
    assignment_idx: usize,
    per_color: Vec<Vec<Vec<u32>>>,
    odometer: Vec<usize>,
    done: bool,
}

impl ColoredEnumeration {
    fn load_assignment(&mut self) -> bool {
        while self.assignment_idx < self.assignments.len() {
            let assign = &self.assignments[self.assignment_idx];
            self.per_color = (1..=self.n as u32)
                .map(|c| monotone_sequences(c, assign[c as usize - 1] as usize - 1))
                .collect();
            self.odometer = vec![0; self.n];
            if self.per_color.iter().all(|s| !s.is_empty()) {
                return true;
            }
            self.assignment_idx += 1;
        }
        false
    }
}

impl Iterator for ColoredEnumeration {
    type Item = ColoredConfig;

    fn next(&mut self) -> Option<ColoredConfig> {
        if self.done {
            return None;
        }
        let heights: Vec<Vec<u32>> = self
            .odometer
            .iter()
            .enumerate()
            .map(|(c, &i)| self.per_color[c][i].clone())
            .collect();
        let cfg = ColoredConfig::new(self.n, self.m, heights).expect("enumeration emits valid configs");
        // Advance the odometer; roll over into the next assignment.
        let mut pos = 0;
        loop {
            if pos == self.n {
                self.assignment_idx += 1;
                if !self.load_assignment() {
                    self.done = true;
                }
                break;
            }
            self.odometer[pos] += 1;
            if self.odometer[pos] < self.per_color[pos].len() {
                break;
            }
            self.odometer[pos] = 0;
            pos += 1;
        }
        Some(cfg)
    }
}

/// Estimated number of colored configurations for a boundary.
pub fn colored_state_estimate(b: &BoundarySpec) -> u128 {
    color_assignments(b)
        .iter()
        .map(|assign| {
            assign
                .iter()
                .enumerate()
                .map(|(c, &e)| {
                    let len = e as u64 - 1;
                    binom_u128(len + c as u64, len)
                })
                .product::<u128>()
        })
        .sum()
}

/// Enumerates every valid colored configuration exactly once. With a free
/// coloring this iterates over all exit colorings consistent with up-right
/// paths.
pub fn enumerate_colored(
    b: &BoundarySpec,
    limits: &EnumLimits,
) -> Result<ColoredEnumeration, ExactError> {
    if b.n() > limits.cap {
        return Err(ExactError::CapExceeded {
            n: b.n(),
            cap: limits.cap,
            estimate: colored_state_estimate(b),
        });
    }
    let estimate = colored_state_estimate(b);
    if estimate > limits.max_states {
        return Err(ExactError::TooManyStates {
            estimate,
            limit: limits.max_states,
        });
    }
    let mut e = ColoredEnumeration {
        n: b.n(),
        m: b.column_count() as usize,
        assignments: color_assignments(b),
        assignment_idx: 0,
        per_color: Vec::new(),
        odometer: Vec::new(),
        done: false,
    };
    if !e.load_assignment() {
        e.done = true;
    }
    Ok(e)
}

// ---------------------------------------------------------------------------
// Colorblind enumeration (column-by-column flow filling)
// ---------------------------------------------------------------------------

/// Enumerates every colorblind configuration by filling columns left to
/// right; the per-column choice is the vector of eastbound multiplicities.
pub fn enumerate_colorblind(
    b: &BoundarySpec,
    limits: &EnumLimits,
) -> Result<Vec<ColorblindConfig>, ExactError> {
    if b.n() > limits.cap {
        return Err(ExactError::CapExceeded {
            n: b.n(),
            cap: limits.cap,
            estimate: colored_state_estimate(b),
        });
    }
    let n = b.n();
    let m = b.column_count() as usize;
    let mut out = Vec::new();
    let mut vert = vec![0u32; n * m];
    let mut horiz = vec![0u32; n * m];
    let inflow = vec![1u32; n];

    fn fill_column(
        b: &BoundarySpec,
        col: usize,
        inflow: &[u32],
        vert: &mut Vec<u32>,
        horiz: &mut Vec<u32>,
        out: &mut Vec<ColorblindConfig>,
        limit: u128,
    ) {
        let n = b.n();
        let m = b.column_count() as usize;
        let exits = b.multiplicity_at(col as u32);
        let last = col == m;
        // Choose outflow row by row from the bottom; s = running upward flux.
        let mut outflow = vec![0u32; n];
        fn rec(
            b: &BoundarySpec,
            col: usize,
            row: usize, // 1-based from bottom: actual row index = row
            s_below: u32,
            inflow: &[u32],
            outflow: &mut Vec<u32>,
            vert: &mut Vec<u32>,
            horiz: &mut Vec<u32>,
            out: &mut Vec<ColorblindConfig>,
            exits: u32,
            last: bool,
            limit: u128,
        ) {
            let n = b.n();
            let m = b.column_count() as usize;
            if row == 0 {
                if s_below != exits {
                    return;
                }
                // Commit this column's edges.
                for r in 1..=n {
                    horiz[(r - 1) * m + (col - 1)] = outflow[r - 1];
                }
                // Vertical edges: recompute upward flux per row.
                let mut s = 0u32;
                for r in (1..=n).rev() {
                    s = s + inflow[r - 1] - outflow[r - 1];
                    vert[(r - 1) * m + (col - 1)] = s;
                }
                if last {
                    if (out.len() as u128) < limit {
                        out.push(
                            ColorblindConfig::new(n, m, vert.clone(), horiz.clone())
                                .expect("column filling conserves flow"),
                        );
                    }
                } else {
                    let next_in = outflow.clone();
                    fill_column(b, col + 1, &next_in, vert, horiz, out, limit);
                }
                return;
            }
            let r = row; // filling row r (bottom-up when row goes n..1)
            let avail = inflow[r - 1] + s_below;
            let max_out = if last { 0 } else { avail };
            for v in 0..=max_out {
                outflow[r - 1] = v;
                rec(
                    b,
                    col,
                    row - 1,
                    avail - v,
                    inflow,
                    outflow,
                    vert,
                    horiz,
                    out,
                    exits,
                    last,
                    limit,
                );
            }
            outflow[r - 1] = 0;
        }
        rec(
            b, col, n, 0, inflow, &mut outflow, vert, horiz, out, exits, last, limit,
        );
    }

    fill_column(
        b,
        1,
        &inflow,
        &mut vert,
        &mut horiz,
        &mut out,
        limits.max_states,
    );
    if out.len() as u128 >= limits.max_states {
        return Err(ExactError::TooManyStates {
            estimate: out.len() as u128,
            limit: limits.max_states,
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Brute-force partition functions
// ---------------------------------------------------------------------------

/// Sum of configuration weights over the full enumeration.
pub fn brute_force_z(
    b: &BoundarySpec,
    params: &WeightParams,
    mode: Mode,
    limits: &EnumLimits,
) -> Result<f64, ExactError> {
    match mode {
        Mode::Colored => {
            let mut z = 0.0;
            for cfg in enumerate_colored(b, limits)? {
                z += cfg.weight(params)?;
            }
            Ok(z)
        }
        Mode::Colorblind => {
            let mut z = 0.0;
            for cfg in enumerate_colorblind(b, limits)? {
                z += cfg.weight(params)?;
            }
            Ok(z)
        }
    }
}

/// Exact-rational brute-force partition function.
pub fn brute_force_z_rational(
    b: &BoundarySpec,
    params: &RationalWeightParams,
    mode: Mode,
    limits: &EnumLimits,
) -> Result<BigRational, ExactError> {
    let mut z = BigRational::zero();
    match mode {
        Mode::Colored => {
            for cfg in enumerate_colored(b, limits)? {
                z += cfg.weight_rational(params)?;
            }
        }
        Mode::Colorblind => {
            for cfg in enumerate_colorblind(b, limits)? {
                z += cfg.weight_rational(params)?;
            }
        }
    }
    Ok(z)
}

/// Number of touching configurations (t = 0 support: no multiply occupied
/// horizontal edge) for a boundary, counted exactly.
pub fn count_touching(b: &BoundarySpec, limits: &EnumLimits) -> Result<BigInt, ExactError> {
    let mut count = BigInt::zero();
    for cfg in enumerate_colorblind(b, limits)? {
        let touching = (1..=b.n() as u32).all(|r| {
            (1..=b.column_count()).all(|c| cfg.horiz_mult(r, c) <= 1)
        });
        if touching {
            count += 1;
        }
    }
    Ok(count)
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

/// Complete homogeneous symmetric polynomial `h_m(xs)`; `h_0 = 1`, and an
/// empty variable list gives 0 for `m > 0`.
pub fn complete_homogeneous(m: usize, xs: &[f64]) -> f64 {
    let mut h = vec![0.0f64; m + 1];
    h[0] = 1.0;
    for &x in xs {
        for j in 1..=m {
            h[j] += x * h[j - 1];
        }
    }
    h[m]
}

/// Fixed-coloring partition function at `t = 1`:
/// `prod_i h_{sigma_i - 1}(x_{n-i+1}, ..., x_n)`.
pub fn z_t1_sigma(sigma: &[u32], xs: &[f64]) -> f64 {
    let n = xs.len();
    assert_eq!(sigma.len(), n, "sigma must be a permutation of 1..=n");
    (1..=n)
        .map(|i| complete_homogeneous(sigma[i - 1] as usize - 1, &xs[n - i..]))
        .product()
}

/// Free-coloring partition function at `t = 1`: the permanent of
/// `M[i][j] = h_{j-1}(x_{n-i+1}, ..., x_n)`.
pub fn z_t1_free(xs: &[f64]) -> Result<f64, ExactError> {
    let n = xs.len();
    let m: Vec<Vec<f64>> = (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| complete_homogeneous(j - 1, &xs[n - i..]))
                .collect()
        })
        .collect();
    permanent_ryser(&m)
}

/// Permanent by Ryser's inclusion-exclusion with Gray-code column updates.
pub fn permanent_ryser(m: &[Vec<f64>]) -> Result<f64, ExactError> {
    const CAP: usize = 20;
    let n = m.len();
    if n == 0 {
        return Ok(1.0);
    }
    if n > CAP {
        return Err(ExactError::PermanentTooLarge { n, cap: CAP });
    }
    let mut row_sums = vec![0.0f64; n];
    let mut total = 0.0f64;
    let mut prev: u32 = 0;
    for k in 1u32..(1u32 << n) {
        let gray = k ^ (k >> 1);
        let j = (gray ^ prev).trailing_zeros() as usize;
        if gray & (1 << j) != 0 {
            for (i, rs) in row_sums.iter_mut().enumerate() {
                *rs += m[i][j];
            }
        } else {
            for (i, rs) in row_sums.iter_mut().enumerate() {
                *rs -= m[i][j];
            }
        }
        let prod: f64 = row_sums.iter().product();
        if (n as u32 - gray.count_ones()) % 2 == 0 {
            total += prod;
        } else {
            total -= prod;
        }
        prev = gray;
    }
    Ok(total)
}

/// Free-coloring partition function at `t = 0`:
/// `prod_{1 <= i < j <= n} (x_i + x_j)`.
pub fn z_t0(xs: &[f64]) -> f64 {
    let n = xs.len();
    let mut z = 1.0;
    for i in 0..n {
        for j in i + 1..n {
            z *= xs[i] + xs[j];
        }
    }
    z
}

/// Exact count of `t = 0` touching configurations with endpoints
/// `0 = a_0 < a_1 < ... < a_n`, as the Vandermonde ratio
/// `Delta(a_0, a_1+1, ..., a_n+n) / Delta(0, 1, ..., n)`.
pub fn z_endpoints_t0(a: &[u64]) -> Result<BigInt, ExactError> {
    if a.is_empty() || a[0] != 0 || a.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ExactError::BadEndpoints);
    }
    let b: Vec<u64> = a.iter().enumerate().map(|(i, &v)| v + i as u64).collect();
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..b.len() {
        for j in i + 1..b.len() {
            num *= BigInt::from(b[j] - b[i]);
            den *= BigInt::from((j - i) as u64);
        }
    }
    debug_assert!((&num % &den).is_zero());
    Ok(num / den)
}

/// Ratio of `q`-weighted touching-path partition functions when the endpoint
/// `a_k` is displaced to `a_k + r`, via the `q`-Vandermonde
/// `Delta(q^{a_0}, q^{a_1+1}, ..., q^{a_n+n})`. All normalization constants
/// cancel in the ratio except the boundary-arrival area factor `q^r`, which
/// is included so the value matches the ratio of Gibbs normalizations.
pub fn z_endpoints_q_ratio(a: &[u64], k: usize, r: i64, q: f64) -> Result<f64, ExactError> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(ExactError::BadQ);
    }
    if a.is_empty() || a[0] != 0 || a.windows(2).any(|w| w[0] >= w[1]) || k >= a.len() {
        return Err(ExactError::BadEndpoints);
    }
    let mut displaced: Vec<i64> = a.iter().map(|&v| v as i64).collect();
    displaced[k] += r;
    if displaced[0] < 0 || displaced.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ExactError::BadEndpoints);
    }
    if r == 0 {
        return Ok(1.0);
    }
    let pow = |v: i64, i: usize| q.powi(v as i32 + i as i32);
    let mut ratio = 1.0f64;
    let n1 = a.len();
    for i in 0..n1 {
        for j in i + 1..n1 {
            let num = pow(displaced[j], j) - pow(displaced[i], i);
            let den = pow(a[j] as i64, j) - pow(a[i] as i64, i);
            ratio *= num / den;
        }
    }
    Ok(ratio * q.powi(r as i32))
}
