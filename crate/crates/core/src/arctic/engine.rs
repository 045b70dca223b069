//! Evaluation of `x_0`, its `q`-deformation, and the parametric
//! non-intersecting-path curve they generate.
//!
//! For `q = 1`,
//! `x_0(t) = exp(-I1)` with `I1 = integral du / (t - beta(u))`,
//! `x_0'(t) = x_0(t) * I2` with `I2 = integral du / (t - beta(u))^2`, and the
//! curve reads `X = t - (1 - x)/I2`, `Y = -(1 - x)^2 / (x I2)`.
//!
//! For `q != 1`,
//! `x_0^q(t) = q^(-t I1)` with `I1 = integral du / (t - q^beta(u))`, the
//! derivative is `x (-ln q) (I1 - t I2)`, and the curve comes from
//! `q^X = t^2 x' / (t x' + x(1-x))`, `q^Y = (t x' + x(1-x)) / (t x' + 1 - x)`.
//!
//! Affine profile pieces are integrated in closed form (logarithms); table
//! profiles go through adaptive Simpson quadrature with tolerance 1e-10.

use super::profile::DensityProfile;
use super::ArcticError;

/// Relative quadrature tolerance for tabulated profiles.
const QUAD_REL_TOL: f64 = 1e-10;

/// Integration route for the `x_0` integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Per-piece closed forms for affine profiles, quadrature for tables.
    Auto,
    /// Force adaptive Simpson quadrature (for cross-checking).
    Quadrature,
}

/// Evaluator bound to a profile and an optional area weight `q`.
#[derive(Debug, Clone)]
pub struct Engine<'a> {
    profile: &'a DensityProfile,
    q: Option<f64>,
    route: Route,
}

/// Value and derivative of `x_0` (or `x_0^q`) at one parameter.
#[derive(Debug, Clone, Copy)]
pub struct XValue {
    pub x: f64,
    pub dx: f64,
}

impl<'a> Engine<'a> {
    pub fn new(profile: &'a DensityProfile, q: Option<f64>) -> Result<Self, ArcticError> {
        profile.validate()?;
        if let Some(q) = q {
            if !(q > 0.0) || !q.is_finite() || q == 1.0 {
                return Err(ArcticError::InvalidParameter(
                    "q must be positive, finite and different from 1".into(),
                ));
            }
        }
        Ok(Engine {
            profile,
            q,
            route: Route::Auto,
        })
    }

    pub fn with_route(mut self, route: Route) -> Self {
        self.route = route;
        self
    }

    pub fn q(&self) -> Option<f64> {
        self.q
    }

    pub fn profile(&self) -> &DensityProfile {
        self.profile
    }

    /// Closure of the image of `beta` (the pole locus). For `q != 1` the
    /// image of `q^beta`, oriented by the sign of `ln q`.
    pub fn forbidden_intervals(&self) -> Vec<(f64, f64)> {
        let raw: Vec<(f64, f64)> = match self.profile.pieces() {
            Some(pieces) => pieces.iter().map(|p| p.beta_range()).collect(),
            None => self
                .profile
                .cells()
                .iter()
                .map(|&(a, b)| (a + self.profile.alpha(a), b + self.profile.alpha(b)))
                .collect(),
        };
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (mut lo, mut hi) in raw {
            if let Some(q) = self.q {
                lo = q.powf(lo);
                hi = q.powf(hi);
                if lo > hi {
                    std::mem::swap(&mut lo, &mut hi);
                }
            }
            match out.last_mut() {
                Some((_, prev_hi)) if lo <= *prev_hi + 1e-12 => {
                    *prev_hi = hi.max(*prev_hi);
                }
                _ => out.push((lo, hi)),
            }
        }
        out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        out
    }

    fn check_domain(&self, t: f64) -> Result<(), ArcticError> {
        if !t.is_finite() {
            return Err(ArcticError::InvalidParameter("non-finite t".into()));
        }
        for (lo, hi) in self.forbidden_intervals() {
            if t >= lo && t <= hi {
                return Err(ArcticError::PoleCrossing { t });
            }
        }
        Ok(())
    }

    /// The pair `(I1, I2)` of first- and second-order pole integrals.
    fn integrals(&self, t: f64) -> Result<(f64, f64), ArcticError> {
        self.check_domain(t)?;
        let closed = self.route == Route::Auto && self.profile.pieces().is_some();
        match self.q {
            None => {
                if closed {
                    let mut i1 = 0.0;
                    let mut i2 = 0.0;
                    for p in self.profile.pieces().unwrap() {
                        let s1 = 1.0 + p.slope;
                        let (b0, b1) = p.beta_range();
                        // integral du/(t - beta) = ln((t - b0)/(t - b1)) / s1
                        i1 += ((t - b0) / (t - b1)).ln() / s1;
                        // integral du/(t - beta)^2 = (1/(t-b1) - 1/(t-b0)) / s1
                        i2 += (1.0 / (t - b1) - 1.0 / (t - b0)) / s1;
                    }
                    Ok((i1, i2))
                } else {
                    let f1 = |u: f64| 1.0 / (t - u - self.profile.alpha(u));
                    let f2 = |u: f64| {
                        let d = t - u - self.profile.alpha(u);
                        1.0 / (d * d)
                    };
                    Ok((
                        self.integrate_cells(&f1),
                        self.integrate_cells(&f2),
                    ))
                }
            }
            Some(q) => {
                let lq = q.ln();
                if closed {
                    let mut i1 = 0.0;
                    let mut i2 = 0.0;
                    for p in self.profile.pieces().unwrap() {
                        let s1 = 1.0 + p.slope;
                        let (b0, b1) = p.beta_range();
                        let (w0, w1) = (q.powf(b0), q.powf(b1));
                        // With w = q^beta(u): du = dw / (s1 ln(q) w).
                        let log_ratio = ((w1 * (t - w0)) / (w0 * (t - w1))).ln();
                        i1 += log_ratio / (s1 * lq * t);
                        i2 += (log_ratio / (t * t)
                            + (1.0 / (t - w1) - 1.0 / (t - w0)) / t)
                            / (s1 * lq);
                    }
                    Ok((i1, i2))
                } else {
                    let f1 = |u: f64| 1.0 / (t - q.powf(u + self.profile.alpha(u)));
                    let f2 = |u: f64| {
                        let d = t - q.powf(u + self.profile.alpha(u));
                        1.0 / (d * d)
                    };
                    Ok((
                        self.integrate_cells(&f1),
                        self.integrate_cells(&f2),
                    ))
                }
            }
        }
    }

    fn integrate_cells(&self, f: &dyn Fn(f64) -> f64) -> f64 {
        self.profile
            .cells()
            .iter()
            .map(|&(a, b)| adaptive_simpson(f, a, b, QUAD_REL_TOL))
            .sum()
    }

    /// `x_0(t)` (resp. `x_0^q(t)`) and its t-derivative.
    pub fn x_value(&self, t: f64) -> Result<XValue, ArcticError> {
        let (i1, i2) = self.integrals(t)?;
        match self.q {
            None => {
                let x = (-i1).exp();
                Ok(XValue { x, dx: x * i2 })
            }
            Some(q) => {
                let lq = q.ln();
                let x = (-t * i1 * lq).exp();
                Ok(XValue {
                    x,
                    dx: x * (-lq) * (i1 - t * i2),
                })
            }
        }
    }

    /// Parametric point of the non-intersecting-path curve at `t`.
    pub fn nilp_point(&self, t: f64) -> Result<(f64, f64), ArcticError> {
        let (i1, i2) = self.integrals(t)?;
        match self.q {
            None => {
                let x = (-i1).exp();
                let xx = t - (1.0 - x) / i2;
                let yy = -(1.0 - x) * (1.0 - x) / (x * i2);
                Ok((xx, yy))
            }
            Some(q) => {
                let lq = q.ln();
                let x = (-t * i1 * lq).exp();
                let dx = x * (-lq) * (i1 - t * i2);
                let txp = t * dx;
                let a = txp + x * (1.0 - x);
                let b = txp + 1.0 - x;
                let qx = t * t * dx / a;
                let qy = a / b;
                if !(qx > 0.0) || !(qy > 0.0) {
                    return Err(ArcticError::Numeric(format!(
                        "branch point undefined at t = {t}: q^X = {qx}, q^Y = {qy}"
                    )));
                }
                Ok((qx.ln() / lq, qy.ln() / lq))
            }
        }
    }

    /// Analytic `t -> +/-infinity` limit point of the curve: `(m + 1/2, -1)`
    /// with `m = integral beta(u) du` for `q = 1`, and
    /// `(log_q(q ln(q) M / (q - 1)), -1)` with `M = integral q^beta du` for
    /// `q != 1`.
    pub fn limit_point(&self) -> (f64, f64) {
        match self.q {
            None => (self.profile.alpha_integral() + 1.0, -1.0),
            Some(q) => {
                let m = self.beta_exp_integral(q);
                (((q * q.ln() * m / (q - 1.0)).ln()) / q.ln(), -1.0)
            }
        }
    }

    /// `integral_0^1 q^beta(u) du`.
    fn beta_exp_integral(&self, q: f64) -> f64 {
        let lq = q.ln();
        match self.profile.pieces() {
            Some(pieces) => pieces
                .iter()
                .map(|p| {
                    let s1 = 1.0 + p.slope;
                    let (b0, b1) = p.beta_range();
                    (q.powf(b1) - q.powf(b0)) / (s1 * lq)
                })
                .sum(),
            None => self.integrate_cells(&|u: f64| q.powf(u + self.profile.alpha(u))),
        }
    }
}

/// `x_0(t)` for a `q = 1` profile: `(value, derivative)`.
pub fn x0(profile: &DensityProfile, t: f64) -> Result<(f64, f64), ArcticError> {
    let v = Engine::new(profile, None)?.x_value(t)?;
    Ok((v.x, v.dx))
}

/// `x_0^q(t)`: `(value, derivative)`.
pub fn x0_q(profile: &DensityProfile, t: f64, q: f64) -> Result<(f64, f64), ArcticError> {
    let v = Engine::new(profile, Some(q))?.x_value(t)?;
    Ok((v.x, v.dx))
}

/// Quadrature-route `x_0(t)` for cross-checking the closed forms.
pub fn x0_quadrature(profile: &DensityProfile, t: f64) -> Result<(f64, f64), ArcticError> {
    let v = Engine::new(profile, None)?
        .with_route(Route::Quadrature)
        .x_value(t)?;
    Ok((v.x, v.dx))
}

/// Quadrature-route `x_0^q(t)`.
pub fn x0_q_quadrature(
    profile: &DensityProfile,
    t: f64,
    q: f64,
) -> Result<(f64, f64), ArcticError> {
    let v = Engine::new(profile, Some(q))?
        .with_route(Route::Quadrature)
        .x_value(t)?;
    Ok((v.x, v.dx))
}

/// Unique root of `x_0 = 1` (equivalently `I1 = 0`) inside the `gap_index`-th
/// jump of the profile, by bisection to 1e-12. For `q != 1` the root of
/// `x_0^q = 1` in the corresponding `q`-power interval.
pub fn find_tstar(
    profile: &DensityProfile,
    gap_index: usize,
    q: Option<f64>,
) -> Result<f64, ArcticError> {
    let gaps = profile.gaps();
    let (gap, alpha1) = gaps
        .get(gap_index)
        .copied()
        .ok_or(ArcticError::NoGap { index: gap_index })?;
    let engine = Engine::new(profile, q)?;
    let (mut lo, mut hi) = (gap.kappa + alpha1, gap.kappa + alpha1 + gap.mu);
    if let Some(q) = q {
        lo = q.powf(lo);
        hi = q.powf(hi);
        if lo > hi {
            std::mem::swap(&mut lo, &mut hi);
        }
    }
    // I1 decreases strictly from +inf to -inf across the gap interval, so the
    // edge signs are known analytically and plain bisection is safe.
    let f = |t: f64| -> Result<f64, ArcticError> { Ok(engine.integrals(t)?.0) };
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        if b - a <= 1e-12 * b.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (a + b);
        let v = f(mid)?;
        if v > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let tstar = 0.5 * (a + b);
    let check = engine.x_value(tstar)?;
    if !check.x.is_finite() || (check.x - 1.0).abs() > 1e-6 {
        return Err(ArcticError::Numeric(format!(
            "bisection left |x0 - 1| = {} at t* = {tstar}",
            (check.x - 1.0).abs()
        )));
    }
    Ok(tstar)
}

/// Adaptive Simpson quadrature with relative tolerance `tol`.
pub(crate) fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol * (left + right).abs().max(1e-300) {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    // Nudge the cell ends inward: profile kinks and near-pole endpoints are
    // always at cell boundaries.
    let eps = 1e-14 * (b - a);
    let (a, b) = (a + eps, b - eps);
    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    rec(f, a, b, fa, fm, fb, simpson(fa, fm, fb, b - a), tol, 52)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn uniform_x0_closed_form() {
        // alpha(u) = u: x_0(t) = (1 - 2/t)^(1/2).
        let p = DensityProfile::uniform(1.0);
        for t in [2.2, 3.0, 5.0, -1.0, -10.0] {
            let (x, _) = x0(&p, t).unwrap();
            assert_relative_eq!(x, (1.0 - 2.0 / t).sqrt(), max_relative = 1e-13);
        }
        assert!(matches!(
            x0(&p, 1.0),
            Err(ArcticError::PoleCrossing { .. })
        ));
    }

    #[test]
    fn uniform_p_general() {
        // x_0(t) = (1 - (p+1)/t)^(1/(p+1)).
        for p in [1.0, 2.0, 3.0] {
            let prof = DensityProfile::uniform(p);
            for t in [p + 1.5, 2.0 * p + 3.0] {
                let (x, _) = x0(&prof, t).unwrap();
                assert_relative_eq!(
                    x,
                    (1.0 - (p + 1.0) / t).powf(1.0 / (p + 1.0)),
                    max_relative = 1e-13
                );
            }
        }
    }

    #[test]
    fn gapped_x0_closed_form() {
        // kappa, mu gap: x_0(t) = sqrt((1 - 2 kappa/t)/(1 - 2(1-kappa)/(2+mu-t))).
        let (kappa, mu) = (0.75, 1.0);
        let p = DensityProfile::uniform_with_gaps(&[(kappa, mu)]).unwrap();
        for t in [1.8, 2.0, 2.25, 2.4, 3.5, -1.0] {
            let (x, _) = x0(&p, t).unwrap();
            let expect =
                ((1.0 - 2.0 * kappa / t) / (1.0 - 2.0 * (1.0 - kappa) / (2.0 + mu - t))).sqrt();
            assert_relative_eq!(x, expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let p = DensityProfile::uniform_with_gaps(&[(0.25, 1.0)]).unwrap();
        for t in [0.7, 0.9, 1.2, 3.6, -2.0] {
            let (x, dx) = x0(&p, t).unwrap();
            let (xq, dxq) = x0_quadrature(&p, t).unwrap();
            assert_relative_eq!(x, xq, max_relative = 1e-9);
            assert_relative_eq!(dx, dxq, max_relative = 1e-9);
        }
    }

    #[test]
    fn derivative_matches_central_differences() {
        let p = DensityProfile::uniform_with_gaps(&[(0.25, 1.0)]).unwrap();
        let h = 1e-5;
        for t in [0.6, 3.4, -1.5] {
            let (_, dx) = x0(&p, t).unwrap();
            let (xp, _) = x0(&p, t + h).unwrap();
            let (xm, _) = x0(&p, t - h).unwrap();
            assert_relative_eq!(dx, (xp - xm) / (2.0 * h), max_relative = 1e-6);
        }
        for q in [2.0, 0.5] {
            for t in [0.5, -1.0] {
                let (_, dx) = x0_q(&p, t, q).unwrap();
                let (xp, _) = x0_q(&p, t + h, q).unwrap();
                let (xm, _) = x0_q(&p, t - h, q).unwrap();
                assert_relative_eq!(dx, (xp - xm) / (2.0 * h), max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn q_uniform_closed_form() {
        // alpha(u) = u: x_0^q(t) = ((1 - t q^-2)/(1 - t))^(1/2).
        let p = DensityProfile::uniform(1.0);
        for q in [2.0, 5.0, 0.5, 0.2] {
            for t in [-1.0, 0.3] {
                if q < 1.0 && t > q * q && t < 1.0 {
                    continue;
                }
                let (x, _) = x0_q(&p, t, q).unwrap();
                let expect = ((1.0 - t / (q * q)) / (1.0 - t)).sqrt();
                assert_relative_eq!(x, expect, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn q_to_one_limit() {
        // x_0^q(q^theta) -> x_0(theta) as q -> 1 from above.
        let p = DensityProfile::uniform(1.0);
        let theta = 3.0;
        let (x_ref, _) = x0(&p, theta).unwrap();
        let mut prev = f64::INFINITY;
        for k in [4, 8, 12, 16, 20] {
            let q = 1.0 + (2.0f64).powi(-k);
            let (x, _) = x0_q(&p, q.powf(theta), q).unwrap();
            let err = (x - x_ref).abs();
            assert!(err < prev.max(1e-9), "error should shrink: {err} vs {prev}");
            prev = err;
        }
        assert!(prev < 1e-5, "final error {prev}");
    }

    #[test]
    fn tstar_gapped_example() {
        // Single gap: t* = kappa (2 + mu).
        let (kappa, mu) = (0.75, 1.0);
        let p = DensityProfile::uniform_with_gaps(&[(kappa, mu)]).unwrap();
        let t = find_tstar(&p, 0, None).unwrap();
        assert_abs_diff_eq!(t, kappa * (2.0 + mu), epsilon = 1e-10);
        // A symmetric toy gap: t* at the interval midpoint.
        let p = DensityProfile::uniform_with_gaps(&[(0.5, 1.0)]).unwrap();
        let t = find_tstar(&p, 0, None).unwrap();
        assert_abs_diff_eq!(t, 0.5 * ((1.0) + (2.0)), epsilon = 1e-10);
    }

    #[test]
    fn tstar_double_gap_example() {
        let p = DensityProfile::uniform_with_gaps(&[(0.25, 1.0), (0.5, 1.0)]).unwrap();
        let t1 = find_tstar(&p, 0, None).unwrap();
        let t2 = find_tstar(&p, 1, None).unwrap();
        assert_abs_diff_eq!(t1, (13.0 - 41.0f64.sqrt()) / 8.0, epsilon = 1e-10);
        assert_abs_diff_eq!(t2, (13.0 + 41.0f64.sqrt()) / 8.0, epsilon = 1e-10);
    }

    #[test]
    fn table_profile_quadrature() {
        // A table sampling of the uniform profile reproduces the closed form.
        let pts: Vec<(f64, f64)> = (0..=64).map(|i| {
            let u = i as f64 / 64.0;
            (u, u)
        }).collect();
        let p = DensityProfile::table(&pts).unwrap();
        for t in [2.5, 4.0, -1.0] {
            let (x, _) = x0(&p, t).unwrap();
            assert_relative_eq!(x, (1.0 - 2.0 / t).sqrt(), max_relative = 1e-9);
        }
    }
}
