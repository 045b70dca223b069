//! Rescaled endpoint densities: piecewise-affine profiles with jump gaps and
//! plateaus, or tabulated monotone functions.

use super::ArcticError;

/// One affine segment `alpha(u) = slope * u + intercept` on `[u0, u1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffinePiece {
    pub u0: f64,
    pub u1: f64,
    pub slope: f64,
    pub intercept: f64,
}

impl AffinePiece {
    pub fn alpha(&self, u: f64) -> f64 {
        self.slope * u + self.intercept
    }

    /// `beta(u) = u + alpha(u)` at the segment ends.
    pub fn beta_range(&self) -> (f64, f64) {
        (
            self.u0 + self.alpha(self.u0),
            self.u1 + self.alpha(self.u1),
        )
    }
}

/// A jump discontinuity of the profile: no endpoints on
/// `[alpha(kappa-), alpha(kappa-) + mu]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapSpec {
    pub kappa: f64,
    pub mu: f64,
}

/// Rescaled endpoint distribution `alpha: [0,1] -> [0, alpha(1)]`,
/// non-decreasing with `alpha(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum DensityProfile {
    Piecewise(Vec<AffinePiece>),
    /// Monotone samples `(u_i, alpha_i)` with linear interpolation; used for
    /// quadrature-only evaluation.
    Table { us: Vec<f64>, vals: Vec<f64> },
}

const GAP_TOL: f64 = 1e-12;

impl DensityProfile {
    // -- constructors -------------------------------------------------------

    pub fn from_pieces(pieces: Vec<AffinePiece>) -> Result<Self, ArcticError> {
        let p = DensityProfile::Piecewise(pieces);
        p.validate()?;
        Ok(p)
    }

    /// Regularly spaced endpoints `a_i = p i`: `alpha(u) = p u`.
    pub fn uniform(p: f64) -> Self {
        DensityProfile::Piecewise(vec![AffinePiece {
            u0: 0.0,
            u1: 1.0,
            slope: p,
            intercept: 0.0,
        }])
    }

    /// Unit-slope segments separated by jumps of sizes `mu_i` at `kappa_i`,
    /// `0 < kappa_1 < ... < kappa_r < 1`.
    pub fn uniform_with_gaps(gaps: &[(f64, f64)]) -> Result<Self, ArcticError> {
        let mut pieces = Vec::with_capacity(gaps.len() + 1);
        let mut left = 0.0f64;
        let mut lift = 0.0f64;
        for &(kappa, mu) in gaps {
            if !(kappa > left && kappa < 1.0) || !(mu > 0.0) {
                return Err(ArcticError::InvalidProfile(
                    "gap locations must be interior and increasing with positive sizes".into(),
                ));
            }
            pieces.push(AffinePiece {
                u0: left,
                u1: kappa,
                slope: 1.0,
                intercept: lift,
            });
            left = kappa;
            lift += mu;
        }
        pieces.push(AffinePiece {
            u0: left,
            u1: 1.0,
            slope: 1.0,
            intercept: lift,
        });
        Self::from_pieces(pieces)
    }

    /// Frozen first and last outlets: a fraction `kappa` of the paths exits
    /// at abscissa 0 and a fraction `lambda` at the last endpoint.
    pub fn frozen_ends(kappa: f64, lambda: f64) -> Result<Self, ArcticError> {
        if !(kappa > 0.0 && lambda > 0.0 && kappa + lambda < 1.0) {
            return Err(ArcticError::InvalidProfile(
                "need kappa, lambda > 0 with kappa + lambda < 1".into(),
            ));
        }
        Self::from_pieces(vec![
            AffinePiece {
                u0: 0.0,
                u1: kappa,
                slope: 0.0,
                intercept: 0.0,
            },
            AffinePiece {
                u0: kappa,
                u1: 1.0 - lambda,
                slope: 1.0,
                intercept: -kappa,
            },
            AffinePiece {
                u0: 1.0 - lambda,
                u1: 1.0,
                slope: 0.0,
                intercept: 1.0 - kappa - lambda,
            },
        ])
    }

    /// A single multiple outlet: uniform except for a `lambda`-fraction of
    /// paths exiting together at abscissa `kappa`.
    pub fn plateau(kappa: f64, lambda: f64) -> Result<Self, ArcticError> {
        if !(kappa > 0.0 && lambda > 0.0 && kappa + lambda < 1.0) {
            return Err(ArcticError::InvalidProfile(
                "need kappa, lambda > 0 with kappa + lambda < 1".into(),
            ));
        }
        Self::from_pieces(vec![
            AffinePiece {
                u0: 0.0,
                u1: kappa,
                slope: 1.0,
                intercept: 0.0,
            },
            AffinePiece {
                u0: kappa,
                u1: kappa + lambda,
                slope: 0.0,
                intercept: kappa,
            },
            AffinePiece {
                u0: kappa + lambda,
                u1: 1.0,
                slope: 1.0,
                intercept: -lambda,
            },
        ])
    }

    /// A multiple outlet at `kappa` immediately followed by a gap of size
    /// `mu`.
    pub fn plateau_gap(kappa: f64, lambda: f64, mu: f64) -> Result<Self, ArcticError> {
        if !(kappa > 0.0 && lambda > 0.0 && mu > 0.0 && kappa + lambda < 1.0) {
            return Err(ArcticError::InvalidProfile(
                "need kappa, lambda, mu > 0 with kappa + lambda < 1".into(),
            ));
        }
        Self::from_pieces(vec![
            AffinePiece {
                u0: 0.0,
                u1: kappa,
                slope: 1.0,
                intercept: 0.0,
            },
            AffinePiece {
                u0: kappa,
                u1: kappa + lambda,
                slope: 0.0,
                intercept: kappa,
            },
            AffinePiece {
                u0: kappa + lambda,
                u1: 1.0,
                slope: 1.0,
                intercept: mu - lambda,
            },
        ])
    }

    /// Tabulated monotone profile with linear interpolation.
    pub fn table(points: &[(f64, f64)]) -> Result<Self, ArcticError> {
        let p = DensityProfile::Table {
            us: points.iter().map(|p| p.0).collect(),
            vals: points.iter().map(|p| p.1).collect(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ArcticError> {
        match self {
            DensityProfile::Piecewise(pieces) => {
                if pieces.is_empty() {
                    return Err(ArcticError::InvalidProfile("no segments".into()));
                }
                if (pieces[0].u0).abs() > GAP_TOL {
                    return Err(ArcticError::InvalidProfile("must start at u = 0".into()));
                }
                if (pieces.last().unwrap().u1 - 1.0).abs() > GAP_TOL {
                    return Err(ArcticError::InvalidProfile("must end at u = 1".into()));
                }
                if pieces[0].alpha(pieces[0].u0).abs() > GAP_TOL {
                    return Err(ArcticError::InvalidProfile("alpha(0) must be 0".into()));
                }
                for p in pieces {
                    if !(p.u1 > p.u0) {
                        return Err(ArcticError::InvalidProfile(
                            "segments must have positive width".into(),
                        ));
                    }
                    if p.slope < 0.0 {
                        return Err(ArcticError::InvalidProfile(
                            "profile must be non-decreasing".into(),
                        ));
                    }
                    if !p.alpha(p.u0).is_finite() || !p.alpha(p.u1).is_finite() {
                        return Err(ArcticError::InvalidProfile("non-finite values".into()));
                    }
                }
                for w in pieces.windows(2) {
                    if (w[0].u1 - w[1].u0).abs() > GAP_TOL {
                        return Err(ArcticError::InvalidProfile(
                            "segments must tile [0,1] without overlap".into(),
                        ));
                    }
                    let jump = w[1].alpha(w[1].u0) - w[0].alpha(w[0].u1);
                    if jump < -GAP_TOL {
                        return Err(ArcticError::InvalidProfile(
                            "profile must be non-decreasing across segment boundaries".into(),
                        ));
                    }
                }
                Ok(())
            }
            DensityProfile::Table { us, vals } => {
                if us.len() < 2 || us.len() != vals.len() {
                    return Err(ArcticError::InvalidProfile(
                        "table needs at least two samples".into(),
                    ));
                }
                if us[0].abs() > GAP_TOL || (us[us.len() - 1] - 1.0).abs() > GAP_TOL {
                    return Err(ArcticError::InvalidProfile(
                        "table must span [0, 1]".into(),
                    ));
                }
                if vals[0].abs() > GAP_TOL {
                    return Err(ArcticError::InvalidProfile("alpha(0) must be 0".into()));
                }
                if us.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(ArcticError::InvalidProfile(
                        "table abscissas must be strictly increasing".into(),
                    ));
                }
                if vals.windows(2).any(|w| w[0] > w[1] + GAP_TOL) {
                    return Err(ArcticError::InvalidProfile(
                        "table must be non-decreasing".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    // -- queries -------------------------------------------------------------

    /// `alpha(u)`; at a jump the left piece wins.
    pub fn alpha(&self, u: f64) -> f64 {
        match self {
            DensityProfile::Piecewise(pieces) => {
                for p in pieces {
                    if u <= p.u1 + GAP_TOL {
                        return p.alpha(u.max(p.u0));
                    }
                }
                pieces.last().unwrap().alpha(1.0)
            }
            DensityProfile::Table { us, vals } => {
                let i = match us.binary_search_by(|v| v.partial_cmp(&u).unwrap()) {
                    Ok(i) => return vals[i],
                    Err(i) => i.clamp(1, us.len() - 1),
                };
                let w = (u - us[i - 1]) / (us[i] - us[i - 1]);
                vals[i - 1] + w * (vals[i] - vals[i - 1])
            }
        }
    }

    pub fn alpha_end(&self) -> f64 {
        match self {
            DensityProfile::Piecewise(pieces) => pieces.last().unwrap().alpha(1.0),
            DensityProfile::Table { vals, .. } => *vals.last().unwrap(),
        }
    }

    /// `beta(1) = 1 + alpha(1)`.
    pub fn beta_end(&self) -> f64 {
        1.0 + self.alpha_end()
    }

    /// `integral_0^1 alpha(u) du` in closed form (trapezoid-exact for
    /// tables).
    pub fn alpha_integral(&self) -> f64 {
        match self {
            DensityProfile::Piecewise(pieces) => pieces
                .iter()
                .map(|p| 0.5 * (p.alpha(p.u0) + p.alpha(p.u1)) * (p.u1 - p.u0))
                .sum(),
            DensityProfile::Table { us, vals } => us
                .windows(2)
                .zip(vals.windows(2))
                .map(|(u, v)| 0.5 * (v[0] + v[1]) * (u[1] - u[0]))
                .sum(),
        }
    }

    /// Jump discontinuities, left to right, with the left limit
    /// `alpha_1(kappa)` attached.
    pub fn gaps(&self) -> Vec<(GapSpec, f64)> {
        match self {
            DensityProfile::Piecewise(pieces) => {
                let mut out = Vec::new();
                for w in pieces.windows(2) {
                    let lo = w[0].alpha(w[0].u1);
                    let hi = w[1].alpha(w[1].u0);
                    if hi - lo > GAP_TOL {
                        out.push((
                            GapSpec {
                                kappa: w[0].u1,
                                mu: hi - lo,
                            },
                            lo,
                        ));
                    }
                }
                out
            }
            DensityProfile::Table { .. } => Vec::new(),
        }
    }

    /// Leading plateau `alpha = 0 on [0, kappa]`, if present.
    pub fn leading_plateau(&self) -> Option<f64> {
        match self {
            DensityProfile::Piecewise(pieces) => {
                let p = pieces.first().unwrap();
                (p.slope == 0.0 && p.alpha(p.u0).abs() <= GAP_TOL).then_some(p.u1)
            }
            DensityProfile::Table { .. } => None,
        }
    }

    /// Trailing plateau `alpha = alpha(1) on [1 - lambda, 1]`, if present.
    pub fn trailing_plateau(&self) -> Option<f64> {
        match self {
            DensityProfile::Piecewise(pieces) => {
                let p = pieces.last().unwrap();
                (p.slope == 0.0).then_some(1.0 - p.u0)
            }
            DensityProfile::Table { .. } => None,
        }
    }

    /// The reflected profile `delta(u) = alpha(1) - alpha(1 - u)`.
    pub fn reflected(&self) -> DensityProfile {
        let end = self.alpha_end();
        match self {
            DensityProfile::Piecewise(pieces) => {
                let mut out: Vec<AffinePiece> = pieces
                    .iter()
                    .rev()
                    .map(|p| AffinePiece {
                        u0: 1.0 - p.u1,
                        u1: 1.0 - p.u0,
                        slope: p.slope,
                        intercept: end - p.slope - p.intercept,
                    })
                    .collect();
                // Snap the first segment to pass exactly through 0.
                if let Some(first) = out.first_mut() {
                    if first.alpha(first.u0).abs() < 1e-9 {
                        first.intercept -= first.alpha(first.u0);
                    }
                }
                DensityProfile::Piecewise(out)
            }
            DensityProfile::Table { us, vals } => DensityProfile::Table {
                us: us.iter().rev().map(|&u| 1.0 - u).collect(),
                vals: vals.iter().rev().map(|&v| end - v).collect(),
            },
        }
    }

    /// Smooth subintervals of `[0, 1]` (integration cells / knot intervals).
    pub fn cells(&self) -> Vec<(f64, f64)> {
        match self {
            DensityProfile::Piecewise(pieces) => {
                pieces.iter().map(|p| (p.u0, p.u1)).collect()
            }
            DensityProfile::Table { us, .. } => {
                us.windows(2).map(|w| (w[0], w[1])).collect()
            }
        }
    }

    /// The affine segments of a piecewise profile.
    pub fn pieces(&self) -> Option<&[AffinePiece]> {
        match self {
            DensityProfile::Piecewise(p) => Some(p),
            DensityProfile::Table { .. } => None,
        }
    }
}

/// Piecewise-linear interpolation of `(i/n, a_i/n)` for endpoint abscissas
/// `a_0 <= ... <= a_n`.
pub fn density_from_endpoints(a: &[i64], n: usize) -> Result<DensityProfile, ArcticError> {
    if a.len() != n + 1 || n == 0 {
        return Err(ArcticError::InvalidProfile(
            "need n + 1 endpoints for scale n".into(),
        ));
    }
    if a[0] != 0 || a.windows(2).any(|w| w[0] > w[1]) {
        return Err(ArcticError::InvalidProfile(
            "endpoints must be non-decreasing from a_0 = 0".into(),
        ));
    }
    let scale = n as f64;
    let mut pieces = Vec::with_capacity(n);
    for i in 0..n {
        let (u0, u1) = (i as f64 / scale, (i + 1) as f64 / scale);
        let (v0, v1) = (a[i] as f64 / scale, a[i + 1] as f64 / scale);
        let slope = (v1 - v0) / (u1 - u0);
        pieces.push(AffinePiece {
            u0,
            u1,
            slope,
            intercept: v0 - slope * u0,
        });
    }
    DensityProfile::from_pieces(pieces)
}

/// Discretizes a profile back to integer endpoints: `a_i = round(n alpha(i/n))`
/// adjusted minimally to be non-decreasing, with `a_0 = 0`.
pub fn endpoints_from_density(profile: &DensityProfile, n: usize) -> Vec<i64> {
    let mut a = Vec::with_capacity(n + 1);
    let mut prev = 0i64;
    for i in 0..=n {
        let raw = (n as f64 * profile.alpha(i as f64 / n as f64)).round() as i64;
        let v = if i == 0 { 0 } else { raw.max(prev) };
        a.push(v);
        prev = v;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn uniform_profile() {
        let p = DensityProfile::uniform(2.0);
        assert_abs_diff_eq!(p.alpha(0.25), 0.5);
        assert_abs_diff_eq!(p.alpha_end(), 2.0);
        assert_abs_diff_eq!(p.alpha_integral(), 1.0);
        assert!(p.gaps().is_empty());
    }

    #[test]
    fn gapped_profile() {
        let p = DensityProfile::uniform_with_gaps(&[(0.25, 1.0)]).unwrap();
        assert_abs_diff_eq!(p.alpha(0.2), 0.2);
        assert_abs_diff_eq!(p.alpha(0.3), 1.3);
        let gaps = p.gaps();
        assert_eq!(gaps.len(), 1);
        assert_abs_diff_eq!(gaps[0].0.kappa, 0.25);
        assert_abs_diff_eq!(gaps[0].0.mu, 1.0);
        assert_abs_diff_eq!(gaps[0].1, 0.25);
    }

    #[test]
    fn frozen_profile_shape() {
        let p = DensityProfile::frozen_ends(1.0 / 16.0, 0.25).unwrap();
        assert_abs_diff_eq!(p.alpha(0.03), 0.0);
        assert_abs_diff_eq!(p.alpha(0.5), 0.5 - 1.0 / 16.0);
        assert_abs_diff_eq!(p.alpha_end(), 1.0 - 1.0 / 16.0 - 0.25);
        assert_eq!(p.leading_plateau(), Some(1.0 / 16.0));
        assert_eq!(p.trailing_plateau(), Some(0.25));
        assert_abs_diff_eq!(p.alpha_integral(), 209.0 / 512.0, epsilon = 1e-14);
    }

    #[test]
    fn endpoint_roundtrip() {
        // density_from_endpoints(endpoints_from_density(alpha, n), n) is
        // alpha to O(1/n) in sup norm.
        let p = DensityProfile::uniform_with_gaps(&[(0.5, 0.5)]).unwrap();
        let n = 64;
        let a = endpoints_from_density(&p, n);
        assert_eq!(a[0], 0);
        assert!(a.windows(2).all(|w| w[0] <= w[1]));
        let back = density_from_endpoints(&a, n).unwrap();
        for i in 0..=200 {
            let u = i as f64 / 200.0;
            if (u - 0.5).abs() <= 1.5 / n as f64 {
                continue; // linear interpolation smears the jump over one cell
            }
            assert!(
                (back.alpha(u) - p.alpha(u)).abs() <= 1.5 / n as f64,
                "u = {u}"
            );
        }
        // alpha(u) = u at n = 4 gives 0..4.
        let a = endpoints_from_density(&DensityProfile::uniform(1.0), 4);
        assert_eq!(a, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn reflection_involution() {
        let p = DensityProfile::uniform_with_gaps(&[(0.25, 1.0)]).unwrap();
        let r = p.reflected();
        r.validate().unwrap();
        let rr = r.reflected();
        for i in 0..=41 {
            // Off-knot samples: at a jump the one-sided limits differ by mu.
            let u = (i as f64 + 0.31) / 42.31;
            assert_abs_diff_eq!(rr.alpha(u), p.alpha(u), epsilon = 1e-12);
            assert_abs_diff_eq!(
                r.alpha(u),
                p.alpha_end() - p.alpha(1.0 - u),
                epsilon = 1e-12
            );
        }
    }
}
