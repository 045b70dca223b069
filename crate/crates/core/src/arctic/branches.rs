//! Parametric arctic-curve branches for touching paths.
//!
//! Every branch is a transform of the analytic non-intersecting-path (NILP)
//! curve sampled over a parameter window:
//!
//! - SE: translate by (-1, 0) over the range right of the endpoint image;
//! - SW: shear (x, y) -> (x + y, y) of the analytic continuation left of it;
//! - each gap contributes a translated branch (west side) and a
//!   sheared-and-translated branch (east side) meeting tangentially at the
//!   root of `x_0 = 1`;
//! - leading/trailing plateaus optionally contribute conjectural vertical
//!   segments closing the frozen regions.

use super::engine::{find_tstar, Engine};
use super::profile::DensityProfile;
use super::ArcticError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchLabel {
    Se,
    Sw,
    GapSw(usize),
    GapSe(usize),
    Nilp,
    Tropical,
    ConjecturalVertical,
}

impl std::fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BranchLabel::Se => write!(f, "SE"),
            BranchLabel::Sw => write!(f, "SW"),
            BranchLabel::GapSw(i) => write!(f, "gap{}-SW", i + 1),
            BranchLabel::GapSe(i) => write!(f, "gap{}-SE", i + 1),
            BranchLabel::Nilp => write!(f, "NILP"),
            BranchLabel::Tropical => write!(f, "tropical"),
            BranchLabel::ConjecturalVertical => write!(f, "conjectural-vertical"),
        }
    }
}

/// How the branch relates to the NILP curve at equal parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    Identity,
    Translate(f64),
    Shear,
    ShearTranslate(f64),
}

impl Transform {
    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        match *self {
            Transform::Identity => (x, y),
            Transform::Translate(dx) => (x + dx, y),
            Transform::Shear => (x + y, y),
            Transform::ShearTranslate(dx) => (x + y + dx, y),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

/// One parametric piece of an arctic curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveBranch {
    pub label: BranchLabel,
    pub transform: Transform,
    pub t_min: f64,
    pub t_max: f64,
    pub points: Vec<CurvePoint>,
}

/// Branch sampling controls.
#[derive(Debug, Clone)]
pub struct AssembleOptions {
    pub points_per_branch: usize,
    /// Emit the non-normative vertical segments closing frozen regions.
    pub conjectural_segments: bool,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        AssembleOptions {
            points_per_branch: 256,
            conjectural_segments: false,
        }
    }
}

/// Relative nudge applied at parameter-range ends that sit on the pole locus.
fn nudge(t: f64) -> f64 {
    1e-9 * t.abs().max(1.0)
}

fn sample_transformed(
    engine: &Engine,
    label: BranchLabel,
    transform: Transform,
    ts: &[f64],
    limit: Option<(f64, f64)>,
    t_range: (f64, f64),
) -> Result<CurveBranch, ArcticError> {
    let mut points = Vec::with_capacity(ts.len() + 1);
    for &t in ts {
        let (x, y) = engine.nilp_point(t)?;
        let (x, y) = transform.apply(x, y);
        if !x.is_finite() || !y.is_finite() {
            return Err(ArcticError::Numeric(format!(
                "non-finite branch sample at t = {t}"
            )));
        }
        points.push(CurvePoint { t, x, y });
    }
    if let Some((lx, ly)) = limit {
        let (x, y) = transform.apply(lx, ly);
        points.push(CurvePoint {
            t: f64::INFINITY,
            x,
            y,
        });
    }
    Ok(CurveBranch {
        label,
        transform,
        t_min: t_range.0,
        t_max: t_range.1,
        points,
    })
}

/// `t = t_min + s/(1-s)` over a uniform `s`-grid, plus the analytic limit
/// point; the unbounded end concentrates samples near `t_min`.
fn grid_unbounded_above(t_min: f64, npoints: usize) -> Vec<f64> {
    let n = npoints.max(2) - 1; // final slot holds the limit point
    (0..n)
        .map(|k| {
            let s = k as f64 / n as f64;
            let t = t_min + s / (1.0 - s);
            if k == 0 {
                t_min + nudge(t_min)
            } else {
                t
            }
        })
        .collect()
}

fn grid_unbounded_below(t_max: f64, npoints: usize) -> Vec<f64> {
    let n = npoints.max(2) - 1;
    (0..n)
        .map(|k| {
            let s = k as f64 / n as f64;
            let t = t_max - s / (1.0 - s);
            if k == 0 {
                t_max - nudge(t_max)
            } else {
                t
            }
        })
        .collect()
}

fn grid_finite(a: f64, b: f64, nudge_a: bool, nudge_b: bool, npoints: usize) -> Vec<f64> {
    let n = npoints.max(2);
    (0..n)
        .map(|k| {
            let w = k as f64 / (n - 1) as f64;
            let t = a + w * (b - a);
            if k == 0 && nudge_a {
                a + nudge(a)
            } else if k == n - 1 && nudge_b {
                b - nudge(b)
            } else {
                t
            }
        })
        .collect()
}

/// Southeast branch of the touching-path arctic curve: the NILP branch over
/// `t in [beta(1), inf)` translated by `(-1, 0)`, with the analytic
/// `t -> inf` point `(integral alpha, -1)` appended.
pub fn branch_se(profile: &DensityProfile, npoints: usize) -> Result<CurveBranch, ArcticError> {
    let engine = Engine::new(profile, None)?;
    let t_min = profile.beta_end();
    let ts = grid_unbounded_above(t_min, npoints);
    sample_transformed(
        &engine,
        BranchLabel::Se,
        Transform::Translate(-1.0),
        &ts,
        Some(engine.limit_point()),
        (t_min, f64::INFINITY),
    )
}

/// Southwest branch, parametrized per the reflected route:
/// `x_1(t) = 1/x_0(alpha(1) + 1 - t)` over `t in [alpha(1)+1, inf)`, which
/// equals the shear `(x, y) -> (x+y, y)` of the NILP analytic continuation
/// over `t_tilde in (-inf, 0]`.
pub fn branch_sw(profile: &DensityProfile, npoints: usize) -> Result<CurveBranch, ArcticError> {
    let engine = Engine::new(profile, None)?;
    let t_min = profile.beta_end();
    let alpha_end = profile.alpha_end();
    let ts = grid_unbounded_above(t_min, npoints);
    let mut points = Vec::with_capacity(ts.len() + 1);
    for &t in &ts {
        let tt = alpha_end + 1.0 - t;
        let v = engine.x_value(tt)?;
        let x1 = 1.0 / v.x;
        let dx1 = v.dx / (v.x * v.x);
        let xx = alpha_end + 1.0 - t + x1 * (1.0 - x1) / dx1;
        let yy = -(1.0 - x1) * (1.0 - x1) / dx1;
        points.push(CurvePoint { t, x: xx, y: yy });
    }
    let (lx, ly) = engine.limit_point();
    let (x, y) = Transform::Shear.apply(lx, ly);
    points.push(CurvePoint {
        t: f64::INFINITY,
        x,
        y,
    });
    Ok(CurveBranch {
        label: BranchLabel::Sw,
        transform: Transform::Shear,
        t_min,
        t_max: f64::INFINITY,
        points,
    })
}

/// The analytic NILP curve on its two unbounded ranges
/// `t in [beta(1), inf)` (SE) and `t in (-inf, 0]` (SW).
pub fn branch_nilp(
    profile: &DensityProfile,
    npoints: usize,
) -> Result<(CurveBranch, CurveBranch), ArcticError> {
    let engine = Engine::new(profile, None)?;
    let t_min = profile.beta_end();
    let se = sample_transformed(
        &engine,
        BranchLabel::Nilp,
        Transform::Identity,
        &grid_unbounded_above(t_min, npoints),
        Some(engine.limit_point()),
        (t_min, f64::INFINITY),
    )?;
    let sw = sample_transformed(
        &engine,
        BranchLabel::Nilp,
        Transform::Identity,
        &grid_unbounded_below(0.0, npoints),
        Some(engine.limit_point()),
        (f64::NEG_INFINITY, 0.0),
    )?;
    Ok((se, sw))
}

/// The two branches attached to the `gap_index`-th jump: the west side is
/// the NILP gap branch translated by `(-kappa, 0)` over
/// `t in [kappa + alpha_1(kappa), t*]`, the east side its shear over
/// `t in [t*, kappa + alpha_1(kappa) + mu]`; they meet tangentially at `t*`.
pub fn gap_branches(
    profile: &DensityProfile,
    gap_index: usize,
    npoints: usize,
) -> Result<(CurveBranch, CurveBranch), ArcticError> {
    gap_branches_at_q(profile, gap_index, None, npoints)
}

/// Gap branch pair for an explicit area weight (`None` means `q = 1`).
pub fn gap_branches_at_q(
    profile: &DensityProfile,
    gap_index: usize,
    q: Option<f64>,
    npoints: usize,
) -> Result<(CurveBranch, CurveBranch), ArcticError> {
    let gaps = profile.gaps();
    let (gap, alpha1) = gaps
        .get(gap_index)
        .copied()
        .ok_or(ArcticError::NoGap { index: gap_index })?;
    let engine = Engine::new(profile, q)?;
    let tstar = find_tstar(profile, gap_index, q)?;
    let (mut lo, mut hi) = (gap.kappa + alpha1, gap.kappa + alpha1 + gap.mu);
    if let Some(q) = q {
        lo = q.powf(lo);
        hi = q.powf(hi);
        if lo > hi {
            std::mem::swap(&mut lo, &mut hi);
        }
    }
    let sw = sample_transformed(
        &engine,
        BranchLabel::GapSw(gap_index),
        Transform::Translate(-gap.kappa),
        &grid_finite(lo, tstar, true, false, npoints),
        None,
        (lo, tstar),
    )?;
    let se = sample_transformed(
        &engine,
        BranchLabel::GapSe(gap_index),
        Transform::ShearTranslate(-gap.kappa),
        &grid_finite(tstar, hi, false, true, npoints),
        None,
        (tstar, hi),
    )?;
    Ok((sw, se))
}

/// All branches of the `q`-weighted arctic curve (`q != 1`): SW and SE plus a
/// pair per gap. `q < 1` is reached through the reflection
/// `alpha -> delta, q -> 1/q, X -> alpha(1) - X`, which also exchanges the
/// SE/SW roles.
pub fn q_branches(
    profile: &DensityProfile,
    q: f64,
    npoints: usize,
) -> Result<Vec<CurveBranch>, ArcticError> {
    if !(q > 0.0) || !q.is_finite() || q == 1.0 {
        return Err(ArcticError::InvalidParameter(
            "q must be positive, finite and different from 1".into(),
        ));
    }
    if q < 1.0 {
        let reflected = profile.reflected();
        let mirrored = q_branches(&reflected, 1.0 / q, npoints)?;
        let alpha_end = profile.alpha_end();
        let ngaps = profile.gaps().len();
        return Ok(mirrored
            .into_iter()
            .map(|mut b| {
                for p in &mut b.points {
                    p.x = alpha_end - p.x;
                }
                b.points.reverse();
                b.label = match b.label {
                    BranchLabel::Se => BranchLabel::Sw,
                    BranchLabel::Sw => BranchLabel::Se,
                    BranchLabel::GapSw(i) => BranchLabel::GapSe(ngaps - 1 - i),
                    BranchLabel::GapSe(i) => BranchLabel::GapSw(ngaps - 1 - i),
                    other => other,
                };
                b
            })
            .collect());
    }
    let engine = Engine::new(profile, Some(q))?;
    let mut out = Vec::new();
    // SW: shear of the q-NILP continuation over t in (-inf, 1].
    out.push(sample_transformed(
        &engine,
        BranchLabel::Sw,
        Transform::Shear,
        &grid_unbounded_below(1.0, npoints),
        Some(engine.limit_point()),
        (f64::NEG_INFINITY, 1.0),
    )?);
    for i in 0..profile.gaps().len() {
        let (sw, se) = gap_branches_at_q(profile, i, Some(q), npoints)?;
        out.push(sw);
        out.push(se);
    }
    // SE: q-NILP over t in [q^beta(1), inf) translated by (-1, 0).
    let t_min = q.powf(profile.beta_end());
    out.push(sample_transformed(
        &engine,
        BranchLabel::Se,
        Transform::Translate(-1.0),
        &grid_unbounded_above(t_min, npoints),
        Some(engine.limit_point()),
        (t_min, f64::INFINITY),
    )?);
    Ok(out)
}

/// Tropical (`q -> inf`) limit curve `X(t) = alpha(t)`, `Y(t) = -t`; knots of
/// piecewise profiles are sampled exactly.
pub fn tropical_curve(profile: &DensityProfile, npoints: usize) -> CurveBranch {
    let mut ts: Vec<f64> = (0..npoints.max(2))
        .map(|k| k as f64 / (npoints.max(2) - 1) as f64)
        .collect();
    for (a, b) in profile.cells() {
        ts.push(a);
        ts.push(b);
    }
    ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let points = ts
        .iter()
        .map(|&t| CurvePoint {
            t,
            x: profile.alpha(t),
            y: -t,
        })
        .collect();
    CurveBranch {
        label: BranchLabel::Tropical,
        transform: Transform::Identity,
        t_min: 0.0,
        t_max: 1.0,
        points,
    }
}

fn vertical_segment(x: f64, y_from: f64) -> CurveBranch {
    CurveBranch {
        label: BranchLabel::ConjecturalVertical,
        transform: Transform::Identity,
        t_min: 0.0,
        t_max: 1.0,
        points: vec![
            CurvePoint {
                t: 0.0,
                x,
                y: y_from,
            },
            CurvePoint { t: 1.0, x, y: 0.0 },
        ],
    }
}

/// Assembles the full arctic curve for a profile: SW and SE branches plus a
/// translated/sheared pair per gap, ordered west to east; `q != 1` switches
/// to the `q`-weighted branches. With `conjectural_segments` set, leading and
/// trailing plateaus additionally emit the non-normative vertical segments
/// closing their frozen regions.
pub fn assemble_arctic(
    profile: &DensityProfile,
    q: Option<f64>,
    opts: &AssembleOptions,
) -> Result<Vec<CurveBranch>, ArcticError> {
    profile.validate()?;
    let npoints = opts.points_per_branch;
    let mut out = Vec::new();
    match q {
        Some(q) if q != 1.0 => {
            out.extend(q_branches(profile, q, npoints)?);
        }
        _ => {
            out.push(branch_sw(profile, npoints)?);
            for i in 0..profile.gaps().len() {
                let (sw, se) = gap_branches(profile, i, npoints)?;
                out.push(sw);
                out.push(se);
            }
            out.push(branch_se(profile, npoints)?);
        }
    }
    if opts.conjectural_segments {
        let mut verticals = Vec::new();
        if profile.leading_plateau().is_some() {
            // The SW branch ends at x = 0; close the frozen corner upward.
            if let Some(first) = out
                .iter()
                .find(|b| b.label == BranchLabel::Sw)
                .and_then(|b| b.points.first())
            {
                verticals.push(vertical_segment(0.0, first.y));
            }
        }
        if profile.trailing_plateau().is_some() {
            if let Some(first) = out
                .iter()
                .find(|b| b.label == BranchLabel::Se)
                .and_then(|b| b.points.first())
            {
                verticals.push(vertical_segment(profile.alpha_end(), first.y));
            }
        }
        out.extend(verticals);
    }
    Ok(out)
}
