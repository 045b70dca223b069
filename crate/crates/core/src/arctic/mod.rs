//! Arctic-curve engine: density profiles, `x_0`/`x_0^q` evaluation, branch
//! generation for plain, gapped, frozen and `q`-weighted boundaries,
//! geodesics and tropical limits.

mod branches;
mod engine;
mod geodesic;
mod profile;

pub use branches::{
    assemble_arctic, branch_nilp, branch_se, branch_sw, gap_branches, gap_branches_at_q,
    q_branches, tropical_curve, AssembleOptions, BranchLabel, CurveBranch, CurvePoint, Transform,
};
pub use engine::{find_tstar, x0, x0_q, x0_q_quadrature, x0_quadrature, Engine, Route, XValue};
pub use geodesic::{geodesic, tangent_geodesic};
pub use profile::{
    density_from_endpoints, endpoints_from_density, AffinePiece, DensityProfile, GapSpec,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ArcticError {
    #[error("invalid density profile: {0}")]
    InvalidProfile(String),
    #[error("parameter t = {t} crosses the pole locus of the profile")]
    PoleCrossing { t: f64 },
    #[error("profile has no gap with index {index}")]
    NoGap { index: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}
