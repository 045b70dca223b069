//! Colored and colorblind domain-wall vertex models.
//!
//! The crate implements two equivalent square-lattice path models: a colored
//! model with `n` distinguishable up-right paths interacting through a
//! parameter `t`, and its colorblind projection where edges carry
//! multiplicities and vertices carry t-binomial weights. On top of the model
//! core it provides
//!
//! - exact brute-force enumeration and closed-form partition functions
//!   (product formulas, permanents, Vandermonde ratios),
//! - the sliding bijection between `t = 0` touching paths and strictly
//!   non-intersecting lattice paths,
//! - a Metropolis-Hastings sampler over colored configurations with large
//!   corner flips and boundary color swaps,
//! - an arctic-curve engine producing the limit-shape branches for arbitrary
//!   endpoint densities, with optional `q`-area weighting, gaps, frozen
//!   outlets, geodesics and the tropical limit.

pub mod arctic;
pub mod exact;
pub mod model;
pub mod sampler;
pub mod slide;

pub use model::{
    colorblind_vertex_weight, colored_vertex_weight, qbinom, BoundarySpec, ColorSet, Coloring,
    ColorblindConfig, ColoredConfig, ModelError, WeightParams,
};
