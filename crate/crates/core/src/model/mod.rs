//! Configuration data model and vertex/configuration weight evaluation.

mod colorset;
mod config;
mod weights;

pub use colorset::ColorSet;

/// Flat word-slice bit helpers shared with the sampler's occupancy cache.
pub(crate) mod colorset_ops {
    pub(crate) use super::colorset::{
        clear_bit, count_above_pair, count_below, popcount, set_bit,
    };
}
pub use config::{BoundarySpec, Coloring, ColorblindConfig, ColoredConfig, Departure};
pub use weights::{
    colorblind_vertex_weight, colorblind_vertex_weight_rational, colored_vertex_weight,
    colored_vertex_weight_rational, interaction_exponent, qbinom, qbinom_rational,
    RationalWeightParams,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid weight parameters: {0}")]
    InvalidParams(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid boundary: {0}")]
    InvalidBoundary(String),
    #[error("t-binomial arguments out of domain: a={a}, b={b}")]
    QBinomDomain { a: i64, b: i64 },
}

/// Row weights, interaction parameter `t` and area parameter `q`.
///
/// `x` is indexed by rows counted bottom-to-top; heights in configurations
/// are counted top-to-bottom, so the east step of a path at height `h` on an
/// `n`-row grid uses `x[n - h]` (the map `row(h) = n - h + 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightParams {
    pub x: Vec<f64>,
    pub t: f64,
    pub q: f64,
}

impl WeightParams {
    pub fn new(x: Vec<f64>, t: f64, q: f64) -> Result<Self, ModelError> {
        let p = WeightParams { x, t, q };
        p.validate()?;
        Ok(p)
    }

    /// All row weights equal to one.
    pub fn uniform(n: usize, t: f64, q: f64) -> Result<Self, ModelError> {
        Self::new(vec![1.0; n], t, q)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.x.is_empty() || self.x.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(ModelError::InvalidParams(
                "row weights must be positive and finite".into(),
            ));
        }
        if !(self.t >= 0.0) || !self.t.is_finite() {
            return Err(ModelError::InvalidParams("t must be a finite real >= 0".into()));
        }
        if !(self.q > 0.0) || !self.q.is_finite() {
            return Err(ModelError::InvalidParams("q must be a finite real > 0".into()));
        }
        Ok(())
    }

    /// Row weight for an east step at top-to-bottom height `h` on `n` rows.
    #[inline]
    pub fn x_at_height(&self, n: usize, h: u32) -> f64 {
        self.x[n - h as usize]
    }
}
