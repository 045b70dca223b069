//! Metropolis-Hastings Markov chain over colored configurations targeting the
//! Gibbs measure `pi(C) ~ w(C) q^Area(C)`.
//!
//! The base chain draws a color, a column and one of three move kinds (large
//! corner flip, color swap with `c+1`, color swap with `c-1`) uniformly;
//! impossible moves are kept as self-loops so the proposal kernel stays
//! symmetric. Acceptance ratios are evaluated from local occupancy caches in
//! O(window) time.

mod run;
mod state;

#[cfg(test)]
mod tests;

pub use run::{run, ChainStats, OccupancyField, RunOptions, RunOutput, StepKind, StepOutcome};
pub use state::{proposal_distribution, ChainState, Proposal};

use crate::model::ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("chain supports at most {cap} colors, boundary has {n}")]
    TooManyColors { n: usize, cap: usize },
}
