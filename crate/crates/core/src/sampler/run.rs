//! Chain driver: sweeps, burn-in, observers and reproducible RNG.

use super::state::ChainState;
use super::SamplerError;
use crate::model::{BoundarySpec, ColoredConfig, WeightParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Flip,
    Swap,
    NoOp,
}

#[derive(Debug, Clone, Copy)]
pub struct StepOutcome {
    pub kind: StepKind,
    pub accepted: bool,
}

/// Run controls. A sweep is `n * m` proposal attempts.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub sweeps: u64,
    pub burn_in: u64,
    pub seed: u64,
    /// Record a configuration snapshot every this many post-burn-in sweeps.
    pub snapshot_every: Option<u64>,
    /// Accumulate occupancy fields and traces every this many sweeps.
    pub observe_every: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            sweeps: 1000,
            burn_in: 100,
            seed: 1,
            snapshot_every: None,
            observe_every: 1,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ChainStats {
    pub proposals: u64,
    pub noops: u64,
    pub flips_proposed: u64,
    pub flips_accepted: u64,
    pub swaps_proposed: u64,
    pub swaps_accepted: u64,
}

/// Mean edge occupancies accumulated over observations.
#[derive(Debug, Clone)]
pub struct OccupancyField {
    pub rows: usize,
    pub cols: usize,
    pub samples: u64,
    vert_sum: Vec<u64>,
    horiz_sum: Vec<u64>,
}

impl OccupancyField {
    fn new(rows: usize, cols: usize) -> Self {
        OccupancyField {
            rows,
            cols,
            samples: 0,
            vert_sum: vec![0; rows * cols],
            horiz_sum: vec![0; rows * cols],
        }
    }

    fn accumulate(&mut self, s: &ChainState) {
        for r in 1..=self.rows as u32 {
            for c in 1..=self.cols as u32 {
                let i = (r as usize - 1) * self.cols + (c as usize - 1);
                self.vert_sum[i] += s.vertical_multiplicity(r, c) as u64;
                self.horiz_sum[i] += s.horizontal_multiplicity(r, c) as u64;
            }
        }
        self.samples += 1;
    }

    /// Mean multiplicity of the vertical edge leaving `(r, c)` northward.
    pub fn vert_mean(&self, r: u32, c: u32) -> f64 {
        let i = (r as usize - 1) * self.cols + (c as usize - 1);
        self.vert_sum[i] as f64 / self.samples.max(1) as f64
    }

    pub fn horiz_mean(&self, r: u32, c: u32) -> f64 {
        let i = (r as usize - 1) * self.cols + (c as usize - 1);
        self.horiz_sum[i] as f64 / self.samples.max(1) as f64
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub final_config: ColoredConfig,
    pub stats: ChainStats,
    pub occupancy: OccupancyField,
    /// Per-color area trace, one value per observation.
    pub traces: Vec<Vec<i64>>,
    /// `(sweep index, configuration)` snapshots.
    pub snapshots: Vec<(u64, ColoredConfig)>,
}

const COLOR_CAP: usize = 4096;

/// Runs `burn_in + sweeps` sweeps from the deterministic initial
/// configuration; observers act after burn-in. Fully reproducible from
/// `seed`.
pub fn run(
    b: &BoundarySpec,
    params: &WeightParams,
    opts: &RunOptions,
) -> Result<RunOutput, SamplerError> {
    params.validate()?;
    if params.x.len() != b.n() {
        return Err(SamplerError::Model(
            crate::model::ModelError::InvalidParams("need one row weight per path".into()),
        ));
    }
    if b.n() > COLOR_CAP {
        return Err(SamplerError::TooManyColors {
            n: b.n(),
            cap: COLOR_CAP,
        });
    }
    let mut state = ChainState::from_boundary(b);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut stats = ChainStats::default();
    let mut occupancy = OccupancyField::new(b.n(), b.column_count() as usize);
    let mut traces: Vec<Vec<i64>> = vec![Vec::new(); b.n()];
    let mut snapshots = Vec::new();
    let steps_per_sweep = (b.n() as u64) * (b.column_count() as u64);
    let observe_every = opts.observe_every.max(1);

    for sweep in 0..opts.burn_in + opts.sweeps {
        for _ in 0..steps_per_sweep {
            let outcome = state.step(params, &mut rng);
            stats.proposals += 1;
            match outcome.kind {
                StepKind::NoOp => stats.noops += 1,
                StepKind::Flip => {
                    stats.flips_proposed += 1;
                    if outcome.accepted {
                        stats.flips_accepted += 1;
                    }
                }
                StepKind::Swap => {
                    stats.swaps_proposed += 1;
                    if outcome.accepted {
                        stats.swaps_accepted += 1;
                    }
                }
            }
        }
        if sweep >= opts.burn_in {
            let k = sweep - opts.burn_in;
            if k % observe_every == 0 {
                occupancy.accumulate(&state);
                for c in 1..=b.n() as u32 {
                    traces[c as usize - 1].push(state.area_of(c));
                }
            }
            if let Some(every) = opts.snapshot_every {
                if every > 0 && k % every == 0 {
                    snapshots.push((sweep, state.config()));
                }
            }
        }
    }
    if opts.sweeps == 0 && occupancy.samples == 0 {
        // Zero measured sweeps: report the (initial or burned-in) state once.
        occupancy.accumulate(&state);
    }
    Ok(RunOutput {
        final_config: state.config(),
        stats,
        occupancy,
        traces,
        snapshots,
    })
}
