//! Chain state with cached per-vertex occupancy for O(1) local weight ratios.

use crate::model::colorset_ops as bits;
use crate::model::{BoundarySpec, ColoredConfig, ModelError, WeightParams};
use rand::Rng;

/// A proposed move of the base chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Proposal {
    /// Move the east step of `color` in column `col` to row `new_height`.
    Flip {
        color: u32,
        col: u32,
        new_height: u32,
    },
    /// Swap colors `color` and `color + dir` from their split vertex in
    /// column `col` onward.
    Swap { color: u32, col: u32, dir: i8 },
}

/// Resolved swap geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct SwapResolution {
    /// Color leaving the split vertex eastward (the lower branch).
    pub lo: u32,
    /// Color leaving the split vertex northward (the upper branch).
    pub up: u32,
    pub v_row: u32,
    pub col: u32,
    pub end: SwapEnd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SwapEnd {
    /// Paths meet again at `(row, col)`; east steps in columns
    /// `split_col..=col-1` are exchanged.
    Meet { col: u32, row: u32 },
    /// Paths never meet again; the height suffixes (and hence the exit
    /// columns) are exchanged.
    Boundary,
}

/// A `ColoredConfig` on the standard boundary plus cached per-vertex north-
/// and east-departure color sets.
#[derive(Debug, Clone)]
pub struct ChainState {
    n: usize,
    m: usize,
    heights: Vec<Vec<u32>>,
    words: usize,
    north: Vec<u64>,
    east: Vec<u64>,
    /// Per-color area, maintained incrementally for observer traces.
    area: Vec<i64>,
}

impl ChainState {
    /// Deterministic initial configuration: each path travels east at its
    /// entry row to below its exit column, then north; colors are assigned to
    /// exits left-to-right in entry order (the identity coloring).
    pub fn from_boundary(b: &BoundarySpec) -> Self {
        let slots = b.exit_slots();
        let heights: Vec<Vec<u32>> = (1..=b.n() as u32)
            .map(|c| vec![c; slots[c as usize - 1] as usize - 1])
            .collect();
        Self::from_parts(b.n(), b.column_count() as usize, heights)
    }

    /// Builds the caches for an arbitrary standard-boundary configuration.
    pub fn from_config(cfg: &ColoredConfig) -> Result<Self, ModelError> {
        cfg.validate()?;
        for c in 1..=cfg.n() as u32 {
            if cfg.start_col(c) != 1 {
                return Err(ModelError::InvalidConfig(
                    "sampler states use standard start columns".into(),
                ));
            }
        }
        let heights: Vec<Vec<u32>> = (1..=cfg.n() as u32)
            .map(|c| cfg.heights(c).to_vec())
            .collect();
        Ok(Self::from_parts(cfg.n(), cfg.m(), heights))
    }

    fn from_parts(n: usize, m: usize, heights: Vec<Vec<u32>>) -> Self {
        let words = n.div_ceil(64);
        let mut s = ChainState {
            n,
            m,
            heights,
            words,
            north: vec![0; n * m * words],
            east: vec![0; n * m * words],
            area: vec![0; n],
        };
        s.rebuild_caches();
        s
    }

    fn rebuild_caches(&mut self) {
        self.north.iter_mut().for_each(|w| *w = 0);
        self.east.iter_mut().for_each(|w| *w = 0);
        self.area.iter_mut().for_each(|a| *a = 0);
        for c in 1..=self.n as u32 {
            let hs = self.heights[c as usize - 1].clone();
            let mut entry = c;
            let mut col = 1u32;
            for &h in &hs {
                for r in h + 1..=entry {
                    bits::set_bit(self.north_mut(r, col), c);
                    self.area[c as usize - 1] += col as i64 - 1;
                }
                bits::set_bit(self.east_mut(h, col), c);
                entry = h;
                col += 1;
            }
            for r in 1..=entry {
                bits::set_bit(self.north_mut(r, col), c);
                self.area[c as usize - 1] += col as i64 - 1;
            }
        }
    }

    #[inline]
    fn base(&self, r: u32, c: u32) -> usize {
        ((r as usize - 1) * self.m + (c as usize - 1)) * self.words
    }

    #[inline]
    fn north_at(&self, r: u32, c: u32) -> &[u64] {
        let b = self.base(r, c);
        &self.north[b..b + self.words]
    }

    #[inline]
    fn east_at(&self, r: u32, c: u32) -> &[u64] {
        let b = self.base(r, c);
        &self.east[b..b + self.words]
    }

    #[inline]
    fn north_mut(&mut self, r: u32, c: u32) -> &mut [u64] {
        let b = self.base(r, c);
        &mut self.north[b..b + self.words]
    }

    #[inline]
    fn east_mut(&mut self, r: u32, c: u32) -> &mut [u64] {
        let b = self.base(r, c);
        &mut self.east[b..b + self.words]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Snapshot of the current configuration.
    pub fn config(&self) -> ColoredConfig {
        ColoredConfig::new(self.n, self.m, self.heights.clone())
            .expect("chain state stays valid")
    }

    pub fn exit_col(&self, color: u32) -> u32 {
        self.heights[color as usize - 1].len() as u32 + 1
    }

    /// Height of the east step of `color` in column `col`, if any.
    #[inline]
    fn east_height(&self, color: u32, col: u32) -> Option<u32> {
        self.heights[color as usize - 1]
            .get(col as usize - 1)
            .copied()
    }

    /// Row at which `color` enters column `col` (valid for `col <= exit`).
    #[inline]
    fn entry_row(&self, color: u32, col: u32) -> u32 {
        if col == 1 {
            color
        } else {
            self.heights[color as usize - 1][col as usize - 2]
        }
    }

    pub fn area_of(&self, color: u32) -> i64 {
        self.area[color as usize - 1]
    }

    pub fn total_area(&self) -> i64 {
        self.area.iter().sum()
    }

    /// Multiplicity of the vertical edge leaving `(r, c)` northward.
    pub fn vertical_multiplicity(&self, r: u32, c: u32) -> u32 {
        bits::popcount(self.north_at(r, c))
    }

    /// Multiplicity of the horizontal edge leaving `(r, c)` eastward.
    pub fn horizontal_multiplicity(&self, r: u32, c: u32) -> u32 {
        bits::popcount(self.east_at(r, c))
    }

    /// Flip window `(h0, h1)` for `color` in column `col`: `h1` is the height
    /// the path exits column `col-1` (its entry row at the west boundary) and
    /// `h0` the height it exits column `col+1` (1 when the path leaves
    /// through the top of column `col+1`). Returns `None` when the path has
    /// no east step in this column.
    pub fn flip_bounds(&self, color: u32, col: u32) -> Option<(u32, u32)> {
        let hs = &self.heights[color as usize - 1];
        if col as usize > hs.len() {
            return None;
        }
        let h1 = if col == 1 {
            color
        } else {
            hs[col as usize - 2]
        };
        let h0 = hs.get(col as usize).copied().unwrap_or(1);
        Some((h0, h1))
    }

    /// Contribution of `color` exiting east at `(r, c)` to the t-exponent:
    /// larger colors present plus smaller colors exiting east alongside.
    #[inline]
    fn east_contrib(&self, r: u32, c: u32, color: u32) -> i64 {
        let e = self.east_at(r, c);
        let n = self.north_at(r, c);
        (bits::count_above_pair(e, n, color) + bits::count_below(e, color)) as i64
    }

    /// Contribution of `color` passing north through `(r, c)`.
    #[inline]
    fn north_contrib(&self, r: u32, c: u32, color: u32) -> i64 {
        bits::count_below(self.east_at(r, c), color) as i64
    }

    /// Change in the total t-exponent if the east step of `color` in column
    /// `col` moves from `h` to `h2`. Only vertices in columns `col` and
    /// `col + 1` between the two heights are affected.
    fn flip_t_delta(&self, color: u32, col: u32, h: u32, h2: u32) -> i64 {
        let mut delta = self.east_contrib(h2, col, color) - self.east_contrib(h, col, color);
        if h2 < h {
            for r in h2 + 1..=h {
                delta += self.north_contrib(r, col, color) - self.north_contrib(r, col + 1, color);
            }
        } else {
            for r in h + 1..=h2 {
                delta += self.north_contrib(r, col + 1, color) - self.north_contrib(r, col, color);
            }
        }
        delta
    }

    /// True when `color` departs `(row, col)` northward.
    #[inline]
    fn northbound_at(&self, color: u32, col: u32, row: u32) -> bool {
        if col > self.exit_col(color) {
            return false;
        }
        let entry = self.entry_row(color, col);
        match self.east_height(color, col) {
            Some(exit) => exit < row && row <= entry,
            None => row <= entry,
        }
    }

    pub(crate) fn resolve_swap(&self, color: u32, col: u32, dir: i8) -> Option<SwapResolution> {
        let partner = color as i64 + dir as i64;
        if partner < 1 || partner > self.n as i64 {
            return None;
        }
        let partner = partner as u32;
        // Split vertex: one color exits east where the other passes north.
        let (lo, up, v_row) = if let Some(r) = self.east_height(color, col) {
            if self.northbound_at(partner, col, r) {
                (color, partner, r)
            } else if let Some(rp) = self.east_height(partner, col) {
                if self.northbound_at(color, col, rp) {
                    (partner, color, rp)
                } else {
                    return None;
                }
            } else {
                return None;
            }
        } else if let Some(rp) = self.east_height(partner, col) {
            if self.northbound_at(color, col, rp) {
                (partner, color, rp)
            } else {
                return None;
            }
        } else {
            return None;
        };
        // Walk east to the next meeting vertex, if any.
        if self.exit_col(up) == col {
            return Some(SwapResolution {
                lo,
                up,
                v_row,
                col,
                end: SwapEnd::Boundary,
            });
        }
        let mut j = col + 1;
        loop {
            debug_assert!(j <= self.exit_col(lo), "lower path outlives the scan");
            let b2 = self.entry_row(up, j);
            let x_lo = self.east_height(lo, j).unwrap_or(1);
            debug_assert!(b2 < self.entry_row(lo, j));
            if x_lo <= b2 {
                return Some(SwapResolution {
                    lo,
                    up,
                    v_row,
                    col,
                    end: SwapEnd::Meet { col: j, row: b2 },
                });
            }
            if self.exit_col(up) == j {
                return Some(SwapResolution {
                    lo,
                    up,
                    v_row,
                    col,
                    end: SwapEnd::Boundary,
                });
            }
            j += 1;
        }
    }

    /// The color-swap move available at `(color, col)` toward `color + dir`,
    /// if the meeting-vertex precondition holds.
    pub fn find_color_swap(&self, color: u32, col: u32, dir: i8) -> Option<Proposal> {
        self.resolve_swap(color, col, dir).map(|_| Proposal::Swap {
            color,
            col,
            dir,
        })
    }

    /// Metropolis acceptance probability of a proposal, from local occupancy
    /// only. At `t = 0`, proposals raising the t-exponent get ratio 0 and all
    /// others keep the x/q factor.
    pub fn acceptance_ratio(&self, p: &Proposal, params: &WeightParams) -> f64 {
        match *p {
            Proposal::Flip {
                color,
                col,
                new_height,
            } => {
                let h = self.east_height(color, col).expect("flip on an east step");
                if new_height == h {
                    return 1.0;
                }
                let delta = self.flip_t_delta(color, col, h, new_height);
                let t_factor = if params.t == 0.0 {
                    if delta > 0 {
                        return 0.0;
                    }
                    1.0
                } else {
                    params.t.powi(delta as i32)
                };
                let x_ratio = params.x_at_height(self.n, new_height)
                    / params.x_at_height(self.n, h);
                let q_factor = params.q.powi(new_height as i32 - h as i32);
                (x_ratio * q_factor * t_factor).min(1.0)
            }
            Proposal::Swap { color, col, dir } => {
                let res = self
                    .resolve_swap(color, col, dir)
                    .expect("swap proposals are pre-validated");
                // The swap only changes the t-weight at the split vertex: +1
                // when the smaller color moves from the north branch to the
                // east (lower) branch.
                let smaller_up = res.up < res.lo;
                if params.t == 0.0 {
                    return if smaller_up { 0.0 } else { 1.0 };
                }
                if smaller_up {
                    params.t.min(1.0)
                } else {
                    (1.0 / params.t).min(1.0)
                }
            }
        }
    }

    /// Applies a proposal unconditionally, updating the occupancy caches
    /// incrementally.
    pub fn apply(&mut self, p: &Proposal) {
        match *p {
            Proposal::Flip {
                color,
                col,
                new_height,
            } => self.apply_flip(color, col, new_height),
            Proposal::Swap { color, col, dir } => {
                let res = self
                    .resolve_swap(color, col, dir)
                    .expect("swap proposals are pre-validated");
                self.apply_swap(&res);
            }
        }
    }

    fn apply_flip(&mut self, color: u32, col: u32, h2: u32) {
        let h = self.east_height(color, col).expect("flip on an east step");
        if h == h2 {
            return;
        }
        bits::clear_bit(self.east_mut(h, col), color);
        bits::set_bit(self.east_mut(h2, col), color);
        if h2 < h {
            for r in h2 + 1..=h {
                bits::set_bit(self.north_mut(r, col), color);
                bits::clear_bit(self.north_mut(r, col + 1), color);
            }
        } else {
            for r in h + 1..=h2 {
                bits::clear_bit(self.north_mut(r, col), color);
                bits::set_bit(self.north_mut(r, col + 1), color);
            }
        }
        self.area[color as usize - 1] += h2 as i64 - h as i64;
        self.heights[color as usize - 1][col as usize - 1] = h2;
    }

    /// Relabels all departures of `from` in whole columns `col_a..=col_b` to
    /// `to`, returning the area carried by the relabeled vertical steps.
    fn relabel_departures(&mut self, from: u32, to: u32, col_a: u32, col_b: u32) -> i64 {
        let hs = std::mem::take(&mut self.heights[from as usize - 1]);
        let mut moved_area = 0i64;
        let mut entry;
        for j in col_a..=col_b.min(hs.len() as u32 + 1) {
            entry = if j == 1 { from } else { hs[j as usize - 2] };
            if (j as usize) <= hs.len() {
                let h = hs[j as usize - 1];
                for r in h + 1..=entry {
                    bits::clear_bit(self.north_mut(r, j), from);
                    bits::set_bit(self.north_mut(r, j), to);
                    moved_area += j as i64 - 1;
                }
                bits::clear_bit(self.east_mut(h, j), from);
                bits::set_bit(self.east_mut(h, j), to);
            } else {
                // Exit column: the run up to the boundary.
                for r in 1..=entry {
                    bits::clear_bit(self.north_mut(r, j), from);
                    bits::set_bit(self.north_mut(r, j), to);
                    moved_area += j as i64 - 1;
                }
            }
        }
        self.heights[from as usize - 1] = hs;
        moved_area
    }

    /// Relabels the exchanged segments at the split column itself. Only the
    /// departures from the split vertex onward move: the lower path's east
    /// step out of `v` and the upper path's run from `v` upward; everything
    /// below `v` stays put.
    fn relabel_split_column(&mut self, res: &SwapResolution) -> (i64, i64) {
        let (lo, up, k, r) = (res.lo, res.up, res.col, res.v_row);
        bits::clear_bit(self.east_mut(r, k), lo);
        bits::set_bit(self.east_mut(r, k), up);
        let mut area_up = 0i64;
        let top = self.east_height(up, k);
        let lowest = match top {
            Some(h) => h + 1,
            None => 1,
        };
        for row in lowest..=r {
            bits::clear_bit(self.north_mut(row, k), up);
            bits::set_bit(self.north_mut(row, k), lo);
            area_up += k as i64 - 1;
        }
        if let Some(h) = top {
            bits::clear_bit(self.east_mut(h, k), up);
            bits::set_bit(self.east_mut(h, k), lo);
        }
        (0, area_up) // east steps carry no area
    }

    fn apply_swap(&mut self, res: &SwapResolution) {
        let (lo, up, k) = (res.lo, res.up, res.col);
        let (mut area_lo, mut area_up) = self.relabel_split_column(res);
        match res.end {
            SwapEnd::Meet { col: l, row: vp } => {
                // Exchange the mid-segments: full columns k+1..=l-1 plus the
                // lower path's south-arrival rise in column l.
                if l > k + 1 {
                    area_lo += self.relabel_departures(lo, up, k + 1, l - 1);
                    area_up += self.relabel_departures(up, lo, k + 1, l - 1);
                }
                let b1 = self.entry_row(lo, l);
                for r in vp + 1..=b1 {
                    bits::clear_bit(self.north_mut(r, l), lo);
                    bits::set_bit(self.north_mut(r, l), up);
                    area_lo += l as i64 - 1;
                }
                self.area[lo as usize - 1] += area_up - area_lo;
                self.area[up as usize - 1] += area_lo - area_up;
                // Exchange heights in columns k..=l-1.
                let (a, b) = split_two(&mut self.heights, lo as usize - 1, up as usize - 1);
                for j in k as usize - 1..=l as usize - 2 {
                    std::mem::swap(&mut a[j], &mut b[j]);
                }
            }
            SwapEnd::Boundary => {
                let e_lo = self.exit_col(lo);
                let e_up = self.exit_col(up);
                if e_lo > k {
                    area_lo += self.relabel_departures(lo, up, k + 1, e_lo);
                }
                if e_up > k {
                    area_up += self.relabel_departures(up, lo, k + 1, e_up);
                }
                self.area[lo as usize - 1] += area_up - area_lo;
                self.area[up as usize - 1] += area_lo - area_up;
                let (a, b) = split_two(&mut self.heights, lo as usize - 1, up as usize - 1);
                let tail_a = a.split_off(k as usize - 1);
                let tail_b = b.split_off(k as usize - 1);
                a.extend(tail_b);
                b.extend(tail_a);
            }
        }
    }

    /// Draws a proposal per the base-chain protocol; `None` is a self-loop.
    pub fn propose<R: Rng>(&self, rng: &mut R) -> Option<Proposal> {
        let color = rng.gen_range(1..=self.n as u32);
        let col = rng.gen_range(1..=self.m as u32);
        match rng.gen_range(0..3u8) {
            0 => {
                let (h0, h1) = self.flip_bounds(color, col)?;
                let new_height = rng.gen_range(h0..=h1);
                Some(Proposal::Flip {
                    color,
                    col,
                    new_height,
                })
            }
            1 => self.find_color_swap(color, col, 1),
            _ => self.find_color_swap(color, col, -1),
        }
    }

    /// One Metropolis step: propose, accept with the local ratio, apply.
    pub fn step<R: Rng>(&mut self, params: &WeightParams, rng: &mut R) -> super::StepOutcome {
        use super::{StepKind, StepOutcome};
        match self.propose(rng) {
            None => StepOutcome {
                kind: StepKind::NoOp,
                accepted: false,
            },
            Some(p) => {
                let ratio = self.acceptance_ratio(&p, params);
                let u: f64 = rng.gen();
                let accepted = u < ratio;
                if accepted {
                    self.apply(&p);
                }
                StepOutcome {
                    kind: match p {
                        Proposal::Flip { .. } => StepKind::Flip,
                        Proposal::Swap { .. } => StepKind::Swap,
                    },
                    accepted,
                }
            }
        }
    }

    /// Debug cross-check: rebuilds every cache from the height lists and
    /// compares. Used by tests to validate the incremental updates.
    pub fn audit(&self) -> Result<(), String> {
        let fresh = ChainState::from_parts(self.n, self.m, self.heights.clone());
        if fresh.north != self.north {
            return Err("north cache out of sync".into());
        }
        if fresh.east != self.east {
            return Err("east cache out of sync".into());
        }
        if fresh.area != self.area {
            return Err("area cache out of sync".into());
        }
        self.config().validate().map_err(|e| e.to_string())
    }
}

fn split_two<T>(v: &mut [T], i: usize, j: usize) -> (&mut T, &mut T) {
    debug_assert!(i != j);
    if i < j {
        let (a, b) = v.split_at_mut(j);
        (&mut a[i], &mut b[0])
    } else {
        let (a, b) = v.split_at_mut(i);
        (&mut b[0], &mut a[j])
    }
}

/// Full proposal distribution of the base chain from a state: every
/// `(proposal, probability)` pair, with `None` for self-loops. Exact-
/// stationarity tests assemble transition matrices from this.
pub fn proposal_distribution(s: &ChainState) -> Vec<(Option<Proposal>, f64)> {
    let n = s.n() as u32;
    let m = s.m() as u32;
    let base = 1.0 / (3.0 * n as f64 * m as f64);
    let mut out = Vec::new();
    for color in 1..=n {
        for col in 1..=m {
            match s.flip_bounds(color, col) {
                Some((h0, h1)) => {
                    let w = base / (h1 - h0 + 1) as f64;
                    for h in h0..=h1 {
                        out.push((
                            Some(Proposal::Flip {
                                color,
                                col,
                                new_height: h,
                            }),
                            w,
                        ));
                    }
                }
                None => out.push((None, base)),
            }
            for dir in [1i8, -1] {
                match s.find_color_swap(color, col, dir) {
                    Some(p) => out.push((Some(p), base)),
                    None => out.push((None, base)),
                }
            }
        }
    }
    out
}
