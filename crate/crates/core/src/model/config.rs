//! Path configurations and boundary data.
//!
//! Geometry conventions used throughout the crate:
//!
//! - rows are counted `1..=n` top to bottom, columns `1..=m` left to right;
//! - path `c` (colors `1..=n`) enters the grid at row `c` on the west side of
//!   its start column (column 1 for standard boundaries) and moves only north
//!   and east;
//! - `heights[c][j]` is the row at which path `c` steps east in its `j`-th
//!   occupied column, a non-increasing list bounded by `c`;
//! - after its last east step the path runs north and leaves the grid through
//!   the top of its exit column.

use super::colorset::ColorSet;
use super::ModelError;
use std::collections::HashMap;

/// Direction in which a path leaves a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Departure {
    North,
    East,
}

/// Exit coloring constraint on the north boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coloring {
    /// Sum over all boundary colorings.
    Free,
    /// `sigma[c-1]` is the 1-based exit slot (counted left to right) taken by
    /// color `c`.
    Fixed(Vec<u32>),
}

/// Number of paths, multiset of exit columns and the coloring constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundarySpec {
    n: usize,
    /// `(column, multiplicity)` with strictly increasing columns.
    exits: Vec<(u32, u32)>,
    coloring: Coloring,
}

impl BoundarySpec {
    pub fn new(n: usize, exits: Vec<(u32, u32)>, coloring: Coloring) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::InvalidBoundary("need at least one path".into()));
        }
        if exits.is_empty() {
            return Err(ModelError::InvalidBoundary("empty exit list".into()));
        }
        if exits.iter().any(|&(c, m)| c == 0 || m == 0) {
            return Err(ModelError::InvalidBoundary(
                "exit columns and multiplicities must be >= 1".into(),
            ));
        }
        if exits.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(ModelError::InvalidBoundary(
                "exit columns must be strictly increasing".into(),
            ));
        }
        let total: u64 = exits.iter().map(|&(_, m)| m as u64).sum();
        if total != n as u64 {
            return Err(ModelError::InvalidBoundary(format!(
                "exit multiplicities sum to {total}, expected n = {n}"
            )));
        }
        if let Coloring::Fixed(sigma) = &coloring {
            if sigma.len() != n {
                return Err(ModelError::InvalidBoundary("sigma length != n".into()));
            }
            let mut seen = vec![false; n];
            for &s in sigma {
                if s == 0 || s as usize > n || seen[s as usize - 1] {
                    return Err(ModelError::InvalidBoundary(
                        "sigma is not a permutation of 1..=n".into(),
                    ));
                }
                seen[s as usize - 1] = true;
            }
        }
        Ok(BoundarySpec { n, exits, coloring })
    }

    /// Domain-wall boundary: one exit per column `1..=n`, free coloring.
    pub fn dwbc(n: usize) -> Result<Self, ModelError> {
        Self::new(n, (1..=n as u32).map(|c| (c, 1)).collect(), Coloring::Free)
    }

    /// Boundary from a non-decreasing endpoint sequence `a_0 <= a_1 <= ...`
    /// (abscissas, zero-based): path `i+1` exits at column `a_i + 1`. Repeats
    /// become multiplicities.
    pub fn from_endpoints(a: &[i64]) -> Result<Self, ModelError> {
        if a.is_empty() {
            return Err(ModelError::InvalidBoundary("empty endpoint list".into()));
        }
        if a[0] < 0 || a.windows(2).any(|w| w[0] > w[1]) {
            return Err(ModelError::InvalidBoundary(
                "endpoints must be non-negative and non-decreasing".into(),
            ));
        }
        let mut exits: Vec<(u32, u32)> = Vec::new();
        for &v in a {
            let col = v as u32 + 1;
            match exits.last_mut() {
                Some(last) if last.0 == col => last.1 += 1,
                _ => exits.push((col, 1)),
            }
        }
        Self::new(a.len(), exits, Coloring::Free)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn exits(&self) -> &[(u32, u32)] {
        &self.exits
    }

    pub fn coloring(&self) -> &Coloring {
        &self.coloring
    }

    /// Exit columns expanded with multiplicity, sorted ascending. One slot per
    /// path.
    pub fn exit_slots(&self) -> Vec<u32> {
        let mut slots = Vec::with_capacity(self.n);
        for &(col, mult) in &self.exits {
            for _ in 0..mult {
                slots.push(col);
            }
        }
        slots
    }

    /// Width of the grid: the rightmost exit column.
    pub fn column_count(&self) -> u32 {
        self.exits.last().unwrap().0
    }

    /// Exit multiplicity at a given column.
    pub fn multiplicity_at(&self, col: u32) -> u32 {
        self.exits
            .iter()
            .find(|&&(c, _)| c == col)
            .map(|&(_, m)| m)
            .unwrap_or(0)
    }
}

/// Per-color monotone lattice paths on an `n x m` grid, stored as east-step
/// height lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredConfig {
    n: usize,
    m: usize,
    /// Column in which path `c` enters (1 for standard boundaries; the image
    /// of the sliding map has `start_col[c-1] = c`).
    start_cols: Vec<u32>,
    heights: Vec<Vec<u32>>,
}

impl ColoredConfig {
    pub fn new(n: usize, m: usize, heights: Vec<Vec<u32>>) -> Result<Self, ModelError> {
        Self::with_start_cols(n, m, vec![1; n], heights)
    }

    pub fn with_start_cols(
        n: usize,
        m: usize,
        start_cols: Vec<u32>,
        heights: Vec<Vec<u32>>,
    ) -> Result<Self, ModelError> {
        if heights.len() != n || start_cols.len() != n {
            return Err(ModelError::InvalidConfig(
                "need one height list and start column per color".into(),
            ));
        }
        let cfg = ColoredConfig {
            n,
            m,
            start_cols,
            heights,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for c in 1..=self.n {
            let hs = &self.heights[c - 1];
            let start = self.start_cols[c - 1];
            if start == 0 {
                return Err(ModelError::InvalidConfig(format!(
                    "color {c}: start column must be >= 1"
                )));
            }
            if let Some(&first) = hs.first() {
                if first > c as u32 {
                    return Err(ModelError::InvalidConfig(format!(
                        "color {c}: first east step above entry row ({first} > {c})"
                    )));
                }
            }
            if hs.iter().any(|&h| h == 0) {
                return Err(ModelError::InvalidConfig(format!(
                    "color {c}: heights must be >= 1"
                )));
            }
            if hs.windows(2).any(|w| w[0] < w[1]) {
                return Err(ModelError::InvalidConfig(format!(
                    "color {c}: heights must be non-increasing"
                )));
            }
            let exit = start as u64 + hs.len() as u64;
            if exit > self.m as u64 {
                return Err(ModelError::InvalidConfig(format!(
                    "color {c}: exit column {exit} beyond grid width {}",
                    self.m
                )));
            }
        }
        Ok(())
    }

    /// Checks the exit multiset (and the coloring if fixed) against a boundary.
    pub fn validate_against(&self, b: &BoundarySpec) -> Result<(), ModelError> {
        self.validate()?;
        if self.n != b.n() {
            return Err(ModelError::InvalidConfig("path count mismatch".into()));
        }
        let mut exits: Vec<u32> = (1..=self.n as u32).map(|c| self.exit_col(c)).collect();
        exits.sort_unstable();
        if exits != b.exit_slots() {
            return Err(ModelError::InvalidConfig(
                "exit columns do not match the boundary multiset".into(),
            ));
        }
        if let Coloring::Fixed(sigma) = b.coloring() {
            // Slot of color c = rank of its exit among all exits, with ties
            // broken by color order (colors sharing a column are exchangeable).
            let slots = b.exit_slots();
            let mut used = vec![false; self.n];
            for c in 1..=self.n as u32 {
                let e = self.exit_col(c);
                let want = sigma[c as usize - 1] as usize - 1;
                if slots[want] != e || used[want] {
                    return Err(ModelError::InvalidConfig(format!(
                        "color {c} exits at column {e}, not at slot {}",
                        sigma[c as usize - 1]
                    )));
                }
                used[want] = true;
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn heights(&self, color: u32) -> &[u32] {
        &self.heights[color as usize - 1]
    }

    pub fn start_col(&self, color: u32) -> u32 {
        self.start_cols[color as usize - 1]
    }

    /// Exit column `e_c = start + L_c`.
    pub fn exit_col(&self, color: u32) -> u32 {
        self.start_cols[color as usize - 1] + self.heights[color as usize - 1].len() as u32
    }

    /// Visits every vertex departure of path `color` in column order:
    /// `f(row, col, departure)`.
    pub fn for_each_departure(&self, color: u32, mut f: impl FnMut(u32, u32, Departure)) {
        let hs = &self.heights[color as usize - 1];
        let mut entry = color;
        let mut col = self.start_cols[color as usize - 1];
        for &h in hs {
            for r in h + 1..=entry {
                f(r, col, Departure::North);
            }
            f(h, col, Departure::East);
            entry = h;
            col += 1;
        }
        for r in 1..=entry {
            f(r, col, Departure::North);
        }
    }

    /// Area under the path system: every vertical step weighted by the number
    /// of unit boxes between it and the vertical line through its path's
    /// start column. Measuring from the start column makes the area invariant
    /// under horizontal translations of individual paths (the sliding map).
    pub fn area(&self) -> i64 {
        let mut total = 0i64;
        for c in 1..=self.n as u32 {
            let start = self.start_cols[c as usize - 1] as i64;
            self.for_each_departure(c, |_, col, d| {
                if d == Departure::North {
                    total += col as i64 - start;
                }
            });
        }
        total
    }

    /// Total exponent of `t` in the configuration weight.
    pub fn t_power(&self) -> u64 {
        let occ = self.vertex_sets();
        occ.values()
            .map(|(north, east)| super::weights::interaction_exponent(north, east) as u64)
            .sum()
    }

    /// Per-vertex `(north, east)` departure color sets.
    pub fn vertex_sets(&self) -> HashMap<(u32, u32), (ColorSet, ColorSet)> {
        let mut occ: HashMap<(u32, u32), (ColorSet, ColorSet)> = HashMap::new();
        for c in 1..=self.n as u32 {
            self.for_each_departure(c, |r, col, d| {
                let entry = occ.entry((r, col)).or_default();
                match d {
                    Departure::North => entry.0.insert(c),
                    Departure::East => entry.1.insert(c),
                }
            });
        }
        occ
    }

    /// Configuration weight: product of colored vertex weights times
    /// `q^area`.
    pub fn weight(&self, params: &super::WeightParams) -> Result<f64, ModelError> {
        self.validate()?;
        params.validate()?;
        if params.x.len() != self.n {
            return Err(ModelError::InvalidParams(
                "need one row weight per row".into(),
            ));
        }
        let mut w = 1.0f64;
        for ((row, _col), (north, east)) in self.vertex_sets() {
            let d = super::weights::interaction_exponent(&north, &east) as i32;
            let e = east.len() as i32;
            if e > 0 {
                w *= params.x_at_height(self.n, row).powi(e);
            }
            if d > 0 {
                w *= params.t.powi(d);
            }
        }
        Ok(w * params.q.powi(self.area() as i32))
    }

    /// Exact-rational configuration weight for oracle comparisons.
    pub fn weight_rational(
        &self,
        params: &super::weights::RationalWeightParams,
    ) -> Result<num::BigRational, ModelError> {
        use num::traits::Pow;
        self.validate()?;
        if params.x.len() != self.n {
            return Err(ModelError::InvalidParams(
                "need one row weight per row".into(),
            ));
        }
        let mut w = num::BigRational::from_integer(1.into());
        for ((row, _col), (north, east)) in self.vertex_sets() {
            let d = super::weights::interaction_exponent(&north, &east);
            let e = east.len();
            for _ in 0..e {
                w *= &params.x[self.n - row as usize];
            }
            for _ in 0..d {
                w *= &params.t;
            }
        }
        let area = self.area();
        Ok(w * params.q.clone().pow(area as i64))
    }

    /// Forgets colors: per-edge multiplicities.
    pub fn to_colorblind(&self) -> ColorblindConfig {
        let mut vert = vec![0u32; self.n * self.m];
        let mut horiz = vec![0u32; self.n * self.m];
        for c in 1..=self.n as u32 {
            self.for_each_departure(c, |r, col, d| {
                let idx = (r as usize - 1) * self.m + (col as usize - 1);
                match d {
                    Departure::North => vert[idx] += 1,
                    Departure::East => horiz[idx] += 1,
                }
            });
        }
        ColorblindConfig {
            n: self.n,
            m: self.m,
            vert,
            horiz,
        }
    }
}

/// Edge-multiplicity configuration of the colorblind model on the standard
/// boundary (one path entering per west row).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorblindConfig {
    n: usize,
    m: usize,
    /// `vert[(r-1)*m + (c-1)]` = multiplicity of the vertical edge leaving
    /// vertex `(r, c)` northward (the exit edge for `r = 1`).
    vert: Vec<u32>,
    /// `horiz[(r-1)*m + (c-1)]` = multiplicity of the horizontal edge leaving
    /// vertex `(r, c)` eastward.
    horiz: Vec<u32>,
}

impl ColorblindConfig {
    pub fn new(n: usize, m: usize, vert: Vec<u32>, horiz: Vec<u32>) -> Result<Self, ModelError> {
        if vert.len() != n * m || horiz.len() != n * m {
            return Err(ModelError::InvalidConfig("edge grid size mismatch".into()));
        }
        let cfg = ColorblindConfig { n, m, vert, horiz };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    fn idx(&self, r: u32, c: u32) -> usize {
        (r as usize - 1) * self.m + (c as usize - 1)
    }

    pub fn vert_mult(&self, r: u32, c: u32) -> u32 {
        self.vert[self.idx(r, c)]
    }

    pub fn horiz_mult(&self, r: u32, c: u32) -> u32 {
        self.horiz[self.idx(r, c)]
    }

    /// Vertex in-/out-flows `(n_W, n_S, n_N, n_E)` with the standard west
    /// boundary (one inbound path per row at column 1).
    pub fn flows(&self, r: u32, c: u32) -> (u32, u32, u32, u32) {
        let nw = if c == 1 { 1 } else { self.horiz[self.idx(r, c - 1)] };
        let ns = if r == self.n as u32 { 0 } else { self.vert[self.idx(r + 1, c)] };
        let nn = self.vert[self.idx(r, c)];
        let ne = self.horiz[self.idx(r, c)];
        (nw, ns, nn, ne)
    }

    /// Vertex conservation `n_W + n_S = n_N + n_E` everywhere, no flow off the
    /// east edge.
    pub fn validate(&self) -> Result<(), ModelError> {
        for r in 1..=self.n as u32 {
            if self.horiz[self.idx(r, self.m as u32)] != 0 {
                return Err(ModelError::InvalidConfig(format!(
                    "flow leaves the east boundary at row {r}"
                )));
            }
            for c in 1..=self.m as u32 {
                let (nw, ns, nn, ne) = self.flows(r, c);
                if nw + ns != nn + ne {
                    return Err(ModelError::InvalidConfig(format!(
                        "conservation fails at vertex ({r}, {c}): {nw}+{ns} != {nn}+{ne}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn validate_against(&self, b: &BoundarySpec) -> Result<(), ModelError> {
        self.validate()?;
        if self.n != b.n() || self.m != b.column_count() as usize {
            return Err(ModelError::InvalidConfig("grid size mismatch".into()));
        }
        for c in 1..=self.m as u32 {
            let exits = self.vert[self.idx(1, c)];
            if exits != b.multiplicity_at(c) {
                return Err(ModelError::InvalidConfig(format!(
                    "column {c} exits {exits} paths, boundary wants {}",
                    b.multiplicity_at(c)
                )));
            }
        }
        Ok(())
    }

    /// Area: every vertical edge weighted by its multiplicity times the
    /// number of columns to its west.
    pub fn area(&self) -> i64 {
        let mut total = 0i64;
        for r in 1..=self.n as u32 {
            for c in 1..=self.m as u32 {
                total += self.vert[self.idx(r, c)] as i64 * (c as i64 - 1);
            }
        }
        total
    }

    /// Product of colorblind vertex weights times `q^area`.
    pub fn weight(&self, params: &super::WeightParams) -> Result<f64, ModelError> {
        self.validate()?;
        params.validate()?;
        if params.x.len() != self.n {
            return Err(ModelError::InvalidParams(
                "need one row weight per row".into(),
            ));
        }
        let mut w = 1.0f64;
        for r in 1..=self.n as u32 {
            let x = params.x_at_height(self.n, r);
            for c in 1..=self.m as u32 {
                let (nw, ns, nn, ne) = self.flows(r, c);
                w *= super::weights::colorblind_vertex_weight(nw, ns, nn, ne, x, params.t);
                if w == 0.0 {
                    return Ok(0.0);
                }
            }
        }
        Ok(w * params.q.powi(self.area() as i32))
    }

    /// Exact-rational weight for oracle comparisons.
    pub fn weight_rational(
        &self,
        params: &super::weights::RationalWeightParams,
    ) -> Result<num::BigRational, ModelError> {
        use num::traits::Pow;
        use num::Zero;
        self.validate()?;
        let mut w = num::BigRational::from_integer(1.into());
        for r in 1..=self.n as u32 {
            let x = &params.x[self.n - r as usize];
            for c in 1..=self.m as u32 {
                let (nw, ns, nn, ne) = self.flows(r, c);
                w *= super::weights::colorblind_vertex_weight_rational(
                    nw, ns, nn, ne, x, &params.t,
                );
                if w.is_zero() {
                    return Ok(w);
                }
            }
        }
        Ok(w * params.q.clone().pow(self.area()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_validation() {
        assert!(BoundarySpec::new(2, vec![(1, 1), (2, 1)], Coloring::Free).is_ok());
        assert!(BoundarySpec::new(2, vec![(2, 1), (1, 1)], Coloring::Free).is_err());
        assert!(BoundarySpec::new(3, vec![(1, 1), (2, 1)], Coloring::Free).is_err());
        assert!(BoundarySpec::new(1, vec![], Coloring::Free).is_err());
        let b = BoundarySpec::from_endpoints(&[0, 2, 2]).unwrap();
        assert_eq!(b.exits(), &[(1, 1), (3, 2)]);
    }

    #[test]
    fn monotonicity_enforced() {
        assert!(ColoredConfig::new(2, 2, vec![vec![], vec![1, 2]]).is_err());
        assert!(ColoredConfig::new(2, 2, vec![vec![2], vec![]]).is_err());
        assert!(ColoredConfig::new(2, 2, vec![vec![], vec![2]]).is_ok());
    }

    #[test]
    fn area_examples() {
        // A path with no east steps has no boxes to its left.
        let cfg = ColoredConfig::new(1, 1, vec![vec![]]).unwrap();
        assert_eq!(cfg.area(), 0);
        // East steps at heights (3,1) in columns (1,2): two vertical steps in
        // column 2 and one exit step in column 3.
        let cfg = ColoredConfig::new(3, 3, vec![vec![], vec![], vec![3, 1]]).unwrap();
        assert_eq!(cfg.area(), 2 * 1 + 1 * 2);
    }

    #[test]
    fn moving_an_east_step_changes_area_by_height_difference() {
        let lo = ColoredConfig::new(2, 2, vec![vec![], vec![1]]).unwrap();
        let hi = ColoredConfig::new(2, 2, vec![vec![], vec![2]]).unwrap();
        assert_eq!(lo.area() - hi.area(), 1 - 2);
    }

    #[test]
    fn projection_conserves_flow() {
        let cfg =
            ColoredConfig::new(3, 3, vec![vec![1, 1], vec![], vec![2, 2]]).unwrap();
        let cb = cfg.to_colorblind();
        cb.validate().unwrap();
        assert_eq!(cb.area(), cfg.area());
    }
}
