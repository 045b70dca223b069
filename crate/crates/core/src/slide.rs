//! The sliding bijection between `t = 0` touching-path configurations and
//! strictly non-intersecting lattice paths (NILP).
//!
//! The `i`-th path from the top is translated `i - 1` steps east; endpoint
//! abscissas map as `a_i -> a_i + i`. Horizontal translations preserve row
//! weights and the per-path area, so configuration weights at `t = 0` are
//! transported unchanged.

use crate::model::{ColoredConfig, Departure, ModelError};
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SlideError {
    #[error("horizontal edge at row {row}, column {col} is multiply occupied (outside t = 0 support)")]
    MultiplyOccupiedHorizontal { row: u32, col: u32 },
    #[error("color {color} cannot be shifted {shift} columns left from start column {start}")]
    ShiftUnderflow { color: u32, shift: u32, start: u32 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn multiply_occupied_horizontal(cfg: &ColoredConfig) -> Option<(u32, u32)> {
    let mut seen = HashSet::new();
    for c in 1..=cfg.n() as u32 {
        let mut hit = None;
        cfg.for_each_departure(c, |r, col, d| {
            if d == Departure::East && !seen.insert((r, col)) && hit.is_none() {
                hit = Some((r, col));
            }
        });
        if let Some(rc) = hit {
            return Some(rc);
        }
    }
    None
}

/// True when no two paths share a vertex (which also forces every edge
/// multiplicity to be at most one).
pub fn is_strictly_nonintersecting(cfg: &ColoredConfig) -> bool {
    let mut seen = HashSet::new();
    for c in 1..=cfg.n() as u32 {
        let mut prev_entry = c;
        let mut col = cfg.start_col(c);
        let mut vertices: Vec<(u32, u32)> = Vec::new();
        for &h in cfg.heights(c) {
            for r in h..=prev_entry {
                vertices.push((r, col));
            }
            prev_entry = h;
            col += 1;
        }
        for r in 1..=prev_entry {
            vertices.push((r, col));
        }
        for v in vertices {
            if !seen.insert(v) {
                return false;
            }
        }
    }
    true
}

/// Slides path `c` east by `c - 1` columns, separating touching paths into a
/// strictly non-intersecting family.
pub fn slide(cfg: &ColoredConfig) -> Result<ColoredConfig, SlideError> {
    if let Some((row, col)) = multiply_occupied_horizontal(cfg) {
        return Err(SlideError::MultiplyOccupiedHorizontal { row, col });
    }
    let n = cfg.n();
    let mut m = 0u64;
    for c in 1..=n as u32 {
        m = m.max(cfg.exit_col(c) as u64 + c as u64 - 1);
    }
    let start_cols: Vec<u32> = (1..=n as u32).map(|c| cfg.start_col(c) + c - 1).collect();
    let heights: Vec<Vec<u32>> = (1..=n as u32).map(|c| cfg.heights(c).to_vec()).collect();
    Ok(ColoredConfig::with_start_cols(
        n,
        m as usize,
        start_cols,
        heights,
    )?)
}

/// Inverse slide: path `c` moves west by `c - 1` columns. Inputs whose
/// un-shift produces a multiply occupied horizontal edge are rejected.
pub fn unslide(cfg: &ColoredConfig) -> Result<ColoredConfig, SlideError> {
    let n = cfg.n();
    let mut start_cols = Vec::with_capacity(n);
    for c in 1..=n as u32 {
        let shift = c - 1;
        let start = cfg.start_col(c);
        if start <= shift {
            return Err(SlideError::ShiftUnderflow {
                color: c,
                shift,
                start,
            });
        }
        start_cols.push(start - shift);
    }
    let heights: Vec<Vec<u32>> = (1..=n as u32).map(|c| cfg.heights(c).to_vec()).collect();
    let m = start_cols
        .iter()
        .zip(&heights)
        .map(|(&s, h)| s as usize + h.len())
        .max()
        .unwrap_or(1);
    let out = ColoredConfig::with_start_cols(n, m, start_cols, heights)?;
    if let Some((row, col)) = multiply_occupied_horizontal(&out) {
        return Err(SlideError::MultiplyOccupiedHorizontal { row, col });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{enumerate_colored, EnumLimits};
    use crate::model::{BoundarySpec, WeightParams};
    use approx::assert_relative_eq;

    #[test]
    fn single_path_is_unchanged() {
        let cfg = ColoredConfig::new(1, 3, vec![vec![1, 1]]).unwrap();
        let s = slide(&cfg).unwrap();
        assert_eq!(s, cfg);
    }

    #[test]
    fn endpoints_shift_by_index() {
        // Touching endpoints (0,1,2) -> NILP endpoints (0,2,4).
        let b = BoundarySpec::from_endpoints(&[0, 1, 2]).unwrap();
        let params = WeightParams::uniform(3, 0.0, 1.0).unwrap();
        for cfg in enumerate_colored(&b, &EnumLimits::default()).unwrap() {
            if cfg.weight(&params).unwrap() == 0.0 {
                continue;
            }
            let s = slide(&cfg).unwrap();
            let exits: Vec<u32> = (1..=3).map(|c| s.exit_col(c) - 1).collect();
            assert_eq!(exits, vec![0, 2, 4]);
        }
    }

    #[test]
    fn multiply_occupied_is_rejected() {
        // Colors 2 and 3 both step east at (2, 1).
        let cfg = ColoredConfig::new(3, 2, vec![vec![], vec![2], vec![2]]).unwrap();
        assert!(matches!(
            slide(&cfg),
            Err(SlideError::MultiplyOccupiedHorizontal { row: 2, col: 1 })
        ));
    }

    #[test]
    fn exhaustive_roundtrip_and_transport() {
        // Every t=0-support configuration for n <= 3 boundaries: the slide is
        // a bijection onto strictly non-intersecting families, and weight and
        // area are transported exactly.
        let boundaries = [
            BoundarySpec::dwbc(2).unwrap(),
            BoundarySpec::dwbc(3).unwrap(),
            BoundarySpec::from_endpoints(&[0, 2, 3]).unwrap(),
        ];
        let q = 1.3;
        for b in boundaries {
            let params = WeightParams::uniform(b.n(), 0.0, q).unwrap();
            let mut images = std::collections::HashSet::new();
            let mut support = 0usize;
            for cfg in enumerate_colored(&b, &EnumLimits::default()).unwrap() {
                let w = cfg.weight(&params).unwrap();
                if w == 0.0 {
                    continue;
                }
                support += 1;
                let s = slide(&cfg).unwrap();
                assert!(is_strictly_nonintersecting(&s), "image must be a NILP");
                assert_eq!(s.area(), cfg.area(), "area is preserved");
                assert_relative_eq!(s.weight(&params).unwrap(), w, max_relative = 1e-12);
                let back = unslide(&s).unwrap();
                assert_eq!(back, cfg, "round trip is the identity");
                assert!(images.insert(format!("{s:?}")), "slide must be injective");
            }
            assert!(support > 0);
        }
    }
}
