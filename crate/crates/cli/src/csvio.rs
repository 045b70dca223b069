//! Fixed CSV schemas for sampler and curve exports.
//!
//! - snapshots: `color,column,height` (one east step per line);
//! - occupancy: `row,col,v_mult_mean,h_mult_mean`;
//! - curves: `label,t,X,Y`.

use dwvm::arctic::CurveBranch;
use dwvm::model::ColoredConfig;
use dwvm::sampler::OccupancyField;
use std::fmt::Write as _;

pub fn snapshot_csv(cfg: &ColoredConfig) -> String {
    let mut out = String::from("color,column,height\n");
    for c in 1..=cfg.n() as u32 {
        let start = cfg.start_col(c);
        for (i, &h) in cfg.heights(c).iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", c, start + i as u32, h);
        }
    }
    out
}

pub fn occupancy_csv(field: &OccupancyField) -> String {
    let mut out = String::from("row,col,v_mult_mean,h_mult_mean\n");
    for r in 1..=field.rows as u32 {
        for c in 1..=field.cols as u32 {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                r,
                c,
                field.vert_mean(r, c),
                field.horiz_mean(r, c)
            );
        }
    }
    out
}

pub fn curves_csv(branches: &[CurveBranch]) -> String {
    let mut out = String::from("label,t,X,Y\n");
    for b in branches {
        for p in &b.points {
            let _ = writeln!(out, "{},{},{},{}", b.label, p.t, p.x, p.y);
        }
    }
    out
}
