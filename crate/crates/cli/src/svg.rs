//! Deterministic SVG rendering of path configurations with arctic-curve
//! overlays.
//!
//! Lattice frame: vertex `(row r, col j)` sits at `(j - 1, r)` in SVG user
//! units (SVG y grows downward, so row depth maps directly); the north
//! boundary is the line `y = 0`. Curves arrive in rescaled units and are
//! mapped by `(X, Y) -> (n X, -n Y)`.

use dwvm::arctic::{BranchLabel, CurveBranch};
use dwvm::model::{ColoredConfig, Departure};
use std::fmt::Write as _;

#[derive(Debug, Clone)]
pub struct RenderStyle {
    /// Pixels per lattice unit.
    pub cell: f64,
    pub path_width: f64,
    pub curve_width: f64,
    pub curve_color: String,
    pub conjectural_color: String,
    pub background: String,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            cell: 6.0,
            path_width: 0.35,
            curve_width: 0.5,
            curve_color: "#000000".into(),
            conjectural_color: "#00a000".into(),
            background: "#ffffff".into(),
        }
    }
}

/// Rainbow palette over the path index: smallest color drawn blue, largest
/// red.
fn path_color(index: usize, count: usize) -> String {
    let frac = if count <= 1 {
        0.0
    } else {
        index as f64 / (count - 1) as f64
    };
    // Hue rotation from 240 (blue) down to 0 (red).
    let hue = 240.0 * (1.0 - frac);
    format!("hsl({hue:.1},85%,45%)")
}

fn fmt_coord(v: f64) -> String {
    // Fixed decimals keep the output byte-identical across runs.
    format!("{v:.3}")
}

/// Renders colored polylines per path with curve overlays. Output is
/// byte-identical for identical inputs.
pub fn render_svg(cfg: &ColoredConfig, curves: &[CurveBranch], style: &RenderStyle) -> String {
    let n = cfg.n() as f64;
    let m = cfg.m() as f64;
    let margin = 1.5f64;
    let (w, h) = (m + 2.0 * margin, n + 1.0 + 2.0 * margin);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        (w * style.cell).ceil(),
        (h * style.cell).ceil(),
        fmt_coord(-margin),
        fmt_coord(-margin),
        fmt_coord(w),
        fmt_coord(h)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/>"#,
        fmt_coord(-margin),
        fmt_coord(-margin),
        fmt_coord(w),
        fmt_coord(h),
        style.background
    );
    // Domain frame.
    let _ = writeln!(
        svg,
        "<rect x=\"-0.5\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"0.08\"/>",
        fmt_coord(m),
        fmt_coord(n + 0.5)
    );

    for c in 1..=cfg.n() as u32 {
        let mut pts: Vec<(f64, f64)> = Vec::new();
        // Entry vertex of the path.
        let mut cur = (cfg.start_col(c) as f64 - 1.0, c as f64);
        pts.push(cur);
        cfg.for_each_departure(c, |r, col, d| {
            let v = (col as f64 - 1.0, r as f64);
            if v != cur {
                pts.push(v);
                cur = v;
            }
            match d {
                Departure::North => {
                    let up = (v.0, v.1 - 1.0);
                    pts.push(up);
                    cur = up;
                }
                Departure::East => {
                    let right = (v.0 + 1.0, v.1);
                    pts.push(right);
                    cur = right;
                }
            }
        });
        let body: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{},{}", fmt_coord(x), fmt_coord(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="{}" stroke-linecap="round" stroke-linejoin="round"/>"#,
            body.join(" "),
            path_color(c as usize - 1, cfg.n()),
            fmt_coord(style.path_width)
        );
    }

    for branch in curves {
        let color = if branch.label == BranchLabel::ConjecturalVertical {
            &style.conjectural_color
        } else {
            &style.curve_color
        };
        let body: Vec<String> = branch
            .points
            .iter()
            .map(|p| {
                format!(
                    "{},{}",
                    fmt_coord(n * p.x),
                    fmt_coord(-n * p.y)
                )
            })
            .collect();
        if body.len() < 2 {
            continue;
        }
        let dash = if branch.label == BranchLabel::ConjecturalVertical {
            r#" stroke-dasharray="1,0.6""#
        } else {
            ""
        };
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="{}"{}/>"#,
            body.join(" "),
            color,
            fmt_coord(style.curve_width),
            dash
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use dwvm::arctic::{branch_se, DensityProfile};

    #[test]
    fn curve_only_when_config_empty_paths() {
        let cfg = ColoredConfig::new(1, 1, vec![vec![]]).unwrap();
        let p = DensityProfile::uniform(1.0);
        let branch = branch_se(&p, 32).unwrap();
        let svg = render_svg(&cfg, &[branch], &RenderStyle::default());
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("polyline"));
    }

    #[test]
    fn byte_identical_output() {
        let cfg = ColoredConfig::new(3, 3, vec![vec![1], vec![2, 1], vec![3]]).unwrap();
        let a = render_svg(&cfg, &[], &RenderStyle::default());
        let b = render_svg(&cfg, &[], &RenderStyle::default());
        assert_eq!(a, b);
        assert_eq!(a.matches("<polyline").count(), 3);
    }
}
