use dwvm::arctic::{assemble_arctic, AssembleOptions, DensityProfile};
use dwvm::model::BoundarySpec;
use dwvm::sampler::{run, RunOptions};
use dwvm::WeightParams;

fn main() {
    let n = 150usize;
    let b = BoundarySpec::dwbc(n).unwrap();
    let profile = DensityProfile::uniform(1.0);
    for macro_q in [1.0f64, 0.5] {
        let curve_q = if macro_q == 1.0 { None } else { Some(macro_q) };
        let curves = assemble_arctic(&profile, curve_q, &AssembleOptions { points_per_branch: 1024, conjectural_segments: false }).unwrap();
        for burn in [30_000u64, 50_000] {
            let sq = macro_q.powf(1.0 / n as f64);
            let params = WeightParams::uniform(n, 0.0, sq).unwrap();
            let opts = RunOptions { sweeps: 10_000, burn_in: burn, seed: 77, snapshot_every: None, observe_every: 10 };
            let out = run(&b, &params, &opts).unwrap();
            let occ = &out.occupancy;
            let scale = n as f64;
            for level in [0.05f64, 0.1, 0.15, 0.25, 0.5] {
                let mut pts: Vec<(f64,f64)> = Vec::new();
                for c in 1..=n as u32 {
                    for r in 1..n as u32 {
                        let (a, bb) = (occ.vert_mean(r, c), occ.vert_mean(r+1, c));
                        if (a-level)*(bb-level) < 0.0 {
                            let frac = (level-a)/(bb-a);
                            pts.push(((c as f64-1.0)/scale, -((r as f64-0.5)+frac)/scale));
                        }
                    }
                }
                for r in 1..=n as u32 {
                    for c in 1..n as u32 {
                        let (a, bb) = (occ.vert_mean(r, c), occ.vert_mean(r, c+1));
                        if (a-level)*(bb-level) < 0.0 {
                            let frac = (level-a)/(bb-a);
                            pts.push(((c as f64-1.0+frac)/scale, -(r as f64-0.5)/scale));
                        }
                    }
                }
                let dist = |p: (f64,f64)| -> f64 {
                    let mut best = f64::INFINITY;
                    for b in &curves {
                        for w in b.points.windows(2) {
                            let (ax,ay,bx,by) = (w[0].x,w[0].y,w[1].x,w[1].y);
                            let (dx,dy) = (bx-ax, by-ay);
                            let l2 = dx*dx+dy*dy;
                            let t = if l2==0.0 {0.0} else {(((p.0-ax)*dx+(p.1-ay)*dy)/l2).clamp(0.0,1.0)};
                            best = best.min(((p.0-(ax+t*dx)).powi(2)+(p.1-(ay+t*dy)).powi(2)).sqrt());
                        }
                    }
                    best
                };
                let inside = pts.iter().filter(|&&p| dist(p) <= 0.05).count();
                let worst = pts.iter().map(|&p| dist(p)).fold(0.0f64, f64::max);
                println!("q={macro_q} burn={burn} level={level}: {} pts, fraction {:.3}, worst {:.3}",
                         pts.len(), inside as f64/pts.len().max(1) as f64, worst);
            }
        }
    }
}
