//! Runtime oracle suite behind the `verify` subcommand: a fast subset of the
//! correctness checks with one pass/fail line per item.

use dwvm::arctic::{
    branch_se, branch_sw, find_tstar, x0, x0_q, x0_quadrature, DensityProfile, Engine,
};
use dwvm::exact::{
    brute_force_z, count_touching, z_endpoints_q_ratio, z_endpoints_t0, z_t0, z_t1_free,
    EnumLimits, Mode,
};
use dwvm::model::{BoundarySpec, ColorSet, Coloring};
use dwvm::sampler::{proposal_distribution, ChainState};
use dwvm::slide::{is_strictly_nonintersecting, slide, unslide};
use dwvm::{colorblind_vertex_weight, colored_vertex_weight, WeightParams};

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{} {:<44} {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        out.push_str(&format!(
            "{}/{} checks passed\n",
            self.checks.iter().filter(|c| c.passed).count(),
            self.checks.len()
        ));
        out
    }
}

fn check(name: &'static str, f: impl FnOnce() -> Result<String, String>) -> CheckResult {
    match f() {
        Ok(detail) => CheckResult {
            name,
            passed: true,
            detail,
        },
        Err(detail) => CheckResult {
            name,
            passed: false,
            detail,
        },
    }
}

fn subsets(universe: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for &c in universe {
        let mut more = Vec::new();
        for s in &out {
            let mut t = s.clone();
            t.push(c);
            more.push(t);
        }
        out.extend(more);
    }
    out
}

fn vertex_merge_check() -> Result<String, String> {
    let universe: Vec<u32> = (1..=6).collect();
    let mut cases = 0usize;
    for t in [0.0, 0.3, 1.0, 2.0] {
        for x in [0.8, 1.0] {
            for ss in subsets(&universe) {
                for sw in subsets(&universe) {
                    if ss.len() + sw.len() > 4 || ss.iter().any(|c| sw.contains(c)) {
                        continue;
                    }
                    let s_s = ColorSet::from_colors(&ss);
                    let s_w = ColorSet::from_colors(&sw);
                    let present: Vec<u32> = s_s.union(&s_w).iter().collect();
                    let total = present.len() as u32;
                    for n_e in 0..=total {
                        let n_n = total - n_e;
                        let mut colored_sum = 0.0;
                        for se in subsets(&present) {
                            if se.len() as u32 != n_e {
                                continue;
                            }
                            let s_e = ColorSet::from_colors(&se);
                            let s_n: ColorSet =
                                present.iter().copied().filter(|c| !s_e.contains(*c)).collect();
                            colored_sum += colored_vertex_weight(&s_w, &s_s, &s_n, &s_e, x, t);
                        }
                        let blind = colorblind_vertex_weight(
                            sw.len() as u32,
                            ss.len() as u32,
                            n_n,
                            n_e,
                            x,
                            t,
                        );
                        if (colored_sum - blind).abs() > 1e-12 {
                            return Err(format!(
                                "mismatch at ss={ss:?}, sw={sw:?}, n_e={n_e}, t={t}: {colored_sum} vs {blind}"
                            ));
                        }
                        cases += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{cases} occupancies, exact to 1e-12"))
}

fn partition_equality_check() -> Result<String, String> {
    let limits = EnumLimits::default();
    for n in 1..=3usize {
        let b = BoundarySpec::dwbc(n).map_err(|e| e.to_string())?;
        let x: Vec<f64> = (0..n).map(|i| 0.9 + 0.2 * i as f64).collect();
        for t in [0.0, 0.5, 1.0, 2.0] {
            for q in [1.0, 1.3] {
                let params = WeightParams::new(x.clone(), t, q).map_err(|e| e.to_string())?;
                let zc = brute_force_z(&b, &params, Mode::Colored, &limits)
                    .map_err(|e| e.to_string())?;
                let zb = brute_force_z(&b, &params, Mode::Colorblind, &limits)
                    .map_err(|e| e.to_string())?;
                if (zc - zb).abs() > 1e-10 * zb.abs().max(1.0) {
                    return Err(format!("n={n}, t={t}, q={q}: {zc} vs {zb}"));
                }
            }
        }
    }
    Ok("colored(free) = colorblind for n <= 3".into())
}

fn closed_form_check() -> Result<String, String> {
    let limits = EnumLimits::default();
    let x = [1.1, 0.7, 1.4];
    let b = BoundarySpec::dwbc(3).map_err(|e| e.to_string())?;
    let p0 = WeightParams::new(x.to_vec(), 0.0, 1.0).map_err(|e| e.to_string())?;
    let z0 = brute_force_z(&b, &p0, Mode::Colored, &limits).map_err(|e| e.to_string())?;
    if (z0 - z_t0(&x)).abs() > 1e-10 * z0.abs() {
        return Err(format!("t=0: {} vs {}", z0, z_t0(&x)));
    }
    let p1 = WeightParams::new(x.to_vec(), 1.0, 1.0).map_err(|e| e.to_string())?;
    let z1 = brute_force_z(&b, &p1, Mode::Colored, &limits).map_err(|e| e.to_string())?;
    let perm = z_t1_free(&x).map_err(|e| e.to_string())?;
    if (z1 - perm).abs() > 1e-10 * z1.abs() {
        return Err(format!("t=1: {z1} vs {perm}"));
    }
    let ones = WeightParams::uniform(3, 1.0, 1.0).map_err(|e| e.to_string())?;
    let z35 = brute_force_z(&b, &ones, Mode::Colored, &limits).map_err(|e| e.to_string())?;
    let zeros = WeightParams::uniform(3, 0.0, 1.0).map_err(|e| e.to_string())?;
    let z8 = brute_force_z(&b, &zeros, Mode::Colored, &limits).map_err(|e| e.to_string())?;
    if z35 != 35.0 || z8 != 8.0 {
        return Err(format!("Z3(1) = {z35}, Z3(0) = {z8}"));
    }
    Ok("product, permanent, 35 and 8".into())
}

fn endpoint_count_check() -> Result<String, String> {
    let limits = EnumLimits::default();
    for a in [vec![0u64, 2], vec![0, 1, 3], vec![0, 2, 5]] {
        let b = BoundarySpec::from_endpoints(&a.iter().map(|&v| v as i64).collect::<Vec<_>>())
            .map_err(|e| e.to_string())?;
        let count = count_touching(&b, &limits).map_err(|e| e.to_string())?;
        let formula = z_endpoints_t0(&a).map_err(|e| e.to_string())?;
        if count != formula {
            return Err(format!("a={a:?}: {count} vs {formula}"));
        }
    }
    for q in [0.5, 2.0] {
        let a = [0u64, 1, 3];
        let mut moved: Vec<i64> = a.iter().map(|&v| v as i64).collect();
        moved[2] += 2;
        let bp = BoundarySpec::from_endpoints(&a.iter().map(|&v| v as i64).collect::<Vec<_>>())
            .map_err(|e| e.to_string())?;
        let bm = BoundarySpec::from_endpoints(&moved).map_err(|e| e.to_string())?;
        let zp = brute_force_z(
            &bp,
            &WeightParams::uniform(3, 0.0, q).unwrap(),
            Mode::Colorblind,
            &limits,
        )
        .map_err(|e| e.to_string())?;
        let zm = brute_force_z(
            &bm,
            &WeightParams::uniform(3, 0.0, q).unwrap(),
            Mode::Colorblind,
            &limits,
        )
        .map_err(|e| e.to_string())?;
        let got = z_endpoints_q_ratio(&a, 2, 2, q).map_err(|e| e.to_string())?;
        if (got - zm / zp).abs() > 1e-10 * (zm / zp) {
            return Err(format!("q={q}: {got} vs {}", zm / zp));
        }
    }
    Ok("Vandermonde counts and q-ratios".into())
}

fn slide_check() -> Result<String, String> {
    use dwvm::exact::enumerate_colored;
    let limits = EnumLimits::default();
    let b = BoundarySpec::dwbc(3).map_err(|e| e.to_string())?;
    let params = WeightParams::uniform(3, 0.0, 1.2).map_err(|e| e.to_string())?;
    let mut support = 0;
    for cfg in enumerate_colored(&b, &limits).map_err(|e| e.to_string())? {
        let w = cfg.weight(&params).map_err(|e| e.to_string())?;
        if w == 0.0 {
            continue;
        }
        support += 1;
        let s = slide(&cfg).map_err(|e| e.to_string())?;
        if !is_strictly_nonintersecting(&s) {
            return Err("slide image intersects".into());
        }
        if s.area() != cfg.area() {
            return Err("area not preserved".into());
        }
        let w2 = s.weight(&params).map_err(|e| e.to_string())?;
        if (w2 - w).abs() > 1e-12 * w {
            return Err("weight not preserved".into());
        }
        if unslide(&s).map_err(|e| e.to_string())? != cfg {
            return Err("round trip failed".into());
        }
    }
    Ok(format!("{support} touching configurations, bijective"))
}

fn stationarity_check() -> Result<String, String> {
    use dwvm::exact::enumerate_colored;
    let b = BoundarySpec::new(2, vec![(1, 1), (2, 1)], Coloring::Free).map_err(|e| e.to_string())?;
    let params = WeightParams::new(vec![1.0, 2.0], 0.5, 1.3).map_err(|e| e.to_string())?;
    let states: Vec<_> = enumerate_colored(&b, &EnumLimits::default())
        .map_err(|e| e.to_string())?
        .collect();
    let weights: Vec<f64> = states
        .iter()
        .map(|c| c.weight(&params).unwrap())
        .collect();
    let z: f64 = weights.iter().sum();
    let pi: Vec<f64> = weights.iter().map(|w| w / z).collect();
    let key = |cfg: &dwvm::ColoredConfig| format!("{:?}", (1..=2).map(|c| cfg.heights(c).to_vec()).collect::<Vec<_>>());
    let index: std::collections::HashMap<String, usize> = states
        .iter()
        .enumerate()
        .map(|(i, c)| (key(c), i))
        .collect();
    let n = states.len();
    let mut p = vec![vec![0.0; n]; n];
    for (i, cfg) in states.iter().enumerate() {
        let state = ChainState::from_config(cfg).map_err(|e| e.to_string())?;
        let mut stay = 0.0;
        for (prop, prob) in proposal_distribution(&state) {
            match prop {
                None => stay += prob,
                Some(prop) => {
                    let acc = state.acceptance_ratio(&prop, &params);
                    let mut next = state.clone();
                    next.apply(&prop);
                    let j = index[&key(&next.config())];
                    p[i][j] += prob * acc;
                    stay += prob * (1.0 - acc);
                }
            }
        }
        p[i][i] += stay;
    }
    let mut worst = 0.0f64;
    for j in 0..n {
        let pij: f64 = (0..n).map(|i| pi[i] * p[i][j]).sum();
        worst = worst.max((pij - pi[j]).abs());
    }
    let mut db = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            db = db.max((pi[i] * p[i][j] - pi[j] * p[j][i]).abs());
        }
    }
    if worst >= 1e-12 || db >= 1e-12 {
        return Err(format!("|piP - pi| = {worst:.2e}, detailed balance residual {db:.2e}"));
    }
    Ok(format!(
        "|piP - pi| = {worst:.1e}, detailed balance {db:.1e}"
    ))
}

fn arctic_regression_check() -> Result<String, String> {
    // Parabola residuals for the uniform profile.
    let p = DensityProfile::uniform(1.0);
    let se = branch_se(&p, 64).map_err(|e| e.to_string())?;
    for pt in &se.points {
        let r = (pt.y + 2.0 * pt.x).powi(2) - 4.0 * (pt.y + 1.0);
        if r.abs() > 1e-8 {
            return Err(format!("SE parabola residual {r:.2e}"));
        }
    }
    let sw = branch_sw(&p, 64).map_err(|e| e.to_string())?;
    for pt in &sw.points {
        let r = (pt.y - 2.0 * pt.x + 2.0).powi(2) - 4.0 * (pt.y + 1.0);
        if r.abs() > 1e-8 {
            return Err(format!("SW parabola residual {r:.2e}"));
        }
    }
    // t* identities.
    let g = DensityProfile::uniform_with_gaps(&[(0.75, 1.0)]).map_err(|e| e.to_string())?;
    let t = find_tstar(&g, 0, None).map_err(|e| e.to_string())?;
    if (t - 0.75 * 3.0).abs() > 1e-10 {
        return Err(format!("gapped t* = {t}"));
    }
    let d = DensityProfile::uniform_with_gaps(&[(0.25, 1.0), (0.5, 1.0)]).map_err(|e| e.to_string())?;
    let t1 = find_tstar(&d, 0, None).map_err(|e| e.to_string())?;
    if (t1 - (13.0 - 41.0f64.sqrt()) / 8.0).abs() > 1e-10 {
        return Err(format!("double-gap t1* = {t1}"));
    }
    // Frozen meeting point (209/512, -1).
    let f = DensityProfile::frozen_ends(1.0 / 16.0, 0.25).map_err(|e| e.to_string())?;
    let se = branch_se(&f, 64).map_err(|e| e.to_string())?;
    let last = se.points.last().unwrap();
    if (last.x - 209.0 / 512.0).abs() > 1e-10 || (last.y + 1.0).abs() > 1e-10 {
        return Err(format!("frozen meeting point ({}, {})", last.x, last.y));
    }
    Ok("parabolas, t*, frozen meeting point".into())
}

fn shear_identity_check() -> Result<String, String> {
    let p = DensityProfile::uniform_with_gaps(&[(0.25, 1.0)]).map_err(|e| e.to_string())?;
    for q in [None, Some(2.0)] {
        let engine = Engine::new(&p, q).map_err(|e| e.to_string())?;
        let branches = match q {
            None => {
                let sw = branch_sw(&p, 48).map_err(|e| e.to_string())?;
                vec![sw]
            }
            Some(qv) => dwvm::arctic::q_branches(&p, qv, 48)
                .map_err(|e| e.to_string())?
                .into_iter()
                .filter(|b| b.label == dwvm::arctic::BranchLabel::Sw)
                .collect(),
        };
        for b in branches {
            for pt in b.points.iter().filter(|pt| pt.t.is_finite()) {
                let tt = match q {
                    None => p.alpha_end() + 1.0 - pt.t,
                    Some(_) => pt.t,
                };
                let (xn, yn) = engine.nilp_point(tt).map_err(|e| e.to_string())?;
                if (pt.x - (xn + yn)).abs() > 1e-9 || (pt.y - yn).abs() > 1e-9 {
                    return Err(format!("shear identity off at t = {}", pt.t));
                }
            }
        }
    }
    Ok("pointwise to 1e-9, q in {1, 2}".into())
}

fn derivative_check() -> Result<String, String> {
    let p = DensityProfile::uniform_with_gaps(&[(0.25, 1.0)]).map_err(|e| e.to_string())?;
    let h = 1e-5;
    for t in [0.7, 3.8, -1.2] {
        let (_, dx) = x0(&p, t).map_err(|e| e.to_string())?;
        let (xp, _) = x0(&p, t + h).map_err(|e| e.to_string())?;
        let (xm, _) = x0(&p, t - h).map_err(|e| e.to_string())?;
        let fd = (xp - xm) / (2.0 * h);
        if ((dx - fd) / fd).abs() > 1e-6 {
            return Err(format!("x0' at t={t}: {dx} vs {fd}"));
        }
        let (xq, dq) = x0_quadrature(&p, t).map_err(|e| e.to_string())?;
        let (xc, dc) = x0(&p, t).map_err(|e| e.to_string())?;
        if ((xq - xc) / xc).abs() > 1e-9 || ((dq - dc) / dc).abs() > 1e-9 {
            return Err(format!("quadrature route differs at t={t}"));
        }
    }
    for q in [2.0, 0.5] {
        let t = -1.0;
        let (_, dx) = x0_q(&p, t, q).map_err(|e| e.to_string())?;
        let (xp, _) = x0_q(&p, t + h, q).map_err(|e| e.to_string())?;
        let (xm, _) = x0_q(&p, t - h, q).map_err(|e| e.to_string())?;
        let fd = (xp - xm) / (2.0 * h);
        if ((dx - fd) / fd).abs() > 1e-6 {
            return Err(format!("x0^q' at q={q}: {dx} vs {fd}"));
        }
    }
    Ok("closed vs quadrature vs central differences".into())
}

fn tropical_check() -> Result<String, String> {
    let p = DensityProfile::plateau(0.25, 0.25).map_err(|e| e.to_string())?;
    let c = dwvm::arctic::tropical_curve(&p, 64);
    for pt in &c.points {
        if (pt.x - p.alpha(pt.t)).abs() > 1e-14 || (pt.y + pt.t).abs() > 1e-14 {
            return Err(format!("tropical point off at t = {}", pt.t));
        }
    }
    Ok("X = alpha(t), Y = -t at all samples".into())
}

/// Runs the oracle suite.
pub fn run_verification() -> VerifyReport {
    let checks = vec![
        check("vertex color merge (<= 4 paths)", vertex_merge_check),
        check("partition equality colored = colorblind", partition_equality_check),
        check("closed forms t = 0 and t = 1", closed_form_check),
        check("endpoint counts and q-ratios", endpoint_count_check),
        check("sliding bijection", slide_check),
        check("chain stationarity and detailed balance", stationarity_check),
        check("arctic closed-form regressions", arctic_regression_check),
        check("shear/translation identities", shear_identity_check),
        check("derivative evaluators", derivative_check),
        check("tropical limit", tropical_check),
    ];
    VerifyReport { checks }
}

#[cfg(test)]
mod tests {
    #[test]
    fn verification_suite_passes() {
        let report = super::run_verification();
        assert!(report.all_passed(), "\n{}", report.render());
    }
}
