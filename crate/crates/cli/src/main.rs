//! `dwvm`: sample, evaluate and render domain-wall vertex models.

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use dwvm::arctic::{assemble_arctic, tropical_curve, AssembleOptions, Engine};
use dwvm::exact::{brute_force_z, z_endpoints_t0, z_t0, z_t1_free, EnumLimits, Mode};
use dwvm::sampler::run as run_chain;
use dwvm_cli::scenario::{parse_scenario, resolve, ResolvedScenario};
use dwvm_cli::{csvio, svg, verify};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dwvm", version, about = "Domain-wall vertex models: exact checks, sampling and arctic curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ScenarioArgs {
    /// Scenario document (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the scenario sweep count.
    #[arg(long)]
    sweeps: Option<u64>,
    /// Override the scenario burn-in.
    #[arg(long)]
    burnin: Option<u64>,
    /// Samples per curve branch.
    #[arg(long, default_value_t = 256)]
    branch_points: usize,
    /// Emit the non-normative vertical segments for frozen regions.
    #[arg(long, default_value_t = false)]
    conjectural_segments: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the oracle cross-check suite and print a pass/fail table.
    Verify,
    /// Evaluate closed-form partition functions for a scenario.
    Exact(ScenarioArgs),
    /// Run Metropolis chains and write snapshots plus occupancy CSV.
    Sample(ScenarioArgs),
    /// Write arctic-curve branch CSV and a residual report.
    Curve(ScenarioArgs),
    /// Sample and overlay the predicted curve in an SVG figure.
    Render(ScenarioArgs),
}

fn load(args: &ScenarioArgs) -> Result<ResolvedScenario> {
    let text = std::fs::read_to_string(&args.scenario)
        .with_context(|| format!("reading {}", args.scenario.display()))?;
    let sc = parse_scenario(&text)?;
    let mut resolved = resolve(&sc)?;
    if let Some(seed) = args.seed {
        resolved.run.seed = seed;
    }
    if let Some(sweeps) = args.sweeps {
        resolved.run.sweeps = sweeps;
    }
    if let Some(burnin) = args.burnin {
        resolved.run.burn_in = burnin;
    }
    Ok(resolved)
}

fn write(path: &Path, content: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_exact(args: &ScenarioArgs) -> Result<()> {
    let r = load(args)?;
    let n = r.boundary.n();
    println!("n = {n}, exits = {:?}", r.boundary.exits());
    println!("Z_t0(x)      = {}", z_t0(&r.params.x));
    if n <= 20 {
        println!("Z_t1_free(x) = {}", z_t1_free(&r.params.x)?);
    }
    let slots = r.boundary.exit_slots();
    let endpoints: Vec<u64> = slots.iter().map(|&c| (c - 1) as u64).collect();
    if endpoints.windows(2).all(|w| w[0] < w[1]) {
        println!(
            "touching count (t=0, x=1) = {}",
            z_endpoints_t0(&endpoints)?
        );
    }
    if n <= 5 {
        let zc = brute_force_z(&r.boundary, &r.params, Mode::Colored, &EnumLimits::default())?;
        let zb = brute_force_z(
            &r.boundary,
            &r.params,
            Mode::Colorblind,
            &EnumLimits::default(),
        )?;
        println!("brute force: colored = {zc}, colorblind = {zb}");
    }
    Ok(())
}

fn cmd_sample(args: &ScenarioArgs) -> Result<()> {
    let r = load(args)?;
    let out = run_chain(&r.boundary, &r.params, &r.run)?;
    println!(
        "{} proposals, {} flips and {} swaps accepted, {} no-ops",
        out.stats.proposals, out.stats.flips_accepted, out.stats.swaps_accepted, out.stats.noops
    );
    write(
        &args.out.join("occupancy.csv"),
        &csvio::occupancy_csv(&out.occupancy),
    )?;
    write(
        &args.out.join("final.csv"),
        &csvio::snapshot_csv(&out.final_config),
    )?;
    for (sweep, snap) in &out.snapshots {
        write(
            &args.out.join(format!("snapshot_{sweep:08}.csv")),
            &csvio::snapshot_csv(snap),
        )?;
    }
    Ok(())
}

fn curve_branches(r: &ResolvedScenario, args: &ScenarioArgs) -> Result<Vec<dwvm::arctic::CurveBranch>> {
    let profile = r
        .profile
        .clone()
        .context("curve commands need a density-based boundary")?;
    let opts = AssembleOptions {
        points_per_branch: args.branch_points,
        conjectural_segments: args.conjectural_segments,
    };
    let mut branches = match r.curve_q {
        Some(q) if q.is_infinite() => vec![tropical_curve(&profile, args.branch_points)],
        q => assemble_arctic(&profile, q, &opts)?,
    };
    branches.retain(|b| !b.points.is_empty());
    Ok(branches)
}

fn cmd_curve(args: &ScenarioArgs) -> Result<()> {
    let r = load(args)?;
    let branches = curve_branches(&r, args)?;
    write(&args.out.join("curves.csv"), &csvio::curves_csv(&branches))?;
    // Residual report: closed-form conics for the uniform profile, shear
    // identities in general.
    let profile = r.profile.as_ref().unwrap();
    let mut report = String::new();
    let uniform_p = profile
        .pieces()
        .filter(|p| p.len() == 1)
        .map(|p| p[0].slope);
    if let (Some(p), None) = (uniform_p, r.curve_q) {
        if (p - 1.0).abs() < 1e-12 {
            let mut worst = 0.0f64;
            for b in &branches {
                for pt in &b.points {
                    let r1 = (pt.y + 2.0 * pt.x).powi(2) - 4.0 * (pt.y + 1.0);
                    let r2 = (pt.y - 2.0 * pt.x + 2.0).powi(2) - 4.0 * (pt.y + 1.0);
                    worst = worst.max(r1.abs().min(r2.abs()));
                }
            }
            report.push_str(&format!("parabola residual (max): {worst:.3e}\n"));
        }
    }
    if matches!(r.curve_q, None) {
        let engine = Engine::new(profile, None)?;
        let ae = profile.alpha_end();
        let mut worst = 0.0f64;
        for b in branches
            .iter()
            .filter(|b| b.label == dwvm::arctic::BranchLabel::Sw)
        {
            for pt in b.points.iter().filter(|pt| pt.t.is_finite()) {
                let (xn, yn) = engine.nilp_point(ae + 1.0 - pt.t)?;
                worst = worst.max((pt.x - xn - yn).abs().max((pt.y - yn).abs()));
            }
        }
        report.push_str(&format!("shear identity residual (max): {worst:.3e}\n"));
    }
    if report.is_empty() {
        report.push_str("no closed-form residuals for this profile\n");
    }
    write(&args.out.join("residuals.txt"), &report)?;
    Ok(())
}

fn cmd_render(args: &ScenarioArgs) -> Result<()> {
    let r = load(args)?;
    let out = run_chain(&r.boundary, &r.params, &r.run)?;
    let branches = if r.profile.is_some() {
        curve_branches(&r, args)?
    } else {
        Vec::new()
    };
    let style = svg::RenderStyle::default();
    let doc = svg::render_svg(&out.final_config, &branches, &style);
    write(&args.out.join("render.svg"), &doc)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify => {
            let report = verify::run_verification();
            print!("{}", report.render());
            return if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
        Command::Exact(args) => cmd_exact(args),
        Command::Sample(args) => cmd_sample(args),
        Command::Curve(args) => cmd_curve(args),
        Command::Render(args) => cmd_render(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
