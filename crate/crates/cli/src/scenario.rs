//! Scenario documents: structured TOML describing a model, a boundary and
//! run options.
//!
//! ```toml
//! [model]
//! n = 150
//! t = 0.0
//! q = 1.0            # area weight; q_mode = "macro" rescales to q^(1/n)
//! x = "uniform"      # or x = [1.0, 2.0, ...]
//!
//! [boundary]
//! density = "gap"    # uniform | gap | plateau | plateau-gap | frozen-ends | table
//! kappa = 0.25
//! mu = 1.0
//!
//! [run]
//! sweeps = 20000
//! burn_in = 1000
//! seed = 7
//! snapshots = 4
//! ```
//!
//! Unknown keys are rejected.

use dwvm::arctic::{endpoints_from_density, DensityProfile};
use dwvm::model::{BoundarySpec, Coloring};
use dwvm::sampler::RunOptions;
use dwvm::WeightParams;
use serde::{Deserialize, Serialize};

#[derive(Debug)]
pub enum Error {
    /// Malformed document; the message carries the line/field from the TOML
    /// parser.
    Parse(String),
    Validation(String),
}

impl std::fmt::Display for Error {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Error::Parse(m) => write!(f, "scenario parse error: {m}"),
            Error::Validation(m) => write!(f, "scenario validation error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub model: ModelSection,
    pub boundary: BoundarySection,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub n: usize,
    #[serde(default)]
    pub t: f64,
    #[serde(default = "one")]
    pub q: f64,
    #[serde(default)]
    pub x: XSpec,
    /// "raw": the sampler uses `q` as the Gibbs area weight. "macro": `q` is
    /// the limit-shape parameter; the sampler runs at `q^(1/n)` while curve
    /// commands use `q` directly.
    #[serde(default)]
    pub q_mode: QMode,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum XSpec {
    Named(String),
    List(Vec<f64>),
}

impl Default for XSpec {
    fn default() -> Self {
        XSpec::Named("uniform".into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum QMode {
    #[default]
    Raw,
    Macro,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySection {
    /// Explicit `(column, multiplicity)` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exits: Option<Vec<(u32, u32)>>,
    /// Named density profile, discretized to `n` paths.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "default_sweeps")]
    pub sweeps: u64,
    #[serde(default = "default_burn_in")]
    pub burn_in: u64,
    #[serde(default = "one_u64")]
    pub seed: u64,
    /// Number of snapshots to spread over the measured sweeps (0 = none).
    #[serde(default)]
    pub snapshots: u64,
}

fn default_sweeps() -> u64 {
    1000
}
fn default_burn_in() -> u64 {
    100
}
fn one_u64() -> u64 {
    1
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            sweeps: default_sweeps(),
            burn_in: default_burn_in(),
            seed: 1,
            snapshots: 0,
        }
    }
}

/// Everything a subcommand needs, resolved and validated.
#[derive(Debug, Clone)]
pub struct ResolvedScenario {
    pub boundary: BoundarySpec,
    /// Sampler parameters (with `q_mode = "macro"` already applied).
    pub params: WeightParams,
    /// Limit-shape area parameter for curve commands (`None` when `q = 1`).
    pub curve_q: Option<f64>,
    pub run: RunOptions,
    /// The density profile when the boundary came from one.
    pub profile: Option<DensityProfile>,
}

pub fn parse_scenario(text: &str) -> Result<Scenario, Error> {
    let sc: Scenario = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    validate(&sc)?;
    Ok(sc)
}

pub fn serialize_scenario(sc: &Scenario) -> String {
    toml::to_string_pretty(sc).expect("scenario serializes")
}

fn validate(sc: &Scenario) -> Result<(), Error> {
    if sc.model.n == 0 {
        return Err(Error::Validation("model.n must be at least 1".into()));
    }
    if !(sc.model.q > 0.0) {
        return Err(Error::Validation("model.q must be positive".into()));
    }
    if !(sc.model.t >= 0.0) {
        return Err(Error::Validation("model.t must be >= 0".into()));
    }
    if let XSpec::Named(name) = &sc.model.x {
        if name != "uniform" {
            return Err(Error::Validation(format!(
                "unknown x specification '{name}' (use \"uniform\" or a list)"
            )));
        }
    }
    if let XSpec::List(xs) = &sc.model.x {
        if xs.len() != sc.model.n {
            return Err(Error::Validation(format!(
                "x lists {} weights for n = {} paths",
                xs.len(),
                sc.model.n
            )));
        }
    }
    let b = &sc.boundary;
    match (&b.exits, &b.density) {
        (Some(exits), None) => {
            if exits.is_empty() {
                return Err(Error::Validation("boundary.exits is empty".into()));
            }
        }
        (None, Some(_)) => {}
        (Some(_), Some(_)) => {
            return Err(Error::Validation(
                "give either boundary.exits or boundary.density, not both".into(),
            ))
        }
        (None, None) => {
            return Err(Error::Validation(
                "boundary needs exits or a density".into(),
            ))
        }
    }
    Ok(())
}

/// Builds the density profile named by the boundary section.
pub fn profile_from_boundary(b: &BoundarySection) -> Result<Option<DensityProfile>, Error> {
    let Some(name) = &b.density else {
        return Ok(None);
    };
    let need = |v: Option<f64>, what: &str| {
        v.ok_or_else(|| Error::Validation(format!("density '{name}' needs boundary.{what}")))
    };
    let profile = match name.as_str() {
        "uniform" => DensityProfile::uniform(b.p.unwrap_or(1.0)),
        "gap" => DensityProfile::uniform_with_gaps(&[(need(b.kappa, "kappa")?, need(b.mu, "mu")?)])
            .map_err(|e| Error::Validation(e.to_string()))?,
        "plateau" => DensityProfile::plateau(need(b.kappa, "kappa")?, need(b.lambda, "lambda")?)
            .map_err(|e| Error::Validation(e.to_string()))?,
        "plateau-gap" => DensityProfile::plateau_gap(
            need(b.kappa, "kappa")?,
            need(b.lambda, "lambda")?,
            need(b.mu, "mu")?,
        )
        .map_err(|e| Error::Validation(e.to_string()))?,
        "frozen-ends" => {
            DensityProfile::frozen_ends(need(b.kappa, "kappa")?, need(b.lambda, "lambda")?)
                .map_err(|e| Error::Validation(e.to_string()))?
        }
        "table" => {
            let pts = b.table.as_ref().ok_or_else(|| {
                Error::Validation("density 'table' needs boundary.table".into())
            })?;
            DensityProfile::table(pts).map_err(|e| Error::Validation(e.to_string()))?
        }
        other => {
            return Err(Error::Validation(format!(
                "unknown density '{other}' (uniform | gap | plateau | plateau-gap | frozen-ends | table)"
            )))
        }
    };
    Ok(Some(profile))
}

/// Resolves a scenario into a boundary, sampler parameters, run options and
/// (when density-based) the underlying profile.
pub fn resolve(sc: &Scenario) -> Result<ResolvedScenario, Error> {
    let n = sc.model.n;
    let profile = profile_from_boundary(&sc.boundary)?;
    let boundary = match (&sc.boundary.exits, &profile) {
        (Some(exits), _) => BoundarySpec::new(n, exits.clone(), Coloring::Free)
            .map_err(|e| Error::Validation(e.to_string()))?,
        (None, Some(p)) => {
            let a = endpoints_from_density(p, n - 1);
            BoundarySpec::from_endpoints(&a).map_err(|e| Error::Validation(e.to_string()))?
        }
        (None, None) => unreachable!("validated"),
    };
    let x = match &sc.model.x {
        XSpec::Named(_) => vec![1.0; n],
        XSpec::List(xs) => xs.clone(),
    };
    let sampler_q = match sc.model.q_mode {
        QMode::Raw => sc.model.q,
        QMode::Macro => sc.model.q.powf(1.0 / n as f64),
    };
    let params = WeightParams::new(x, sc.model.t, sampler_q)
        .map_err(|e| Error::Validation(e.to_string()))?;
    let curve_q = match sc.model.q_mode {
        QMode::Raw if sc.model.q == 1.0 => None,
        QMode::Raw => Some(sc.model.q.powf(n as f64)),
        QMode::Macro if sc.model.q == 1.0 => None,
        QMode::Macro => Some(sc.model.q),
    };
    let snapshot_every = if sc.run.snapshots > 0 {
        Some((sc.run.sweeps / sc.run.snapshots).max(1))
    } else {
        None
    };
    let run = RunOptions {
        sweeps: sc.run.sweeps,
        burn_in: sc.run.burn_in,
        seed: sc.run.seed,
        snapshot_every,
        observe_every: 1,
    };
    Ok(ResolvedScenario {
        boundary,
        params,
        curve_q,
        run,
        profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const DWBC: &str = r#"
[model]
n = 6
t = 0.0

[boundary]
density = "uniform"

[run]
sweeps = 10
burn_in = 2
seed = 3
"#;

    #[test]
    fn parse_and_resolve_dwbc() {
        let sc = parse_scenario(DWBC).unwrap();
        let r = resolve(&sc).unwrap();
        assert_eq!(r.boundary.n(), 6);
        assert_eq!(
            r.boundary.exits(),
            &[(1, 1), (2, 1), (3, 1), (4, 1), (5, 1), (6, 1)]
        );
        assert!(r.curve_q.is_none());
    }

    #[test]
    fn roundtrip_is_identity() {
        let sc = parse_scenario(DWBC).unwrap();
        let text = serialize_scenario(&sc);
        let back = parse_scenario(&text).unwrap();
        assert_eq!(sc, back);
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = DWBC.replace("seed = 3", "seed = 3\nwibble = 9");
        match parse_scenario(&bad) {
            Err(Error::Parse(msg)) => assert!(msg.contains("wibble"), "{msg}"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn empty_exits_rejected() {
        let bad = r#"
[model]
n = 2

[boundary]
exits = []
"#;
        assert!(matches!(parse_scenario(bad), Err(Error::Validation(_))));
    }

    #[test]
    fn gap_scenario_matches_figure_boundary() {
        let text = r#"
[model]
n = 152
t = 0.0

[boundary]
density = "gap"
kappa = 0.25
mu = 1.0
"#;
        let sc = parse_scenario(text).unwrap();
        let r = resolve(&sc).unwrap();
        assert_eq!(r.boundary.n(), 152);
        // First quarter exits densely, then a macroscopic gap of ~n columns.
        let slots = r.boundary.exit_slots();
        assert_eq!(slots[0], 1);
        assert_eq!(slots[37], 38);
        assert!(slots[38] > 150, "gap of size ~mu*n: {}", slots[38]);
    }

    #[test]
    fn macro_q_rescales_sampler() {
        let text = r#"
[model]
n = 100
q = 0.5
q_mode = "macro"

[boundary]
density = "uniform"
"#;
        let sc = parse_scenario(text).unwrap();
        let r = resolve(&sc).unwrap();
        assert!((r.params.q - 0.5f64.powf(0.01)).abs() < 1e-15);
        assert_eq!(r.curve_q, Some(0.5));
    }
}
