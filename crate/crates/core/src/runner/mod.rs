//! JSON-configured experiment runner.
//!
//! A run builds one seeded [`Lab`] from the config's shape, executes each
//! experiment in order and writes, into the output directory:
//!
//! * `<name>.report.json`: parameters (ε rule, λ, fill distance, seeds),
//!   the embedded checks and the module report;
//! * `<name>.csv`: the experiment's table;
//! * `<name>.svg`: a 2-d plot, sliced by a plane for 3-d shapes;
//! * `summary.csv`: one row per experiment;
//! * `manifest.json`: the config, outcomes and file list. It is the only
//!   output carrying a timestamp.
//!
//! An empty experiment list writes the manifest alone. Outputs are
//! byte-identical across runs of the same config.

mod config;
mod experiments;
mod svg;

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nearfield::Thresholds;
use crate::probes::Lab;
use crate::shapes::ShapeSpec;

pub use config::{
    ConjectureSpec, Experiment, ExperimentConfig, LipschitzSpec, LneFieldSpec, ScanMedialSpec, SliceSpec,
    ThresholdOverrides, VerifyTheoremSpec,
};

pub const MANIFEST: &str = "manifest.json";
pub const SUMMARY: &str = "summary.csv";
/// Integer environment override for every seed of a run.
pub const SEED_OVERRIDE_VAR: &str = "LNELAB_SEED_OVERRIDE";

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    /// Replaces the config's `output_dir`.
    pub output_dir: Option<PathBuf>,
    /// Replaces the cloud seed and every experiment seed.
    pub seed_override: Option<u64>,
}

impl RunOptions {
    /// Options with the seed override read from [`SEED_OVERRIDE_VAR`].
    pub fn from_env(output_dir: Option<PathBuf>) -> Result<Self> {
        let seed_override = match std::env::var(SEED_OVERRIDE_VAR) {
            Ok(v) => Some(v.trim().parse::<u64>().map_err(|_| {
                Error::Config(format!("{SEED_OVERRIDE_VAR}: expected an unsigned integer, got `{v}`"))
            })?),
            Err(std::env::VarError::NotPresent) => None,
            Err(e) => return Err(Error::Config(format!("{SEED_OVERRIDE_VAR}: {e}"))),
        };
        Ok(RunOptions {
            output_dir,
            seed_override,
        })
    }
}

/// One invariant check embedded in an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub(crate) fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutcome {
    pub name: String,
    #[serde(rename = "type")]
    pub kind: String,
    pub passed: bool,
    pub checks_passed: usize,
    pub checks_total: usize,
    pub seed: u64,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub output_dir: PathBuf,
    /// All checks of all experiments passed.
    pub passed: bool,
    pub experiments: Vec<ExperimentOutcome>,
    /// Files written, relative to `output_dir`, manifest last.
    pub files: Vec<String>,
    pub warnings: Vec<String>,
}

/// Numeric context attached to every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub shape: ShapeSpec,
    pub sample_count: usize,
    pub cloud_seed: u64,
    pub experiment_seed: u64,
    pub fill_distance: f64,
    pub lambda: f64,
    /// Near sets use `ε(d) = max(1e-12 scale, min(epsilon_cap, epsilon_curvature h² / d))`.
    pub epsilon_cap: f64,
    pub thresholds: Thresholds,
    pub connect_radius: f64,
    pub seed_override: Option<u64>,
}

#[derive(Debug, Serialize)]
struct Report<'a> {
    name: &'a str,
    #[serde(rename = "type")]
    kind: &'a str,
    passed: bool,
    checks: &'a [Check],
    parameters: &'a Parameters,
    warnings: &'a [String],
    result: &'a serde_json::Value,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    created_unix: u64,
    passed: bool,
    cloud_seed: u64,
    seed_override: Option<u64>,
    config: &'a ExperimentConfig,
    experiments: &'a [ExperimentOutcome],
    files: &'a [String],
}

/// Executes every experiment of `config` and writes its outputs. Module
/// errors abort the run, tagged with the experiment name; failed checks do
/// not (they set [`RunOutcome::passed`] to false).
pub fn run(config: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutcome> {
    config.validate()?;
    let out = opts.output_dir.clone().unwrap_or_else(|| config.output_dir.clone());
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    let cloud_seed = opts.seed_override.unwrap_or(config.seed);

    let mut outcomes = Vec::new();
    let mut files = Vec::new();
    let mut warnings = Vec::new();
    if !config.experiments.is_empty() {
        let lab = build_lab(config, cloud_seed)?;
        log::info!(
            "{}: {} samples, fill distance {:.3e}, lambda {:.3e}",
            config.shape.label(),
            lab.cloud.len(),
            lab.fill_distance(),
            lab.thresholds.lambda()
        );
        for (k, exp) in config.experiments.iter().enumerate() {
            let seed = opts
                .seed_override
                .unwrap_or_else(|| exp.seed().unwrap_or(config.seed.wrapping_add(k as u64 + 1)));
            log::info!("experiment `{}` ({})", exp.name(), exp.kind());
            let params = Parameters {
                shape: config.shape.clone(),
                sample_count: config.sample_count,
                cloud_seed,
                experiment_seed: seed,
                fill_distance: lab.fill_distance(),
                lambda: lab.thresholds.lambda(),
                epsilon_cap: lab.thresholds.epsilon_cap(),
                thresholds: lab.thresholds,
                connect_radius: lab.connect_radius(),
                seed_override: opts.seed_override,
            };
            let outcome = run_one(&lab, exp, seed, &params, &out).map_err(|e| Error::Experiment {
                name: exp.name().to_string(),
                source: Box::new(e),
            })?;
            for c in outcome.0.iter().filter(|c| !c.passed) {
                log::warn!("{}: check `{}` failed: {}", exp.name(), c.name, c.detail);
            }
            warnings.extend(outcome.2.iter().map(|w| format!("{}: {w}", exp.name())));
            files.extend(outcome.1.files.iter().cloned());
            outcomes.push(outcome.1);
        }
        write_summary(&out.join(SUMMARY), &outcomes, &lab)?;
        files.push(SUMMARY.to_string());
    }
    let passed = outcomes.iter().all(|o| o.passed);
    let manifest = Manifest {
        tool: "lnelab",
        version: env!("CARGO_PKG_VERSION"),
        created_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        passed,
        cloud_seed,
        seed_override: opts.seed_override,
        config,
        experiments: &outcomes,
        files: &files,
    };
    write_json(&out.join(MANIFEST), &manifest)?;
    files.push(MANIFEST.to_string());
    Ok(RunOutcome {
        output_dir: out,
        passed,
        experiments: outcomes,
        files,
        warnings,
    })
}

fn build_lab(config: &ExperimentConfig, seed: u64) -> Result<Lab> {
    let mut lab = Lab::new(&config.shape, config.sample_count, seed)?;
    let mut th = lab.thresholds;
    let o = &config.thresholds;
    th.epsilon_cap_factor = o.epsilon_cap_factor.unwrap_or(th.epsilon_cap_factor);
    th.epsilon_curvature = o.epsilon_curvature.unwrap_or(th.epsilon_curvature);
    th.lambda_factor = o.lambda_factor.unwrap_or(th.lambda_factor);
    lab = lab.with_thresholds(th);
    if let Some(r) = config.connect_radius {
        lab = lab.with_connect_radius(r)?;
    }
    Ok(lab)
}

fn run_one(
    lab: &Lab,
    exp: &Experiment,
    seed: u64,
    params: &Parameters,
    out: &Path,
) -> Result<(Vec<Check>, ExperimentOutcome, Vec<String>)> {
    let name = exp.name();
    let csv_name = format!("{name}.csv");
    let done = experiments::execute(lab, exp, seed, &out.join(&csv_name))?;
    let mut warnings = done.warnings;
    let mut files = vec![format!("{name}.report.json"), csv_name];

    match experiments::project(lab, exp, &done.plot) {
        Ok((plot, slice_warning)) => {
            if let Some(w) = slice_warning {
                log::warn!("{name}: {w}");
                warnings.push(w);
            }
            let svg_name = format!("{name}.svg");
            let path = out.join(&svg_name);
            std::fs::write(&path, plot.render()).map_err(|e| Error::io(&path, e))?;
            files.push(svg_name);
        }
        Err(w) => {
            log::warn!("{name}: {w}");
            warnings.push(w);
        }
    }

    let passed = done.checks.iter().all(|c| c.passed);
    let report = Report {
        name,
        kind: exp.kind(),
        passed,
        checks: &done.checks,
        parameters: params,
        warnings: &warnings,
        result: &done.result,
    };
    write_json(&out.join(&files[0]), &report)?;
    let outcome = ExperimentOutcome {
        name: name.to_string(),
        kind: exp.kind().to_string(),
        passed,
        checks_passed: done.checks.iter().filter(|c| c.passed).count(),
        checks_total: done.checks.len(),
        seed,
        files,
    };
    Ok((done.checks, outcome, warnings))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_summary(path: &Path, outcomes: &[ExperimentOutcome], lab: &Lab) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "experiment",
        "type",
        "passed",
        "checks_passed",
        "checks_total",
        "seed",
        "fill_distance",
        "lambda",
        "epsilon_cap",
    ])?;
    for o in outcomes {
        w.write_record([
            o.name.clone(),
            o.kind.clone(),
            o.passed.to_string(),
            o.checks_passed.to_string(),
            o.checks_total.to_string(),
            o.seed.to_string(),
            lab.fill_distance().to_string(),
            lab.thresholds.lambda().to_string(),
            lab.thresholds.epsilon_cap().to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(experiments: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(&format!(
            r#"{{"shape": {{"kind": "circle", "params": {{"radius": 1.0}}}},
                "sample_count": 2000, "seed": 7, "experiments": [{experiments}]}}"#
        ))
        .unwrap()
    }

    fn opts(dir: &Path) -> RunOptions {
        RunOptions {
            output_dir: Some(dir.to_path_buf()),
            seed_override: None,
        }
    }

    #[test]
    fn empty_run_writes_only_the_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let r = run(&config(""), &opts(dir.path())).unwrap();
        assert!(r.passed);
        assert_eq!(r.files, vec![MANIFEST.to_string()]);
        let listed: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(listed.len(), 1);
    }

    #[test]
    fn scan_writes_report_csv_svg_and_summary() {
        let dir = tempfile::tempdir().unwrap();
        let c = config(
            r#"{"type": "scan-medial", "name": "center", "lo": [-0.5, -0.5], "hi": [0.5, 0.5],
                "resolution": 21, "oracle_steps": 2}"#,
        );
        let r = run(&c, &opts(dir.path())).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(
            r.files,
            ["center.report.json", "center.csv", "center.svg", SUMMARY, MANIFEST].map(String::from)
        );
        let report: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("center.report.json")).unwrap()).unwrap();
        assert_eq!(report["type"], "scan-medial");
        for key in ["fill_distance", "lambda", "epsilon_cap", "cloud_seed", "experiment_seed"] {
            assert!(report["parameters"][key].is_number(), "{key}");
        }
        let summary = std::fs::read_to_string(dir.path().join(SUMMARY)).unwrap();
        assert!(summary.starts_with("experiment,type,passed,"));
        assert!(summary.contains("center,scan-medial,true,"));
    }

    #[test]
    fn seed_override_replaces_every_seed() {
        let dir = tempfile::tempdir().unwrap();
        let c = config(r#"{"type": "lne-field", "name": "lne", "random_points": 2, "radii": [0.5, 0.25], "seed": 3}"#);
        let r = run(
            &c,
            &RunOptions {
                output_dir: Some(dir.path().to_path_buf()),
                seed_override: Some(99),
            },
        )
        .unwrap();
        assert_eq!(r.experiments[0].seed, 99);
        let m: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join(MANIFEST)).unwrap()).unwrap();
        assert_eq!(m["cloud_seed"], 99);
    }

    #[test]
    fn module_errors_carry_the_experiment_name() {
        let dir = tempfile::tempdir().unwrap();
        // The region touches the centre of the circle.
        let c = config(
            r#"{"type": "lipschitz", "name": "touching", "center": [0.05, 0.0], "radius": 0.1,
                "grid_step": 0.01, "search_margin": 0.2, "pairs": 10}"#,
        );
        match run(&c, &opts(dir.path())) {
            Err(Error::Experiment { name, source }) => {
                assert_eq!(name, "touching");
                assert!(matches!(*source, Error::InvalidRegion { .. }));
            }
            other => panic!("{other:?}"),
        }
    }
}
