//! Command implementations behind the `qvpath` binary.

pub mod config;
pub mod output;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::analysis::{detect_peaks, sweep, AnalysisError, SweepRow, DEFAULT_MIN_HEIGHT_FRACTION};
use crate::engine::{distribution, Distribution, EngineError};
use crate::lorentz::{boost_interval, Boost, Interval, LorentzError};
use crate::models::ModelError;
use crate::verify::{run_suite, CheckOutcome};
use config::{Mode, RunConfig};
use output::{sci, svg_plot, write_atomic, Series};

pub use config::{ConfigFile, ModelChoice};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid {field}: {message}")]
    Config { field: &'static str, message: String },
    #[error("numerical degeneracy: {0}")]
    Degenerate(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn config(field: &'static str, message: impl Into<String>) -> Self {
        CliError::Config { field, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Degenerate(_) => 3,
            CliError::Io { .. } | CliError::Internal(_) => 1,
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::DestructiveInterference { .. } => CliError::Degenerate(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Engine(inner) => inner.into(),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Engine(inner) => inner.into(),
            AnalysisError::Model(inner) => inner.into(),
            AnalysisError::ExtentTooSmall { .. } => CliError::config("sites", e.to_string()),
            AnalysisError::AllZero => CliError::Degenerate(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<LorentzError> for CliError {
    fn from(e: LorentzError) -> Self {
        match e {
            LorentzError::BadLightSpeed(_) => CliError::config("c", e.to_string()),
            _ => CliError::config("v", e.to_string()),
        }
    }
}

pub fn distribution_csv(dist: &Distribution) -> String {
    let mut s = String::from("w,probability\n");
    for (w, p) in dist.points() {
        let _ = writeln!(s, "{},{}", sci(w), sci(p));
    }
    s
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("N,delta_w,separation,predicted,rel_error,origin_suppression,tv_to_gaussian\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.steps,
            sci(r.step),
            sci(r.separation),
            sci(r.predicted),
            sci(r.rel_error),
            sci(r.origin_suppression),
            sci(r.tv_to_gaussian)
        );
    }
    s
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    write_atomic(&path, contents).map_err(|source| CliError::Io { path: path.clone(), source })?;
    Ok(path)
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })
}

/// Builds one QVP and writes `distribution.csv` (and the SVG when asked).
/// Returns the paths written.
pub fn cmd_simulate(raw: ConfigFile) -> Result<Vec<PathBuf>, CliError> {
    let cfg = RunConfig::resolve(raw, Mode::Simulate)?;
    let model = cfg.build_model()?;
    let n = cfg.steps[0];
    let mut params = model.params(n, cfg.sigma)?;
    if let Some(limit) = cfg.resolution_limit {
        params = params.with_resolution_limit(limit)?;
        if params.within_resolution_limit() == Some(false) {
            log::warn!("step {} exceeds the resolution limit {limit}; N is below the equivalence set", params.step());
        }
    }
    let state = model.build_qvp_with(&params)?;
    let dist = distribution(&state);
    if let Ok(report) = detect_peaks(&dist, DEFAULT_MIN_HEIGHT_FRACTION) {
        log::info!("{} peak(s), separation {}", report.peaks.len(), report.separation);
    }

    ensure_dir(&cfg.out_dir)?;
    let mut written = vec![write_file(&cfg.out_dir, "distribution.csv", &distribution_csv(&dist))?];
    if cfg.svg {
        let svg = svg_plot(
            &format!("{} N={n}", model.label()),
            "w",
            "probability",
            &[Series { label: "QVP", color: "steelblue", points: dist.points().collect() }],
        );
        written.push(write_file(&cfg.out_dir, "distribution.svg", &svg)?);
    }
    Ok(written)
}

/// One row per step count, written as `sweep.csv` in ascending N.
pub fn cmd_sweep(raw: ConfigFile) -> Result<Vec<PathBuf>, CliError> {
    let cfg = RunConfig::resolve(raw, Mode::Sweep)?;
    let model = cfg.build_model()?;
    let rows = sweep(&model, cfg.sigma, &cfg.steps)?;

    ensure_dir(&cfg.out_dir)?;
    let mut written = vec![write_file(&cfg.out_dir, "sweep.csv", &sweep_csv(&rows))?];
    if cfg.svg {
        let svg = svg_plot(
            &format!("{} sweep", model.label()),
            "N",
            "separation",
            &[
                Series {
                    label: "measured",
                    color: "steelblue",
                    points: rows.iter().map(|r| (r.steps as f64, r.separation)).collect(),
                },
                Series {
                    label: "predicted",
                    color: "darkorange",
                    points: rows.iter().map(|r| (r.steps as f64, r.predicted)).collect(),
                },
            ],
        );
        written.push(write_file(&cfg.out_dir, "sweep.svg", &svg)?);
    }
    Ok(written)
}

/// Runs the self-check suite; true iff every check passed.
pub fn cmd_verify(out: &mut impl std::io::Write) -> std::io::Result<bool> {
    let results: Vec<CheckOutcome> = run_suite();
    for r in &results {
        writeln!(out, "{r}")?;
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    writeln!(out, "{} checks, {} failed", results.len(), failed)?;
    Ok(failed == 0)
}

/// The `dx',dt'` line printed by `qvpath lorentz`.
pub fn cmd_lorentz(dx: f64, dt: f64, v: f64, c: f64) -> Result<String, CliError> {
    let out = boost_interval(Interval::new(dx, dt), Boost::new(v, c)?);
    Ok(format!("{:.12},{:.12}", out.dx, out.dt))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lorentz_line() {
        assert_eq!(cmd_lorentz(0.0, 1.0, 0.6, 1.0).unwrap(), "-0.750000000000,1.250000000000");
        assert_eq!(cmd_lorentz(2.5, -1.0, 0.0, 1.0).unwrap(), "2.500000000000,-1.000000000000");
        assert_eq!(cmd_lorentz(0.0, 1.0, 1.0, 1.0).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn degeneracy_maps_to_three() {
        let e: CliError = ModelError::Engine(EngineError::DestructiveInterference { norm: 0.0 }).into();
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn rejected_config_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let raw = ConfigFile { n: Some(vec![0]), out_dir: Some(dir.path().into()), ..Default::default() };
        assert_eq!(cmd_simulate(raw).unwrap_err().exit_code(), 2);
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn simulate_csv_has_one_row_per_site() {
        let dir = tempfile::tempdir().unwrap();
        let raw = ConfigFile {
            n: Some(vec![50]),
            sites: Some(41),
            spacing: Some(0.5),
            out_dir: Some(dir.path().into()),
            svg: Some(true),
            ..Default::default()
        };
        let paths = cmd_simulate(raw).unwrap();
        assert_eq!(paths.len(), 2);
        let csv = std::fs::read_to_string(&paths[0]).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("w,probability"));
        assert_eq!(lines.count(), 41);
    }
}
