//! Run configuration: command-line flags layered over an optional TOML
//! key-value file, validated before anything is computed.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Deserialize;

use super::CliError;
use crate::engine::step_size;
use crate::models::{build_symmetric, build_tviolating, ModelSpec, EXTENT_SAFETY_FACTOR};
use crate::symmetry::Lattice;

pub const DEFAULT_LAMBDA: f64 = 0.1;
pub const DEFAULT_SIGMA: f64 = 1.0;
/// Smallest lattice the automatic sizing will pick.
pub const MIN_AUTO_SITES: usize = 33;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelChoice {
    Symmetric,
    Tviolating,
}

/// Everything optional; unset fields fall back to the file, then defaults.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub model: Option<ModelChoice>,
    pub lambda: Option<f64>,
    pub sigma: Option<f64>,
    pub n: Option<Vec<usize>>,
    pub sites: Option<usize>,
    pub spacing: Option<f64>,
    pub delta_w_min: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub svg: Option<bool>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("config", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::config("config", e.to_string()))
    }

    /// Fields set in `self` win over `base`.
    pub fn over(self, base: ConfigFile) -> ConfigFile {
        ConfigFile {
            model: self.model.or(base.model),
            lambda: self.lambda.or(base.lambda),
            sigma: self.sigma.or(base.sigma),
            n: self.n.or(base.n),
            sites: self.sites.or(base.sites),
            spacing: self.spacing.or(base.spacing),
            delta_w_min: self.delta_w_min.or(base.delta_w_min),
            out_dir: self.out_dir.or(base.out_dir),
            svg: self.svg.or(base.svg),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Simulate,
    Sweep,
}

/// A validated configuration with its lattice resolved.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub model: ModelChoice,
    pub lambda: f64,
    pub sigma: f64,
    pub steps: Vec<usize>,
    pub lattice: Lattice,
    pub resolution_limit: Option<f64>,
    pub out_dir: PathBuf,
    pub svg: bool,
}

impl RunConfig {
    pub fn resolve(raw: ConfigFile, mode: Mode) -> Result<Self, CliError> {
        let model = raw.model.unwrap_or(ModelChoice::Symmetric);
        let lambda = raw.lambda.unwrap_or(DEFAULT_LAMBDA);
        let sigma = raw.sigma.unwrap_or(DEFAULT_SIGMA);
        let steps = raw.n.unwrap_or_default();

        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(CliError::config("sigma", format!("must be positive, got {sigma}")));
        }
        if model == ModelChoice::Tviolating && !(lambda.is_finite() && lambda.abs() < 1.0) {
            return Err(CliError::config("lambda", format!("must satisfy |lambda| < 1, got {lambda}")));
        }
        if steps.is_empty() {
            return Err(CliError::config("n", "no step count given"));
        }
        if let Some(&bad) = steps.iter().find(|&&n| n == 0) {
            return Err(CliError::config("n", format!("step counts must be >= 1, got {bad}")));
        }
        match mode {
            Mode::Simulate if steps.len() != 1 => {
                return Err(CliError::config("n", "simulate takes exactly one step count"));
            }
            Mode::Sweep if steps.windows(2).any(|w| w[0] >= w[1]) => {
                return Err(CliError::config("n", "sweep step counts must be strictly increasing"));
            }
            _ => {}
        }
        if let Some(limit) = raw.delta_w_min {
            if !(limit.is_finite() && limit > 0.0) {
                return Err(CliError::config("delta-w-min", format!("must be positive, got {limit}")));
            }
        }
        if let Some(sites) = raw.sites {
            if sites == 0 || sites % 2 == 0 {
                return Err(CliError::config("sites", format!("must be odd and positive, got {sites}")));
            }
        }
        if let Some(spacing) = raw.spacing {
            if !(spacing.is_finite() && spacing > 0.0) {
                return Err(CliError::config("spacing", format!("must be positive, got {spacing}")));
            }
        }

        let n_min = steps[0];
        let n_max = *steps.last().expect("non-empty");
        let spacing = raw.spacing.unwrap_or_else(|| auto_spacing(sigma, n_min));
        let separation = match model {
            ModelChoice::Symmetric => 0.0,
            ModelChoice::Tviolating => 2.0 * lambda.abs() * (2.0 * n_max as f64).sqrt() * sigma,
        };
        let sites = raw.sites.unwrap_or_else(|| auto_sites(separation + 6.0 * sigma, spacing));
        let lattice = Lattice::new(sites, spacing).map_err(|e| CliError::config("sites", e.to_string()))?;
        if mode == Mode::Sweep && lattice.extent() <= EXTENT_SAFETY_FACTOR * separation {
            return Err(CliError::config(
                "sites",
                format!(
                    "lattice extent {} must exceed {} ({}x the largest predicted separation)",
                    lattice.extent(),
                    EXTENT_SAFETY_FACTOR * separation,
                    EXTENT_SAFETY_FACTOR
                ),
            ));
        }

        Ok(Self {
            model,
            lambda,
            sigma,
            steps,
            lattice,
            resolution_limit: raw.delta_w_min,
            out_dir: raw.out_dir.unwrap_or_else(|| PathBuf::from(".")),
            svg: raw.svg.unwrap_or(false),
        })
    }

    pub fn build_model(&self) -> Result<ModelSpec, CliError> {
        Ok(match self.model {
            ModelChoice::Symmetric => build_symmetric(self.lattice),
            ModelChoice::Tviolating => build_tviolating(self.lattice, self.lambda)
                .map_err(|e| CliError::config("lambda", e.to_string()))?,
        })
    }
}

/// Half a spread per site, but never finer than twice the largest step so
/// that `cos^N(kδw)` has no revivals inside the Brillouin zone.
pub fn auto_spacing(sigma: f64, n_min: usize) -> f64 {
    let dw = step_size(n_min, sigma).expect("validated");
    (sigma / 2.0).max(2.0 * dw)
}

/// Odd site count whose extent is `EXTENT_SAFETY_FACTOR` times `support`.
pub fn auto_sites(support: f64, spacing: f64) -> usize {
    let n = (EXTENT_SAFETY_FACTOR * support / spacing).ceil() as usize + 1;
    n.max(MIN_AUTO_SITES) | 1
}
