//! Distribution diagnostics: peak finding, convergence metrics, separation
//! sweeps, origin suppression, and peak transport under evolution.

use thiserror::Error;

use crate::engine::{distribution, gaussian_reference, step_size, Distribution, EngineError, QvpState};
use crate::linalg::LinalgError;
use crate::models::{build_tviolating, ModelError, ModelKind, ModelSpec, EXTENT_SAFETY_FACTOR};
use crate::numerics::EXACT_TOL;
use crate::symmetry::{backward_step, forward_step, Lattice, SymmetryError};

pub const DEFAULT_MIN_HEIGHT_FRACTION: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("distribution has no mass")]
    AllZero,
    #[error("distributions live on different lattices")]
    LatticeMismatch,
    #[error("state dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("step-count list is empty")]
    EmptyStepList,
    #[error("step-count list must be strictly increasing")]
    StepListNotIncreasing,
    #[error("lattice extent {actual} too small: need more than {required} ({EXTENT_SAFETY_FACTOR}x the largest predicted separation)")]
    ExtentTooSmall { required: f64, actual: f64 },
    #[error("no dynamics: galaxy localized at origin only (lambda = 0)")]
    NoDynamics,
    #[error("{0} is not supported for custom models")]
    Unsupported(&'static str),
    #[error("expected {expected} resolved peaks, found {found}")]
    PeakCount { expected: usize, found: usize },
    #[error("{what} out of range (got {value})")]
    BadParameter { what: &'static str, value: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Peak {
    /// Position, refined between sites by a log-parabola through the maximum
    /// and its neighbours.
    pub center: f64,
    /// Maximum site mass divided by the lattice spacing.
    pub height: f64,
    /// RMS spread of the basin's mass about `center`.
    pub width: f64,
    /// Total mass of the basin.
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeakReport {
    /// Sorted by center.
    pub peaks: Vec<Peak>,
    /// Mass at the `w = 0` site over the maximum site mass.
    pub origin_suppression: f64,
    /// Distance between the two tallest peaks, `0` with fewer than two.
    pub separation: f64,
}

impl PeakReport {
    /// Peak whose center is closest to `w`.
    pub fn nearest(&self, w: f64) -> Option<&Peak> {
        self.peaks
            .iter()
            .min_by(|a, b| (a.center - w).abs().total_cmp(&(b.center - w).abs()))
    }
}

pub fn detect_peaks(dist: &Distribution, min_height_fraction: f64) -> Result<PeakReport, AnalysisError> {
    detect_peaks_in(dist.lattice(), dist.masses(), min_height_fraction)
}

/// Peak detection on raw site masses (not necessarily normalized).
///
/// Local maxima above `min_height_fraction · max` seed basins; basins are
/// split at the lowest site between neighbouring maxima, and neighbours
/// closer than the wider of their widths are merged.
pub fn detect_peaks_in(
    lattice: &Lattice,
    masses: &[f64],
    min_height_fraction: f64,
) -> Result<PeakReport, AnalysisError> {
    if !(0.0..=1.0).contains(&min_height_fraction) {
        return Err(AnalysisError::BadParameter { what: "min_height_fraction", value: min_height_fraction });
    }
    let n = masses.len();
    let max = masses.iter().copied().fold(0.0, f64::max);
    if n != lattice.sites() {
        return Err(AnalysisError::LatticeMismatch);
    }
    if !(max > 0.0) {
        return Err(AnalysisError::AllZero);
    }
    let threshold = min_height_fraction * max;

    let seeds: Vec<usize> = (0..n)
        .filter(|&i| {
            let m = masses[i];
            let left = if i > 0 { masses[i - 1] } else { f64::NEG_INFINITY };
            let right = if i + 1 < n { masses[i + 1] } else { f64::NEG_INFINITY };
            m > 0.0 && m >= threshold && m >= left && m > right
        })
        .collect();

    let mut cuts: Vec<usize> = seeds
        .windows(2)
        .map(|w| {
            (w[0] + 1..w[1])
                .min_by(|&a, &b| masses[a].total_cmp(&masses[b]))
                .unwrap_or(w[1])
        })
        .collect();

    let mut peaks = basins(lattice, masses, &cuts);
    loop {
        let merge_at = peaks
            .windows(2)
            .position(|p| (p[1].center - p[0].center).abs() < p[0].width.max(p[1].width));
        match merge_at {
            Some(k) => {
                cuts.remove(k);
                peaks = basins(lattice, masses, &cuts);
            }
            None => break,
        }
    }

    let origin_suppression = masses[lattice.origin_index()] / max;
    let separation = if peaks.len() >= 2 {
        let mut by_height: Vec<&Peak> = peaks.iter().collect();
        by_height.sort_by(|a, b| b.height.total_cmp(&a.height));
        (by_height[0].center - by_height[1].center).abs()
    } else {
        0.0
    };
    Ok(PeakReport { peaks, origin_suppression, separation })
}

fn basins(lattice: &Lattice, masses: &[f64], cuts: &[usize]) -> Vec<Peak> {
    let mut bounds = Vec::with_capacity(cuts.len() + 2);
    bounds.push(0);
    bounds.extend_from_slice(cuts);
    bounds.push(masses.len());
    bounds
        .windows(2)
        .map(|b| basin_peak(lattice, masses, b[0], b[1]))
        .collect()
}

fn basin_peak(lattice: &Lattice, masses: &[f64], lo: usize, hi: usize) -> Peak {
    let top = (lo..hi)
        .max_by(|&a, &b| masses[a].total_cmp(&masses[b]).then(b.cmp(&a)))
        .expect("non-empty basin");
    let dw = lattice.spacing();
    let mut center = lattice.label(top);
    if top > 0 && top + 1 < masses.len() && masses[top - 1] > 0.0 && masses[top + 1] > 0.0 {
        let (l0, lm, lp) = (masses[top].ln(), masses[top - 1].ln(), masses[top + 1].ln());
        let curvature = lm - 2.0 * l0 + lp;
        if curvature < 0.0 {
            center += 0.5 * (lm - lp) / curvature * dw;
        }
    }
    let mass: f64 = masses[lo..hi].iter().sum();
    let spread: f64 = (lo..hi)
        .map(|i| masses[i] * (lattice.label(i) - center).powi(2))
        .sum();
    Peak { center, height: masses[top] / dw, width: (spread / mass).sqrt(), mass }
}

/// `½ Σ |p_j − q_j|`
pub fn total_variation(p: &Distribution, q: &Distribution) -> Result<f64, AnalysisError> {
    if p.lattice() != q.lattice() {
        return Err(AnalysisError::LatticeMismatch);
    }
    Ok(0.5 * p.masses().iter().zip(q.masses()).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// `|⟨a|b⟩|²`
pub fn fidelity(a: &QvpState, b: &QvpState) -> Result<f64, AnalysisError> {
    let (da, db) = (a.amplitudes().dim(), b.amplitudes().dim());
    if da != db {
        return Err(AnalysisError::DimensionMismatch(da, db));
    }
    Ok(a.amplitudes().inner(b.amplitudes())?.norm_sqr())
}

/// Mass at the origin site over the maximum site mass.
pub fn origin_suppression_check(dist: &Distribution) -> f64 {
    dist.mass_at(0) / dist.max_mass()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub steps: usize,
    pub step: f64,
    pub separation: f64,
    pub predicted: f64,
    /// `|measured − predicted| / predicted`; when nothing is predicted to
    /// separate, the absolute deviation in units of `σ_w`.
    pub rel_error: f64,
    pub origin_suppression: f64,
    pub tv_to_gaussian: f64,
    pub peak_count: usize,
}

/// One QVP per step count on the model's lattice, with peak and
/// convergence diagnostics. Rows come back in the order of `steps`.
pub fn sweep(model: &ModelSpec, sigma: f64, steps: &[usize]) -> Result<Vec<SweepRow>, AnalysisError> {
    let last = *steps.last().ok_or(AnalysisError::EmptyStepList)?;
    if steps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AnalysisError::StepListNotIncreasing);
    }
    step_size(last, sigma)?;
    let largest = model
        .predicted_separation(last, sigma)
        .ok_or(AnalysisError::Unsupported("separation sweep"))?;
    let required = EXTENT_SAFETY_FACTOR * largest;
    let actual = model.lattice().extent();
    if actual <= required {
        return Err(AnalysisError::ExtentTooSmall { required, actual });
    }
    let reference = gaussian_reference(sigma, model.lattice())?;
    steps
        .iter()
        .map(|&n| {
            let state = model.build_qvp(n, sigma)?;
            let dist = distribution(&state);
            let report = detect_peaks(&dist, DEFAULT_MIN_HEIGHT_FRACTION)?;
            let predicted = model.predicted_separation(n, sigma).unwrap_or(0.0);
            let rel_error = if predicted > 0.0 {
                (report.separation - predicted).abs() / predicted
            } else {
                report.separation / sigma
            };
            Ok(SweepRow {
                steps: n,
                step: state.step(),
                separation: report.separation,
                predicted,
                rel_error,
                origin_suppression: report.origin_suppression,
                tv_to_gaussian: total_variation(&dist, &reference)?,
                peak_count: report.peaks.len(),
            })
        })
        .collect()
}

/// [`sweep`] over the built-in T-violating model with strength `lambda`.
pub fn separation_sweep(
    lambda: f64,
    sigma: f64,
    lattice: Lattice,
    steps: &[usize],
) -> Result<Vec<SweepRow>, AnalysisError> {
    sweep(&build_tviolating(lattice, lambda)?, sigma, steps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `e^{-iτW_F}`
    Forward,
    /// `e^{+iτW_B}`
    Backward,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShiftCheck {
    pub direction: Direction,
    /// Measured displacement of each peak, peaks ordered by center.
    pub shifts: Vec<f64>,
    pub expected: Vec<f64>,
    /// One lattice spacing.
    pub tolerance: f64,
}

impl ShiftCheck {
    pub fn max_error(&self) -> f64 {
        self.shifts
            .iter()
            .zip(&self.expected)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_error() <= self.tolerance
    }
}

/// Applies forward evolution `e^{-iτW_F}` and measures how far each peak
/// moves.
pub fn evolution_shift_check(state: &QvpState, model: &ModelSpec, tau: f64) -> Result<ShiftCheck, AnalysisError> {
    shift_check(state, model, tau, Direction::Forward)
}

/// Like [`evolution_shift_check`] with backward evolution `e^{+iτW_B}`.
pub fn backward_shift_check(state: &QvpState, model: &ModelSpec, tau: f64) -> Result<ShiftCheck, AnalysisError> {
    shift_check(state, model, tau, Direction::Backward)
}

/// Expected per-peak displacement, peaks ordered by center. In the
/// T-violating model the right-hand peak is the sector where `W_F` acts as
/// `(1+|λ|)p` and `W_B` as `(1−|λ|)p`; the left-hand peak the reverse.
fn expected_shifts(model: &ModelSpec, tau: f64, direction: Direction) -> Result<Vec<f64>, AnalysisError> {
    let sign = match direction {
        Direction::Forward => 1.0,
        Direction::Backward => -1.0,
    };
    match model.kind() {
        ModelKind::Symmetric => Ok(vec![sign * tau]),
        ModelKind::TViolating { lambda: 0.0 } => Ok(vec![sign * tau]),
        ModelKind::TViolating { lambda } => {
            let l = lambda.abs();
            Ok(match direction {
                Direction::Forward => vec![tau * (1.0 - l), tau * (1.0 + l)],
                Direction::Backward => vec![-tau * (1.0 + l), -tau * (1.0 - l)],
            })
        }
        ModelKind::Custom => Err(AnalysisError::Unsupported("evolution shift check")),
    }
}

fn shift_check(
    state: &QvpState,
    model: &ModelSpec,
    tau: f64,
    direction: Direction,
) -> Result<ShiftCheck, AnalysisError> {
    let extent = model.lattice().extent();
    if !(tau.is_finite() && tau >= 0.0 && tau <= extent / 4.0) {
        return Err(AnalysisError::BadParameter { what: "tau", value: tau });
    }
    let expected = expected_shifts(model, tau, direction)?;
    let evolved = match direction {
        Direction::Forward => forward_step(state.amplitudes(), model.forward(), tau)?,
        Direction::Backward => backward_step(state.amplitudes(), model.backward(), tau)?,
    };
    let before = detect_peaks(&distribution(state), DEFAULT_MIN_HEIGHT_FRACTION)?;
    let after = detect_peaks(&distribution(&state.with_amplitudes(evolved)), DEFAULT_MIN_HEIGHT_FRACTION)?;
    for found in [before.peaks.len(), after.peaks.len()] {
        if found != expected.len() {
            return Err(AnalysisError::PeakCount { expected: expected.len(), found });
        }
    }
    let shifts = before
        .peaks
        .iter()
        .zip(&after.peaks)
        .map(|(b, a)| a.center - b.center)
        .collect();
    Ok(ShiftCheck { direction, shifts, expected, tolerance: model.lattice().spacing() })
}

/// Smallest `N` whose predicted peak half-separation `|λ|·√(2N)·σ_w`
/// reaches `t_star`.
pub fn find_covering_n(t_star: f64, lambda: f64, sigma: f64) -> Result<usize, AnalysisError> {
    if !(t_star.is_finite() && t_star > 0.0) {
        return Err(AnalysisError::BadParameter { what: "t_star", value: t_star });
    }
    if !lambda.is_finite() {
        return Err(AnalysisError::BadParameter { what: "lambda", value: lambda });
    }
    if lambda == 0.0 {
        return Err(AnalysisError::NoDynamics);
    }
    step_size(1, sigma)?;
    let half_sep = |n: usize| lambda.abs() * (2.0 * n as f64).sqrt() * sigma;
    let target = (t_star / (lambda.abs() * sigma)).powi(2) / 2.0;
    let mut n = ((target * (1.0 - 4.0 * f64::EPSILON)).ceil() as usize).max(1);
    while n > 1 && half_sep(n - 1) >= t_star * (1.0 - EXACT_TOL) {
        n -= 1;
    }
    while half_sep(n) < t_star * (1.0 - EXACT_TOL) {
        n += 1;
    }
    Ok(n)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoveringCheck {
    pub steps: usize,
    pub peak: Peak,
    pub passed: bool,
}

/// Builds the QVP at [`find_covering_n`] and checks that some peak sits
/// within one peak width of `t_star`.
pub fn covering_peak_check(model: &ModelSpec, t_star: f64, sigma: f64) -> Result<CoveringCheck, AnalysisError> {
    let lambda = model.lambda().ok_or(AnalysisError::NoDynamics)?;
    let steps = find_covering_n(t_star, lambda, sigma)?;
    let dist = distribution(&model.build_qvp(steps, sigma)?);
    let report = detect_peaks(&dist, DEFAULT_MIN_HEIGHT_FRACTION)?;
    let peak = report.nearest(t_star).cloned().ok_or(AnalysisError::AllZero)?;
    let passed = (peak.center - t_star).abs() <= peak.width;
    Ok(CoveringCheck { steps, peak, passed })
}
