//! Exact construction of quantum virtual path states.
//!
//! [`build_qvp`] forms the averaged step operator once and applies it `N`
//! times; [`brute_force_qvp`] sums every one of the `2^N` forward/backward
//! orderings explicitly and exists only as a small-`N` oracle.

use thiserror::Error;

use crate::linalg::{C64, ComplexMatrix, ComplexVector, HermitianGenerator, LinalgError};
use crate::numerics::{DEGENERATE_NORM, EXACT_TOL, MASS_CLAMP};
use crate::symmetry::Lattice;

/// Largest step count accepted by [`brute_force_qvp`].
pub const BRUTE_FORCE_MAX_STEPS: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("step count N must be at least 1")]
    ZeroSteps,
    #[error("spread sigma_w must be positive and finite (got {0})")]
    BadSigma(f64),
    #[error("resolution limit must be positive and finite (got {0})")]
    BadResolution(f64),
    #[error("initial state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("initial state has dimension {found}, expected {sites} sites x {internal} internal = {expected}")]
    InitialDimension { found: usize, sites: usize, internal: usize, expected: usize },
    #[error("generator dimension {found} does not match state dimension {expected}")]
    GeneratorDimension { expected: usize, found: usize },
    #[error("complete destructive interference: pre-normalization norm {norm:e}")]
    DestructiveInterference { norm: f64 },
    #[error("brute-force oracle limited to N <= {BRUTE_FORCE_MAX_STEPS} (got {0})")]
    OracleTooLarge(usize),
    #[error("invalid probability masses: {0}")]
    BadMasses(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `δw = √2·σ_w/√N`: keeps the spread of final positions at `σ_w`.
pub fn step_size(steps: usize, sigma: f64) -> Result<f64, EngineError> {
    if steps == 0 {
        return Err(EngineError::ZeroSteps);
    }
    check_sigma(sigma)?;
    Ok(std::f64::consts::SQRT_2 * sigma / (steps as f64).sqrt())
}

fn check_sigma(sigma: f64) -> Result<(), EngineError> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(EngineError::BadSigma(sigma))
    }
}

#[derive(Clone, Debug)]
pub struct QvpParams {
    steps: usize,
    sigma: f64,
    lattice: Lattice,
    initial: ComplexVector,
    internal_dim: usize,
    resolution_limit: Option<f64>,
}

impl QvpParams {
    /// Starts at `|w = 0⟩` with no internal factor.
    pub fn new(steps: usize, sigma: f64, lattice: Lattice) -> Result<Self, EngineError> {
        step_size(steps, sigma)?;
        Ok(Self {
            steps,
            sigma,
            lattice,
            initial: lattice.position_state(0),
            internal_dim: 1,
            resolution_limit: None,
        })
    }

    /// Replaces the initial state. `internal_dim` is the size of the factor
    /// tensored onto the lattice (`1` for none); ordering is lattice-major.
    pub fn with_initial(mut self, initial: ComplexVector, internal_dim: usize) -> Result<Self, EngineError> {
        let expected = self.lattice.sites() * internal_dim;
        if internal_dim == 0 || initial.dim() != expected {
            return Err(EngineError::InitialDimension {
                found: initial.dim(),
                sites: self.lattice.sites(),
                internal: internal_dim,
                expected,
            });
        }
        let norm = initial.norm();
        if (norm - 1.0).abs() >= EXACT_TOL {
            return Err(EngineError::NotNormalized(norm));
        }
        self.initial = initial;
        self.internal_dim = internal_dim;
        Ok(self)
    }

    pub fn with_resolution_limit(mut self, limit: f64) -> Result<Self, EngineError> {
        if !(limit.is_finite() && limit > 0.0) {
            return Err(EngineError::BadResolution(limit));
        }
        self.resolution_limit = Some(limit);
        Ok(self)
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn initial(&self) -> &ComplexVector {
        &self.initial
    }

    pub fn internal_dim(&self) -> usize {
        self.internal_dim
    }

    pub fn resolution_limit(&self) -> Option<f64> {
        self.resolution_limit
    }

    pub fn dim(&self) -> usize {
        self.initial.dim()
    }

    /// The derived step `δw`.
    pub fn step(&self) -> f64 {
        step_size(self.steps, self.sigma).expect("validated at construction")
    }

    /// Whether `δw` is at or below the resolution limit, when one is set.
    pub fn within_resolution_limit(&self) -> Option<bool> {
        self.resolution_limit.map(|lim| self.step() <= lim * (1.0 + EXACT_TOL))
    }
}

#[derive(Clone, Debug)]
pub struct QvpState {
    amplitudes: ComplexVector,
    steps: usize,
    step: f64,
    model: String,
    lattice: Lattice,
    internal_dim: usize,
    norm_before_normalization: f64,
}

impl QvpState {
    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn internal_dim(&self) -> usize {
        self.internal_dim
    }

    /// `‖S^N·initial‖` before normalization; small values signal heavy
    /// destructive interference.
    pub fn norm_before_normalization(&self) -> f64 {
        self.norm_before_normalization
    }

    pub(crate) fn with_model(mut self, model: impl Into<String>) -> Self {
        self.model = model.into();
        self
    }

    /// Same state metadata with new amplitudes (e.g. after evolution).
    pub(crate) fn with_amplitudes(&self, amplitudes: ComplexVector) -> Self {
        Self { amplitudes, ..self.clone() }
    }
}

fn check_generators(params: &QvpParams, w_f: &HermitianGenerator, w_b: &HermitianGenerator) -> Result<(), EngineError> {
    for w in [w_f, w_b] {
        if w.dim() != params.dim() {
            return Err(EngineError::GeneratorDimension { expected: params.dim(), found: w.dim() });
        }
    }
    Ok(())
}

/// `S = (e^{i W_B δw} + e^{-i W_F δw}) / 2`
pub fn step_operator(
    w_f: &HermitianGenerator,
    w_b: &HermitianGenerator,
    step: f64,
) -> Result<ComplexMatrix, EngineError> {
    if w_f.dim() != w_b.dim() {
        return Err(LinalgError::DimensionMismatch { expected: w_f.dim(), found: w_b.dim() }.into());
    }
    let back = w_b.exponential(step);
    let fwd = w_f.exponential(-step);
    Ok(back.add(&fwd)?.scale(C64::new(0.5, 0.0)))
}

fn finish(params: &QvpParams, raw: ComplexVector) -> Result<QvpState, EngineError> {
    let (amplitudes, norm) = raw.normalized();
    if !(norm >= DEGENERATE_NORM) {
        return Err(EngineError::DestructiveInterference { norm });
    }
    Ok(QvpState {
        amplitudes,
        steps: params.steps,
        step: params.step(),
        model: "custom".into(),
        lattice: params.lattice,
        internal_dim: params.internal_dim,
        norm_before_normalization: norm,
    })
}

/// `S^N·initial` by `N` successive matrix-vector products, normalized.
pub fn build_qvp(
    params: &QvpParams,
    w_f: &HermitianGenerator,
    w_b: &HermitianGenerator,
) -> Result<QvpState, EngineError> {
    check_generators(params, w_f, w_b)?;
    let s = step_operator(w_f, w_b, params.step())?;
    let mut current = params.initial.as_slice().to_vec();
    let mut next = vec![C64::new(0.0, 0.0); current.len()];
    for _ in 0..params.steps {
        s.apply_into(&current, &mut next);
        std::mem::swap(&mut current, &mut next);
    }
    finish(params, ComplexVector::from_vec_unchecked(current))
}

/// Sums all `2^N` ordered products of `e^{i W_B δw}` and `e^{-i W_F δw}`
/// acting on the initial state, one path at a time.
pub fn brute_force_qvp(
    params: &QvpParams,
    w_f: &HermitianGenerator,
    w_b: &HermitianGenerator,
) -> Result<QvpState, EngineError> {
    if params.steps > BRUTE_FORCE_MAX_STEPS {
        return Err(EngineError::OracleTooLarge(params.steps));
    }
    check_generators(params, w_f, w_b)?;
    let step = params.step();
    let n = params.steps;
    let mut total = ComplexVector::zeros(params.dim());
    for path in 0u32..(1u32 << n) {
        let mut v = params.initial.clone();
        for bit in 0..n {
            v = if path >> bit & 1 == 1 {
                w_b.apply_exponential(step, &v)?
            } else {
                w_f.apply_exponential(-step, &v)?
            };
        }
        total = total.add(&v)?;
    }
    let total = total.scale(C64::new(0.5f64.powi(n as i32), 0.0));
    finish(params, total)
}

/// Probability masses over lattice sites.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    lattice: Lattice,
    masses: Vec<f64>,
}

impl Distribution {
    /// Normalizes non-negative weights into a distribution. Entries in
    /// `[-1e-14, 0)` are treated as rounding noise and clamped.
    pub fn from_masses(lattice: Lattice, masses: Vec<f64>) -> Result<Self, EngineError> {
        if masses.len() != lattice.sites() {
            return Err(EngineError::BadMasses(format!(
                "{} masses for {} sites",
                masses.len(),
                lattice.sites()
            )));
        }
        if let Some(bad) = masses.iter().find(|m| !m.is_finite() || **m < -MASS_CLAMP) {
            return Err(EngineError::BadMasses(format!("entry {bad}")));
        }
        let clamped: Vec<f64> = masses.into_iter().map(|m| m.max(0.0)).collect();
        let total: f64 = clamped.iter().sum();
        if !(total > 0.0) {
            return Err(EngineError::BadMasses("total mass is zero".into()));
        }
        Ok(Self { lattice, masses: clamped.into_iter().map(|m| m / total).collect() })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Mass at site offset `j` (label `jΔ`).
    pub fn mass_at(&self, offset: i64) -> f64 {
        self.masses[self.lattice.index_of(offset)]
    }

    pub fn max_mass(&self) -> f64 {
        self.masses.iter().copied().fold(0.0, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.masses.iter().enumerate().map(|(i, m)| m * self.lattice.label(i)).sum()
    }

    pub fn std_dev(&self) -> f64 {
        let mu = self.mean();
        self.masses
            .iter()
            .enumerate()
            .map(|(i, m)| m * (self.lattice.label(i) - mu).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// `(label, mass)` pairs in lattice order.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.masses.iter().enumerate().map(|(i, &m)| (self.lattice.label(i), m))
    }
}

/// Site masses with the internal factor traced out.
pub fn distribution(state: &QvpState) -> Distribution {
    let k = state.internal_dim;
    let masses = state
        .amplitudes
        .as_slice()
        .chunks(k)
        .map(|site| site.iter().map(|z| z.norm_sqr()).sum())
        .collect();
    Distribution::from_masses(state.lattice, masses).expect("normalized state has positive mass")
}

/// Lattice-sampled `g²(w) = e^{-w²/2σ_w²}`, normalized.
pub fn gaussian_reference(sigma: f64, lattice: &Lattice) -> Result<Distribution, EngineError> {
    check_sigma(sigma)?;
    let masses = lattice
        .labels()
        .into_iter()
        .map(|w| (-w * w / (2.0 * sigma * sigma)).exp())
        .collect();
    Distribution::from_masses(*lattice, masses)
}

/// Smallest `N` with `step_size(N, σ_w) ≤ δw_min`.
pub fn min_steps_for_resolution(sigma: f64, resolution_limit: f64) -> Result<usize, EngineError> {
    check_sigma(sigma)?;
    if !(resolution_limit.is_finite() && resolution_limit > 0.0) {
        return Err(EngineError::BadResolution(resolution_limit));
    }
    let ratio = 2.0 * sigma * sigma / (resolution_limit * resolution_limit);
    // Round-off in the ratio must not push an exact boundary up by one.
    let mut n = ((ratio * (1.0 - 4.0 * f64::EPSILON)).ceil() as usize).max(1);
    let within = |n: usize| step_size(n, sigma).unwrap() <= resolution_limit * (1.0 + EXACT_TOL);
    while n > 1 && within(n - 1) {
        n -= 1;
    }
    while !within(n) {
        n += 1;
    }
    Ok(n)
}

/// All step counts whose QVPs lie within the resolution limit, in
/// increasing order. Unbounded.
pub fn equivalence_set(sigma: f64, resolution_limit: f64) -> Result<EquivalenceSet, EngineError> {
    Ok(EquivalenceSet { next: min_steps_for_resolution(sigma, resolution_limit)? })
}

#[derive(Clone, Debug)]
pub struct EquivalenceSet {
    next: usize,
}

impl Iterator for EquivalenceSet {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        let n = self.next;
        self.next += 1;
        Some(n)
    }
}
