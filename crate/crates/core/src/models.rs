//! Built-in generator pairs.
//!
//! * Symmetric: `W_F = W_B = p` on the bare lattice.
//! * T-violating: lattice ⊗ two-level internal factor with
//!   `W_F = p ⊗ (I + λσ_z)` and `W_B = T W_F T⁻¹ = p ⊗ (I − λσ_z)` for
//!   `T = (Π ⊗ σ_x)·K`. In the `σ_z = ±1` sector the step operator is
//!   `e^{∓i λ δw p} cos(δw p)`, so each sector is a Gaussian QVP translated by
//!   `±Nλδw` and the traced distribution shows two mirror-image peaks.
//! * Custom: caller-supplied generators.

use thiserror::Error;

use crate::engine::{self, EngineError, QvpParams, QvpState};
use crate::linalg::{C64, ComplexMatrix, ComplexVector, HermitianGenerator, LinalgError};
use crate::symmetry::{
    conjugate_generator, time_reversal_operator, AntiunitarySymmetry, Lattice, SymmetryError,
    TranslationGenerator,
};

/// Lattice extent is expected to exceed this multiple of the distribution
/// support; smaller lattices risk wrap-around aliasing.
pub const EXTENT_SAFETY_FACTOR: f64 = 8.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("asymmetry strength must satisfy |lambda| < 1 (got {0})")]
    BadLambda(f64),
    #[error("generator dimension {found} does not match lattice sites x internal = {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("model has no time-reversal operator")]
    NoTimeReversal,
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelKind {
    Symmetric,
    TViolating { lambda: f64 },
    Custom,
}

#[derive(Clone, Debug)]
pub struct ModelSpec {
    kind: ModelKind,
    lattice: Lattice,
    internal_dim: usize,
    forward: HermitianGenerator,
    backward: HermitianGenerator,
    time_reversal: Option<AntiunitarySymmetry>,
    default_initial: ComplexVector,
}

pub(crate) fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).expect("2x2")
}

/// `I + s·σ_z` as a generator, already diagonal.
fn internal_factor(s: f64) -> HermitianGenerator {
    let diag = [C64::new(1.0 + s, 0.0), C64::new(1.0 - s, 0.0)];
    HermitianGenerator::from_parts(
        ComplexMatrix::diagonal(&diag),
        vec![1.0 + s, 1.0 - s],
        ComplexMatrix::identity(2),
    )
    .expect("real diagonal is Hermitian")
}

/// `W_F = W_B = p`, `T = Π·K`.
pub fn build_symmetric(lattice: Lattice) -> ModelSpec {
    let p = TranslationGenerator::new(lattice).into_generator();
    let t = time_reversal_operator(&lattice, None).expect("reflection is unitary");
    ModelSpec {
        kind: ModelKind::Symmetric,
        lattice,
        internal_dim: 1,
        forward: p.clone(),
        backward: p,
        time_reversal: Some(t),
        default_initial: lattice.position_state(0),
    }
}

/// Clock ⊗ qubit model with asymmetry strength `λ`, `|λ| < 1`.
pub fn build_tviolating(lattice: Lattice, lambda: f64) -> Result<ModelSpec, ModelError> {
    if !(lambda.is_finite() && lambda.abs() < 1.0) {
        return Err(ModelError::BadLambda(lambda));
    }
    let p = TranslationGenerator::new(lattice);
    let forward = p.kron(&internal_factor(lambda));
    // T(p ⊗ A)T⁻¹ = (Π conj(p) Π) ⊗ (σ_x conj(A) σ_x) = p ⊗ σ_x A σ_x for real diagonal A,
    // which swaps the diagonal. Built directly; the relation is checked by
    // `symmetry_relation_error`.
    let backward = p.kron(&internal_factor(-lambda));
    let t = time_reversal_operator(&lattice, Some(&sigma_x()))?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let internal = ComplexVector::new(vec![C64::new(s, 0.0), C64::new(s, 0.0)])?;
    Ok(ModelSpec {
        kind: ModelKind::TViolating { lambda },
        lattice,
        internal_dim: 2,
        forward,
        backward,
        time_reversal: Some(t),
        default_initial: lattice.position_state(0).kron(&internal),
    })
}

/// Caller-supplied generator pair on `lattice ⊗ C^internal_dim`. Without a
/// time-reversal operator the symmetry-relation check is unavailable.
pub fn build_custom(
    lattice: Lattice,
    internal_dim: usize,
    forward: HermitianGenerator,
    backward: HermitianGenerator,
    time_reversal: Option<AntiunitarySymmetry>,
) -> Result<ModelSpec, ModelError> {
    let expected = lattice.sites() * internal_dim;
    for found in [forward.dim(), backward.dim()]
        .into_iter()
        .chain(time_reversal.as_ref().map(|t| t.dim()))
    {
        if found != expected || internal_dim == 0 {
            return Err(ModelError::Dimension { expected, found });
        }
    }
    let mut internal = vec![C64::new(0.0, 0.0); internal_dim];
    internal[0] = C64::new(1.0, 0.0);
    let default_initial = lattice.position_state(0).kron(&ComplexVector::new(internal)?);
    Ok(ModelSpec {
        kind: ModelKind::Custom,
        lattice,
        internal_dim,
        forward,
        backward,
        time_reversal,
        default_initial,
    })
}

impl ModelSpec {
    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn internal_dim(&self) -> usize {
        self.internal_dim
    }

    pub fn forward(&self) -> &HermitianGenerator {
        &self.forward
    }

    pub fn backward(&self) -> &HermitianGenerator {
        &self.backward
    }

    pub fn time_reversal(&self) -> Option<&AntiunitarySymmetry> {
        self.time_reversal.as_ref()
    }

    pub fn default_initial(&self) -> &ComplexVector {
        &self.default_initial
    }

    pub fn lambda(&self) -> Option<f64> {
        match self.kind {
            ModelKind::TViolating { lambda } => Some(lambda),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            ModelKind::Symmetric => "symmetric".into(),
            ModelKind::TViolating { lambda } => format!("tviolating(lambda={lambda})"),
            ModelKind::Custom => "custom".into(),
        }
    }

    /// `‖W_F − W_B‖` in the spectral norm.
    pub fn asymmetry_norm(&self) -> Result<f64, ModelError> {
        let diff = self.forward.matrix().sub(self.backward.matrix())?;
        if diff.max_abs() == 0.0 {
            return Ok(0.0);
        }
        Ok(HermitianGenerator::new(diff)?.spectral_norm())
    }

    /// `max |W_B − T W_F T⁻¹|`.
    pub fn symmetry_relation_error(&self) -> Result<f64, ModelError> {
        let t = self.time_reversal.as_ref().ok_or(ModelError::NoTimeReversal)?;
        let image = conjugate_generator(&self.forward, t)?;
        Ok(image.matrix().max_abs_diff(self.backward.matrix())?)
    }

    /// Peak separation predicted by the sector decomposition,
    /// `2|λ|·√(2N)·σ_w`. Zero for the symmetric model, `None` for custom ones.
    pub fn predicted_separation(&self, steps: usize, sigma: f64) -> Option<f64> {
        match self.kind {
            ModelKind::Symmetric => Some(0.0),
            ModelKind::TViolating { lambda } => {
                Some(2.0 * lambda.abs() * (2.0 * steps as f64).sqrt() * sigma)
            }
            ModelKind::Custom => None,
        }
    }

    /// Width of the region expected to carry the distribution: the peak
    /// separation plus ±3σ_w around the outer peaks.
    pub fn expected_support(&self, steps: usize, sigma: f64) -> Option<f64> {
        self.predicted_separation(steps, sigma).map(|s| s + 6.0 * sigma)
    }

    pub fn params(&self, steps: usize, sigma: f64) -> Result<QvpParams, ModelError> {
        Ok(QvpParams::new(steps, sigma, self.lattice)?
            .with_initial(self.default_initial.clone(), self.internal_dim)?)
    }

    /// QVP from the model's default initial state.
    pub fn build_qvp(&self, steps: usize, sigma: f64) -> Result<QvpState, ModelError> {
        let params = self.params(steps, sigma)?;
        self.build_qvp_with(&params)
    }

    pub fn build_qvp_with(&self, params: &QvpParams) -> Result<QvpState, ModelError> {
        if let Some(support) = self.expected_support(params.steps(), params.sigma()) {
            let needed = EXTENT_SAFETY_FACTOR * support;
            if self.lattice.extent() < needed {
                log::warn!(
                    "lattice extent {:.3} is below {EXTENT_SAFETY_FACTOR}x the expected support {support:.3}; \
                     wrap-around may alias the distribution",
                    self.lattice.extent()
                );
            }
        }
        let state = engine::build_qvp(params, &self.forward, &self.backward)?;
        Ok(state.with_model(self.label()))
    }
}

/// Free-function form of [`ModelSpec::asymmetry_norm`].
pub fn asymmetry_norm(model: &ModelSpec) -> Result<f64, ModelError> {
    model.asymmetry_norm()
}
