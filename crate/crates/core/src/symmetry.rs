//! Periodic position/time lattice, the translation generator on it, the
//! discrete symmetries P and T, and the forward/backward evolution contract.
//!
//! Site `j` of a lattice with `D` sites carries the label `w_j = jΔ` for
//! `j ∈ {-(D-1)/2, …, (D-1)/2}`; storage index `j + (D-1)/2`. The momentum
//! generator is diagonal in the discrete Fourier basis with wavenumbers
//! `k_m = 2πm/(DΔ)`, so `e^{-i a p}` translates by `+a` and is an exact
//! cyclic shift whenever `a/Δ` is an integer.

use std::f64::consts::PI;
use std::ops::Deref;

use thiserror::Error;

use crate::linalg::{C64, ComplexMatrix, ComplexVector, HermitianGenerator, LinalgError};
use crate::numerics::STRUCTURAL_TOL;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymmetryError {
    #[error("lattice needs an odd, positive number of sites (got {0})")]
    EvenOrEmptyLattice(usize),
    #[error("lattice spacing must be positive and finite (got {0})")]
    BadSpacing(f64),
    #[error("operator squared is not ±identity (deviation {deviation:e})")]
    NotInvolutive { deviation: f64 },
    #[error("{what} must be finite and non-negative (got {value})")]
    BadParameter { what: &'static str, value: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lattice {
    sites: usize,
    spacing: f64,
}

impl Lattice {
    pub fn new(sites: usize, spacing: f64) -> Result<Self, SymmetryError> {
        if sites == 0 || sites % 2 == 0 {
            return Err(SymmetryError::EvenOrEmptyLattice(sites));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(SymmetryError::BadSpacing(spacing));
        }
        Ok(Self { sites, spacing })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// `(D-1)/2`, the largest site offset.
    pub fn half_width(&self) -> usize {
        (self.sites - 1) / 2
    }

    /// Total periodic extent `DΔ`.
    pub fn extent(&self) -> f64 {
        self.sites as f64 * self.spacing
    }

    /// Storage index of the `w = 0` site.
    pub fn origin_index(&self) -> usize {
        self.half_width()
    }

    pub fn offset(&self, index: usize) -> i64 {
        index as i64 - self.half_width() as i64
    }

    /// Storage index of offset `j`, wrapped cyclically.
    pub fn index_of(&self, offset: i64) -> usize {
        (offset + self.half_width() as i64).rem_euclid(self.sites as i64) as usize
    }

    pub fn label(&self, index: usize) -> f64 {
        self.offset(index) as f64 * self.spacing
    }

    pub fn labels(&self) -> Vec<f64> {
        (0..self.sites).map(|i| self.label(i)).collect()
    }

    /// Fourier wavenumbers `k_m`, ascending.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let h = self.half_width() as i64;
        (-h..=h)
            .map(|m| 2.0 * PI * m as f64 / self.extent())
            .collect()
    }

    /// `|w = offset·Δ⟩`
    pub fn position_state(&self, offset: i64) -> ComplexVector {
        ComplexVector::basis(self.sites, self.index_of(offset))
    }

    /// `e^{2πi·m·j/D}` for signed offsets, reduced modulo `D` first so that
    /// large products do not lose phase accuracy.
    fn fourier_phase(&self, m: i64, j: i64) -> C64 {
        let d = self.sites as i64;
        let r = (m * j).rem_euclid(d);
        C64::from_polar(1.0, 2.0 * PI * r as f64 / d as f64)
    }
}

/// The lattice momentum `p = F^dagger diag(k) F`.
#[derive(Clone, Debug)]
pub struct TranslationGenerator {
    lattice: Lattice,
    generator: HermitianGenerator,
}

impl TranslationGenerator {
    pub fn new(lattice: Lattice) -> Self {
        let d = lattice.sites();
        let h = lattice.half_width() as i64;
        let norm = 1.0 / d as f64;
        let ks = lattice.wavenumbers();

        // Circulant kernel c[r] = (1/D) Σ_m k_m e^{2πi m r / D}; c[-r] = conj(c[r]).
        let mut kernel = vec![C64::new(0.0, 0.0); d];
        for r in 0..=h {
            let sum: C64 = (-h..=h)
                .zip(&ks)
                .map(|(m, &k)| lattice.fourier_phase(m, r) * k)
                .sum();
            kernel[r as usize] = sum * norm;
            if r > 0 {
                kernel[(d as i64 - r) as usize] = kernel[r as usize].conj();
            }
        }
        let matrix = ComplexMatrix::from_fn(d, |i, l| {
            kernel[(i as i64 - l as i64).rem_euclid(d as i64) as usize]
        });

        let scale = norm.sqrt();
        let vectors = ComplexMatrix::from_fn(d, |i, col| {
            lattice.fourier_phase(col as i64 - h, lattice.offset(i)) * scale
        });
        let generator = HermitianGenerator::from_parts(matrix, ks, vectors)
            .expect("lattice momentum is Hermitian by construction");
        Self { lattice, generator }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn generator(&self) -> &HermitianGenerator {
        &self.generator
    }

    pub fn into_generator(self) -> HermitianGenerator {
        self.generator
    }
}

impl Deref for TranslationGenerator {
    type Target = HermitianGenerator;
    fn deref(&self) -> &HermitianGenerator {
        &self.generator
    }
}

/// `e^{-i a p} v`: moves the state by `+a` along the lattice.
pub fn translate_state(
    v: &ComplexVector,
    p: &TranslationGenerator,
    a: f64,
) -> Result<ComplexVector, SymmetryError> {
    if !a.is_finite() {
        return Err(SymmetryError::BadParameter { what: "displacement", value: a });
    }
    Ok(p.apply_exponential(-a, v)?)
}

/// A unitary `U`, optionally followed by complex conjugation: `v ↦ U·conj(v)`
/// when antilinear, `v ↦ U·v` otherwise.
#[derive(Clone, Debug)]
pub struct AntiunitarySymmetry {
    unitary: ComplexMatrix,
    antilinear: bool,
    square_sign: i8,
}

impl AntiunitarySymmetry {
    pub fn new(unitary: ComplexMatrix, antilinear: bool) -> Result<Self, SymmetryError> {
        let dev = unitary.unitarity_deviation();
        if dev >= STRUCTURAL_TOL {
            return Err(LinalgError::NotUnitary { max_deviation: dev }.into());
        }
        // (UK)^2 = U conj(U); U^2 for the linear case
        let square = if antilinear {
            unitary.matmul(&unitary.conj())?
        } else {
            unitary.matmul(&unitary)?
        };
        let id = ComplexMatrix::identity(unitary.dim());
        let plus = square.max_abs_diff(&id)?;
        let minus = square.max_abs_diff(&id.scale(C64::new(-1.0, 0.0)))?;
        let square_sign = if plus < STRUCTURAL_TOL {
            1
        } else if minus < STRUCTURAL_TOL {
            -1
        } else {
            return Err(SymmetryError::NotInvolutive { deviation: plus.min(minus) });
        };
        Ok(Self { unitary, antilinear, square_sign })
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn is_antilinear(&self) -> bool {
        self.antilinear
    }

    /// `+1` or `-1` according to `S² = ±I`.
    pub fn square_sign(&self) -> i8 {
        self.square_sign
    }

    pub fn dim(&self) -> usize {
        self.unitary.dim()
    }

    pub fn apply(&self, v: &ComplexVector) -> Result<ComplexVector, SymmetryError> {
        let input = if self.antilinear { v.conj() } else { v.clone() };
        Ok(self.unitary.apply(&input)?)
    }

    pub fn apply_inverse(&self, v: &ComplexVector) -> Result<ComplexVector, SymmetryError> {
        let out = self.unitary.dagger().apply(v)?;
        Ok(if self.antilinear { out.conj() } else { out })
    }

    /// `S M S^{-1}` for a linear operator `M`.
    pub fn conjugate_matrix(&self, m: &ComplexMatrix) -> Result<ComplexMatrix, SymmetryError> {
        let inner = if self.antilinear { m.conj() } else { m.clone() };
        Ok(self.unitary.matmul(&inner)?.mul_adjoint(&self.unitary)?)
    }
}

/// Parity: `Π|w_j⟩ = |w_{-j}⟩`.
pub fn parity_operator(lattice: &Lattice) -> AntiunitarySymmetry {
    AntiunitarySymmetry::new(reflection(lattice), false).expect("reflection is an involution")
}

fn reflection(lattice: &Lattice) -> ComplexMatrix {
    let d = lattice.sites();
    let perm: Vec<usize> = (0..d).map(|i| d - 1 - i).collect();
    ComplexMatrix::permutation(&perm)
}

/// Time reversal `T = (Π ⊗ U_int)·K`, with `K` complex conjugation in the
/// lattice (⊗ internal) basis. Without an internal factor `T = Π·K`.
pub fn time_reversal_operator(
    lattice: &Lattice,
    internal_factor: Option<&ComplexMatrix>,
) -> Result<AntiunitarySymmetry, SymmetryError> {
    let pi = reflection(lattice);
    let unitary = match internal_factor {
        None => pi,
        Some(u) => {
            let dev = u.unitarity_deviation();
            if dev >= STRUCTURAL_TOL {
                return Err(LinalgError::NotUnitary { max_deviation: dev }.into());
            }
            pi.kron(u)
        }
    };
    AntiunitarySymmetry::new(unitary, true)
}

/// `S W S^{-1}`. For antilinear `S = U·K` this is `U conj(W) U^dagger`; the
/// spectral data is carried over rather than recomputed.
pub fn conjugate_generator(
    w: &HermitianGenerator,
    s: &AntiunitarySymmetry,
) -> Result<HermitianGenerator, SymmetryError> {
    if w.dim() != s.dim() {
        return Err(LinalgError::DimensionMismatch { expected: s.dim(), found: w.dim() }.into());
    }
    let matrix = s.conjugate_matrix(w.matrix())?;
    let vectors = if s.is_antilinear() {
        s.unitary().matmul(&w.eigenvectors().conj())?
    } else {
        s.unitary().matmul(w.eigenvectors())?
    };
    Ok(HermitianGenerator::from_parts(matrix, w.eigenvalues().to_vec(), vectors)?)
}

fn check_duration(a: f64) -> Result<(), SymmetryError> {
    if a.is_finite() && a >= 0.0 {
        Ok(())
    } else {
        Err(SymmetryError::BadParameter { what: "evolution parameter", value: a })
    }
}

/// Physical forward evolution `e^{-i a H_F}`.
pub fn forward_step(v: &ComplexVector, h_f: &HermitianGenerator, a: f64) -> Result<ComplexVector, SymmetryError> {
    check_duration(a)?;
    Ok(h_f.apply_exponential(-a, v)?)
}

/// Physical backward evolution `e^{+i a H_B}`.
pub fn backward_step(v: &ComplexVector, h_b: &HermitianGenerator, a: f64) -> Result<ComplexVector, SymmetryError> {
    check_duration(a)?;
    Ok(h_b.apply_exponential(a, v)?)
}

/// Undoes [`forward_step`]: `e^{+i a H_F}`.
pub fn unwind_forward(v: &ComplexVector, h_f: &HermitianGenerator, a: f64) -> Result<ComplexVector, SymmetryError> {
    check_duration(a)?;
    Ok(h_f.apply_exponential(a, v)?)
}

/// Undoes [`backward_step`]: `e^{-i a H_B}`.
pub fn unwind_backward(v: &ComplexVector, h_b: &HermitianGenerator, a: f64) -> Result<ComplexVector, SymmetryError> {
    check_duration(a)?;
    Ok(h_b.apply_exponential(-a, v)?)
}
