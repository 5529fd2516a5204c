//! Dense complex linear algebra: vectors, square matrices, Hermitian
//! generators with cached spectral data, and spectral exponentials.

use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::{GENERATOR_HERMITIAN_TOL, STRUCTURAL_TOL};

pub type C64 = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square: {rows} rows, row {row} has {cols} columns")]
    NotSquare { rows: usize, row: usize, cols: usize },
    #[error("empty vector or matrix")]
    Empty,
    #[error("non-finite entry at index {0}")]
    NonFinite(usize),
    #[error("matrix is not Hermitian: max |M - M^dagger| = {max_asymmetry:e}")]
    NotHermitian { max_asymmetry: f64 },
    #[error("matrix is not unitary: max |U^dagger U - I| = {max_deviation:e}")]
    NotUnitary { max_deviation: f64 },
    #[error("spectral data has {eigenvalues} eigenvalues for dimension {dim}")]
    SpectrumSize { eigenvalues: usize, dim: usize },
}

// Inner kernels. Two independent accumulators give the optimizer room to
// overlap the multiply-adds.

#[inline]
fn dot(a: &[C64], b: &[C64]) -> C64 {
    let (mut re0, mut im0, mut re1, mut im1) = (0.0, 0.0, 0.0, 0.0);
    let mut ac = a.chunks_exact(2);
    let mut bc = b.chunks_exact(2);
    for (x, y) in (&mut ac).zip(&mut bc) {
        re0 += x[0].re * y[0].re - x[0].im * y[0].im;
        im0 += x[0].re * y[0].im + x[0].im * y[0].re;
        re1 += x[1].re * y[1].re - x[1].im * y[1].im;
        im1 += x[1].re * y[1].im + x[1].im * y[1].re;
    }
    for (x, y) in ac.remainder().iter().zip(bc.remainder()) {
        re0 += x.re * y.re - x.im * y.im;
        im0 += x.re * y.im + x.im * y.re;
    }
    C64::new(re0 + re1, im0 + im1)
}

/// `sum_k a_k * conj(b_k)`
#[inline]
fn dot_conj(a: &[C64], b: &[C64]) -> C64 {
    let (mut re0, mut im0, mut re1, mut im1) = (0.0, 0.0, 0.0, 0.0);
    let mut ac = a.chunks_exact(2);
    let mut bc = b.chunks_exact(2);
    for (x, y) in (&mut ac).zip(&mut bc) {
        re0 += x[0].re * y[0].re + x[0].im * y[0].im;
        im0 += x[0].im * y[0].re - x[0].re * y[0].im;
        re1 += x[1].re * y[1].re + x[1].im * y[1].im;
        im1 += x[1].im * y[1].re - x[1].re * y[1].im;
    }
    for (x, y) in ac.remainder().iter().zip(bc.remainder()) {
        re0 += x.re * y.re + x.im * y.im;
        im0 += x.im * y.re - x.re * y.im;
    }
    C64::new(re0 + re1, im0 + im1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVector {
    entries: Vec<C64>,
}

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Result<Self, LinalgError> {
        if entries.is_empty() {
            return Err(LinalgError::Empty);
        }
        if let Some(i) = entries.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(LinalgError::NonFinite(i));
        }
        Ok(Self { entries })
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<C64>) -> Self {
        debug_assert!(!entries.is_empty());
        Self { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "vector dimension must be positive");
        Self { entries: vec![C64::new(0.0, 0.0); dim] }
    }

    /// Standard basis vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[index] = C64::new(1.0, 0.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, C64> {
        self.entries.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Result<C64, LinalgError> {
        check_dim(self.dim(), other.dim())?;
        Ok(dot_conj(&other.entries, &self.entries))
    }

    pub fn conj(&self) -> Self {
        Self { entries: self.entries.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { entries: self.entries.iter().map(|z| z * factor).collect() }
    }

    /// Returns the normalized vector and the norm it had before.
    pub fn normalized(&self) -> (Self, f64) {
        let n = self.norm();
        (self.scale(C64::new(1.0 / n, 0.0)), n)
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self {
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self {
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        })
    }

    /// Max-norm of the difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64, LinalgError> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut entries = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.entries {
            entries.extend(other.entries.iter().map(|b| a * b));
        }
        Self { entries }
    }
}

impl Index<usize> for ComplexVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.entries[i]
    }
}

fn check_dim(expected: usize, found: usize) -> Result<(), LinalgError> {
    if expected == found {
        Ok(())
    } else {
        Err(LinalgError::DimensionMismatch { expected, found })
    }
}

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        if self.dim <= 8 {
            for row in self.data.chunks(self.dim) {
                writeln!(f, "  {row:?}")?;
            }
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self, LinalgError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(LinalgError::Empty);
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(LinalgError::NotSquare { rows: dim, row: r, cols: row.len() });
            }
            data.extend(row);
        }
        if let Some(i) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(LinalgError::NonFinite(i));
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self, LinalgError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// Permutation matrix sending basis vector `e_j` to `e_{perm[j]}`.
    pub fn permutation(perm: &[usize]) -> Self {
        let mut m = Self::zeros(perm.len());
        for (j, &i) in perm.iter().enumerate() {
            m[(i, j)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector::from_vec_unchecked((0..self.dim).map(|i| self[(i, j)]).collect())
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * factor).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        check_dim(self.dim, other.dim)?;
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        check_dim(self.dim, other.dim)?;
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// Matrix product `self · other`.
    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        check_dim(self.dim, other.dim)?;
        // self · other = self · (other^T)^T, and rows of other^T are contiguous.
        Ok(self.mul_transposed(&other.transpose()))
    }

    /// `self · other^dagger` without materializing the adjoint.
    pub fn mul_adjoint(&self, other: &Self) -> Result<Self, LinalgError> {
        check_dim(self.dim, other.dim)?;
        let n = self.dim;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            let a = self.row(i);
            for j in 0..n {
                data.push(dot_conj(a, other.row(j)));
            }
        }
        Ok(Self { dim: n, data })
    }

    fn mul_transposed(&self, other_t: &Self) -> Self {
        let n = self.dim;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            let a = self.row(i);
            for j in 0..n {
                data.push(dot(a, other_t.row(j)));
            }
        }
        Self { dim: n, data }
    }

    /// Matrix-vector product. The input vector is left untouched.
    pub fn apply(&self, v: &ComplexVector) -> Result<ComplexVector, LinalgError> {
        check_dim(self.dim, v.dim())?;
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        self.apply_into(v.as_slice(), &mut out);
        Ok(ComplexVector::from_vec_unchecked(out))
    }

    /// Hot-loop variant of [`apply`](Self::apply) writing into a caller buffer.
    pub(crate) fn apply_into(&self, x: &[C64], out: &mut [C64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), x);
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        Self::from_fn(n * m, |i, j| self[(i / m, j / m)] * other[(i % m, j % m)])
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64, LinalgError> {
        check_dim(self.dim, other.dim)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |M_ij - conj(M_ji)|`
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `max |U^dagger U - I|`
    pub fn unitarity_deviation(&self) -> f64 {
        // columns of U are the rows of U^T
        let ut = self.transpose();
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                // (U^dagger U)_ij = sum_k conj(U_ki) U_kj
                let z = dot_conj(ut.row(j), ut.row(i));
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((z - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() < tol
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues in ascending order and the unitary matrix whose
/// columns are the matching eigenvectors.
pub fn eigendecompose(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix), LinalgError> {
    let asym = m.max_asymmetry();
    if asym >= STRUCTURAL_TOL {
        return Err(LinalgError::NotHermitian { max_asymmetry: asym });
    }
    let n = m.dim();
    // Feed nalgebra the exactly Hermitian part.
    let sym = DMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let eig = nalgebra::linalg::SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// A self-adjoint operator together with its spectral decomposition
/// `M = V diag(eigenvalues) V^dagger`.
#[derive(Clone, Debug)]
pub struct HermitianGenerator {
    matrix: ComplexMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

impl HermitianGenerator {
    /// Promotes a Hermitian matrix to a generator by diagonalizing it.
    pub fn new(matrix: ComplexMatrix) -> Result<Self, LinalgError> {
        let asym = matrix.max_asymmetry();
        if asym >= GENERATOR_HERMITIAN_TOL {
            return Err(LinalgError::NotHermitian { max_asymmetry: asym });
        }
        let (eigenvalues, eigenvectors) = eigendecompose(&matrix)?;
        Ok(Self { matrix, eigenvalues, eigenvectors })
    }

    /// Builds a generator from known spectral data. Eigenpairs are reordered
    /// so that eigenvalues ascend.
    pub fn from_spectrum(
        eigenvalues: Vec<f64>,
        eigenvectors: ComplexMatrix,
    ) -> Result<Self, LinalgError> {
        let n = eigenvectors.dim();
        if eigenvalues.len() != n {
            return Err(LinalgError::SpectrumSize { eigenvalues: eigenvalues.len(), dim: n });
        }
        let dev = eigenvectors.unitarity_deviation();
        if dev >= STRUCTURAL_TOL {
            return Err(LinalgError::NotUnitary { max_deviation: dev });
        }
        let (eigenvalues, eigenvectors) = sort_spectrum(eigenvalues, eigenvectors);
        let scaled = scale_columns(&eigenvectors, |k| C64::new(eigenvalues[k], 0.0));
        let matrix = scaled.mul_adjoint(&eigenvectors)?;
        Ok(Self { matrix, eigenvalues, eigenvectors })
    }

    /// Assembles a generator from a matrix and spectral data already known to
    /// match it. Only Hermiticity is re-checked.
    pub(crate) fn from_parts(
        matrix: ComplexMatrix,
        eigenvalues: Vec<f64>,
        eigenvectors: ComplexMatrix,
    ) -> Result<Self, LinalgError> {
        let asym = matrix.max_asymmetry();
        if asym >= STRUCTURAL_TOL {
            return Err(LinalgError::NotHermitian { max_asymmetry: asym });
        }
        let (eigenvalues, eigenvectors) = sort_spectrum(eigenvalues, eigenvectors);
        Ok(Self { matrix, eigenvalues, eigenvectors })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `max |V diag(eigenvalues) V^dagger - M|`
    pub fn reconstruction_error(&self) -> f64 {
        let scaled = scale_columns(&self.eigenvectors, |k| C64::new(self.eigenvalues[k], 0.0));
        let rebuilt = scaled
            .mul_adjoint(&self.eigenvectors)
            .expect("eigenvector matrix matches generator dimension");
        rebuilt.max_abs_diff(&self.matrix).expect("same dimension")
    }

    /// `e^{i theta W}` via the cached spectral decomposition.
    pub fn exponential(&self, theta: f64) -> ComplexMatrix {
        let scaled = scale_columns(&self.eigenvectors, |k| C64::from_polar(1.0, theta * self.eigenvalues[k]));
        scaled
            .mul_adjoint(&self.eigenvectors)
            .expect("eigenvector matrix matches generator dimension")
    }

    /// `e^{i theta W} v` without forming the exponential matrix.
    pub fn apply_exponential(
        &self,
        theta: f64,
        v: &ComplexVector,
    ) -> Result<ComplexVector, LinalgError> {
        check_dim(self.dim(), v.dim())?;
        let n = self.dim();
        let vt = self.eigenvectors.transpose();
        // coefficients c_k = <v_k|v>, v_k the k-th eigenvector (row k of V^T)
        let coeffs: Vec<C64> = (0..n)
            .map(|k| dot_conj(v.as_slice(), vt.row(k)) * C64::from_polar(1.0, theta * self.eigenvalues[k]))
            .collect();
        let mut out = vec![C64::new(0.0, 0.0); n];
        self.eigenvectors.apply_into(&coeffs, &mut out);
        Ok(ComplexVector::from_vec_unchecked(out))
    }

    /// Tensor product `self ⊗ other` of two generators (the operator product,
    /// not the Kronecker sum).
    pub fn kron(&self, other: &Self) -> Self {
        let matrix = self.matrix.kron(&other.matrix);
        let eigenvectors = self.eigenvectors.kron(&other.eigenvectors);
        let eigenvalues = self
            .eigenvalues
            .iter()
            .flat_map(|a| other.eigenvalues.iter().map(move |b| a * b))
            .collect();
        let (eigenvalues, eigenvectors) = sort_spectrum(eigenvalues, eigenvectors);
        Self { matrix, eigenvalues, eigenvectors }
    }

    /// Spectral norm, `max |eigenvalue|`.
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }
}

/// Free-function form of [`HermitianGenerator::exponential`].
pub fn generator_exponential(w: &HermitianGenerator, theta: f64) -> ComplexMatrix {
    w.exponential(theta)
}

/// Free-function form of [`ComplexMatrix::apply`].
pub fn apply(m: &ComplexMatrix, v: &ComplexVector) -> Result<ComplexVector, LinalgError> {
    m.apply(v)
}

fn scale_columns(m: &ComplexMatrix, factor: impl Fn(usize) -> C64) -> ComplexMatrix {
    let n = m.dim();
    let factors: Vec<C64> = (0..n).map(factor).collect();
    let mut out = m.clone();
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] *= factors[j];
        }
    }
    out
}

fn sort_spectrum(values: Vec<f64>, vectors: ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    if order.iter().enumerate().all(|(i, &k)| i == k) {
        return (values, vectors);
    }
    let sorted_values = order.iter().map(|&k| values[k]).collect();
    let sorted_vectors = ComplexMatrix::from_fn(n, |i, j| vectors[(i, order[j])]);
    (sorted_values, sorted_vectors)
}
