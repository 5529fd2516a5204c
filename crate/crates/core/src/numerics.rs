//! Global numerics profile.
//!
//! Every tolerance used by the library lives here so that a single edit
//! retunes the whole crate.

/// Structural checks: Hermiticity of derived generators, unitarity,
/// spectral reconstruction, symmetry-operator identities.
pub const STRUCTURAL_TOL: f64 = 1e-10;

/// Exact identities: norm preservation, exact inverses, normalization.
pub const EXACT_TOL: f64 = 1e-12;

/// Maximum asymmetry accepted when a matrix is promoted to a generator.
pub const GENERATOR_HERMITIAN_TOL: f64 = 1e-12;

/// Pre-normalization norm below which a QVP is considered fully cancelled.
pub const DEGENERATE_NORM: f64 = 1e-14;

/// Negative probability masses above this (in magnitude) are rounding noise
/// and are clamped to zero.
pub const MASS_CLAMP: f64 = 1e-14;
