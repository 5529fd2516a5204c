//! Quantum virtual path (QVP) states on a periodic lattice.
//!
//! A QVP is the normalized image of a localized state under `S^N`, where
//! `S = (e^{iW_Bδw} + e^{-iW_Fδw})/2` averages one backward and one forward
//! elementary translation and `δw = √2·σ_w/√N`. With a single translation
//! generator the result approaches a Gaussian of width `σ_w`; with distinct
//! forward/backward generators related by time reversal it splits into two
//! mirror-image peaks that separate as `√N`.

pub mod analysis;
pub mod engine;
pub mod linalg;
pub mod lorentz;
pub mod models;
pub mod numerics;
pub mod symmetry;

#[cfg(feature = "cli")]
pub mod cli;
#[cfg(feature = "cli")]
pub mod verify;
