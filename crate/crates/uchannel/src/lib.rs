//! Quantum information theory on S-spaces.
//!
//! An S-space is a finite-dimensional Hilbert space together with a fundamental
//! unitary `U` (not necessarily self-adjoint) that induces the indefinite
//! sesquilinear form `[x, y] = <x, U y>`. This crate implements the resulting
//! operator theory at matrix scale: U-adjoints and U-positivity, completely
//! U-positive maps with their Choi U-matrices, Kraus U-decompositions and
//! Stinespring U-dilations, nilpotency profiles of U-CP maps, quantum U-states
//! and U-channels, the U-PPT separability criterion, and U-entanglement-breaking
//! detection, together with a corpus of worked examples.
//!
//! Inner products are linear in the first argument and conjugate-linear in the
//! second; Kronecker products use row-major blocks (`A ⊗ B` has `A`-indices
//! major). Both conventions are fixed crate-wide and the JSON interchange
//! formats depend on them.

pub mod cmatrix;
pub mod corpus;
pub mod nilpotent;
pub mod quantum;
pub mod report;
pub mod sample;
pub mod sspace;
pub mod umap;

pub use cmatrix::{ComplexMatrix, HermitianEig, PsdCheck, Tolerance, C64};
pub use sspace::SSpaceContext;
pub use umap::{KrausUForm, MatrixMap};

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("not Hermitian within tolerance: deviation {deviation:.3e}")]
    HermiticityViolation { deviation: f64 },
    #[error("not unitary within tolerance: deviation {deviation:.3e}")]
    NotUnitary { deviation: f64 },
    #[error("not positive semi-definite: {reason}")]
    NotPsd { reason: String },
    #[error("map is not completely U-positive: {reason}")]
    NotUcp { reason: String },
    #[error("map is not nilpotent within probe bound {p_max}")]
    NotNilpotent { p_max: usize },
    #[error("operator is not U-positive: {reason}")]
    NotUPositive { reason: String },
    #[error("U-weighted trace deviates from 1 by {deviation:.3e}")]
    TraceNotOne { deviation: f64 },
    #[error("not a quantum U-channel: {0}")]
    NotAChannel(String),
    #[error("invalid Holevo form: {0}")]
    InvalidHolevoForm(String),
    #[error("unitary parameters violate |a|^2 + |b|^2 = 1: deviation {deviation:.3e}")]
    NormalizationViolation { deviation: f64 },
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("cost guard exceeded: {0}")]
    CostGuard(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
