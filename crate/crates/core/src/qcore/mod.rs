//! Dense complex linear algebra and quantum-state primitives for small systems.
//!
//! Everything here is sized for total dimensions up to a few dozen: matrices are
//! dense, and Hermitian spectra come from a cyclic Jacobi solver rather than LAPACK.

mod eigen;
mod matrix;
pub mod random;
mod state;

use thiserror::Error;

pub use eigen::{eigh, Eigen, JACOBI_TOL};
pub use matrix::{tensor, ComplexMatrix};
pub use state::{
    fidelity, partial_trace, pure_trace_distance, purified_distance, sqrt_psd, trace_distance, trace_norm_hermitian,
    DensityOperator, PureState, SubsystemSpec, EIG_CUTOFF, STATE_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QcoreError {
    #[error("expected {expected} entries, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("trace is {0}, expected 1")]
    Trace(f64),
    #[error("not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("vector norm is {0}, expected 1")]
    Norm(f64),
    #[error("invalid subsystem layout: {0}")]
    Subsystems(String),
}
