//! Quantum Fisher information for the amplitude `λ` of a unitary family
//! `exp[-i(λ H_I + η H_0)]`, where `η H_0` is a unitary disturbance.
//!
//! The closed forms live in [`qfi`], [`multiparam`], [`qubit`] and
//! [`multiprobe`]; [`oracle`] recomputes the same quantities by brute force
//! (finite-difference fidelity and quadrature of the average Hamiltonian) so
//! that every formula can be checked against an independent route.

pub mod format;
pub mod io;
pub mod linalg;
pub mod model;
pub mod multiparam;
pub mod multiprobe;
pub mod oracle;
pub mod qfi;
pub mod qubit;
pub mod random;

pub use linalg::{ComplexMatrix, SpectralDecomposition, C64};
pub use model::{crlb, DensityMatrix, DisturbedModel, HermitianOperator, Method, QfiReport};
pub use multiparam::QfiMatrix2;
pub use qfi::{AverageHamiltonian, Generator};
pub use qubit::BlochModel;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("Hermitian eigensolver did not converge for a {dim}x{dim} matrix")]
    NonConvergence { dim: usize },
    #[error("matrix is not Hermitian: max |M - M†| = {deviation:e}")]
    NotHermitian { deviation: f64 },
    #[error("density matrix trace is {trace}, expected 1")]
    BadTrace { trace: f64 },
    #[error("density matrix has eigenvalue {value:e} below zero")]
    NegativeEigenvalue { value: f64 },
    #[error("state is not pure: largest eigenvalue is {largest}")]
    NotPure { largest: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("composite dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("malformed matrix: {0}")]
    Shape(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
