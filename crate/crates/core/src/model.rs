//! Validated operator and state types, the disturbed model `λ H_I + η H_0`,
//! and the report type returned by the single-parameter computations.

use std::sync::OnceLock;

use serde::Serialize;

use crate::linalg::{eig_hermitian_matrix, ComplexMatrix, SpectralDecomposition, C64};
use crate::{Error, Result};

/// Entries of `M - M†` above this (relative) level are rejected.
pub const HERMITIAN_REJECT_TOL: f64 = 1e-8;
/// Trace deviation and negative eigenvalues beyond this are rejected.
pub const DENSITY_REJECT_TOL: f64 = 1e-8;
/// Eigenvalue level at which a state counts as pure.
pub const PURITY_TOL: f64 = 1e-10;

/// A Hermitian matrix. The spectral decomposition is computed on first use
/// and cached.
#[derive(Clone)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
    spectrum: OnceLock<SpectralDecomposition>,
}

impl HermitianOperator {
    /// Wraps a matrix that is Hermitian by construction.
    pub(crate) fn from_hermitian(matrix: ComplexMatrix) -> Self {
        Self {
            matrix,
            spectrum: OnceLock::new(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_hermitian(ComplexMatrix::zeros(dim))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn spectrum(&self) -> Result<&SpectralDecomposition> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        let s = eig_hermitian_matrix(&self.matrix)?;
        Ok(self.spectrum.get_or_init(|| s))
    }

    /// `a·self + b·other` for real coefficients.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        Self::from_hermitian(&self.matrix.scale_real(a) + &other.matrix.scale_real(b))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_hermitian(self.matrix.scale_real(s))
    }

    /// `⟨ψ|self|ψ⟩` (real for Hermitian operators).
    pub fn expectation(&self, psi: &[C64]) -> f64 {
        let h_psi = self.matrix.mul_vec(psi);
        psi.iter().zip(&h_psi).map(|(a, b)| a.conj() * b).sum::<C64>().re
    }
}

impl std::fmt::Debug for HermitianOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_tuple("HermitianOperator").field(&self.matrix).finish()
    }
}

impl PartialEq for HermitianOperator {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

pub fn validate_hermitian(m: ComplexMatrix) -> Result<HermitianOperator> {
    if !m.is_finite() {
        return Err(Error::Shape("matrix has non-finite entries".into()));
    }
    let deviation = m.hermiticity_deviation();
    if deviation > HERMITIAN_REJECT_TOL * (1.0 + m.max_abs()) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(HermitianOperator::from_hermitian(m.hermitian_part()))
}

/// Unit-trace positive semidefinite matrix with its spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    spectrum: SpectralDecomposition,
}

impl DensityMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `|ψ⟩⟨ψ|` for a nonzero vector, normalized on the way in.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if psi.is_empty() || !norm.is_finite() || norm <= 0.0 {
            return Err(Error::InvalidArgument("state vector has zero norm".into()));
        }
        let psi: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        validate_density(ComplexMatrix::projector(&psi))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        validate_density(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64)).expect("I/d is a valid state")
    }

    pub fn is_pure(&self) -> bool {
        (self.spectrum.max() - 1.0).abs() <= PURITY_TOL
    }

    /// The eigenvector of the largest eigenvalue.
    pub fn dominant_vector(&self) -> Vec<C64> {
        self.spectrum.vector(self.dim() - 1)
    }
}

pub fn validate_density(m: ComplexMatrix) -> Result<DensityMatrix> {
    if !m.is_finite() {
        return Err(Error::Shape("matrix has non-finite entries".into()));
    }
    let deviation = m.hermiticity_deviation();
    if deviation > DENSITY_REJECT_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let m = m.hermitian_part();
    let trace = m.trace().re;
    if (trace - 1.0).abs() > DENSITY_REJECT_TOL {
        return Err(Error::BadTrace { trace });
    }
    let mut spectrum = eig_hermitian_matrix(&m)?;
    let lowest = spectrum.min();
    if lowest < -DENSITY_REJECT_TOL {
        return Err(Error::NegativeEigenvalue { value: lowest });
    }
    let matrix = if lowest < 0.0 {
        spectrum.eigenvalues.iter_mut().for_each(|e| *e = e.max(0.0));
        spectrum.reconstruct()
    } else {
        m
    };
    Ok(DensityMatrix { matrix, spectrum })
}

/// Generator pair `(H_I, H_0)` evaluated at a parameter point `(λ, η)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DisturbedModel {
    pub h_i: HermitianOperator,
    pub h_0: HermitianOperator,
    pub lambda: f64,
    pub eta: f64,
}

impl DisturbedModel {
    pub fn new(h_i: HermitianOperator, h_0: HermitianOperator, lambda: f64, eta: f64) -> Result<Self> {
        if h_i.dim() != h_0.dim() {
            return Err(Error::DimensionMismatch {
                expected: h_i.dim(),
                found: h_0.dim(),
            });
        }
        if !lambda.is_finite() || !eta.is_finite() {
            return Err(Error::InvalidArgument("λ and η must be finite".into()));
        }
        Ok(Self { h_i, h_0, lambda, eta })
    }

    /// Model without disturbance (`H_0 = 0`).
    pub fn undisturbed(h_i: HermitianOperator, lambda: f64) -> Self {
        let h_0 = HermitianOperator::zero(h_i.dim());
        Self {
            h_i,
            h_0,
            lambda,
            eta: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.h_i.dim()
    }

    /// Same generators at another parameter point.
    pub fn at(&self, lambda: f64, eta: f64) -> Self {
        Self {
            h_i: self.h_i.clone(),
            h_0: self.h_0.clone(),
            lambda,
            eta,
        }
    }

    /// `H(λ, η) = λ H_I + η H_0`.
    pub fn hamiltonian(&self) -> HermitianOperator {
        self.h_i.combine(self.lambda, &self.h_0, self.eta)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Oracle,
}

/// Result of a single-parameter computation.
#[derive(Clone, Debug, Serialize)]
pub struct QfiReport {
    pub qfi: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qfi_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral_width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<u64>,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "crate::io::serialize_bound"
    )]
    pub crlb: Option<f64>,
    pub method: Method,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "crate::io::serialize_optional_state"
    )]
    pub optimal_state: Option<DensityMatrix>,
}

impl QfiReport {
    pub fn new(qfi: f64, method: Method) -> Self {
        Self {
            qfi,
            qfi_max: None,
            spectral_width: None,
            nu: None,
            crlb: None,
            method,
            optimal_state: None,
        }
    }

    /// Attaches the Cramér-Rao bound for `nu` repetitions.
    pub fn with_repetitions(mut self, nu: u64) -> Self {
        self.nu = Some(nu);
        self.crlb = Some(crlb(self.qfi, nu));
        self
    }
}

/// Cramér-Rao bound `1/√(ν Q)` on the RMSE; infinite when `Q = 0`.
pub fn crlb(qfi: f64, nu: u64) -> f64 {
    debug_assert!(qfi >= 0.0 && nu >= 1);
    if qfi <= 0.0 || nu == 0 {
        return f64::INFINITY;
    }
    1.0 / (nu as f64 * qfi).sqrt()
}
