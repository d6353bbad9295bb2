//! QFI matrix for the joint estimation of `(λ, η)`.
//!
//! The diagonal entries are single-parameter QFIs for `H̄_I` and `H̄_0`. The
//! off-diagonal entry is computed directly, and independently through the
//! rotated parameters `μ₁ = (λ+η)/√2`, `μ₂ = (λ-η)/√2`: the QFI for `μ₁` uses
//! the generator `(H̄_I + H̄_0)/√2`, and the Jacobian rule gives
//! `Q_λη = Q̃_μ₁μ₁ - (Q_λλ + Q_ηη)/2`.
//!
//! Only the two-parameter case is implemented. For `M` parameters the same
//! recipe applies pairwise: every off-diagonal entry follows from the QFI of
//! the normalized sum of the two averaged generators.

use serde::Serialize;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::model::{DensityMatrix, DisturbedModel};
use crate::qfi::{average_hamiltonian, qfi_mixed, weighted_pair_sum, Generator};
use crate::Result;

/// Below this determinant the matrix is reported singular.
pub const SINGULAR_DET: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QfiMatrix2 {
    pub q_ll: f64,
    pub q_ee: f64,
    pub q_le: f64,
}

impl QfiMatrix2 {
    pub fn det(&self) -> f64 {
        self.q_ll * self.q_ee - self.q_le * self.q_le
    }

    pub fn is_singular(&self) -> bool {
        self.det() <= SINGULAR_DET
    }

    pub fn is_psd(&self) -> bool {
        self.q_ll >= 0.0 && self.q_ee >= 0.0 && self.det() >= -1e-9 * (1.0 + self.q_ll * self.q_ee)
    }

    /// Lower bound `Q⁻¹/ν` on the covariance of unbiased estimators of
    /// `(λ, η)`, or `None` when the matrix is singular.
    pub fn covariance_bound(&self, nu: u64) -> Option<[[f64; 2]; 2]> {
        if self.is_singular() || nu == 0 {
            return None;
        }
        let s = 1.0 / (self.det() * nu as f64);
        Some([[self.q_ee * s, -self.q_le * s], [-self.q_le * s, self.q_ll * s]])
    }
}

pub fn qfi_matrix(rho0: &DensityMatrix, model: &DisturbedModel) -> Result<QfiMatrix2> {
    let hi = average_hamiltonian(model, Generator::Interaction)?;
    let h0 = average_hamiltonian(model, Generator::Disturbance)?;
    Ok(QfiMatrix2 {
        q_ll: qfi_mixed(rho0, &hi.operator)?,
        q_ee: qfi_mixed(rho0, &h0.operator)?,
        q_le: weighted_pair_sum(rho0, hi.operator.matrix(), h0.operator.matrix())?,
    })
}

/// Off-diagonal entry through the `μ₁` reparametrization.
pub fn offdiag_via_reparam(rho0: &DensityMatrix, model: &DisturbedModel) -> Result<f64> {
    let hi = average_hamiltonian(model, Generator::Interaction)?;
    let h0 = average_hamiltonian(model, Generator::Disturbance)?;
    let mu1 = hi.operator.combine(FRAC_1_SQRT_2, &h0.operator, FRAC_1_SQRT_2);
    let q_mu1 = qfi_mixed(rho0, &mu1)?;
    let q_ll = qfi_mixed(rho0, &hi.operator)?;
    let q_ee = qfi_mixed(rho0, &h0.operator)?;
    Ok(q_mu1 - 0.5 * (q_ll + q_ee))
}
