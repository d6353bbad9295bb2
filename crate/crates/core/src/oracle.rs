//! Brute-force recomputation of the closed forms.
//!
//! * [`qfi_fd`] differentiates the Uhlmann fidelity along the orbit
//!   numerically: `Q ≈ 8(1 - F)/δλ²`, with one Richardson step.
//! * [`average_hamiltonian_quadrature`] integrates `e^{iHt} H_X e^{-iHt}` by
//!   composite Simpson with propagators from a Taylor-series exponential, so
//!   it shares no code with the eigenbasis filter in [`crate::qfi`].

use crate::linalg::{eig_hermitian_matrix, nuclear_norm, unitary_evolution, ComplexMatrix, C64};
use crate::model::{DensityMatrix, DisturbedModel, HermitianOperator};
use crate::qfi::{average_hamiltonian, AverageHamiltonian, Generator};
use crate::{Error, Result};

pub const DEFAULT_STEP: f64 = 1e-3;
/// Largest step for which the O(δλ⁴) remainder stays negligible.
pub const MAX_RECOMMENDED_STEP: f64 = 1e-2;
const SUPPORT_TOL: f64 = 1e-14;

fn propagator(model: &DisturbedModel, lambda: f64) -> Result<ComplexMatrix> {
    let h = model.at(lambda, model.eta).hamiltonian();
    Ok(unitary_evolution(h.spectrum()?, 1.0))
}

/// `1 - F(U_a ρ U_a†, U_b ρ U_b†)`.
///
/// Both states share the spectrum `{p_j}` of `ρ`, so the fidelity is the
/// trace norm of `√P W √P` with `W = V† U_a† U_b V` in the eigenbasis `V` of
/// `ρ`, restricted to the support. The deficit is taken against `Σ p_j`,
/// which is what the trace norm returns for `W = I`.
pub fn orbit_infidelity(rho: &DensityMatrix, ua: &ComplexMatrix, ub: &ComplexMatrix) -> f64 {
    let s = rho.spectrum();
    let w = s.to_eigenbasis(&(&ua.adjoint() * ub));
    let support: Vec<usize> = (0..s.dim()).filter(|&j| s.eigenvalues[j] > SUPPORT_TOL).collect();
    let roots: Vec<f64> = support.iter().map(|&j| s.eigenvalues[j].sqrt()).collect();
    let m = ComplexMatrix::from_fn(support.len(), |a, b| {
        w[(support[a], support[b])] * (roots[a] * roots[b])
    });
    let total: f64 = support.iter().map(|&j| s.eigenvalues[j]).sum();
    total - nuclear_norm(&m)
}

/// Finite-difference QFI for `λ` at the model's parameter point.
///
/// Uses the symmetric pair `λ ± δλ/2`, which makes `8(1-F)/δλ²` even in `δλ`
/// even when the QFI depends on `λ`; the Richardson combination
/// `(4 Q(δλ/2) - Q(δλ))/3` then cancels the `δλ²` term.
pub fn qfi_fd(rho0: &DensityMatrix, model: &DisturbedModel, dl: f64) -> Result<f64> {
    if !dl.is_finite() || dl <= 0.0 {
        return Err(Error::InvalidArgument(format!("step must be positive, got {dl}")));
    }
    if rho0.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: rho0.dim(),
        });
    }
    let quotient = |step: f64| -> Result<f64> {
        let ua = propagator(model, model.lambda - step / 2.0)?;
        let ub = propagator(model, model.lambda + step / 2.0)?;
        Ok(8.0 * orbit_infidelity(rho0, &ua, &ub) / (step * step))
    };
    let coarse = quotient(dl)?;
    let fine = quotient(dl / 2.0)?;
    Ok(((4.0 * fine - coarse) / 3.0).max(0.0))
}

/// `exp(A)` by scaling and squaring of the Taylor series.
pub fn expm_taylor(a: &ComplexMatrix) -> ComplexMatrix {
    let norm = a.one_norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale_real(0.5f64.powi(squarings as i32));
    let n = a.dim();
    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..40 {
        term = (&term * &scaled).scale_real(1.0 / k as f64);
        sum = &sum + &term;
        if term.max_abs() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Composite Simpson quadrature of `∫₀¹ e^{iHt} H_X e^{-iHt} dt`.
pub fn average_hamiltonian_quadrature(
    model: &DisturbedModel,
    which: Generator,
    panels: usize,
) -> Result<AverageHamiltonian> {
    if panels < 2 || !panels.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "Simpson quadrature needs an even panel count ≥ 2, got {panels}"
        )));
    }
    let target = match which {
        Generator::Interaction => model.h_i.matrix(),
        Generator::Disturbance => model.h_0.matrix(),
    };
    let h = model.hamiltonian();
    let step_len = 1.0 / panels as f64;
    let step = expm_taylor(&h.matrix().scale(C64::new(0.0, step_len)));
    let n = model.dim();
    let mut u = ComplexMatrix::identity(n);
    let mut acc = ComplexMatrix::zeros(n);
    for k in 0..=panels {
        let weight = if k == 0 || k == panels {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let node = &(&u * target) * &u.adjoint();
        acc = &acc + &node.scale_real(weight);
        if k < panels {
            u = &u * &step;
        }
    }
    let averaged = acc.scale_real(step_len / 3.0).hermitian_part();
    Ok(AverageHamiltonian {
        operator: HermitianOperator::from_hermitian(averaged),
        lambda: model.lambda,
        eta: model.eta,
        generator: which,
    })
}

/// `max |U_{λ+δλ} - U_λ exp(-i δλ H̄_I)|`, which is `O(δλ²)`.
pub fn first_order_factorization_check(model: &DisturbedModel, dl: f64) -> Result<f64> {
    if !(dl > 0.0 && dl <= 1e-3) {
        return Err(Error::InvalidArgument(format!("step must lie in (0, 1e-3], got {dl}")));
    }
    let u = propagator(model, model.lambda)?;
    let u_next = propagator(model, model.lambda + dl)?;
    let hbar = average_hamiltonian(model, Generator::Interaction)?;
    let kick = unitary_evolution(&eig_hermitian_matrix(hbar.operator.matrix())?, dl);
    Ok(u_next.max_abs_diff(&(&u * &kick)))
}

/// Residual at `dl` over residual at `dl/2`; close to 4 for a second-order
/// remainder.
pub fn factorization_ratio(model: &DisturbedModel, dl: f64) -> Result<f64> {
    Ok(first_order_factorization_check(model, dl)? / first_order_factorization_check(model, dl / 2.0)?)
}
