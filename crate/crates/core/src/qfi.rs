//! Closed-form QFI for `λ` under the disturbed dynamics `exp[-i(λ H_I + η H_0)]`.
//!
//! The key object is the average Hamiltonian
//! `H̄_X = ∫₀¹ e^{iHt} H_X e^{-iHt} dt` with `H = λ H_I + η H_0`. In the
//! eigenbasis `{e_j}` of `H` the integral is a Schur product with the filter
//! `φ(e_j - e_k)`, `φ(Δ) = (e^{iΔ} - 1)/(iΔ) = e^{iΔ/2} sinc(Δ/2)`, so no
//! quadrature is needed. Given `H̄_I`, the QFI of a probe `ρ₀ = Σ ρ_j |j⟩⟨j|`
//! is
//!
//! ```text
//! Q = 4 Σ_{j<k} (ρ_j - ρ_k)² / (ρ_j + ρ_k) |⟨j|H̄_I|k⟩|²
//! ```
//!
//! and its maximum over probes is the squared spectral width of `H̄_I`.

use crate::linalg::{ComplexMatrix, C64};
use crate::model::{DensityMatrix, DisturbedModel, HermitianOperator, Method, QfiReport};
use crate::{Error, Result};

/// Below this `|Δ|` the filter switches to its Taylor expansion.
const FILTER_TAYLOR_CUTOFF: f64 = 1e-6;
/// Eigenvalue pairs of `ρ₀` whose sum is below this contribute nothing.
pub const DEGENERATE_PAIR_TOL: f64 = 1e-12;
/// Slack allowed on every majorization inequality.
pub const MAJORIZATION_TOL: f64 = 1e-9;

/// Which generator is averaged.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    /// `H_I`, whose amplitude `λ` is estimated.
    Interaction,
    /// `H_0`, the disturbance.
    Disturbance,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AverageHamiltonian {
    pub operator: HermitianOperator,
    pub lambda: f64,
    pub eta: f64,
    pub generator: Generator,
}

/// `∫₀¹ e^{iΔt} dt`.
pub fn spectral_filter(delta: f64) -> C64 {
    if delta.abs() < FILTER_TAYLOR_CUTOFF {
        return C64::new(1.0 - delta * delta / 6.0, delta / 2.0);
    }
    let half = delta / 2.0;
    C64::from_polar(half.sin() / half, half)
}

pub fn average_hamiltonian(model: &DisturbedModel, which: Generator) -> Result<AverageHamiltonian> {
    let h = model.hamiltonian();
    let spectrum = h.spectrum()?;
    let target = match which {
        Generator::Interaction => &model.h_i,
        Generator::Disturbance => &model.h_0,
    };
    let e = &spectrum.eigenvalues;
    let mut a = spectrum.to_eigenbasis(target.matrix());
    for j in 0..a.dim() {
        for k in 0..a.dim() {
            a[(j, k)] *= spectral_filter(e[j] - e[k]);
        }
    }
    let averaged = spectrum.from_eigenbasis(&a).hermitian_part();
    Ok(AverageHamiltonian {
        operator: HermitianOperator::from_hermitian(averaged),
        lambda: model.lambda,
        eta: model.eta,
        generator: which,
    })
}

/// `4 Σ_{j<k} (ρ_j - ρ_k)²/(ρ_j + ρ_k) Re[X_jk Y_kj]` in the eigenbasis of `ρ₀`.
///
/// With `X = Y` this is the QFI; with `X = H̄_I`, `Y = H̄_0` it is the
/// off-diagonal entry of the two-parameter QFI matrix.
pub(crate) fn weighted_pair_sum(rho: &DensityMatrix, x: &ComplexMatrix, y: &ComplexMatrix) -> Result<f64> {
    for m in [x, y] {
        if m.dim() != rho.dim() {
            return Err(Error::DimensionMismatch {
                expected: rho.dim(),
                found: m.dim(),
            });
        }
    }
    let s = rho.spectrum();
    let p = &s.eigenvalues;
    let xb = s.to_eigenbasis(x);
    let yb = if std::ptr::eq(x, y) {
        xb.clone()
    } else {
        s.to_eigenbasis(y)
    };
    let mut total = 0.0;
    for j in 0..p.len() {
        for k in (j + 1)..p.len() {
            let sum = p[j] + p[k];
            if sum <= DEGENERATE_PAIR_TOL {
                continue;
            }
            let diff = p[j] - p[k];
            total += diff * diff / sum * (xb[(j, k)] * yb[(k, j)]).re;
        }
    }
    Ok(4.0 * total)
}

/// QFI of a mixed probe for generator `hbar` (pass `H_I` itself when `η = 0`).
pub fn qfi_mixed(rho0: &DensityMatrix, hbar: &HermitianOperator) -> Result<f64> {
    let m = hbar.matrix();
    Ok(weighted_pair_sum(rho0, m, m)?.max(0.0))
}

/// `4 Var_ψ(H̄)` for a pure probe `|ψ⟩⟨ψ|`.
pub fn qfi_pure(phi0: &DensityMatrix, hbar: &HermitianOperator) -> Result<f64> {
    if phi0.dim() != hbar.dim() {
        return Err(Error::DimensionMismatch {
            expected: phi0.dim(),
            found: hbar.dim(),
        });
    }
    if !phi0.is_pure() {
        return Err(Error::NotPure {
            largest: phi0.spectrum().max(),
        });
    }
    let psi = phi0.dominant_vector();
    let h_psi = hbar.matrix().mul_vec(&psi);
    let second: f64 = h_psi.iter().map(|z| z.norm_sqr()).sum();
    let first: f64 = psi.iter().zip(&h_psi).map(|(a, b)| a.conj() * b).sum::<C64>().re;
    Ok((4.0 * (second - first * first)).max(0.0))
}

/// Optimal-probe QFI `(h̄_max - h̄_min)²` only, without building the state.
pub fn qfi_max_value(model: &DisturbedModel) -> Result<f64> {
    let hbar = average_hamiltonian(model, Generator::Interaction)?;
    let width = hbar.operator.spectrum()?.width();
    Ok(width * width)
}

/// Maximum QFI over probes, the optimal probe `(|h̄_max⟩ + |h̄_min⟩)/√2` and
/// the spectral width of `H̄_I`.
///
/// For degenerate extremal eigenspaces the lowest-index vector of each
/// (canonical) eigenspace is used; any choice attains the maximum.
pub fn qfi_max(model: &DisturbedModel) -> Result<QfiReport> {
    let hbar = average_hamiltonian(model, Generator::Interaction)?;
    let s = hbar.operator.spectrum()?;
    let width = s.width();
    let n = s.dim();
    let tol = 1e-11 * s.eigenvalues.iter().fold(1.0_f64, |m, e| m.max(e.abs()));
    let top = (0..n)
        .find(|&k| s.eigenvalues[k] >= s.max() - tol)
        .expect("max is attained");
    let lo = s.vector(0);
    let hi = s.vector(top);
    let psi: Vec<C64> = hi.iter().zip(&lo).map(|(a, b)| a + b).collect();
    let state = DensityMatrix::pure(&psi)?;

    let mut report = QfiReport::new(width * width, Method::ClosedForm);
    report.qfi_max = Some(width * width);
    report.spectral_width = Some(width);
    report.optimal_state = Some(state);
    Ok(report)
}

/// Outcome of the majorization test `spec(H̄_I) ≺ spec(H_I)`.
///
/// Margins are `bound - value`, so a negative margin is a violation.
#[derive(Clone, Debug, PartialEq)]
pub struct ContractionReport {
    pub holds: bool,
    pub worst_margin: f64,
    /// `h_max - h̄_max`.
    pub max_margin: f64,
    /// `h̄_min - h_min`.
    pub min_margin: f64,
    /// For each `k`, (sum of the `k` largest eigenvalues of `H_I`) minus the
    /// same for `H̄_I`.
    pub partial_sum_margins: Vec<f64>,
    pub trace_difference: f64,
}

pub fn spectral_width_contraction_check(model: &DisturbedModel) -> Result<ContractionReport> {
    let hbar = average_hamiltonian(model, Generator::Interaction)?;
    let bar = &hbar.operator.spectrum()?.eigenvalues;
    let orig = &model.h_i.spectrum()?.eigenvalues;

    let max_margin = orig[orig.len() - 1] - bar[bar.len() - 1];
    let min_margin = bar[0] - orig[0];
    let mut partial_sum_margins = Vec::with_capacity(bar.len());
    let (mut s_orig, mut s_bar) = (0.0, 0.0);
    for (o, b) in orig.iter().rev().zip(bar.iter().rev()) {
        s_orig += o;
        s_bar += b;
        partial_sum_margins.push(s_orig - s_bar);
    }
    let trace_difference = (s_orig - s_bar).abs();
    let worst_margin = partial_sum_margins
        .iter()
        .copied()
        .chain([max_margin, min_margin])
        .fold(f64::INFINITY, f64::min);
    Ok(ContractionReport {
        holds: worst_margin >= -MAJORIZATION_TOL && trace_difference <= MAJORIZATION_TOL,
        worst_margin,
        max_margin,
        min_margin,
        partial_sum_margins,
        trace_difference,
    })
}
