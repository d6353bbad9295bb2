//! `n` identical probes with local generators and local disturbance.
//!
//! The collective operators are Kronecker sums `Σ_j I⊗…⊗H^(j)⊗…⊗I`. Because
//! the collective Hamiltonian is itself a sum of commuting identical local
//! terms, its average Hamiltonian is the Kronecker sum of the local one, and
//! the optimal-probe QFI grows as `n²`.

use serde::Serialize;

use crate::linalg::ComplexMatrix;
use crate::model::{DisturbedModel, HermitianOperator};
use crate::qfi::qfi_max_value;
use crate::{Error, Result};

/// Largest composite dimension `dⁿ` accepted.
pub const DIMENSION_CAP: usize = 256;
/// Relative tolerance on `q_n / q_1 = n²`.
pub const SCALING_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeEnsemble {
    n: usize,
    local_h_i: HermitianOperator,
    local_h_0: HermitianOperator,
}

fn composite_dim(d: usize, n: usize) -> Option<usize> {
    (0..n).try_fold(1usize, |acc, _| acc.checked_mul(d).filter(|&v| v <= DIMENSION_CAP))
}

impl ProbeEnsemble {
    pub fn new(n: usize, local_h_i: HermitianOperator, local_h_0: HermitianOperator) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("number of probes must be positive".into()));
        }
        if local_h_i.dim() != local_h_0.dim() {
            return Err(Error::DimensionMismatch {
                expected: local_h_i.dim(),
                found: local_h_0.dim(),
            });
        }
        let d = local_h_i.dim();
        if composite_dim(d, n).is_none() {
            return Err(Error::DimensionCap {
                dim: d.saturating_pow(n.min(u32::MAX as usize) as u32),
                cap: DIMENSION_CAP,
            });
        }
        Ok(Self {
            n,
            local_h_i,
            local_h_0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn local_dim(&self) -> usize {
        self.local_h_i.dim()
    }

    pub fn collective_dim(&self) -> usize {
        composite_dim(self.local_dim(), self.n).expect("checked at construction")
    }

    pub fn local_h_i(&self) -> &HermitianOperator {
        &self.local_h_i
    }

    pub fn local_h_0(&self) -> &HermitianOperator {
        &self.local_h_0
    }

    /// The single-probe model at `(λ, η)`.
    pub fn local_model(&self, lambda: f64, eta: f64) -> DisturbedModel {
        DisturbedModel::new(self.local_h_i.clone(), self.local_h_0.clone(), lambda, eta)
            .expect("dimensions checked at construction")
    }
}

/// `Σ_j I⊗…⊗h⊗…⊗I` over `n` factors.
pub fn kronecker_sum(h: &ComplexMatrix, n: usize) -> ComplexMatrix {
    let d = h.dim();
    let mut total = ComplexMatrix::zeros(d.pow(n as u32));
    for j in 0..n {
        let left = ComplexMatrix::identity(d.pow(j as u32));
        let right = ComplexMatrix::identity(d.pow((n - j - 1) as u32));
        total = &total + &left.kron(h).kron(&right);
    }
    total
}

/// Collective `(H_I^(n), H_0^(n))`.
pub fn build_collective(pe: &ProbeEnsemble) -> (HermitianOperator, HermitianOperator) {
    let embed = |h: &HermitianOperator| HermitianOperator::from_hermitian(kronecker_sum(h.matrix(), pe.n));
    (embed(&pe.local_h_i), embed(&pe.local_h_0))
}

/// Collective model at `(λ, η)`.
pub fn collective_model(pe: &ProbeEnsemble, lambda: f64, eta: f64) -> DisturbedModel {
    let (h_i, h_0) = build_collective(pe);
    DisturbedModel::new(h_i, h_0, lambda, eta).expect("same composite dimension")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalingReport {
    pub q_n: f64,
    pub q_1: f64,
    pub ratio: f64,
    pub expected: f64,
    /// Whether the `n²` contract applies to this run.
    pub asserted: bool,
}

impl ScalingReport {
    fn new(n: usize, q_n: f64, q_1: f64, asserted: bool) -> Self {
        Self {
            q_n,
            q_1,
            ratio: if q_1 > 0.0 { q_n / q_1 } else { f64::NAN },
            expected: (n * n) as f64,
            asserted,
        }
    }

    /// `|ratio/n² - 1| ≤ SCALING_TOL`.
    pub fn holds(&self) -> bool {
        (self.ratio / self.expected - 1.0).abs() <= SCALING_TOL
    }
}

pub fn heisenberg_scaling_check(pe: &ProbeEnsemble, lambda: f64, eta: f64) -> Result<ScalingReport> {
    let q_1 = qfi_max_value(&pe.local_model(lambda, eta))?;
    let q_n = qfi_max_value(&collective_model(pe, lambda, eta))?;
    Ok(ScalingReport::new(pe.n, q_n, q_1, true))
}

/// Ratio for a user-supplied coupled disturbance on the composite space.
/// No scaling law is claimed, so the report is marked `asserted: false`.
pub fn coupled_disturbance_ratio(
    pe: &ProbeEnsemble,
    coupled_h_0: HermitianOperator,
    lambda: f64,
    eta: f64,
) -> Result<ScalingReport> {
    let (h_i, _) = build_collective(pe);
    let collective = DisturbedModel::new(h_i, coupled_h_0, lambda, eta)?;
    let q_1 = qfi_max_value(&pe.local_model(lambda, eta))?;
    let q_n = qfi_max_value(&collective)?;
    Ok(ScalingReport::new(pe.n, q_n, q_1, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfi::{average_hamiltonian, Generator};
    use crate::qubit::{sigma_x, sigma_z};
    use crate::random::{random_hermitian, rng};
    use rand::Rng;
    use std::f64::consts::PI;

    #[test]
    fn single_probe_is_unchanged() {
        let pe = ProbeEnsemble::new(1, sigma_z(), sigma_x()).unwrap();
        let (h_i, h_0) = build_collective(&pe);
        assert_eq!(h_i, sigma_z());
        assert_eq!(h_0, sigma_x());
    }

    #[test]
    fn two_sigma_z() {
        let pe = ProbeEnsemble::new(2, sigma_z(), sigma_x()).unwrap();
        let (h_i, _) = build_collective(&pe);
        assert_eq!(h_i.matrix(), &ComplexMatrix::diag(&[2.0, 0.0, 0.0, -2.0]));
    }

    #[test]
    fn trace_identity() {
        let mut r = rng(1);
        let h = random_hermitian(&mut r, 2, 1.0);
        let pe = ProbeEnsemble::new(3, h.clone(), h.clone()).unwrap();
        let (h_i, _) = build_collective(&pe);
        let expected = h.matrix().trace() * 12.0;
        assert!((h_i.matrix().trace() - expected).norm() < 1e-12);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(ProbeEnsemble::new(8, sigma_z(), sigma_x()).is_ok());
        assert!(matches!(
            ProbeEnsemble::new(9, sigma_z(), sigma_x()),
            Err(Error::DimensionCap { dim: 512, cap: 256 })
        ));
        assert!(ProbeEnsemble::new(0, sigma_z(), sigma_x()).is_err());
        let mut r = rng(2);
        assert!(ProbeEnsemble::new(2, sigma_z(), random_hermitian(&mut r, 3, 1.0)).is_err());
    }

    #[test]
    fn undisturbed_heisenberg_values() {
        for (n, q) in [(2, 16.0), (3, 36.0)] {
            let pe = ProbeEnsemble::new(n, sigma_z(), sigma_x()).unwrap();
            let rep = heisenberg_scaling_check(&pe, 0.4, 0.0).unwrap();
            assert!((rep.q_n - q).abs() < 1e-10);
            assert!(rep.holds() && rep.asserted);
        }
    }

    #[test]
    fn quarter_turn_pair() {
        let pe = ProbeEnsemble::new(2, sigma_z(), sigma_x()).unwrap();
        let rep = heisenberg_scaling_check(&pe, 0.0, PI / 2.0).unwrap();
        assert!((rep.q_n - 64.0 / (PI * PI)).abs() < 1e-10);
        assert!(rep.holds());
    }

    #[test]
    fn width_is_additive() {
        let mut r = rng(3);
        for _ in 0..10 {
            let pe = ProbeEnsemble::new(2, random_hermitian(&mut r, 2, 1.0), random_hermitian(&mut r, 2, 1.0)).unwrap();
            let (l, e) = (r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
            let w1 = average_hamiltonian(&pe.local_model(l, e), Generator::Interaction)
                .unwrap()
                .operator
                .spectrum()
                .unwrap()
                .width();
            let wn = average_hamiltonian(&collective_model(&pe, l, e), Generator::Interaction)
                .unwrap()
                .operator
                .spectrum()
                .unwrap()
                .width();
            assert!((wn - 2.0 * w1).abs() < 1e-9);
        }
    }

    #[test]
    fn coupled_disturbance_is_not_asserted() {
        let pe = ProbeEnsemble::new(2, sigma_z(), sigma_x()).unwrap();
        let coupled = HermitianOperator::from_hermitian(sigma_x().matrix().kron(sigma_x().matrix()));
        let rep = coupled_disturbance_ratio(&pe, coupled, 0.3, 1.0).unwrap();
        assert!(!rep.asserted);
        assert!(rep.ratio.is_finite());
        assert!(coupled_disturbance_ratio(&pe, sigma_x(), 0.3, 1.0).is_err());
    }
}
