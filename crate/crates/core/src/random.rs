//! Seeded sampling of random operators and states.
//!
//! Used by the cross-validation suites; also handy for quick experiments.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{eig_hermitian_matrix, ComplexMatrix, C64};
use crate::model::{validate_density, validate_hermitian, DensityMatrix, HermitianOperator};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    g.hermitian_part()
}

/// GUE sample rescaled to spectral norm `norm`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize, norm: f64) -> HermitianOperator {
    let g = gaussian_hermitian(rng, dim);
    let s = eig_hermitian_matrix(&g).expect("Jacobi converges on GUE samples");
    let spectral = s.min().abs().max(s.max().abs());
    validate_hermitian(g.scale_real(norm / spectral)).expect("Hermitian by construction")
}

/// Haar-distributed unitary (eigenvectors of a GUE sample).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = gaussian_hermitian(rng, dim);
    eig_hermitian_matrix(&g)
        .expect("Jacobi converges on GUE samples")
        .eigenvectors
}

/// Mixed state of the given rank with a random eigenbasis. Nonzero weights are
/// drawn from `[0.05, 1]` before normalization so no retained eigenvalue is
/// vanishingly small.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> DensityMatrix {
    assert!(rank >= 1 && rank <= dim);
    let mut weights: Vec<f64> = (0..dim)
        .map(|i| if i < rank { rng.gen_range(0.05..=1.0) } else { 0.0 })
        .collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let u = random_unitary(rng, dim);
    let rho = &(&u * &ComplexMatrix::diag(&weights)) * &u.adjoint();
    validate_density(rho).expect("valid by construction")
}

pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    random_density(rng, dim, 1)
}

/// Uniform point on the unit sphere.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-8 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}
