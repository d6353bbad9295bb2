#![allow(dead_code)]

use qfi_disturb::random::{random_hermitian, rng};
use qfi_disturb::DisturbedModel;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    rng(seed)
}

/// Random model with `‖H_I‖, ‖H_0‖ ≤ norm_max` and `λ, η` uniform in
/// `[-range, range]`.
pub fn random_model(r: &mut ChaCha8Rng, dim: usize, norm_max: f64, range: f64) -> DisturbedModel {
    let (n1, n2) = (r.gen_range(0.05..=norm_max), r.gen_range(0.05..=norm_max));
    let h_i = random_hermitian(r, dim, n1);
    let h_0 = random_hermitian(r, dim, n2);
    let (lambda, eta) = (r.gen_range(-range..=range), r.gen_range(-range..=range));
    DisturbedModel::new(h_i, h_0, lambda, eta).unwrap()
}
