//! Closed forms against the brute-force routes.
//!
//! Tolerance budget for the fidelity route: with `δλ = 1e-3` the Richardson
//! step leaves an `O(δλ⁴)` remainder, and rounding in `1 - F ≈ Qδλ²/8` is
//! amplified by `8/δλ² ≈ 10⁷`, i.e. about `1e-9` absolute. Both sit well
//! inside the `1e-5` relative gate.

mod common;

use qfi_disturb::oracle::{
    average_hamiltonian_quadrature, factorization_ratio, first_order_factorization_check, qfi_fd, DEFAULT_STEP,
};
use qfi_disturb::qfi::{average_hamiltonian, qfi_mixed, Generator};
use qfi_disturb::random::random_density;
use qfi_disturb::DensityMatrix;

use common::{random_model, seeded};

fn check(rho: &DensityMatrix, model: &qfi_disturb::DisturbedModel) {
    let hbar = average_hamiltonian(model, Generator::Interaction).unwrap();
    let closed = qfi_mixed(rho, &hbar.operator).unwrap();
    let fd = qfi_fd(rho, model, DEFAULT_STEP).unwrap();
    assert!(
        (fd - closed).abs() / (1.0 + closed) <= 1e-5,
        "fd {fd} vs closed {closed}"
    );
}

#[test]
fn full_rank_states() {
    let mut r = seeded(101);
    for dim in 2..=5 {
        for _ in 0..40 {
            let model = random_model(&mut r, dim, 5.0, 3.0);
            check(&random_density(&mut r, dim, dim), &model);
        }
    }
}

#[test]
fn rank_deficient_states() {
    let mut r = seeded(103);
    for dim in 2..=5 {
        for rank in 1..dim {
            for _ in 0..15 {
                let model = random_model(&mut r, dim, 5.0, 3.0);
                check(&random_density(&mut r, dim, rank), &model);
            }
        }
    }
}

#[test]
fn quadrature_matches_spectral_filter() {
    let mut r = seeded(107);
    for dim in 2..=5 {
        for _ in 0..3 {
            let model = random_model(&mut r, dim, 10.0, 1.0);
            for which in [Generator::Interaction, Generator::Disturbance] {
                let a = average_hamiltonian(&model, which).unwrap();
                let b = average_hamiltonian_quadrature(&model, which, 10_000).unwrap();
                let err = a.operator.matrix().max_abs_diff(b.operator.matrix());
                assert!(err <= 1e-8, "dim {dim}: {err}");
            }
        }
    }
}

#[test]
fn factorization_remainder_is_second_order() {
    let mut r = seeded(109);
    for dim in 2..=4 {
        for _ in 0..5 {
            let model = random_model(&mut r, dim, 3.0, 2.0);
            if first_order_factorization_check(&model, 1e-3).unwrap() < 1e-11 {
                continue;
            }
            let ratio = factorization_ratio(&model, 1e-3).unwrap();
            assert!((3.5..=4.5).contains(&ratio), "{ratio}");
        }
    }
}
