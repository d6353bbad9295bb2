//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! criterion fails.

mod common;

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qfi_disturb::multiparam::{offdiag_via_reparam, qfi_matrix};
use qfi_disturb::multiprobe::{heisenberg_scaling_check, ProbeEnsemble, SCALING_TOL};
use qfi_disturb::oracle::{average_hamiltonian_quadrature, qfi_fd, DEFAULT_STEP};
use qfi_disturb::qfi::{average_hamiltonian, qfi_max_value, qfi_mixed, spectral_width_contraction_check, Generator};
use qfi_disturb::qubit::{dithering_interval, linspace, qmax_qubit, sigma_x, sigma_z, sweep};
use qfi_disturb::random::{random_density, random_hermitian};
use qfi_disturb::{BlochModel, DisturbedModel};
use rand::Rng;

use common::{random_model, seeded};

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: u32, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let pass = out.pass && elapsed < budget;
    println!(
        "criterion {id}: {} {name}: {} [{:.3} s, budget {} s]",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    pass
}

fn undisturbed_baseline() -> Outcome {
    let bm = BlochModel::with_overlap(FRAC_1_SQRT_2, 0.0, 0.0).unwrap();
    let s = sweep(bm.a(), bm.b(), 0.0, &linspace(-4.0, 4.0, 801)).unwrap();
    let worst = s.q_over_4.iter().map(|q| (q - 1.0).abs()).fold(0.0, f64::max);
    Outcome {
        pass: s.q_over_4.len() == 801 && worst <= 1e-10,
        detail: format!("max |q/4 - 1| = {worst:.3e} over 801 points (tol 1e-10)"),
    }
}

fn minimum_location() -> Outcome {
    let grid = linspace(-4.0, 4.0, 801);
    let mut worst = 0.0f64;
    for overlap in [0.0, 0.5, FRAC_1_SQRT_2, 0.9] {
        for eta in [0.5, 1.0, 2.0] {
            let bm = BlochModel::with_overlap(overlap, 0.0, eta).unwrap();
            let s = sweep(bm.a(), bm.b(), eta, &grid).unwrap();
            worst = worst.max((s.lambda_min_located + eta * overlap).abs());
        }
    }
    Outcome {
        pass: worst <= 1e-6,
        detail: format!("max |λ_min + η a·b| = {worst:.3e} over 12 cases (tol 1e-6)"),
    }
}

fn no_go() -> Outcome {
    let mut r = seeded(1);
    let (mut worst_gain, mut worst_major) = (f64::NEG_INFINITY, f64::INFINITY);
    let mut failures = 0;
    for _ in 0..1000 {
        let dim = r.gen_range(2..=6);
        let model = random_model(&mut r, dim, 5.0, 3.0);
        let gain = qfi_max_value(&model).unwrap() - qfi_max_value(&model.at(model.lambda, 0.0)).unwrap();
        let report = spectral_width_contraction_check(&model).unwrap();
        worst_gain = worst_gain.max(gain);
        worst_major = worst_major.min(report.worst_margin);
        if gain > 1e-9 || !report.holds {
            failures += 1;
        }
    }
    Outcome {
        pass: failures == 0,
        detail: format!(
            "1000 draws, {failures} violations; max Q(η) - Q(0) = {worst_gain:.3e}, min majorization margin = {worst_major:.3e} (tol 1e-9)"
        ),
    }
}

fn oracle_equivalence() -> Outcome {
    let mut r = seeded(2);
    let mut worst = 0.0f64;
    let mut deficient = 0;
    for _ in 0..500 {
        let dim = r.gen_range(2..=5);
        let model = random_model(&mut r, dim, 5.0, 3.0);
        let rank = r.gen_range(1..=dim);
        deficient += usize::from(rank < dim);
        let rho = random_density(&mut r, dim, rank);
        let hbar = average_hamiltonian(&model, Generator::Interaction).unwrap();
        let closed = qfi_mixed(&rho, &hbar.operator).unwrap();
        let fd = qfi_fd(&rho, &model, DEFAULT_STEP).unwrap();
        worst = worst.max((closed - fd).abs() / (1.0 + closed));
    }
    Outcome {
        pass: worst <= 1e-5,
        detail: format!("500 instances ({deficient} rank-deficient), max rel diff = {worst:.3e} (tol 1e-5)"),
    }
}

fn quarter_turn_value() -> Outcome {
    let expected = 16.0 / (PI * PI);
    let bm = BlochModel::new([0.0, 0.0, 1.0], [1.0, 0.0, 0.0], 0.0, PI / 2.0).unwrap();
    let qubit = qmax_qubit(&bm);
    let model = DisturbedModel::new(sigma_z(), sigma_x(), 0.0, PI / 2.0).unwrap();
    let general = qfi_max_value(&model).unwrap();
    let quad = average_hamiltonian_quadrature(&model, Generator::Interaction, 10_000).unwrap();
    let w = quad.operator.spectrum().unwrap().width();
    let quadrature = w * w;
    let values = [qubit, general, quadrature];
    let spread = values.iter().map(|v| (v - expected).abs()).fold(0.0, f64::max);
    Outcome {
        pass: spread <= 1e-8,
        detail: format!(
            "m-vector {qubit:.15}, filter {general:.15}, quadrature {quadrature:.15}; max |· - 16/π²| = {spread:.3e} (tol 1e-8)"
        ),
    }
}

fn route_agreement() -> Outcome {
    let mut r = seeded(3);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let dim = r.gen_range(2..=5);
        let model = random_model(&mut r, dim, 5.0, 3.0);
        let rank = r.gen_range(1..=dim);
        let rho = random_density(&mut r, dim, rank);
        let direct = qfi_matrix(&rho, &model).unwrap().q_le;
        let via = offdiag_via_reparam(&rho, &model).unwrap();
        worst = worst.max((direct - via).abs());
    }
    Outcome {
        pass: worst <= 1e-8,
        detail: format!("500 instances, max |direct - reparam| = {worst:.3e} (tol 1e-8)"),
    }
}

fn heisenberg_scaling() -> Outcome {
    let mut r = seeded(4);
    let mut worst = 0.0f64;
    for n in [2usize, 3] {
        for _ in 0..100 {
            let (n1, n2) = (r.gen_range(0.1..3.0), r.gen_range(0.1..3.0));
            let h_i = random_hermitian(&mut r, 2, n1);
            let h_0 = random_hermitian(&mut r, 2, n2);
            let pe = ProbeEnsemble::new(n, h_i, h_0).unwrap();
            let rep = heisenberg_scaling_check(&pe, r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0)).unwrap();
            worst = worst.max((rep.ratio / rep.expected - 1.0).abs());
        }
    }
    Outcome {
        pass: worst <= SCALING_TOL,
        detail: format!("n ∈ {{2, 3}}, 100 draws each, max |ratio/n² - 1| = {worst:.3e} (tol 1e-8)"),
    }
}

fn dithering_existence() -> Outcome {
    let bm = BlochModel::with_overlap(FRAC_1_SQRT_2, 0.0, 0.0).unwrap();
    let (eta, eta_tilde) = (2.0, 3.0);
    match dithering_interval(bm.a(), bm.b(), eta, eta_tilde).unwrap() {
        Some(iv) => {
            let sub = linspace(iv.lo, iv.hi, 102);
            let violations = sub[1..101]
                .iter()
                .filter(|&&l| qmax_qubit(&bm.at(l, eta)) >= qmax_qubit(&bm.at(l, eta_tilde)))
                .count();
            Outcome {
                pass: violations == 0,
                detail: format!(
                    "interval [{:.6}, {:.6}], {violations}/100 sub-grid violations",
                    iv.lo, iv.hi
                ),
            }
        }
        None => {
            let best = linspace(-40.0, 40.0, 80_001)
                .into_iter()
                .map(|l| qmax_qubit(&bm.at(l, eta_tilde)) - qmax_qubit(&bm.at(l, eta)))
                .fold(f64::NEG_INFINITY, f64::max);
            Outcome {
                pass: false,
                detail: format!(
                    "no interval: Q(λ; 3) - Q(λ; 2) ≤ {best:.3e} for all λ ∈ [-40, 40], so η = 3 never beats η = 2"
                ),
            }
        }
    }
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let results = [
        run(1, "undisturbed baseline", secs(1), undisturbed_baseline),
        run(2, "minimum location", secs(5), minimum_location),
        run(3, "no-go theorem", secs(30), no_go),
        run(4, "oracle equivalence", secs(60), oracle_equivalence),
        run(5, "16/π² three-way value", secs(1), quarter_turn_value),
        run(6, "QFI-matrix route agreement", secs(30), route_agreement),
        run(7, "Heisenberg scaling", secs(30), heisenberg_scaling),
        run(8, "dithering existence", secs(2), dithering_existence),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
