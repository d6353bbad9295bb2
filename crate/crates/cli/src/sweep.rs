use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;

use qfi_disturb::format::to_json_string;
use qfi_disturb::qfi::qfi_max_value;
use qfi_disturb::qubit::{bloch_decompose, linspace, locate_minimum, qmax_qubit, SweepResult, SweepSidecar, Vec3};
use qfi_disturb::{BlochModel, DisturbedModel, HermitianOperator};

use crate::{load_model, CliError, CliResult};

/// Bloch-vector tolerance for taking the qubit route.
const PAULI_TOL: f64 = 1e-12;
/// A curve must lie below the other by more than this to count as dithering.
const DITHER_MARGIN: f64 = 1e-12;

#[derive(Args)]
pub struct SweepArgs {
    model: PathBuf,
    #[arg(long)]
    lambda_from: f64,
    #[arg(long)]
    lambda_to: f64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    points: u64,
    /// Comma-separated disturbance strengths; defaults to the model's η.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    eta: Vec<f64>,
    #[arg(long)]
    out: PathBuf,
}

/// Unit Bloch vector of a traceless qubit operator.
fn unit_pauli(h: &HermitianOperator) -> Option<Vec3> {
    let (c, v) = bloch_decompose(h)?;
    let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    (c.abs() <= PAULI_TOL && (len - 1.0).abs() <= PAULI_TOL).then_some(v)
}

enum Route {
    Qubit(Vec3, Vec3),
    General(DisturbedModel),
}

impl Route {
    fn of(model: &DisturbedModel) -> Self {
        match (unit_pauli(&model.h_i), unit_pauli(&model.h_0)) {
            (Some(a), Some(b)) => Route::Qubit(a, b),
            _ => Route::General(model.clone()),
        }
    }

    fn q_over_4(&self, lambda: f64, eta: f64) -> CliResult<f64> {
        match self {
            Route::Qubit(a, b) => {
                let bm = BlochModel::new(*a, *b, lambda, eta).expect("unit vectors");
                Ok(qmax_qubit(&bm) / 4.0)
            }
            Route::General(model) => Ok(qfi_max_value(&model.at(lambda, eta))? / 4.0),
        }
    }

    fn bloch(&self) -> (Option<Vec3>, Option<Vec3>) {
        match self {
            Route::Qubit(a, b) => (Some(*a), Some(*b)),
            Route::General(_) => (None, None),
        }
    }
}

fn sweep_one(route: &Route, grid: &[f64], eta: f64) -> CliResult<SweepResult> {
    let values = grid
        .par_iter()
        .map(|&l| route.q_over_4(l, eta))
        .collect::<CliResult<Vec<f64>>>()?;
    let f = |l: f64| route.q_over_4(l, eta).unwrap_or(f64::INFINITY);
    Ok(locate_minimum(grid.to_vec(), values, f)?)
}

fn eta_label(eta: f64) -> String {
    format!("{eta}")
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> CliResult<()> {
    let fail = |e: std::io::Error| CliError::Output(format!("{}: {e}", path.display()));
    let mut w = BufWriter::new(File::create(path).map_err(fail)?);
    body(&mut w).map_err(fail)?;
    w.flush().map_err(fail)
}

#[derive(Serialize)]
struct DitheringPair {
    eta: f64,
    eta_tilde: f64,
    /// Grid runs on which the `eta` curve lies strictly below `eta_tilde`.
    intervals: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct DitheringReport {
    pairs: Vec<DitheringPair>,
}

fn dithering_runs(grid: &[f64], low: &[f64], high: &[f64]) -> Vec<[f64; 2]> {
    let mut runs = Vec::new();
    let mut start: Option<usize> = None;
    for i in 0..grid.len() {
        let below = low[i] < high[i] - DITHER_MARGIN;
        match (below, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push([grid[s], grid[i - 1]]);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push([grid[s], grid[grid.len() - 1]]);
    }
    runs
}

fn validated_etas(args: &SweepArgs, model: &DisturbedModel) -> CliResult<Vec<f64>> {
    let etas = if args.eta.is_empty() {
        vec![model.eta]
    } else {
        args.eta.clone()
    };
    for (i, e) in etas.iter().enumerate() {
        if !e.is_finite() {
            return Err(CliError::Schema(format!("--eta: {e} is not finite")));
        }
        if etas[..i].contains(e) {
            return Err(CliError::Schema(format!("--eta: duplicate value {e}")));
        }
    }
    Ok(etas)
}

pub fn run(args: &SweepArgs, jobs: Option<usize>) -> CliResult<()> {
    if !args.lambda_from.is_finite() || !args.lambda_to.is_finite() || args.lambda_from >= args.lambda_to {
        return Err(CliError::Schema(format!(
            "--lambda-from must be below --lambda-to, got [{}, {}]",
            args.lambda_from, args.lambda_to
        )));
    }
    let model = load_model(&args.model)?;
    let etas = validated_etas(args, &model)?;
    fs::create_dir_all(&args.out).map_err(|e| CliError::Output(format!("{}: {e}", args.out.display())))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Failure(format!("cannot start worker pool: {e}")))?;
    let route = Route::of(&model);
    if let Route::General(_) = route {
        eprintln!("sweep: operators are not unit Pauli vectors, using the general route");
    }
    let grid = linspace(args.lambda_from, args.lambda_to, args.points as usize);

    let mut curves = Vec::with_capacity(etas.len());
    for &eta in &etas {
        let result = pool.install(|| sweep_one(&route, &grid, eta))?;
        let label = eta_label(eta);
        let csv = args.out.join(format!("sweep_eta={label}.csv"));
        let json = args.out.join(format!("sweep_eta={label}.json"));
        write_file(&csv, |w| result.write_csv(w))?;
        let (a, b) = route.bloch();
        let sidecar = SweepSidecar {
            a,
            b,
            eta,
            lambda_min_located: result.lambda_min_located,
            q_at_min: result.q_at_min,
            flat: result.flat,
        };
        write_file(&json, |w| writeln!(w, "{}", sidecar.to_json()))?;
        println!("{}", csv.display());
        println!("{}", json.display());
        curves.push((eta, result.q_over_4));
    }

    if curves.len() > 1 {
        let mut order: Vec<usize> = (0..curves.len()).collect();
        order.sort_by(|&i, &j| curves[i].0.total_cmp(&curves[j].0));
        let mut pairs = Vec::new();
        for (k, &i) in order.iter().enumerate() {
            for &j in &order[k + 1..] {
                let intervals = dithering_runs(&grid, &curves[i].1, &curves[j].1);
                for iv in &intervals {
                    eprintln!(
                        "dithering: η = {} lies below η̃ = {} on λ ∈ [{}, {}]",
                        curves[i].0, curves[j].0, iv[0], iv[1]
                    );
                }
                pairs.push(DitheringPair {
                    eta: curves[i].0,
                    eta_tilde: curves[j].0,
                    intervals,
                });
            }
        }
        let path = args.out.join("dithering.json");
        let text = to_json_string(&DitheringReport { pairs }).expect("report serializes");
        write_file(&path, |w| writeln!(w, "{text}"))?;
        println!("{}", path.display());
    }
    Ok(())
}
