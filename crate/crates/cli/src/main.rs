use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qfi_disturb::format::to_json_string;
use qfi_disturb::io::{parse_density, parse_hermitian, parse_model, LoadError};
use qfi_disturb::multiparam::qfi_matrix;
use qfi_disturb::multiprobe::{coupled_disturbance_ratio, heisenberg_scaling_check, ProbeEnsemble};
use qfi_disturb::oracle::{qfi_fd, MAX_RECOMMENDED_STEP};
use qfi_disturb::qfi::{average_hamiltonian, qfi_max, qfi_mixed, Generator};
use qfi_disturb::{DensityMatrix, DisturbedModel, Method, QfiReport};

mod sweep;

/// Relative gap between closed form and oracle above which `oracle` fails.
const ORACLE_TOL: f64 = 1e-5;

#[derive(Parser)]
#[command(
    name = "qfi",
    version,
    about = "Quantum Fisher information under a unitary disturbance"
)]
struct Cli {
    /// Worker threads for sweeps (0 = one per logical core).
    #[arg(long, global = true, env = "QFI_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// QFI of a probe state, or the optimal-probe QFI when no state is given.
    Compute {
        model: PathBuf,
        #[arg(long)]
        rho: Option<PathBuf>,
        /// Number of repetitions for the Cramér-Rao bound.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        nu: Option<u64>,
    },
    /// Optimal-probe QFI along a λ grid, one CSV per η.
    #[command(allow_negative_numbers = true)]
    Sweep(sweep::SweepArgs),
    /// Two-parameter QFI matrix for (λ, η).
    Matrix { model: PathBuf, rho: PathBuf },
    /// Closed form against the finite-difference fidelity oracle.
    Oracle {
        model: PathBuf,
        rho: PathBuf,
        #[arg(long, default_value_t = qfi_disturb::oracle::DEFAULT_STEP)]
        dl: f64,
    },
    /// n-probe scaling of the optimal QFI.
    Nprobe(NprobeArgs),
}

#[derive(Args)]
struct NprobeArgs {
    model: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// Coupled disturbance on the n-probe space; the ratio is reported
    /// without asserting n² scaling.
    #[arg(long)]
    experimental: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Schema(String),
    Invalid(String),
    Output(String),
    Disagreement(String),
    Failure(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Schema(_) => 2,
            CliError::Invalid(_) => 3,
            CliError::Output(_) => 4,
            CliError::Disagreement(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Schema(m)
            | CliError::Invalid(m)
            | CliError::Output(m)
            | CliError::Disagreement(m)
            | CliError::Failure(m) => m,
        }
    }
}

impl From<qfi_disturb::Error> for CliError {
    fn from(e: qfi_disturb::Error) -> Self {
        use qfi_disturb::Error as E;
        match e {
            E::NonConvergence { .. } => CliError::Failure(e.to_string()),
            E::DimensionMismatch { .. } | E::DimensionCap { .. } | E::Shape(_) | E::InvalidArgument(_) => {
                CliError::Schema(e.to_string())
            }
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn load<T>(path: &Path, parse: impl Fn(&str) -> Result<T, LoadError>) -> CliResult<T> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Schema(format!("{}: cannot read: {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        LoadError::Schema(m) => CliError::Schema(format!("{}: {m}", path.display())),
        invalid @ LoadError::Invalid { .. } => CliError::Invalid(format!("{}: {invalid}", path.display())),
    })
}

pub fn load_model(path: &Path) -> CliResult<DisturbedModel> {
    load(path, parse_model)
}

fn load_state(path: &Path, dim: usize) -> CliResult<DensityMatrix> {
    let rho = load(path, parse_density)?;
    if rho.dim() != dim {
        return Err(CliError::Schema(format!(
            "{}: state has dimension {}, model has {dim}",
            path.display(),
            rho.dim()
        )));
    }
    Ok(rho)
}

fn emit<T: Serialize>(value: &T) {
    println!("{}", to_json_string(value).expect("report serializes"));
}

fn compute(model: &Path, rho: Option<&Path>, nu: Option<u64>) -> CliResult<()> {
    let model = load_model(model)?;
    let mut report = match rho {
        Some(path) => {
            let rho = load_state(path, model.dim())?;
            let hbar = average_hamiltonian(&model, Generator::Interaction)?;
            QfiReport::new(qfi_mixed(&rho, &hbar.operator)?, Method::ClosedForm)
        }
        None => qfi_max(&model)?,
    };
    if let Some(nu) = nu {
        report = report.with_repetitions(nu);
    }
    emit(&report);
    Ok(())
}

#[derive(Serialize)]
struct MatrixOutput {
    q_ll: f64,
    q_ee: f64,
    q_le: f64,
    det: f64,
    singular: bool,
}

fn matrix(model: &Path, rho: &Path) -> CliResult<()> {
    let model = load_model(model)?;
    let rho = load_state(rho, model.dim())?;
    let q = qfi_matrix(&rho, &model)?;
    emit(&MatrixOutput {
        q_ll: q.q_ll,
        q_ee: q.q_ee,
        q_le: q.q_le,
        det: q.det(),
        singular: q.is_singular(),
    });
    Ok(())
}

#[derive(Serialize)]
struct OracleOutput {
    closed_form: f64,
    oracle: f64,
    rel_diff: f64,
}

fn oracle(model: &Path, rho: &Path, dl: f64) -> CliResult<()> {
    if !dl.is_finite() || dl <= 0.0 {
        return Err(CliError::Schema(format!("--dl must be positive, got {dl}")));
    }
    if dl > MAX_RECOMMENDED_STEP {
        eprintln!("warning: --dl {dl} exceeds {MAX_RECOMMENDED_STEP}; the finite difference may be inaccurate");
    }
    let model = load_model(model)?;
    let rho = load_state(rho, model.dim())?;
    let hbar = average_hamiltonian(&model, Generator::Interaction)?;
    let closed_form = qfi_mixed(&rho, &hbar.operator)?;
    let fd = qfi_fd(&rho, &model, dl)?;
    let rel_diff = (closed_form - fd).abs() / (1.0 + closed_form);
    emit(&OracleOutput {
        closed_form,
        oracle: fd,
        rel_diff,
    });
    if rel_diff > ORACLE_TOL {
        return Err(CliError::Disagreement(format!(
            "closed form and oracle differ by {rel_diff:e} (tolerance {ORACLE_TOL:e})"
        )));
    }
    Ok(())
}

fn nprobe(args: &NprobeArgs) -> CliResult<()> {
    let model = load_model(&args.model)?;
    let n = usize::try_from(args.n).map_err(|_| CliError::Schema("--n is too large".into()))?;
    let pe = ProbeEnsemble::new(n, model.h_i.clone(), model.h_0.clone())?;
    let report = match &args.experimental {
        Some(path) => {
            let coupled = load(path, parse_hermitian)?;
            if coupled.dim() != pe.collective_dim() {
                return Err(CliError::Schema(format!(
                    "{}: coupled disturbance has dimension {}, expected {}",
                    path.display(),
                    coupled.dim(),
                    pe.collective_dim()
                )));
            }
            coupled_disturbance_ratio(&pe, coupled, model.lambda, model.eta)?
        }
        None => heisenberg_scaling_check(&pe, model.lambda, model.eta)?,
    };
    emit(&report);
    if report.asserted && !report.holds() {
        return Err(CliError::Disagreement(format!(
            "ratio {} deviates from n² = {}",
            report.ratio, report.expected
        )));
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Compute { model, rho, nu } => compute(&model, rho.as_deref(), nu),
        Command::Sweep(args) => sweep::run(&args, cli.jobs),
        Command::Matrix { model, rho } => matrix(&model, &rho),
        Command::Oracle { model, rho, dl } => oracle(&model, &rho, dl),
        Command::Nprobe(args) => nprobe(&args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
