use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod io;

use mixdisc::verify::{DEFAULT_SEED, SINKHORN_MAX_ITER, SINKHORN_TOL};

/// Mixed discriminants, positive block maps and Schur forms from the command line.
///
/// Reports are JSON on stdout unless `--output` is given. Exit codes: 0 success,
/// 2 bad input or failed precondition, 3 scaling did not converge, 4 verification failure.
#[derive(Parser, Debug)]
#[command(name = "mixdisc", version)]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Monte Carlo sample count
    #[arg(long, global = true, default_value_t = 10_000)]
    samples: usize,
    /// Normalization residual target for scaling
    #[arg(long, global = true, default_value_t = SINKHORN_TOL)]
    tol: f64,
    #[arg(long = "max-iter", global = true, default_value_t = SINKHORN_MAX_ITER)]
    max_iter: usize,
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a block map or curvature fixture
    Gen(GenArgs),
    /// Normalize a block map so that H(I) = rI and tr B_ii = r
    Scale,
    /// Evaluate Phi of a block map (or of the map of a curvature tensor)
    Phi {
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
    },
    /// Schur form of the Chern forms of a curvature tensor, with a weak positivity test
    Schur {
        /// Comma-separated weakly decreasing parts, e.g. 2,1,0
        #[arg(long)]
        partition: String,
    },
    /// Exact spherical moment of a word of matrices against a Monte Carlo estimate
    Moment,
    /// Run the acceptance suite, plus a check of `--input` when given
    Verify {
        /// Cap on random instances per criterion
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: Option<u64>,
    },
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(value_enum)]
    kind: GenKind,
    #[arg(long, default_value_t = 3)]
    rank: usize,
    /// Target dimension (block maps) or base dimension (curvature); defaults to the rank
    #[arg(long)]
    dim: Option<usize>,
    /// Number of Kraus or curvature terms
    #[arg(long, default_value_t = 3)]
    terms: usize,
    /// Trace-map margin (kraus, choi) or identity margin (curvature)
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Kraus,
    Choi,
    Trace,
    Identity,
    Transpose,
    Curvature,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Direct,
    Dual,
    Integral,
    R4,
    All,
}

/// Validated flags shared by every subcommand.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub input_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
}

impl TryFrom<RunArgs> for RunConfig {
    type Error = anyhow::Error;

    fn try_from(a: RunArgs) -> anyhow::Result<Self> {
        anyhow::ensure!(a.tol > 0.0, "--tol must be positive (got {})", a.tol);
        anyhow::ensure!(a.samples >= 1, "--samples must be at least 1");
        Ok(RunConfig {
            seed: a.seed,
            samples: a.samples,
            tol: a.tol,
            max_iter: a.max_iter,
            input_path: a.input,
            output_path: a.output,
        })
    }
}

/// How a command finished when it did not hit an error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    NotConverged,
    VerificationFailed,
}

impl Status {
    fn exit_code(self) -> ExitCode {
        match self {
            Status::Ok => ExitCode::SUCCESS,
            Status::NotConverged => ExitCode::from(3),
            Status::VerificationFailed => ExitCode::from(4),
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    let cfg = RunConfig::try_from(cli.run)?;
    match cli.command {
        Command::Gen(g) => commands::gen(&cfg, g.kind, g.rank, g.dim, g.terms, g.eps),
        Command::Scale => commands::scale(&cfg),
        Command::Phi { method } => commands::phi(&cfg, method),
        Command::Schur { partition } => commands::schur(&cfg, &partition),
        Command::Moment => commands::moment(&cfg),
        Command::Verify { trials } => commands::verify(&cfg, trials.map(|t| t as usize)),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(status) => status.exit_code(),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
