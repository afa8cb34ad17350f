//! `submax`: instance generation, relaxation solves, baselines and property
//! checks.
//!
//! Exit codes: 0 success, 1 failed property check, 2 usage error, 3 input
//! error, 4 capacity error.

mod commands;
mod trace;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "submax",
    version,
    about = "Graphical-model bounds for submodular maximization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random max-cut instance.
    Gen(GenArgs),
    /// Run the convex relaxation and round its solution.
    Solve(SolveArgs),
    /// Run a reference maximizer.
    Baseline(BaselineArgs),
    /// Run the randomized property suites.
    Check(CheckArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenFamily {
    Tree,
    Grid,
    Random,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: GenFamily,
    /// Number of vertices (tree and random).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
    /// Edge probability (random).
    #[arg(long, default_value_t = 0.9)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; the instance goes to stdout when omitted.
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InnerArg {
    Pdhg,
    Subgradient,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Instance file.
    pub instance: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub treewidth: usize,
    #[arg(long, default_value_t = 50)]
    pub max_outer: usize,
    #[arg(long, default_value_t = 5000)]
    pub inner_steps: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 0.5)]
    pub theta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Cardinality budget `|A| <= m`.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Random junction trees per oracle call when treewidth > 1.
    #[arg(long, default_value_t = 32)]
    pub pool_size: usize,
    #[arg(long, value_enum, default_value_t = InnerArg::Pdhg)]
    pub inner: InnerArg,
    #[arg(long, default_value_t = 1e-9)]
    pub inner_tol: f64,
    /// CSV trace output.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Write 0 in the time_ms column, making traces reproducible byte for byte.
    #[arg(long)]
    pub no_timing: bool,
    /// JSON experiment record output.
    #[arg(long)]
    pub record: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Brute,
    DgDet,
    DgRand,
    Ls,
}

#[derive(Args, Debug)]
pub struct BaselineArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub algo: Algo,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent runs (seeds `seed..seed+runs`) for randomized algorithms.
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    /// Improvement factor parameter of local search.
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    #[arg(long)]
    pub record: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// `all` or a comma-separated list of suites (p1..p8).
    #[arg(long, default_value = "all")]
    pub props: String,
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Negates the second term of the DAG bound, to show the suites fail.
    #[arg(long, hide = true)]
    pub inject_bug: bool,
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("SUBMAX_LOG", "off");
    let _ = env_logger::Builder::from_env(env)
        .format_timestamp(None)
        .try_init();
}

fn main() -> ExitCode {
    init_logging();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => commands::gen(&args),
        Command::Solve(args) => commands::solve(&args),
        Command::Baseline(args) => commands::baseline(&args),
        Command::Check(args) => commands::check(&args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
