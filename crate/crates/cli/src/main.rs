//! `rgm`: simulate, fit, evaluate, baseline and benchmark from the command
//! line.

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rgm::baselines::Method;
use rgm::simulation::Case;

use crate::error::CliError;

#[derive(Parser)]
#[command(
    name = "rgm",
    version,
    about = "Bayesian reciprocal graphical models for Mendelian randomization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a ground truth and a dataset for one simulation case.
    Simulate(SimulateArgs),
    /// Run the sampler on a summary-statistics file.
    Fit(FitArgs),
    /// Score a fit against a simulation truth.
    Evaluate(EvaluateArgs),
    /// Run a pairwise baseline estimator on a simulated dataset.
    Baseline(BaselineArgs),
    /// Replicated simulation study with aggregated metrics.
    Benchmark(BenchmarkArgs),
}

/// Model variant: fixed instrument map or instrument selection.
#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Rgm,
    RgmPlus,
}

#[derive(Args, serde::Serialize)]
struct SimulateArgs {
    /// I (scale-free), II (small-world) or III (small-world with shared instruments).
    #[arg(long)]
    case: Case,
    #[arg(long)]
    p: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    /// Number of confounders; defaults to ceil(p / 2).
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    stats: PathBuf,
    /// JSON run configuration; defaults apply to absent keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Overrides `hyper.instrument_mode` from the configuration.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// 0/1 instrument map (`p x k`), required by the fixed-map variant.
    #[arg(long)]
    b_support: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Directory written by `fit`.
    #[arg(long)]
    fit: PathBuf,
    /// Directory written by `simulate`.
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BaselineArgs {
    /// Directory written by `simulate`.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    method: Method,
    #[arg(long)]
    out: PathBuf,
    /// Instrument map; defaults to `baseline_map.csv` in the data directory.
    #[arg(long)]
    map: Option<PathBuf>,
    /// Seed of the bootstrap used for median standard errors.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[arg(long)]
    case: Case,
    #[arg(long, default_value_t = 5)]
    p: usize,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 5)]
    replicates: usize,
    /// Master seed; replicate seeds are derived from it.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Replicates run concurrently; capped by RGM_THREADS.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Run configuration as for `fit`; its seed is ignored.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long)]
    thin: Option<usize>,
    /// Defaults to rgm for cases I and II and rgm-plus for case III.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Comma-separated baseline methods to score alongside the fit.
    #[arg(long, value_delimiter = ',')]
    baselines: Vec<Method>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report(CliError::Usage(e.render().to_string().trim_end().to_string())),
    };
    let result = match cli.command {
        Command::Simulate(a) => commands::simulate::run(a),
        Command::Fit(a) => commands::fit::run(a),
        Command::Evaluate(a) => commands::evaluate::run(a),
        Command::Baseline(a) => commands::baseline::run(a),
        Command::Benchmark(a) => commands::benchmark::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(e),
    }
}

fn report(e: CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code())
}
