//! Command-line interface.
//!
//! Results go to stdout (or `--out`); failures print one line to stderr and
//! exit nonzero.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::estimate::{fit, FitConfig, Method};
use crate::inference::{bootstrap_se, scenario_cov};
use crate::io::{parse_csv, write_asymcov, write_fit, write_study, CountKind};
use crate::sim::generate::{Scenario, DEFAULT_BETA0};
use crate::sim::{monte_carlo, ScenarioConfig};

/// Exit status for a failed command.
pub const EXIT_FAILURE: i32 = 1;
/// Exit status for a malformed command line.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "panelcount", version, about = "Proportional mean regression for panel count data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a dataset read from CSV.
    Fit(FitArgs),
    /// Run a Monte Carlo study on a reference scenario.
    Simulate(SimulateArgs),
    /// Print the analytic asymptotic covariance matrices of a scenario.
    Asymcov(AsymcovArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Mple,
    Mle,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Mple => Method::Mple,
            MethodArg::Mle => Method::Mle,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodsArg {
    Mple,
    Mle,
    Both,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// CSV with header `subject_id,time,count,z1,...,zd`.
    path: PathBuf,
    #[arg(long, value_enum, default_value = "mple")]
    method: MethodArg,
    /// Relative log-likelihood change at which iteration stops.
    #[arg(long, default_value_t = FitConfig::default().eta)]
    eta: f64,
    /// Number of bootstrap replicates for standard errors (0 disables).
    #[arg(long, default_value_t = 0, num_args = 0..=1, default_missing_value = "200")]
    bootstrap: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Read `count` as events since the previous inspection.
    #[arg(long)]
    increments: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    scenario: u8,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "both")]
    method: MethodsArg,
    #[arg(long, default_value_t = FitConfig::monte_carlo().eta)]
    eta: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AsymcovArgs {
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    scenario: u8,
    /// Comma-separated β₀, e.g. `--beta=-1,0.5,1.5`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    beta: Option<Vec<f64>>,
}

fn emit(text: &str, out: Option<&PathBuf>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n"))?,
        None => writeln!(stdout, "{text}")?,
    }
    Ok(())
}

fn run_fit(args: FitArgs, stdout: &mut dyn Write) -> Result<()> {
    let cfg = FitConfig::default().with_eta(args.eta);
    cfg.validate()?;
    let file = File::open(&args.path)
        .map_err(|e| Error::input(format!("cannot open {}: {e}", args.path.display())))?;
    let kind = if args.increments {
        CountKind::Increments
    } else {
        CountKind::Cumulative
    };
    let data = parse_csv(BufReader::new(file), kind)?;
    let method = Method::from(args.method);
    let result = fit(&data, method, &vec![0.0; data.dim()], &cfg)?;
    let boot = match args.bootstrap {
        0 => None,
        b => Some(bootstrap_se(&data, method, b, args.seed, &cfg)?),
    };
    emit(&write_fit(&result, boot.as_ref())?, args.out.as_ref(), stdout)
}

fn run_simulate(args: SimulateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let config = ScenarioConfig {
        scenario: Scenario::from_number(args.scenario)?,
        n: args.n,
        reps: args.reps,
        seed: args.seed,
        fit: FitConfig::monte_carlo().with_eta(args.eta),
        ..ScenarioConfig::default()
    };
    let methods: &[Method] = match args.method {
        MethodsArg::Mple => &[Method::Mple],
        MethodsArg::Mle => &[Method::Mle],
        MethodsArg::Both => &[Method::Mple, Method::Mle],
    };
    let study = monte_carlo(&config, methods)?;
    for s in &study.summaries {
        writeln!(stderr, "{}: mean fit time {:.4} s", s.method, s.mean_seconds)?;
    }
    emit(&write_study(&study)?, args.out.as_ref(), stdout)
}

fn run_asymcov(args: AsymcovArgs, stdout: &mut dyn Write) -> Result<()> {
    let beta = args.beta.unwrap_or_else(|| DEFAULT_BETA0.to_vec());
    let scenario = Scenario::from_number(args.scenario)?;
    let cov = scenario_cov(scenario, &beta)?;
    emit(&write_asymcov(args.scenario, &beta, &cov), None, stdout)
}

/// Runs the CLI on `argv` (including the program name) and returns the
/// exit status.
pub fn run_cli_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            if e.use_stderr() {
                let first = text.lines().next().unwrap_or("invalid arguments");
                let _ = writeln!(stderr, "{first}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Fit(a) => run_fit(a, stdout),
        Command::Simulate(a) => run_simulate(a, stdout, stderr),
        Command::Asymcov(a) => run_asymcov(a, stdout),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_FAILURE
        }
    }
}

pub fn run_cli() -> i32 {
    run_cli_with(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr())
}
