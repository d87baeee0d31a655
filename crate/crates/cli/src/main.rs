//! `qmicro`: density of states, thermodynamics and Monte Carlo checks for
//! finite quantum spectra.
//!
//! Every subcommand prints a JSON report on stdout. Curves go to `--out`
//! (CSV, or a saved density of states when the path ends in `.json`); with
//! `--out -` the data takes stdout and the report moves to stderr.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 no
//! finite-temperature branch, 3 oracle failure or insufficient statistics.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qmicro_core::Error as CoreError;

mod commands;
mod source;

use source::{SecondSourceArgs, SourceArgs};

#[derive(Parser, Debug)]
#[command(name = "qmicro", version, about = "Exact microcanonical thermodynamics of finite quantum spectra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample Ω and its first two derivatives; report the smoothness class at each level.
    Dos(DosArgs),
    /// Entropy, temperature, specific heat and energy uncertainty, plus critical points.
    Thermo(ThermoArgs),
    /// Check the analytic results against uniform random pure states.
    Compare(CompareArgs),
    /// Maximise the total entropy of two systems exchanging energy.
    Equilibrate(EquilibrateArgs),
}

fn parse_grid(text: &str) -> Result<usize, String> {
    let n: usize = text.parse().map_err(|_| format!("invalid grid size {text:?}"))?;
    if n < 2 {
        return Err("grid needs at least 2 points".into());
    }
    Ok(n)
}

/// Sample counts, accepting forms like `1e6`.
fn parse_count(text: &str) -> Result<u64, String> {
    if let Ok(n) = text.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = text.parse().map_err(|_| format!("invalid count {text:?}"))?;
    if !(x >= 1.0 && x.fract() == 0.0 && x <= u64::MAX as f64) {
        return Err(format!("count must be a positive integer, got {text}"));
    }
    Ok(x as u64)
}

fn parse_scale(text: &str) -> Result<f64, String> {
    let x: f64 = text.parse().map_err(|_| format!("invalid scale {text:?}"))?;
    if !(x.is_finite() && x > 0.0) {
        return Err("scale must be positive".into());
    }
    Ok(x)
}

#[derive(Args, Debug)]
pub struct DosArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Number of grid points.
    #[arg(long, default_value = "2000", value_parser = parse_grid)]
    grid: usize,
    /// Energy range LO:HI (default: the whole support).
    #[arg(long, value_name = "LO:HI", allow_hyphen_values = true)]
    range: Option<String>,
    /// Exact rational arithmetic throughout.
    #[arg(long)]
    rational: bool,
    /// Energy unit: every eigenvalue is multiplied by this factor.
    #[arg(long, default_value = "1", value_parser = parse_scale)]
    scale: f64,
    /// CSV curve, or the density of states itself for a `.json` path.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ThermoArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value = "2000", value_parser = parse_grid)]
    grid: usize,
    /// Energy range LO:HI (default: the accessible range).
    #[arg(long, value_name = "LO:HI", allow_hyphen_values = true)]
    range: Option<String>,
    #[arg(long)]
    rational: bool,
    /// Extend the curve above the maximum of Ω (negative temperatures).
    #[arg(long)]
    negative_branch: bool,
    /// Log-log fit of C against |T - T_c| over the temperature window LO:HI; repeatable.
    #[arg(long, value_name = "LO:HI")]
    fit_exponents: Vec<String>,
    #[arg(long, default_value = "1", value_parser = parse_scale)]
    scale: f64,
    /// CSV with columns E,S,T,C,dH.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value = "1000000", value_parser = parse_count)]
    samples: u64,
    #[arg(long, default_value = "0")]
    seed: u64,
    /// Histogram bins for the χ² test.
    #[arg(long, default_value = "50")]
    bins: usize,
    /// Significance level.
    #[arg(long, default_value = "0.001")]
    alpha: f64,
    /// Energy at which the weights are compared (default: middle of the widest level gap).
    #[arg(long, allow_hyphen_values = true)]
    energy: Option<f64>,
    /// Full width of the energy window (default: 1% of the spectral width).
    #[arg(long)]
    window: Option<f64>,
    #[arg(long, default_value = "1", value_parser = parse_scale)]
    scale: f64,
    /// Histogram CSV with columns bin_left,bin_right,observed,expected.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EquilibrateArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    second: SecondSourceArgs,
    /// Initial energy of the first system.
    #[arg(long, allow_hyphen_values = true)]
    e1: f64,
    /// Initial energy of the second system.
    #[arg(long, allow_hyphen_values = true)]
    e2: f64,
    #[arg(long)]
    rational: bool,
    #[arg(long, default_value = "1", value_parser = parse_scale)]
    scale: f64,
}

/// Failures that carry their own exit code.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Oracle(String),
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(Failure::Oracle(_)) = err.downcast_ref::<Failure>() {
        return 3;
    }
    match err.downcast_ref::<CoreError>() {
        Some(CoreError::Frozen(_)) => 2,
        Some(CoreError::InsufficientStatistics { .. }) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Dos(args) => commands::dos(args),
        Command::Thermo(args) => commands::thermo(args),
        Command::Compare(args) => commands::compare(args),
        Command::Equilibrate(args) => commands::equilibrate_cmd(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
