//! Batch entry point: synthesize or ingest panels, train and calibrate,
//! backtest point and uncertainty-adjusted strategies, and run the placebo,
//! driver, and comparison studies.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

pub const EXIT_RUNTIME: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;

#[derive(Parser)]
#[command(name = "uasort", version, about = "Uncertainty-adjusted portfolio sorting backtests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonFlags {
    /// Declarative JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides the config's out_dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Base seed for synthetic data and derived permutation streams.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Comma-separated bound levels, each in (0, 1), e.g. 0.01,0.05,0.10.
    #[arg(long, value_delimiter = ',', global = true)]
    alpha: Option<Vec<f64>>,

    /// Half-width method: empirical, normal, or both.
    #[arg(long, global = true)]
    method: Option<String>,

    /// Proportional transaction cost in basis points per unit turnover.
    #[arg(long, global = true)]
    cost_bps: Option<u32>,

    /// Newey-West lag override (default: the plug-in rule).
    #[arg(long, global = true)]
    nw_lags: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic panel (and ground-truth sidecar) to disk.
    Synth(CommonFlags),
    /// Train, calibrate, and backtest every configured strategy.
    Backtest(CommonFlags),
    /// Placebo permutation table over the backtest artifacts.
    Placebo(CommonFlags),
    /// Fixed-effects driver regressions of the ranking improvements.
    Drivers(CommonFlags),
    /// Plot-ready scaled net-value pairs (point vs uncertainty-adjusted).
    Report(CommonFlags),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, flags) = match &cli.command {
        Command::Synth(f) => ("synth", f),
        Command::Backtest(f) => ("backtest", f),
        Command::Placebo(f) => ("placebo", f),
        Command::Drivers(f) => ("drivers", f),
        Command::Report(f) => ("report", f),
    };

    let config = match config::effective_config(flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("uasort {name}: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };

    let result = match name {
        "synth" => commands::synth::run(&config),
        "backtest" => commands::backtest::run(&config),
        "placebo" => commands::placebo::run(&config),
        "drivers" => commands::drivers::run(&config),
        "report" => commands::report::run(&config),
        _ => unreachable!(),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is_validation() => {
            eprintln!("uasort {name}: {e}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(e) => {
            eprintln!("uasort {name}: {e}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
