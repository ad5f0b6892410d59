mod commands;
mod config;
mod flat;
mod output;
mod suite;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Options, Outcome};

/// Two-fluid Euler-Maxwell simulations and verification suites on a
/// periodic box.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for the output files (created if missing).
    #[arg(long, global = true, default_value = "output")]
    output_dir: PathBuf,
    /// Override the seed of the config or suite.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Suppress progress messages.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation and write timeseries.csv, manifest.json and snapshots.
    Simulate { config: PathBuf },
    /// Run a simulation and assess the configured decay claims.
    DecayStudy { config: PathBuf },
    /// Run an inequality and integrator verification suite.
    Verify { suite: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = Options {
        output_dir: cli.output_dir,
        seed: cli.seed,
        quiet: cli.quiet,
    };
    let result = match &cli.command {
        Command::Simulate { config } => commands::simulate(config, &opts),
        Command::DecayStudy { config } => commands::decay_study(config, &opts),
        Command::Verify { suite } => commands::verify(suite, &opts),
    };
    let outcome = result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        Outcome::Error
    });
    ExitCode::from(outcome as u8)
}
