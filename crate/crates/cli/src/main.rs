//! `robeam`: solve, verify and simulate robust beamforming designs.
//!
//! stdout carries only the requested artifact; diagnostics and error JSON go
//! to stderr. Exit codes: 0 success, 2 input error, 3 infeasible, 4 solver
//! tolerance, 5 verification outage.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "robeam", version, about = "Worst-case robust beamforming for information and power transfer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Sweep {
    /// Every (ε, r) cell of the config.
    Fig2,
    /// Cells with ε > 0 only.
    Fig3,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve an instance through the dual path, cross-checked in closed form.
    Solve {
        #[arg(short = 'i', long = "input")]
        input: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Attack a beamformer with sampled and worst-case channel errors.
    Verify {
        #[arg(short = 'i', long = "input")]
        input: PathBuf,
        /// JSON object with a `w` field (a solution file works as is).
        #[arg(short = 'w', long = "beamformer")]
        beamformer: PathBuf,
        #[arg(short = 'n', long = "samples", default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Run a Monte Carlo campaign and write the CSV report.
    Simulate(commands::SimulateArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve { input, out, format } => commands::solve(&input, out.as_deref(), format),
        Command::Verify {
            input,
            beamformer,
            samples,
            seed,
            out,
        } => commands::verify(&input, &beamformer, samples, seed, out.as_deref()),
        Command::Simulate(args) => commands::simulate(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::Outage) {
                eprintln!("{}", e.to_json());
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
