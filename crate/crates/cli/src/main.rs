//! `avogrip`: batch front end for the gripper model, motor sizing, bench data and harvest simulation.
//!
//! Exit codes: 0 success, 2 domain error, 64 usage error, 66 missing input,
//! 73 output could not be written.

mod commands;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::output::Format;

pub const EXIT_DOMAIN: u8 = 2;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_NO_INPUT: u8 = 66;
pub const EXIT_CANT_CREATE: u8 = 73;

/// Overrides where `bundled` data sets are read from.
pub const DATA_DIR_ENV: &str = "AVOGRIP_DATA_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "avogrip",
    version,
    about = "Rotary five-finger gripper analysis and harvest simulation"
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Report format; `sweep` defaults to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Also write an SVG chart (sweep only).
    #[arg(long, global = true, value_name = "PATH.svg")]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Force chain, finger configuration and grasp moment at one encoder angle.
    Mech(commands::MechArgs),
    /// Finger configuration and grasp moment across the actuation range.
    Sweep(commands::SweepArgs),
    /// Bench force and wrist rotation statistics.
    Stats(commands::StatsArgs),
    /// Worst-case motor torque over a fruit size envelope.
    SizeMotor(commands::SizeMotorArgs),
    /// Replay the grasp trials through the harvest workflow.
    Simulate(commands::SimulateArgs),
    /// Suction force of the vacuum line.
    Suction(commands::SuctionArgs),
}

/// Failure with its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("missing input: {0}")]
    NoInput(String),
    #[error("domain: {0}")]
    Domain(#[from] avogrip_core::Error),
    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::NoInput(_) => EXIT_NO_INPUT,
            CliError::Domain(_) => EXIT_DOMAIN,
            CliError::Output(_) => EXIT_CANT_CREATE,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(&cli.command, &cli.common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("avogrip: error: {e}");
            ExitCode::from(e.code())
        }
    }
}
