//! Command-line driver for the entangled two-qubit Unruh quantum Otto
//! engine: single evaluations, cached parameter sweeps, protocol
//! construction and verification against independent references.

pub mod cache;
pub mod commands;
pub mod config;
pub mod error;
pub mod rows;
pub mod verify;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::CliError;

pub const CACHE_ENV: &str = "EUQOE_CACHE_DIR";

#[derive(Debug, Parser)]
#[command(name = "euqoe", version, about = "Entangled Unruh quantum Otto engine")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Override a configuration key; may be repeated.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub sets: Vec<String>,
    /// Write output here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,
    /// Field dimension, `1p1` or `1p3`.
    #[arg(long, global = true, value_name = "DIM")]
    pub dimension: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Evaluate one cycle and print its CSV row.
    Efficiency,
    /// Evaluate a parameter grid.
    Sweep,
    /// Build and check the protocol for the configured heating stage.
    Protocol,
    /// Run the verification suites.
    Verify,
}

fn dispatch(cli: &Cli) -> Result<i32, CliError> {
    let env = std::env::var(CACHE_ENV).ok();
    let cfg = RunConfig::load(
        cli.config.as_deref(),
        &cli.sets,
        cli.dimension.as_deref(),
        env.as_deref(),
    )?;
    let out = cli.out.as_deref();
    match cli.command {
        Command::Efficiency => commands::efficiency(&cfg, out),
        Command::Sweep => commands::sweep(&cfg, out, cli.workers).map(|(code, _)| code),
        Command::Protocol => commands::protocol(&cfg, out),
        Command::Verify => commands::verify(&cfg, out),
    }
}

/// Runs the command and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("euqoe: {e}");
            e.code
        }
    }
}
