//! Command-line front end for the compound-train analysis library.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::Format;
pub use error::{exit, CliError};

#[derive(Debug, Parser)]
#[command(name = "pcd", version, about = "Planetary + cycloid compound train analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ratios, efficiencies and optional power flow of one train.
    Analyze(IoArgs),
    /// Efficiency over a grid of ratios and mesh efficiencies.
    Sweep(IoArgs),
    /// Enumerate trains that hit a target ratio.
    Search(IoArgs),
}

#[derive(Debug, Clone, Args)]
pub struct IoArgs {
    /// JSON input file.
    #[arg(short, long)]
    pub config: PathBuf,
    /// Output file; `-` or `stdout` writes to standard output.
    #[arg(short, long, default_value = "-")]
    pub out: String,
    /// Overrides the format named in the config (default json).
    #[arg(short, long, value_enum)]
    pub format: Option<Format>,
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Analyze(io) => commands::analyze(io),
        Command::Sweep(io) => commands::sweep(io),
        Command::Search(io) => commands::search(io),
    }
}
