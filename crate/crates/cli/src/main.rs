// SPDX-License-Identifier: Apache-2.0

//! `dollar-game`: run, sweep and analyse the $-Game from config files.
//!
//! Exit status: 0 on success, 2 for config or usage errors, 1 for runtime
//! failures.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "dollar-game", version, about = "Simulate and analyse the $-Game market model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a single realization and write its trajectory.
    Run(Common),
    /// Run R realizations of one parameter cell.
    Ensemble(Common),
    /// Run every cell of a parameter grid and draw phase heatmaps.
    Sweep(Common),
    /// Fit Ginzburg–Landau landscapes to simulated order parameters.
    GlFit(Common),
    /// Redraw the SVG plots of a JSON result document.
    Plot(PlotArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Config document.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed of all randomness.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Keep running after the speculative trigger fires.
    #[arg(long)]
    no_early_stop: bool,
    /// Override the config's `fundamental` switch.
    #[arg(long, value_enum)]
    fundamental: Option<Switch>,
}

#[derive(Args, Debug, Clone)]
pub struct PlotArgs {
    /// JSON document written by `run`, `ensemble`, `sweep` or `gl-fit`.
    #[arg(long)]
    input: PathBuf,
    /// Optional config whose `heatmap_x` / `heatmap_y` replace the stored axes.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Switch {
    On,
    Off,
}

/// Marks an error as caused by the user's input.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    let config = err.chain().any(|e| {
        e.downcast_ref::<ConfigError>().is_some()
            || e.downcast_ref::<dollar_game::Error>().is_some_and(|e| e.is_config_error())
    });
    if config {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => commands::run(&args),
        Command::Ensemble(args) => commands::ensemble(&args),
        Command::Sweep(args) => commands::sweep(&args),
        Command::GlFit(args) => commands::gl_fit(&args),
        Command::Plot(args) => commands::plot(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
