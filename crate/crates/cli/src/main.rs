// Copyright 2026 The chrw-gates Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use chrw_cli::{parse_config_with, reproduction_config, run_scenario, CliError, RunOptions, Scenario};

#[derive(Parser)]
#[command(name = "chrw", version, about = "Geometric gate synthesis and simulation beyond the rotating-wave approximation")]
struct Cli {
    /// Experiment configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output` in the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Random seed (overrides `seed` in the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Average decoherence runs over the full 100x100 input-state grid.
    #[arg(long, global = true)]
    full_grid: bool,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit pulse programs as CSV.
    Synthesize,
    /// Emit fidelity traces of programs against exact dynamics.
    Simulate,
    /// Final-time fidelity over a range of gate times.
    Sweep,
    /// Robustness against systematic or stochastic control noise.
    Noise,
    /// Input-state-averaged fidelity under relaxation and dephasing.
    Lindblad,
    /// Infidelity with a third level present.
    Leakage,
    /// Fluxonium spectrum and flux matrix elements.
    Fluxonium,
    /// Regenerate a figure or table with built-in settings.
    Reproduce { target: Target },
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Table1,
    Table2,
}

impl Target {
    fn scenario(self) -> Scenario {
        match self {
            Self::Fig1 => Scenario::Fig1,
            Self::Fig2 => Scenario::Fig2,
            Self::Fig3 => Scenario::Fig3,
            Self::Fig4 => Scenario::Fig4,
            Self::Fig5 => Scenario::Fig5,
            Self::Fig6 => Scenario::Fig6,
            Self::Fig7 => Scenario::Fig7,
            Self::Table1 => Scenario::Table1,
            Self::Table2 => Scenario::Table2,
        }
    }
}

fn load(path: Option<&Path>, scenario: Scenario) -> Result<chrw_cli::ExperimentConfig, CliError> {
    match path {
        Some(p) => parse_config_with(&std::fs::read_to_string(p)?, Some(scenario)),
        None => parse_config_with("", Some(scenario)),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Output(format!("thread pool: {e}")))?;
    }
    let mut cfg = match cli.command {
        Command::Synthesize => load(cli.config.as_deref(), Scenario::Synthesize)?,
        Command::Simulate => load(cli.config.as_deref(), Scenario::Simulate)?,
        Command::Sweep => load(cli.config.as_deref(), Scenario::Sweep)?,
        Command::Noise => load(cli.config.as_deref(), Scenario::Noise)?,
        Command::Lindblad => load(cli.config.as_deref(), Scenario::Lindblad)?,
        Command::Leakage => load(cli.config.as_deref(), Scenario::Leakage)?,
        Command::Fluxonium => load(cli.config.as_deref(), Scenario::Fluxonium)?,
        Command::Reproduce { target } => reproduction_config(target.scenario())?,
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out = cli.out.or_else(|| cfg.output.as_ref().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("."));
    for path in run_scenario(&cfg, &out, RunOptions { full_grid: cli.full_grid })? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
