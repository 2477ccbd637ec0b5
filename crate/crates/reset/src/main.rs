// Copyright 2026 The polaron-reset Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use polaron_reset::{run, ExperimentConfig, ExperimentKind};

/// Polaron dynamics and optimal decoupling for dissipative qubit reset.
#[derive(Parser)]
#[command(name = "polaron-reset", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Relaxed polaron population and correlation spectrum.
    GroundState(Common),
    /// Smooth-switch decoupling sweep over λ.
    Decouple(Common),
    /// Optimal (LQR) decoupling over a list of control weights.
    Lqr(Common),
    /// Exact few-mode propagation against the variational dynamics.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config; defaults are used for anything left out.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir` in the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    match try_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn try_main() -> Result<()> {
    let cli = Cli::parse();
    let (kind, common) = match cli.command {
        Command::GroundState(c) => (ExperimentKind::GroundState, c),
        Command::Decouple(c) => (ExperimentKind::DecoupleSweep, c),
        Command::Lqr(c) => (ExperimentKind::LqrOptimize, c),
        Command::Validate(c) => (ExperimentKind::OracleValidate, c),
    };
    let config = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let config = config.resolve(kind, common.out)?;
    let out = config
        .output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("out/{}", kind.subcommand())));
    if let Some(n) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    run(&config, &out)?;
    println!("{kind}: results in {}", out.display());
    Ok(())
}
