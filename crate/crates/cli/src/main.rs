//! `gaborprop`: Gabor-frame propagators for constant-coefficient evolution
//! equations from the command line.
//!
//! Exit codes: 0 on success, 1 on a numerical failure, 2 on a configuration error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod failure;
mod operator_file;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::figure::Which;
use config::{Flags, RunConfig};
use failure::Failure;

#[derive(Debug, Parser)]
#[command(name = "gaborprop", version, about = "Gabor-frame representations of evolution propagators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Frame bounds A, B and the dual-window residual of the Gaussian window
    Frame,
    /// Sampled Hadamard–Petrowsky check: estimated nu and C as JSON
    Hp,
    /// Assemble a Gabor matrix, fit its off-diagonal and sorted-column decay, export it
    Matrix,
    /// Solve a Cauchy problem through the thresholded Gabor matrix; prints theta,nnz,rel_l2_error
    Solve,
    /// Sorted-column data for the decay figures; prints n,magnitude,t
    Figure {
        #[arg(value_enum)]
        which: Which,
    },
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = RunConfig::load(cli.flags)?;
    if let Some(threads) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Frame => commands::frame::run(&cfg),
        Command::Hp => commands::hp::run(&cfg),
        Command::Matrix => commands::matrix::run(&cfg),
        Command::Solve => commands::solve::run(&cfg),
        Command::Figure { which } => commands::figure::run(which, &cfg),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("gaborprop: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
