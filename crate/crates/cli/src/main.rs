//! `devrank` command-line tool.
//!
//! Exit codes: 0 success, 1 input error, 2 non-convergence (outputs are
//! still written), 3 configuration error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{GenArgs, RunConfig, SharedArgs};

#[derive(Debug, Parser)]
#[command(name = "devrank", version, about = "Rank developers and projects by influence in a social-coding network")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic follows/commits/stars dataset
    Gen {
        #[command(flatten)]
        shared: SharedArgs,
        #[command(flatten)]
        gen: GenArgs,
    },
    /// Rank developers and projects with one algorithm
    Rank {
        #[command(flatten)]
        shared: SharedArgs,
    },
    /// Run all five algorithms on a temporal split and score them
    Eval {
        #[command(flatten)]
        shared: SharedArgs,
    },
    /// DevRank precision over the alpha/beta lattice
    Sweep {
        #[command(flatten)]
        shared: SharedArgs,
    },
    /// Follower and star gains binned by commit volume
    Stats {
        #[command(flatten)]
        shared: SharedArgs,
    },
    /// Iteration counts and wall time per algorithm and threshold
    Bench {
        #[command(flatten)]
        shared: SharedArgs,
    },
}

#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub const INPUT: u8 = 1;
    pub const NOT_CONVERGED: u8 = 2;
    pub const CONFIG: u8 = 3;

    pub fn input(message: impl Into<String>) -> Self {
        Self { code: Self::INPUT, message: message.into() }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self { code: Self::CONFIG, message: message.into() }
    }

    pub fn not_converged(message: impl Into<String>) -> Self {
        Self { code: Self::NOT_CONVERGED, message: message.into() }
    }
}

impl From<devrank::Error> for CliError {
    fn from(e: devrank::Error) -> Self {
        use devrank::Error as E;
        match e {
            E::InvalidParameter(_) | E::TooLargeForDense { .. } | E::KExceedsPopulation { .. } => Self::config(e.to_string()),
            _ => Self::input(e.to_string()),
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    let (shared, gen, verb) = match command {
        Command::Gen { shared, gen } => (shared, Some(gen), "gen"),
        Command::Rank { shared } => (shared, None, "rank"),
        Command::Eval { shared } => (shared, None, "eval"),
        Command::Sweep { shared } => (shared, None, "sweep"),
        Command::Stats { shared } => (shared, None, "stats"),
        Command::Bench { shared } => (shared, None, "bench"),
    };
    let cfg = RunConfig::resolve(&shared, gen.as_ref())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::config(format!("cannot start thread pool: {e}")))?;
    pool.install(|| match verb {
        "gen" => commands::cmd_gen(&cfg),
        "rank" => commands::cmd_rank(&cfg),
        "eval" => commands::cmd_eval(&cfg),
        "sweep" => commands::cmd_sweep(&cfg),
        "stats" => commands::cmd_stats(&cfg),
        _ => commands::cmd_bench(&cfg),
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(CliError::CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("devrank: {e}");
            ExitCode::from(e.code)
        }
    }
}
