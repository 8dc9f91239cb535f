//! `mg1tail`: batch front end for the M/G/1 waiting-time tail approximations.

mod commands;
mod error;
mod grid;
mod model;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "mg1tail", version, about = "Waiting-time tail approximations for M/G/1 queues")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Model: a TOML file, a family name and/or key=value pairs
    /// (e.g. `--model lognormal alpha=0 beta=1`). Pairs override the file.
    #[arg(long, num_args = 1.., value_name = "SPEC")]
    pub model: Option<Vec<String>>,
    /// Worker threads; defaults to available parallelism.
    #[arg(long, env = "MG1_THREADS")]
    pub threads: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[arg(long, default_value_t = 100_000)]
    pub reps: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Queue parameters: μ, σ², cumulants, Cramér coefficients, r, κ.
    Params {
        #[command(flatten)]
        common: Common,
        /// Emit name,value CSV instead of aligned text.
        #[arg(long)]
        csv: bool,
        /// Also dump c_i, a_j and the u-series coefficients b_n.
        #[arg(long)]
        poly: bool,
    },
    /// K_r, M, N and the threshold inverses on an x grid.
    Thresholds {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        x: String,
    },
    /// Z, A, heavy-tail and heavy-traffic approximations on a (ρ, x) grid.
    Approx {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        rho: String,
        #[arg(long)]
        x: String,
        /// Use the simplified heavy-tail sum.
        #[arg(long)]
        simplified: bool,
    },
    /// Random-walk tail P(S_n > x).
    Rwtail {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Conditional Monte Carlo estimates of P(W > x).
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        x: String,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Approximations joined with simulation estimates on x.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        rho: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        simplified: bool,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// log10 comparison table for plotting at a fixed ρ.
    Figure {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.9)]
        rho: f64,
        #[arg(long, default_value = "log:1:200:20")]
        x: String,
        #[arg(long)]
        simplified: bool,
        #[command(flatten)]
        sim: SimArgs,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Params { common, .. }
            | Command::Thresholds { common, .. }
            | Command::Approx { common, .. }
            | Command::Rwtail { common, .. }
            | Command::Simulate { common, .. }
            | Command::Compare { common, .. }
            | Command::Figure { common, .. } => common,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let threads = cli.command.common().threads;
    match threads {
        Some(0) => Err(CliError::Config("--threads must be at least 1".into())),
        Some(n) => mg1tail_core::with_threads(n, || commands::dispatch(&cli.command))?,
        None => commands::dispatch(&cli.command),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mg1tail: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
