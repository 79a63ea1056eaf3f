//! `hyperwalk` command-line tool.
//!
//! Exit codes: 0 success, 2 unreadable or unparsable input, 3 input that
//! violates a model invariant, 4 inapplicable transform, 5 failed verification.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::Failure;

#[derive(Debug, Parser)]
#[command(name = "hyperwalk", version, about = "Simulate, convert and verify discrete-time quantum walks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Vertex distribution after every step, as CSV `step,vertex,probability`.
    Simulate {
        #[command(flatten)]
        config: RunConfig,
    },
    /// Convert a walk into another model and write the result document.
    Transform {
        #[command(flatten)]
        config: RunConfig,
    },
    /// Check that a conversion reproduces the source distributions.
    Verify {
        #[command(flatten)]
        config: RunConfig,
        /// Transform result document to check instead of running `--transform`.
        #[arg(long, conflicts_with = "transform")]
        result: Option<PathBuf>,
        /// Run a seeded suite of random instances instead of a single walk.
        #[arg(long, conflicts_with_all = ["spec", "result"])]
        random: Option<usize>,
        /// Compare only at whole-cycle boundaries, up to this many cycles.
        #[arg(long)]
        cycles: Option<usize>,
        /// Also require the target basis to be no larger and steps to map one to one.
        #[arg(long)]
        strong: bool,
        #[arg(long, default_value_t = 6)]
        max_vertices: usize,
        #[arg(long, default_value_t = 6)]
        max_edges: usize,
        #[arg(long, default_value_t = 3)]
        max_schedule: usize,
    },
    /// Sizes after each link of a transform chain, without building matrices.
    ChainSize {
        #[command(flatten)]
        config: RunConfig,
    },
    /// Model, sizes and schedule of a walk.
    Info {
        #[command(flatten)]
        config: RunConfig,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Walk specification (JSON).
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Initial state: a JSON file, or inline JSON such as `{"vertex":0,"edge":1}`.
    #[arg(long)]
    state: Option<String>,
    #[arg(long, default_value_t = 10)]
    steps: usize,
    /// Transform name, or a comma-separated chain.
    #[arg(long)]
    transform: Option<String>,
    /// Distribution and unitarity tolerance.
    #[arg(long, env = "HYPERWALK_TOL", default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; defaults to CSV for `simulate`, JSON otherwise.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate { config } => commands::simulate(&config),
        Command::Transform { config } => commands::transform(&config),
        Command::Verify { config, result, random, cycles, strong, max_vertices, max_edges, max_schedule } => {
            let opts = commands::VerifyOptions {
                result,
                random,
                cycles,
                strong,
                bounds: hyperwalk::random::SizeBounds::new(max_vertices, max_edges, max_schedule),
            };
            commands::verify(&config, &opts)
        }
        Command::ChainSize { config } => commands::chain_size(&config),
        Command::Info { config } => commands::info(&config),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("hyperwalk: {failure}");
            ExitCode::from(failure.code())
        }
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Invariant(_) => 3,
            Failure::Inapplicable(_) => 4,
            Failure::Verification(_) => 5,
        }
    }
}
