//! `shuffle`: verify shuffled families, decide isomorphism of colored
//! orders, build and classify models of the example theories, and count
//! countable models.
//!
//! Every command prints one JSON record per line. Exit status is 0 for a
//! pass or an isomorphism, 1 for a failed check or a non-isomorphism, and
//! 2 for bad usage or input.

mod commands;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use shuffle_core::workbench::TheoryTag;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Internal(String),
}

#[derive(Parser)]
#[command(
    name = "shuffle",
    version,
    about = "Shuffled colored orders and their countable models"
)]
struct Cli {
    /// Print `key: value` blocks instead of JSON records.
    #[arg(long, global = true)]
    pretty: bool,
    /// Threads for independent checks.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check monotonicity, shuffling and coherence of the k-color dense partition family.
    ShuffleVerify {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 50)]
        depth: usize,
    },
    /// Build the limit structure of the k-color family and sample it.
    LimitBuild {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 50)]
        depth: usize,
    },
    /// Decide isomorphism of two colored order specs, with a back-and-forth witness.
    Iso {
        #[arg(long)]
        spec_a: PathBuf,
        #[arg(long)]
        spec_b: PathBuf,
        #[arg(long, default_value_t = 64)]
        depth: usize,
        /// Skip the decision and only run back-and-forth.
        #[arg(long)]
        engine_only: bool,
    },
    /// Build a model from a model file and check its axioms.
    Build {
        #[arg(long)]
        tuple: PathBuf,
        #[arg(long)]
        theory: Option<TheoryTag>,
        #[arg(long)]
        truncation: Option<u32>,
        #[arg(long, default_value_t = 30)]
        depth: usize,
    },
    /// Build a model and extract its invariant tuple, probing `depth` elements per part.
    Invariants {
        #[arg(long)]
        tuple: PathBuf,
        #[arg(long)]
        theory: Option<TheoryTag>,
        #[arg(long)]
        truncation: Option<u32>,
        #[arg(long, default_value_t = 300)]
        depth: usize,
    },
    /// Decide isomorphism of two models given by model files.
    IsoModels {
        #[arg(long)]
        spec_a: PathBuf,
        #[arg(long)]
        spec_b: PathBuf,
        #[arg(long, default_value_t = 64)]
        depth: usize,
    },
    /// List the canonical models of a theory.
    ListModels {
        #[arg(long)]
        theory: TheoryTag,
        #[arg(long)]
        truncation: Option<u32>,
    },
    /// Count countable models from a theory summary.
    Count {
        #[arg(long)]
        summary: PathBuf,
    },
    /// List the possible invariant tuples of each class of a theory summary.
    EnumerateTuples {
        #[arg(long)]
        summary: PathBuf,
        #[arg(long)]
        truncation: Option<u32>,
    },
}

fn run(command: Command) -> Result<commands::Report, CliError> {
    match command {
        Command::ShuffleVerify { k, depth } => commands::shuffle_verify(k, depth),
        Command::LimitBuild { k, depth } => commands::limit_build(k, depth),
        Command::Iso {
            spec_a,
            spec_b,
            depth,
            engine_only,
        } => commands::iso(&spec_a, &spec_b, depth, engine_only),
        Command::Build {
            tuple,
            theory,
            truncation,
            depth,
        } => commands::build(&tuple, theory, truncation, depth),
        Command::Invariants {
            tuple,
            theory,
            truncation,
            depth,
        } => commands::invariants(&tuple, theory, truncation, depth),
        Command::IsoModels { spec_a, spec_b, depth } => commands::iso_models(&spec_a, &spec_b, depth),
        Command::ListModels { theory, truncation } => commands::list_models(theory, truncation),
        Command::Count { summary } => commands::count(&summary),
        Command::EnumerateTuples { summary, truncation } => commands::enumerate_tuples(&summary, truncation),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(cli.command)) {
        Ok(report) => {
            if let Err(e) = output::print(&report.records, cli.pretty) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(if report.ok { 0 } else { 1 })
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}
