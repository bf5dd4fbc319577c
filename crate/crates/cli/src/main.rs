//! `blindspot`: command-line access to Jeffrey conditioning and blind-spot analysis.
//!
//! Payloads go to stdout (or `--out`) as JSON, summaries to stderr.
//! Exit codes: 0 success or member, 10 accessible or collision found,
//! 2 input error, 3 horizon insufficient.

mod certificate;
mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ACCESSIBLE: u8 = 10;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_HORIZON: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "blindspot", version, about = "Jeffrey conditioning and Bayes blind-spot analysis")]
pub struct Cli {
    /// Number of coordinates to inspect for truncated or parametric inputs.
    #[arg(long, global = true)]
    pub horizon: Option<usize>,
    /// Seed for randomized subcommands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output format; defaults to the `--out` extension, else json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the payload here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
    #[command(subcommand)]
    pub group: Group,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Group {
    /// Jeffrey conditioning on finite distributions.
    #[command(subcommand)]
    Jc(JcCommand),
    /// Blind-spot membership, constructions and sampling.
    #[command(subcommand)]
    Bs(BsCommand),
    /// Distribution utilities.
    #[command(subcommand)]
    Dist(DistCommand),
}

#[derive(Debug, Subcommand)]
pub enum JcCommand {
    /// Revise a prior by Jeffrey conditioning.
    Apply {
        #[arg(long)]
        prior: String,
        #[arg(long)]
        partition: String,
        #[arg(long)]
        weights: String,
    },
    /// Check the rigidity condition (and ratio constancy) on a partition.
    Rigidity(PairWithPartition),
    /// Coarsest partition on which the posterior comes from the prior.
    Coarsest(Pair),
    /// Exhaustive search over all set partitions (n <= 8).
    Brute(Pair),
}

#[derive(Debug, Args)]
pub struct Pair {
    #[arg(long)]
    pub prior: String,
    #[arg(long)]
    pub posterior: String,
}

#[derive(Debug, Args)]
pub struct PairWithPartition {
    #[arg(long)]
    pub prior: String,
    #[arg(long)]
    pub posterior: String,
    #[arg(long)]
    pub partition: String,
}

#[derive(Debug, Subcommand)]
pub enum BsCommand {
    /// Blind-spot membership test.
    Test(Pair),
    /// Generate a member of the blind spot of every listed prior.
    Construct {
        #[arg(long)]
        priors: String,
    },
    /// Find a blind-spot member within 4*epsilon (l1) of a target.
    Densify {
        #[arg(long)]
        prior: String,
        #[arg(long)]
        target: String,
        #[arg(long)]
        epsilon: String,
    },
    /// Move a member onto a collision within 2*epsilon (l1).
    Exteriorize {
        #[arg(long)]
        prior: String,
        #[arg(long)]
        posterior: String,
        #[arg(long)]
        epsilon: String,
    },
    /// Create at least `pairs` collisions within 2*pairs*epsilon (l1).
    Multicollide {
        #[arg(long)]
        prior: String,
        #[arg(long)]
        posterior: String,
        #[arg(long)]
        pairs: usize,
        #[arg(long)]
        epsilon: String,
    },
    /// Draw one stick-breaking distribution.
    Sample {
        #[arg(long, default_value = "uniform")]
        base: String,
    },
    /// Estimate the blind-spot fraction under stick-breaking sampling.
    Montecarlo {
        #[arg(long)]
        prior: String,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value = "uniform")]
        base: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum DistCommand {
    /// Rescale nonnegative values to sum to one.
    Normalize {
        #[arg(long)]
        values: String,
    },
    /// l^p distance, or the bounded metric with --bounded.
    Distance {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long, default_value = "l1")]
        norm: String,
        #[arg(long)]
        bounded: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.workers > 1 {
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build_global();
    }
    match commands::run(&cli).and_then(|outcome| commands::emit(&cli, outcome)) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
