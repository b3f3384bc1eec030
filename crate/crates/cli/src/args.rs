use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rrtlab::montecarlo::{Model, Suite};
use rrtlab::stats::MomentSpec;

#[derive(Parser, Debug)]
#[command(
    name = "rrtlab",
    version,
    about = "Degree statistics of random recursive trees"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample degree profiles and write one CSV row per replicate.
    Simulate(RunArgs),
    /// Counts X_i and X_>=i against their Poisson limits.
    Poisson(RunArgs),
    /// Maximum degree tail against 1 - exp(-2^(eps - i)).
    Tail(RunArgs),
    /// Standardised X_i against the standard normal.
    Clt {
        #[command(flatten)]
        run: RunArgs,
        /// Index to standardise.
        #[arg(long, allow_hyphen_values = true)]
        i: Option<i64>,
    },
    /// Factorial moment estimates against their limits.
    Moments {
        #[command(flatten)]
        run: RunArgs,
        /// Moment spec such as `0:2`, `0:1,1:1` or `>=1:1`; repeatable.
        #[arg(long = "moment")]
        moments: Vec<MomentSpec>,
    },
    /// Structural checks of the merge chain by simulation.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "all", value_parser = parse_suite)]
        check: Suite,
        /// Exponent in the tau cut-off n - ceil(n^eps).
        #[arg(long)]
        tau_eps: Option<f64>,
    },
    /// Exact checks by exhaustive enumeration at small n.
    Exact(ExactArgs),
    /// Replay an events file and print the trees, labels and selection records.
    Replay {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: rrtlab::Error| e.to_string())
}

fn parse_model(s: &str) -> Result<Model, String> {
    s.parse().map_err(|e: rrtlab::Error| e.to_string())
}

#[derive(Args, Debug, Clone, Default)]
pub struct RunArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub reps: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_parser = parse_model)]
    pub model: Option<Model>,
    #[arg(long, allow_hyphen_values = true)]
    pub imin: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub imax: Option<i64>,
    /// CSV output path, `-` for standard output.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// JSON report path, `-` for standard output.
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// JSON config file; its fields override the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Record wall-clock time in the report.
    #[arg(long)]
    pub timing: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactCheck {
    Fibers,
    DegreeLaw,
    Orthant,
    Alternating,
    Decoupling,
    Moments,
}

#[derive(Args, Debug)]
pub struct ExactArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum)]
    pub check: ExactCheck,
    /// Index for `alternating`; all feasible indices when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub i: Option<i64>,
    #[arg(long, default_value_t = 4)]
    pub rmax: u32,
    #[arg(long)]
    pub subset_size: Option<usize>,
    /// Moment spec for `moments`.
    #[arg(long, default_value = "0:1")]
    pub moment: MomentSpec,
    #[arg(long)]
    pub json: Option<PathBuf>,
}
