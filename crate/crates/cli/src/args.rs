use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use massdiff_core::IsolatedPolicy;

#[derive(Debug, Parser)]
#[command(
    name = "massdiff",
    version,
    about = "Mass-diffusion recommendation on bipartite graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-user top-k lists from N rounds of diffusion (JSON lines).
    Recommend(RecommendArgs),
    /// Global ranking by object degree (one JSON line).
    Grm(GrmArgs),
    /// Stationary pair and subdominant eigenvalue modulus.
    Spectrum(SpectrumArgs),
    /// Smallest N with max |Wᴺ − W*| ≤ tol.
    Converge(ConvergeArgs),
    /// Invariant checks on the operator and its limit (JSON lines).
    VerifyLimit(InputArgs),
    /// Train/probe evaluation of N-round diffusion, the limit and the degree baseline.
    Eval(EvalArgs),
    /// Runs the built-in 3-object, 4-user network against its known values.
    PaperExample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Isolated {
    /// Zero-degree nodes are an input error.
    #[default]
    Reject,
    /// Zero-degree nodes are removed.
    Drop,
}

impl From<Isolated> for IsolatedPolicy {
    fn from(value: Isolated) -> Self {
        match value {
            Isolated::Reject => IsolatedPolicy::Reject,
            Isolated::Drop => IsolatedPolicy::Drop,
        }
    }
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Edge list, one `user<TAB>object` per line.
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub isolated: Isolated,
}

#[derive(Debug, Args)]
pub struct RecommendArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub rounds: u64,
    #[arg(long = "top-k", default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub top_k: u64,
    /// Restrict output to these user labels (repeatable). Default: all users.
    #[arg(long = "user")]
    pub users: Vec<String>,
    /// Worker threads for per-user scoring. Default: all cores.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
}

#[derive(Debug, Args)]
pub struct GrmArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long = "top-k", default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub top_k: u64,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Stop when successive eigenvalue estimates differ by at most this.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 5e-5)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Share of edges kept for training, in (0, 1].
    #[arg(long, default_value_t = 0.9)]
    pub fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub rounds: u64,
    #[arg(long = "top-k", default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub top_k: u64,
}
