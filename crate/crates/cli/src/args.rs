use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "sneak", version, about = "Threshold secret sharing over networks: runs, bounds, oracles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the dissemination protocol and/or the disjoint-path baseline.
    Run(RunArgs),
    /// Evaluate communication and randomness bounds for a graph.
    Bounds(BoundsArgs),
    /// Exhaustively check secrecy and recovery on a small instance.
    Verify(VerifyArgs),
    /// Sweep a family over sizes and emit a growth table as CSV.
    Scaling(ScalingArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Toy,
    Fig9,
    Star,
    Layered,
    Window,
    Random,
    Geometric,
    Regular,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    Sneak,
    Sota,
    Both,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FallbackArg {
    None,
    Naive,
    Dealer,
    Local,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorruptionArg {
    Offset,
    Zero,
    Random,
}

/// Where the network comes from.
#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    /// Graph file (`n k_hint directed|undirected` header, then `u v` edges).
    #[arg(long, conflicts_with = "gen")]
    pub graph: Option<PathBuf>,
    /// Generated family.
    #[arg(long, value_enum)]
    pub gen: Option<Family>,
    /// Participant count for generated families.
    #[arg(long)]
    pub n: Option<usize>,
    /// In-degree of generated nodes; defaults to d + 2t.
    #[arg(long)]
    pub m: Option<usize>,
    /// Extra window slack for the window family.
    #[arg(long, default_value_t = 2)]
    pub a: usize,
    /// Dealer degree for the regular family.
    #[arg(long)]
    pub b: Option<usize>,
    /// Layer sizes for the layered family.
    #[arg(long, value_delimiter = ',')]
    pub layers: Vec<usize>,
    /// Positions for the geometric family; the first is the dealer.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub positions: Vec<f64>,
    #[arg(long)]
    pub radius: Option<f64>,
    /// Generate directed arcs where the family allows it.
    #[arg(long)]
    pub directed: bool,
    /// Seed for graph generation; defaults to the run seed.
    #[arg(long)]
    pub graph_seed: Option<u64>,
}

/// Sharing parameters.
#[derive(Args, Debug, Clone)]
pub struct ParamArgs {
    /// Recovery threshold; defaults to the graph file's hint.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub d: usize,
    /// Collusion threshold; defaults to k - 1.
    #[arg(long)]
    pub ell: Option<usize>,
    /// Tolerated adversaries.
    #[arg(long, default_value_t = 0)]
    pub t: usize,
    /// Field modulus; defaults to the smallest prime above n.
    #[arg(long)]
    pub q: Option<u64>,
    /// Keep the secret out of the upper-left block (needs d > k).
    #[arg(long)]
    pub degree_cap: bool,
    #[arg(long, env = "SNEAK_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value_t = Algo::Sneak)]
    pub algo: Algo,
    #[arg(long, value_enum, default_value_t = FallbackArg::None)]
    pub fallback: FallbackArg,
    /// Comma-separated adversarial participants.
    #[arg(long, value_delimiter = ',')]
    pub adversaries: Vec<usize>,
    #[arg(long, value_enum, default_value_t = CorruptionArg::Offset)]
    pub corruption: CorruptionArg,
    /// Comma-separated secret entries; drawn from the seed when absent.
    #[arg(long, value_delimiter = ',')]
    pub secret: Vec<u64>,
    /// Transcript CSV destination.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Report destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Largest colluding set checked; defaults to ell.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Largest number of protocol runs to enumerate.
    #[arg(long, default_value_t = 5_000_000)]
    pub max_enum: u128,
    #[arg(long, value_enum, default_value_t = Algo::Sneak)]
    pub algo: Algo,
    #[arg(long, value_enum, default_value_t = FallbackArg::None)]
    pub fallback: FallbackArg,
    /// Seeded instances for recovery when exhaustive checking is too big.
    #[arg(long, default_value_t = 200)]
    pub samples: u64,
    #[arg(long)]
    pub sequential: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScalingArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub a: usize,
    #[arg(long)]
    pub b: Option<usize>,
    #[arg(long)]
    pub directed: bool,
    #[arg(long, env = "SNEAK_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub sequential: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
