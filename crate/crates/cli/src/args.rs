use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Parser)]
#[command(
    name = "symbounds",
    version,
    about = "Tail bounds for conditionally symmetric martingales"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Evaluate one bound and print its report.
    Compute(ComputeArgs),
    /// Tabulate exponents or Freedman factors over a grid.
    Compare(CompareArgs),
    /// Estimate a tail probability by Monte Carlo and compare it to its bound.
    Simulate(SimulateArgs),
    /// Exact Cramér rates of an extremal law against its closed-form exponent.
    VerifyOptimality(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct ComputeArgs {
    /// Theorem number, 1 to 5.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
    pub theorem: u8,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub n: Option<u64>,
    /// Comma-separated even moments `mu2,mu4,...` (theorem 3).
    #[arg(long)]
    pub moments: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub d: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub z: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// `start:stop:step` over delta.
    #[arg(long, conflicts_with = "u_grid")]
    pub delta_grid: Option<String>,
    /// `start:stop:step` over `u = zd/r`.
    #[arg(long)]
    pub u_grid: Option<String>,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Construction {
    /// Three-point symmetric increments, unit weights.
    Extremal,
    /// Two-point increments with the divergence exponent, unit weights.
    Mcdiarmid,
    /// Three-point increments moved down by `--shift` (supermartingale).
    Shifted,
    /// Three-point increments with weights 1 after an up-jump, 0.5 otherwise.
    SignWeights,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Two,
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Event {
    /// Running extremum at level `alpha * n`.
    Tail,
    /// Reaching `z` while the quadratic variation is at most `r`.
    Freedman,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub construction: Construction,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub d: f64,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum, default_value_t = Side::Two)]
    pub side: Side,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; the output does not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, default_value_t = -0.05, allow_negative_numbers = true)]
    pub shift: f64,
    #[arg(long, value_enum, default_value_t = Event::Tail)]
    pub event: Event,
    #[arg(long, allow_negative_numbers = true)]
    pub z: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    #[arg(long)]
    pub max_horizon: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LawArg {
    Symmetric,
    Mcdiarmid,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: f64,
    /// Comma-separated horizons.
    #[arg(long)]
    pub n_list: String,
    #[arg(long, value_enum, default_value_t = LawArg::Symmetric)]
    pub law: LawArg,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
