use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use carlitz_core::galois_density::{Mode, ZARISKI_DEFAULT_SEED};
use carlitz_core::power_series::DEFAULT_ENUMERATION_BUDGET;

#[derive(Debug, Parser)]
#[command(
    name = "carlitz",
    version,
    about = "Image orders, densities and identity checks for Carlitz prolongations"
)]
pub struct Cli {
    /// Worker threads for enumeration (0 = one per core). Output does not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Field config file; overrides CARLITZ_CONFIG.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Image orders D(N) and density estimates of rho_[k].
    Density(DensityArgs),
    /// Image orders and densities of the d-th tensor power of the Carlitz module.
    Tensor(TensorArgs),
    /// Check the functional equations of the Anderson-Thakur function.
    OmegaVerify(OmegaArgs),
    /// Print rho_[k](a) mod t^n.
    Rep(RepArgs),
    /// Torsion level reached by the jet generators.
    TorsionLevel(TorsionArgs),
    /// Rank certificate excluding low-degree relations on the image.
    Zariski(ZariskiArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Brute,
    Formula,
    Both,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Brute => Mode::Brute,
            ModeArg::Formula => Mode::Formula,
            ModeArg::Both => Mode::Both,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Field order.
    #[arg(long)]
    pub q: u32,
    /// Largest level N.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=100_000))]
    pub nmax: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    pub mode: ModeArg,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Maximum number of units enumerated per level.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    pub budget: u128,
    /// Recorded in the JSON header; tables are deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    /// Prolongation order.
    #[arg(long)]
    pub k: usize,
    #[command(flatten)]
    pub table: TableArgs,
}

#[derive(Debug, Args)]
pub struct TensorArgs {
    /// Tensor power.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub d: u64,
    #[command(flatten)]
    pub table: TableArgs,
}

#[derive(Debug, Args)]
pub struct OmegaArgs {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub k: usize,
    /// Number of t-coefficients of omega.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=4096))]
    pub tprec: u64,
    /// Exclusive bound on the known u-exponents.
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..=1_000_000))]
    pub uprec: i64,
}

#[derive(Debug, Args)]
pub struct RepArgs {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub k: usize,
    /// Output precision: entries are given mod t^n.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=100_000))]
    pub n: u64,
    /// Unit as a series literal, e.g. "1+t+t^2" or "[1,1]+t".
    #[arg(long)]
    pub unit: String,
}

#[derive(Debug, Args)]
pub struct TorsionArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub k: u64,
}

#[derive(Debug, Args)]
pub struct ZariskiArgs {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub k: usize,
    /// Total degree bound in X_0..X_k.
    #[arg(long)]
    pub deg: usize,
    /// Degree bound of the coefficients in t.
    #[arg(long)]
    pub tdeg: usize,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=10_000))]
    pub n: u64,
    /// Seed for sampled unit sets.
    #[arg(long, default_value_t = ZARISKI_DEFAULT_SEED)]
    pub seed: u64,
}
