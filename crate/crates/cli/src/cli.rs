//! Command-line flags. Every flag has a `LPCOCYCLE_*` environment override;
//! flags and environment win over the config file, which wins over defaults.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "lpcocycle",
    version,
    about = "Boundary measures and L^p cocycles on hyperbolic group models"
)]
pub struct Cli {
    #[command(flatten)]
    pub flags: Flags,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Default, clap::Args)]
pub struct Flags {
    /// JSON config file; unknown fields are rejected.
    #[arg(long, global = true, env = "LPCOCYCLE_CONFIG")]
    pub config: Option<PathBuf>,

    /// `F2`, `free-group:3`, `free-product:2,3`, `schottky`, or a JSON model object.
    #[arg(long, global = true, env = "LPCOCYCLE_MODEL")]
    pub model: Option<String>,

    /// Generators of a subgroup of the free group, comma separated.
    #[arg(long, global = true, env = "LPCOCYCLE_SUBGROUP", value_delimiter = ',')]
    pub subgroup: Option<Vec<String>>,

    #[arg(long, global = true, env = "LPCOCYCLE_EPSILON0")]
    pub epsilon0: Option<f64>,

    #[arg(long, global = true, env = "LPCOCYCLE_DEPTH")]
    pub depth: Option<usize>,

    /// Group element as a reduced word, e.g. `aB`.
    #[arg(
        short = 'g',
        long = "element",
        global = true,
        env = "LPCOCYCLE_ELEMENT",
        allow_hyphen_values = true
    )]
    pub element: Option<String>,

    #[arg(
        short = 'p',
        long = "exponent",
        global = true,
        env = "LPCOCYCLE_EXPONENT"
    )]
    pub p: Option<f64>,

    /// Powers `n` of the element, comma separated.
    #[arg(long, global = true, env = "LPCOCYCLE_POWERS", value_delimiter = ',')]
    pub powers: Option<Vec<u32>>,

    #[arg(long, global = true, env = "LPCOCYCLE_RADIUS")]
    pub radius: Option<usize>,

    #[arg(long, global = true, env = "LPCOCYCLE_OUT")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, env = "LPCOCYCLE_THREADS")]
    pub threads: Option<usize>,

    /// Seed for the sampling commands.
    #[arg(long, global = true, env = "LPCOCYCLE_SEED")]
    pub seed: Option<u64>,

    #[arg(long, global = true, env = "LPCOCYCLE_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,

    /// Fill the runtime_ms columns (outputs are then no longer reproducible).
    #[arg(long, global = true, env = "LPCOCYCLE_TIMINGS")]
    pub timings: bool,

    /// Print the effective config as JSON and exit.
    #[arg(long, global = true)]
    pub print_config: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Model summary: generators, exactness, known constants, sphere sizes.
    SpaceInfo,
    /// Four-point hyperbolicity constant of the ball of the given radius.
    Delta,
    /// Sphere and ball sizes up to the radius.
    Growth,
    /// Fitted growth rate of balls against the known value.
    CriticalExponent,
    /// Patterson-Sullivan masses of the cells of the given depth.
    PsMeasure,
    /// Radon-Nikodym formula check, for `-g` or every element of length ≤ 3.
    RnCheck,
    /// Bowen-Margulis invariance check, for `-g` or every element of length ≤ 3.
    BmInvariance,
    /// Kind, translation length and fixed points of `-g`.
    Classify,
    /// `‖β_g‖_p^p` for `-g`.
    CocycleNorm,
    /// `‖β_{gⁿ}‖_p^p` over `--powers`, with a linear fit and the block bound.
    GrowthExperiment,
    /// Eigenvalue `λ` of the cone action of `-g` at its attracting point.
    ConeLambda,
    /// Runs the full invariant suite; exits nonzero on any failure.
    VerifyAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SpaceInfo => "space-info",
            Command::Delta => "delta",
            Command::Growth => "growth",
            Command::CriticalExponent => "critical-exponent",
            Command::PsMeasure => "ps-measure",
            Command::RnCheck => "rn-check",
            Command::BmInvariance => "bm-invariance",
            Command::Classify => "classify",
            Command::CocycleNorm => "cocycle-norm",
            Command::GrowthExperiment => "growth-experiment",
            Command::ConeLambda => "cone-lambda",
            Command::VerifyAll => "verify-all",
        }
    }
}
