use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use frozen_edge::{EnsembleParams, Family, PolyWeight};

#[derive(Parser, Debug)]
#[command(name = "frozen-edge", version, about = "Hard-edge covariances of frozen Jacobi and Laguerre ensembles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Zeros of the orthogonal polynomial of degree N.
    Zeros(ZerosArgs),
    /// Inverse covariance, spectrum and covariance matrix at one N.
    Cov(CovArgs),
    /// Bessel-type limits of the edge covariances.
    Limit(LimitArgs),
    /// Scaled edge covariances along an N grid against their limit.
    Converge(ConvergeArgs),
    /// Metropolis check of the frozen covariance at finite coupling.
    Sample(SampleArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyArg {
    /// Jacobi ensemble in algebraic coordinates on [-1, 1].
    Jacobi,
    /// Jacobi ensemble in trigonometric coordinates.
    JacobiTrig,
    Laguerre,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct Ensemble {
    #[arg(long, value_enum, default_value = "jacobi")]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub nu: f64,
}

impl Ensemble {
    pub fn family(&self) -> Family {
        match self.family {
            FamilyArg::Jacobi => Family::JacobiAlgebraic,
            FamilyArg::JacobiTrig => Family::JacobiTrigonometric,
            FamilyArg::Laguerre => Family::Laguerre,
        }
    }

    pub fn weight(&self) -> frozen_edge::Result<PolyWeight> {
        match self.family {
            FamilyArg::Laguerre => PolyWeight::laguerre(self.nu),
            _ => PolyWeight::jacobi(self.alpha, self.beta),
        }
    }

    pub fn params(&self, n: usize) -> frozen_edge::Result<EnsembleParams> {
        EnsembleParams::new(self.family(), self.weight()?, n)
    }

    /// `alpha` for Jacobi, `nu` for Laguerre.
    pub fn limit_param(&self) -> f64 {
        match self.family {
            FamilyArg::Laguerre => self.nu,
            _ => self.alpha,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ZerosArgs {
    #[command(flatten)]
    pub ensemble: Ensemble,
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Args, Debug)]
pub struct CovArgs {
    #[command(flatten)]
    pub ensemble: Ensemble,
    #[arg(long)]
    pub n: usize,
    /// Exit 3 when the spectral and direct routes differ by more than this.
    #[arg(long, default_value_t = 1e-7)]
    pub route_tol: f64,
    #[command(flatten)]
    pub out: Output,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitMode {
    /// The limit for the chosen family.
    Cov,
    /// Algebraic over trigonometric Jacobi limit against 1/(4 j_r j_s).
    Ratio,
    /// Gram matrix of the first r-max limit functions.
    Gram,
}

#[derive(Args, Debug)]
pub struct LimitArgs {
    #[command(flatten)]
    pub ensemble: Ensemble,
    #[arg(long, value_enum, default_value = "cov")]
    pub kind: LimitMode,
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    #[arg(long, default_value_t = 1)]
    pub s: usize,
    #[arg(long, default_value_t = 6)]
    pub r_max: usize,
    /// Tolerance of the Gram identity and ratio checks.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Args, Debug)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub ensemble: Ensemble,
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    #[arg(long, default_value_t = 1)]
    pub s: usize,
    #[arg(long, value_delimiter = ',', default_values_t = frozen_edge::convergence::DEFAULT_GRID)]
    pub grid: Vec<usize>,
    /// Allowed growth of the error between successive grid points.
    #[arg(long, default_value_t = 0.0)]
    pub monotone_tol: f64,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[command(flatten)]
    pub ensemble: Ensemble,
    #[arg(long)]
    pub n: usize,
    /// kappa (Jacobi) or beta (Laguerre).
    #[arg(long, default_value_t = 1e4)]
    pub coupling: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 100_000)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 10)]
    pub thinning: usize,
    #[arg(long, default_value_t = 1.5)]
    pub proposal_scale: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent chains run in parallel (seeds seed, seed+1, ...).
    #[arg(long, default_value_t = 1)]
    pub chains: usize,
    #[arg(long, default_value_t = 0.1)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 0.02)]
    pub abs_tol: f64,
    /// Stream retained raw samples (single chain only) to this CSV file.
    #[arg(long)]
    pub samples_out: Option<PathBuf>,
    #[command(flatten)]
    pub out: Output,
}
