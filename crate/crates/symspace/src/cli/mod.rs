//! Command-line front end.
//!
//! Every command takes an explicit `--seed`, echoes its configuration in its
//! output (a `#` line in CSV, a `config` object in JSON) and is
//! byte-for-byte reproducible. Exit codes: 0 success, 1 usage error, 2 data
//! error, 3 verification failure.

mod commands;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{CliError, CliResult};

pub use commands::thread_pool;

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "SYMSPACE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "symspace", version, about = "Log-Gaussian densities, estimators and classifiers on symmetric spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw points from a distribution or model file.
    Sample(SampleArgs),
    /// Evaluate a distribution or model at points.
    Density(DensityArgs),
    /// Fit a kernel density estimate, tuning it by cross-validation if needed.
    Kde(KdeArgs),
    /// Fit a log-Gaussian mixture by EM.
    Em(EmArgs),
    /// Train and score a density-based classifier.
    Classify(ClassifyArgs),
    /// Distance or divergence between two distributions or samples.
    Metric(MetricArgs),
    /// Covariance descriptors of PGM images.
    Descriptor(DescriptorArgs),
    /// Check volume factors, charts and normalization numerically.
    Verify(VerifyArgs),
    /// Held-out likelihood study of four estimators on PD(2).
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Distribution or model JSON.
    #[arg(long)]
    pub params: PathBuf,
    /// Expected manifold of the distribution.
    #[arg(long)]
    pub manifold: Option<String>,
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    /// Distribution or model JSON.
    #[arg(long)]
    pub model: PathBuf,
    /// Points as dataset CSV.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub manifold: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct KdeArgs {
    /// Training points as dataset CSV.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub manifold: Option<String>,
    /// log-gaussian, euclidean-gaussian, wishart or inv-wishart.
    #[arg(long, default_value = "log-gaussian")]
    pub kernel: String,
    /// Fixed bandwidth for the Gaussian kernels.
    #[arg(long)]
    pub h: Option<f64>,
    /// Bandwidth candidates: `lo:hi:n` (log-spaced) or a comma list.
    #[arg(long)]
    pub h_grid: Option<String>,
    /// Fixed degrees of freedom for the Wishart kernels.
    #[arg(long)]
    pub dof: Option<f64>,
    /// Degrees-of-freedom candidates, same syntax as `--h-grid`.
    #[arg(long)]
    pub dof_grid: Option<String>,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct EmArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub manifold: Option<String>,
    /// Number of components; chosen by cross-validation up to `--k-max` when absent.
    #[arg(long = "K", alias = "k")]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 5)]
    pub k_max: usize,
    /// full or diagonal.
    #[arg(long, default_value = "full")]
    pub covariance: String,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub reg_floor: f64,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// gnb, gkc, lgnb or lgkc.
    #[arg(long)]
    pub kind: String,
    /// Labeled dataset CSV.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Separate test set; otherwise `--in` is split.
    #[arg(long)]
    pub test: Option<PathBuf>,
    #[arg(long)]
    pub manifold: Option<String>,
    /// Training share of each class when splitting.
    #[arg(long, default_value_t = 0.5)]
    pub fraction: f64,
    /// Number of random splits (split `r` uses seed + r).
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    /// Kernel bandwidth; cross-validated when absent.
    #[arg(long)]
    pub h: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricKind {
    Hellinger,
    Kl,
    L1,
    L2,
    Wasserstein,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CostKind {
    Geodesic,
    Tangent,
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    #[arg(long, value_enum)]
    pub kind: MetricKind,
    /// First distribution or model (the sampled one for Monte Carlo).
    #[arg(long)]
    pub p: Option<PathBuf>,
    #[arg(long)]
    pub q: Option<PathBuf>,
    /// Monte Carlo draws.
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    /// Point sets for the Wasserstein distance.
    #[arg(long)]
    pub xs: Option<PathBuf>,
    #[arg(long)]
    pub ys: Option<PathBuf>,
    /// Wasserstein order.
    #[arg(long, default_value_t = 1.0)]
    pub order: f64,
    #[arg(long, value_enum, default_value_t = CostKind::Geodesic)]
    pub cost: CostKind,
    #[arg(long, default_value_t = 500)]
    pub radial: usize,
    #[arg(long, default_value_t = 360)]
    pub angular: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct DescriptorArgs {
    /// PGM images (P2 or P5); one output row each.
    #[arg(long = "in", required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub label: usize,
    #[arg(long, default_value_t = 32)]
    pub grid: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub epsilon: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "pd:2")]
    pub manifold: String,
    #[arg(long, default_value_t = 100)]
    pub cases: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// wishart, invwishart or loggaussian.
    #[arg(long)]
    pub family: String,
    /// Comma-separated sweep values; the family default when absent.
    #[arg(long)]
    pub sweep: Option<String>,
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub replicates: usize,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, default_value_t = 5)]
    pub k_max: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub common: Common,
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Sample(a) => commands::sample(a),
        Command::Density(a) => commands::density(a),
        Command::Kde(a) => commands::kde(a),
        Command::Em(a) => commands::em(a),
        Command::Classify(a) => commands::classify(a),
        Command::Metric(a) => commands::metric(a),
        Command::Descriptor(a) => commands::descriptor(a),
        Command::Verify(a) => commands::verify(a),
        Command::Simulate(a) => commands::simulate(a),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub(crate) fn parse_manifold(s: &str) -> CliResult<symspace_core::manifolds::Manifold> {
    s.parse().map_err(|e| CliError::usage(format!("--manifold: {e}")))
}
