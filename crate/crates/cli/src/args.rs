use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use discos_core::truncation::RangeRule;
use discos_core::{AlphaRule, FilterKind, FilterSpec};

use crate::error::{CliError, CliResult};

/// Filtered Fourier-cosine inversion of discrete characteristic functions.
#[derive(Debug, Parser)]
#[command(name = "discos", version, about, max_term_width = 100)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Filtered CDF of a univariate model at chosen points.
    Cdf(CdfArgs),
    /// Point masses recovered from CDF differences around support points.
    Pmf(PmfArgs),
    /// Raw moments E[X^q] from the cosine expansion.
    Moment(MomentArgs),
    /// Filtered bivariate CDF of a discrete2d model.
    Cdf2d(Cdf2dArgs),
    /// Sweep |K1| against its bound on an interior grid of (0, 2π).
    Bounds(BoundsArgs),
    /// |K1(x)| and its bound along a list of K at one point.
    Trace(TraceArgs),
    /// CDF and PMF of the Hawkes count N_T at integer counts.
    Hawkes(AppArgs),
    /// CDF (and PMF on integer lattices) of a (generalized) Poisson-binomial model.
    Gpb(GpbArgs),
    /// Exact or Monte Carlo reference values for cdf, pmf or moment queries.
    Oracle(OracleArgs),
    /// Error of the filtered CDF or moment against the exact value along a list of K.
    Convergence(ConvergenceArgs),
}

/// Filter selection shared by every command that filters a series.
#[derive(Debug, Clone, Args)]
pub struct FilterArgs {
    /// Spectral filter: lanczos, rcos, srcos, exp or none.
    #[arg(long, default_value = "rcos")]
    pub filter: String,

    /// Exponential filter strength: a positive number, `eps` (-ln ε) or `k2` (ln K²).
    #[arg(long)]
    pub alpha: Option<String>,

    /// Exponential filter order (even, at least 2).
    #[arg(long = "exp-order")]
    pub exp_order: Option<u32>,
}

impl FilterArgs {
    pub fn resolve(&self) -> CliResult<FilterSpec> {
        let base: FilterSpec = self.filter.parse()?;
        if base.kind() != FilterKind::Exponential {
            if self.alpha.is_some() || self.exp_order.is_some() {
                return Err(CliError::Validation(format!(
                    "--alpha/--exp-order only apply to --filter exp, got --filter {}",
                    self.filter
                )));
            }
            return Ok(base);
        }
        let alpha = match &self.alpha {
            Some(s) => s.parse::<AlphaRule>()?,
            None => AlphaRule::MachineEps,
        };
        Ok(FilterSpec::exponential(self.exp_order.unwrap_or(2), alpha)?)
    }
}

/// Model, truncation and series length for univariate inversions.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Model document (JSON).
    #[arg(long, visible_alias = "charfn", visible_alias = "config")]
    pub model: PathBuf,

    /// Truncation rule: explicit:a,b | chebyshev:tol | hawkes[:sigmas[,pad]] | support[:pad].
    /// Defaults to the model's stored range, else support, else hawkes.
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,

    /// Lower end of an explicit range (use with --b).
    #[arg(long, allow_hyphen_values = true, value_parser = real)]
    pub a: Option<f64>,

    /// Upper end of an explicit range (use with --a).
    #[arg(long, allow_hyphen_values = true, value_parser = real)]
    pub b: Option<f64>,

    /// RK4 steps for the Hawkes transform ODEs.
    #[arg(long, default_value_t = discos_core::models::DEFAULT_STEPS)]
    pub steps: usize,
}

impl ModelArgs {
    /// The explicit range or rule given on the command line, if any.
    pub fn range_rule(&self) -> CliResult<Option<RangeRule>> {
        match (self.a, self.b, &self.range) {
            (Some(_), Some(_), Some(_)) => Err(CliError::Validation(
                "--a/--b and --range are mutually exclusive".into(),
            )),
            (Some(a), Some(b), None) => Ok(Some(RangeRule::Explicit { a, b })),
            (Some(_), None, _) | (None, Some(_), _) => {
                Err(CliError::Validation("--a and --b must be given together".into()))
            }
            (None, None, Some(r)) => Ok(Some(r.parse()?)),
            (None, None, None) => Ok(None),
        }
    }
}

/// Output destination.
#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write CSV here instead of standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// Evaluation points.
#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    /// Evaluation points, comma separated; accepts multiples of π (0.6pi, pi/4).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = real)]
    pub at: Vec<f64>,

    /// Evaluate on n evenly spaced interior points of the range instead of --at.
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CdfArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Number of cosine terms.
    #[arg(short = 'K', default_value_t = 128)]
    pub k: usize,
    #[command(flatten)]
    pub filter: FilterArgs,
    #[command(flatten)]
    pub points: PointArgs,
    /// Clip to [0, 1] and make monotone (raw series values otherwise).
    #[arg(long)]
    pub clamp: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PmfArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(short = 'K', default_value_t = 1024)]
    pub k: usize,
    #[command(flatten)]
    pub filter: FilterArgs,
    /// Support points, comma separated; defaults to the model's atoms, or the
    /// integers in the range for integer-valued models.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = real)]
    pub support: Vec<f64>,
    /// Half-width of the CDF difference; defaults to a quarter of the smallest gap.
    #[arg(long, value_parser = real)]
    pub dx: Option<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MomentArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(short = 'K', default_value_t = 1024)]
    pub k: usize,
    #[command(flatten)]
    pub filter: FilterArgs,
    /// Moment orders, comma separated.
    #[arg(short = 'q', long, value_delimiter = ',', default_value = "1")]
    pub q: Vec<u32>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct Cdf2dArgs {
    /// Bivariate model document (JSON, type discrete2d).
    #[arg(long, visible_alias = "charfn")]
    pub model: PathBuf,
    /// Cosine terms in the first coordinate.
    #[arg(long = "K1", default_value_t = 64)]
    pub k1: usize,
    /// Cosine terms in the second coordinate.
    #[arg(long = "K2", default_value_t = 64)]
    pub k2: usize,
    #[command(flatten)]
    pub filter: FilterArgs,
    /// Range of the first coordinate as a,b; defaults to the stored range or the padded support.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = real)]
    pub range1: Vec<f64>,
    /// Range of the second coordinate as a,b.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = real)]
    pub range2: Vec<f64>,
    /// First-coordinate evaluation points.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = real, required = true)]
    pub at1: Vec<f64>,
    /// Second-coordinate evaluation points; the output is the tensor grid.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = real, required = true)]
    pub at2: Vec<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub filter: FilterArgs,
    /// Series lengths, comma separated.
    #[arg(short = 'K', value_delimiter = ',', default_value = "16,32,64,128,256,512")]
    pub k: Vec<usize>,
    /// Number of evenly spaced interior points of (0, 2π).
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub filter: FilterArgs,
    #[arg(short = 'K', value_delimiter = ',', default_value = "16,32,64,128,256,512,1024")]
    pub k: Vec<usize>,
    /// Point in (0, 2π).
    #[arg(long, value_parser = real, default_value = "0.5")]
    pub at: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct AppArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(short = 'K', default_value_t = 1024)]
    pub k: usize,
    /// Spectral filter: lanczos, rcos, srcos, exp or none.
    #[arg(long, default_value = "srcos")]
    pub filter: String,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long = "exp-order")]
    pub exp_order: Option<u32>,
    /// PMF half-width.
    #[arg(long, value_parser = real, default_value = "0.25")]
    pub dx: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

impl AppArgs {
    pub fn filter(&self) -> CliResult<FilterSpec> {
        FilterArgs {
            filter: self.filter.clone(),
            alpha: self.alpha.clone(),
            exp_order: self.exp_order,
        }
        .resolve()
    }
}

#[derive(Debug, Args)]
pub struct GpbArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(short = 'K', default_value_t = 128)]
    pub k: usize,
    #[command(flatten)]
    pub filter: FilterArgs,
    /// Grid size for non-lattice models.
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    Cdf,
    Pmf,
    Moment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Mc,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Model document (JSON).
    #[arg(long, visible_alias = "charfn", visible_alias = "config")]
    pub model: PathBuf,
    #[arg(long, value_enum, default_value = "exact")]
    pub method: Method,
    #[arg(long, value_enum, default_value = "cdf")]
    pub quantity: Quantity,
    /// Points for cdf and pmf; pmf defaults to the exact support.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = real)]
    pub at: Vec<f64>,
    #[arg(short = 'q', long, value_delimiter = ',', default_value = "1")]
    pub q: Vec<u32>,
    /// Monte Carlo paths.
    #[arg(long, default_value_t = 1_000_000)]
    pub paths: usize,
    /// Monte Carlo seed.
    #[arg(long, default_value_t = 2025)]
    pub seed: u64,
    /// Merge tolerance for the GPB convolution.
    #[arg(long, default_value_t = 1e-9)]
    pub merge_tol: f64,
    /// RK4 steps for the Hawkes moment ODE.
    #[arg(long, default_value_t = discos_core::models::DEFAULT_STEPS)]
    pub steps: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(short = 'K', value_delimiter = ',', default_value = "16,32,64,128,256")]
    pub k: Vec<usize>,
    #[command(flatten)]
    pub filter: FilterArgs,
    #[arg(long, value_enum, default_value = "cdf")]
    pub quantity: Quantity,
    /// CDF evaluation points.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = real)]
    pub at: Vec<f64>,
    #[arg(short = 'q', long, value_delimiter = ',', default_value = "1")]
    pub q: Vec<u32>,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Parses reals, including multiples of π.
pub fn real(s: &str) -> Result<f64, String> {
    discos_core::parse_real(s).map_err(|_| format!("`{s}` is not a number (multiples of pi are allowed)"))
}
