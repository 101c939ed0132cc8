use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Probabilistic algebraic varieties: normalize polynomial densities, sample
/// varieties, and analyze point clouds.
///
/// Exit codes: 0 success, 1 runtime error, 2 invalid flags.
#[derive(Debug, Parser)]
#[command(name = "provar", version)]
pub struct Cli {
    /// Directory that relative output paths are written under [created if missing]
    #[arg(long, global = true, default_value = ".", value_name = "DIR")]
    pub out_dir: PathBuf,

    /// Random seed [unsigned 64-bit integer; defaults to $PROVAR_SEED, then 0]
    #[arg(long, global = true, env = "PROVAR_SEED", value_name = "U64")]
    pub seed: Option<u64>,

    /// Report progress on stderr
    #[arg(short, long, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a point cloud from a built-in variety or an implicit polynomial
    Sample(SampleArgs),
    /// Integrate a density over a box and report omega and 1/omega
    Normalize(NormalizeArgs),
    /// Check nonnegativity and normalization of a normalized density
    Validate(ValidateArgs),
    /// Build a polynomial approximation (Bernstein or truncated series)
    Approx(ApproxArgs),
    /// Mean and sample covariance of a point cloud
    Covariance(CovarianceArgs),
    /// Vietoris-Rips persistent homology of a point cloud
    Persist(PersistArgs),
    /// Fit an implicit polynomial and select its degree
    Fit(FitArgs),
    /// sample -> covariance -> persist -> fit, with SVG plots and a summary
    Pipeline(PipelineArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VarietyName {
    Torus,
    Sphere,
    Elliptic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Points exactly on the variety (built-ins only)
    Parametric,
    /// Rejection sampling of exp(-f^2 / (2 sigma^2)) in the bounding box
    Thickened,
}

#[derive(Debug, Clone, Args)]
pub struct VarietyArgs {
    /// Built-in variety
    #[arg(long, value_enum)]
    pub variety: Option<VarietyName>,

    /// Torus major radius R [R > r > 0]
    #[arg(
        long = "R",
        value_name = "R",
        default_value_t = 2.0,
        allow_hyphen_values = true
    )]
    pub major: f64,

    /// Torus minor radius or sphere radius r [r > 0; default 0.5 for the torus, 1 for the sphere]
    #[arg(long = "r", value_name = "r", allow_hyphen_values = true)]
    pub minor: Option<f64>,

    /// Sampling mode [parametric needs a built-in variety]
    #[arg(long, value_enum, default_value_t = Mode::Parametric)]
    pub mode: Mode,

    /// Thickening width for thickened mode [sigma > 0; default 0.05 x box diagonal]
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,

    /// Number of points [n >= 1]
    #[arg(long, default_value_t = 500)]
    pub n: usize,

    /// Proposal cap for thickened mode [cap >= 1; default 1000 x n]
    #[arg(long)]
    pub cap: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub variety: VarietyArgs,

    /// Implicit polynomial file in the text format, instead of --variety [needs --box, thickened mode]
    #[arg(long, value_name = "FILE", conflicts_with = "variety")]
    pub poly: Option<PathBuf>,

    /// Bounding box for --poly, "lo1,hi1;lo2,hi2;..." [lo < hi on every axis; one axis per variable]
    #[arg(long = "box", value_name = "BOX", allow_hyphen_values = true)]
    pub bbox: Option<String>,

    /// Output CSV; provenance is written next to it as <stem>.provenance.json
    #[arg(long, default_value = "cloud.csv", value_name = "FILE")]
    pub out: PathBuf,

    /// Also write an SVG projection onto the first two coordinates
    #[arg(long, value_name = "FILE")]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DensityArgs {
    /// Density: const:<c> | poly:<file> | exp:<rate> | gauss:<mean>,<sigma> |
    /// series-exp:<rate>,<K> | series-gauss:<mean>,<sigma>,<K>
    /// [rate > 0, sigma > 0, K >= 0; exp and gauss are one-dimensional]
    #[arg(long, value_name = "SPEC", allow_hyphen_values = true)]
    pub density: String,

    /// Integration box "lo1,hi1;lo2,hi2;..." [lo < hi; one axis per variable]
    #[arg(long = "box", value_name = "BOX", allow_hyphen_values = true)]
    pub bbox: String,

    /// Quadrature gl:<m> (tensor Gauss-Legendre) or mc:<N> (Monte Carlo) [m >= 1, N >= 1;
    /// default gl with enough nodes to be exact for polynomials]
    #[arg(long, value_name = "RULE")]
    pub quad: Option<String>,
}

#[derive(Debug, Args)]
pub struct NormalizeArgs {
    #[command(flatten)]
    pub density: DensityArgs,

    /// Write the probabilistic pair as JSON
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub density: DensityArgs,

    /// Use this omega instead of integrating [finite, nonzero, positive]
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,

    /// Grid points per axis for the nonnegativity check [grid >= 2]
    #[arg(long, default_value_t = 101)]
    pub grid: usize,

    /// Allowed |integral - 1| [tolerance > 0]
    #[arg(long, default_value_t = 1e-6, allow_hyphen_values = true)]
    pub tolerance: f64,

    /// Write the validation report as JSON
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ApproxMethod {
    /// Tensor Bernstein polynomial on [0,1]^n
    Bernstein,
    /// Truncated power series of a univariate density
    Series,
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    #[arg(long, value_enum, default_value_t = ApproxMethod::Bernstein)]
    pub method: ApproxMethod,

    /// Function for bernstein: abs:<a> | exp:<rate> | gauss:<mean>,<sigma> | const:<c> | poly:<file>;
    /// named functions act as a product over axes. Family for series: exp:<rate> |
    /// gauss:<mean>,<sigma> | coef:<c0>,<c1>,... | shift:<a> [rate > 0, sigma > 0]
    #[arg(long, value_name = "SPEC", allow_hyphen_values = true)]
    pub func: String,

    /// Bernstein degree per axis [N >= 1]
    #[arg(long, default_value_t = 16)]
    pub degree: usize,

    /// Number of variables for named Bernstein functions [nvars >= 1]
    #[arg(long, default_value_t = 1)]
    pub nvars: usize,

    /// Series truncation order K [K >= 0]
    #[arg(long, default_value_t = 10)]
    pub order: u32,

    /// Output polynomial in the text format
    #[arg(long, default_value = "approx.poly", value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CovarianceArgs {
    /// Input point cloud CSV [header x1,...,xn; at least 2 rows]
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,

    #[arg(long, default_value = "covariance.json", value_name = "FILE")]
    pub out: PathBuf,

    /// Also write a heatmap of the covariance matrix
    #[arg(long, value_name = "FILE")]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PersistOptions {
    /// Highest homology dimension [0, 1 or 2]
    #[arg(long)]
    pub maxdim: Option<usize>,

    /// Rips scale threshold [maxscale > 0; default 0.4 x cloud diameter]
    #[arg(long, allow_hyphen_values = true)]
    pub maxscale: Option<f64>,

    /// Bars longer than ratio x maxscale count as significant [0 < ratio < 1]
    #[arg(long, default_value_t = 0.2, allow_hyphen_values = true)]
    pub ratio: f64,

    /// Maximum number of simplices [budget >= 1]
    #[arg(long, default_value_t = provar_core::topology::DEFAULT_SIMPLEX_BUDGET)]
    pub budget: usize,
}

#[derive(Debug, Args)]
pub struct PersistArgs {
    /// Input point cloud CSV [at least 1 row]
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,

    #[command(flatten)]
    pub options: PersistOptions,

    #[arg(long, default_value = "persistence.json", value_name = "FILE")]
    pub out: PathBuf,

    /// Also write the persistence diagram as SVG
    #[arg(long, value_name = "FILE")]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FitOptions {
    /// Highest degree tried [maxdeg >= 1]
    #[arg(long, default_value_t = 5)]
    pub maxdeg: u32,

    /// Residual RMS accepted as a fit [threshold > 0; scale it with the noise level]
    #[arg(long, default_value_t = 1e-6, allow_hyphen_values = true)]
    pub threshold: f64,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Input point cloud CSV [at least as many rows as basis monomials]
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,

    #[command(flatten)]
    pub options: FitOptions,

    #[arg(long, default_value = "fit.json", value_name = "FILE")]
    pub out: PathBuf,

    /// Fitted polynomial in the text format
    #[arg(long, default_value = "fit.poly", value_name = "FILE")]
    pub poly_out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub variety: VarietyArgs,

    #[command(flatten)]
    pub persist: PersistOptions,

    #[command(flatten)]
    pub fit: FitOptions,
}
