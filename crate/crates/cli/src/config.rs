use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Beta-distance covariance estimators, tests and diagnostics.
#[derive(Debug, Clone, Parser)]
#[command(name = "dcov", version)]
pub struct RunConfig {
    /// Worker threads. Defaults to DCOV_THREADS, else one per core.
    #[arg(long, global = true, env = "DCOV_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Estimate the distance covariance of a sample or a finite joint law.
    Dcov(DcovArgs),
    /// Permutation test of independence.
    Test(TestArgs),
    /// Consistency sweep against the exact value of a finite joint law.
    Converge(ConvergeArgs),
    /// Heavy-tail diagnostic for one block of columns (heuristic).
    Diag(DiagArgs),
    /// Classify the finiteness of each definition from moment flags (JSON).
    Classify(ClassifyArgs),
    /// Normalizing constants of the integral representations.
    Constants(ConstantsArgs),
    /// Run the built-in showcases and report pass/fail.
    Demo(DemoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    D1,
    Centered,
    Charfn,
    Charrv,
    Hm,
    Beta2,
    Exact,
}

impl MethodArg {
    pub fn name(self) -> &'static str {
        match self {
            MethodArg::D1 => "d1",
            MethodArg::Centered => "centered",
            MethodArg::Charfn => "charfn",
            MethodArg::Charrv => "charrv",
            MethodArg::Hm => "hm",
            MethodArg::Beta2 => "beta2",
            MethodArg::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DefinitionArg {
    D1,
    D2,
    D3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Compressed,
    Centered,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    /// CSV file with a header row; `-` or absent reads standard input.
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    /// X columns: comma-separated names, an index `i`, or a range `a:b`.
    #[arg(long, short = 'x', default_value = "0")]
    pub x: String,
    /// Y columns, same syntax as --x.
    #[arg(long, short = 'y', default_value = "1")]
    pub y: String,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub beta: f64,
}

/// Quadrature grid overrides. Unset fields take the method's default:
/// a fine grid for `charfn` and a coarse one for `charrv`, whose Monte
/// Carlo error dominates the quadrature error.
#[derive(Debug, Clone, Args)]
pub struct QuadArgs {
    /// Log-spaced quadrature panels per decade [charfn 8, charrv 4].
    #[arg(long)]
    pub grid_panels: Option<usize>,
    /// Gauss-Legendre points per panel [charfn 16, charrv 8].
    #[arg(long)]
    pub quad_points: Option<usize>,
    /// Inner cutoff [charfn 1e-6, charrv 1e-4].
    #[arg(long)]
    pub quad_eps: Option<f64>,
    /// Outer cutoff [charfn 1e3, charrv 1e2].
    #[arg(long)]
    pub quad_tmax: Option<f64>,
    /// Relative tolerance for the quadrature error estimate [1e-3].
    #[arg(long)]
    pub quad_tol: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct DcovArgs {
    #[command(flatten)]
    pub sample: SampleArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Centered)]
    pub method: MethodArg,
    /// Treat the input as a finite joint law with x*, y* and prob columns.
    #[arg(long)]
    pub joint: bool,
    /// Which exact form to evaluate with --method exact.
    #[arg(long, value_enum, default_value_t = DefinitionArg::D3)]
    pub definition: DefinitionArg,
    /// Seed for stochastic methods (required for charrv).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Gaussian projection draws for charrv.
    #[arg(long, default_value_t = 200)]
    pub draws: usize,
    /// Truncation level for hm; defaults to 1e6 times the largest squared distance.
    #[arg(long)]
    pub trunc_m: Option<f64>,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct TestArgs {
    #[command(flatten)]
    pub sample: SampleArgs,
    /// Number of permutations B.
    #[arg(long, short = 'B', default_value_t = 199)]
    pub permutations: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergeArgs {
    /// Joint law CSV with x*, y* and prob columns; `-` or absent reads standard input.
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub beta: f64,
    /// Strictly increasing sample sizes.
    #[arg(long, value_delimiter = ',', default_value = "100,1000,10000,100000")]
    pub sizes: Vec<usize>,
    /// Seeds, one replicate each.
    #[arg(long = "seeds", alias = "seed", value_delimiter = ',')]
    pub seeds: Vec<u64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Compressed)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct DiagArgs {
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    /// Columns forming the variable, same syntax as --x.
    #[arg(long, default_value = "0")]
    pub cols: String,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    /// JSON moment flags; `-` or absent reads standard input.
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct ConstantsArgs {
    /// Dimension.
    #[arg(long, default_value_t = 1)]
    pub ell: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct DemoArgs {
    /// `json` for a report, `csv` for a plain pass/fail table.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}
