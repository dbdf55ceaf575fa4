use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "gxtr",
    version,
    about = "Extremes of non-homogeneous Gaussian random fields",
    arg_required_else_help = true,
    args_override_self = true,
    allow_negative_numbers = true
)]
pub struct Cli {
    /// Also print the result as canonical JSON on stdout
    #[arg(long, global = true)]
    pub json: bool,

    /// Number of worker threads for replications (results do not depend on it)
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,

    /// Master seed (falls back to GXTR_SEED, then 0)
    #[arg(long, global = true, env = "GXTR_SEED", value_name = "U64")]
    pub seed: Option<u64>,

    /// Flat TOML file of flag values (keys are long flag names); flags on
    /// the command line override it
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<std::path::PathBuf>,

    /// Write the result to this file
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<std::path::PathBuf>,

    /// Output file format: json or csv (reports), bin or csv (simulate)
    #[arg(long, global = true, value_name = "FORMAT")]
    pub format: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the tail asymptotics mu(u) and the Gumbel norming (a_S, b_S)
    Eval(EvalArgs),
    /// Monte Carlo estimate of a Pickands, Piterbarg or mixed constant
    EstimateConstant(EstimateArgs),
    /// Simulate and dump an input path, a Shepp field or a storage path
    Simulate(SimulateArgs),
    /// Compare the simulated exceedance probability with S mu(u)
    Tail(TailArgs),
    /// Measure the KS distance of normalised field maxima to the Gumbel law
    Gumbel(GumbelArgs),
    /// Local-expansion and weak-dependence diagnostics for a model
    Probe(ProbeArgs),
}

/// Local structure of a field, as in `1 - r ~ |a1 s|^alpha1 + |a2 t - a3 s|^alpha2`
/// and `sigma(t) ~ 1 - b |t|^beta`.
#[derive(Debug, Args, Clone)]
pub struct RegimeArgs {
    /// Exponent alpha1 in (0, 2] (dimensionless)
    #[arg(long)]
    pub alpha1: Option<f64>,
    /// Exponent alpha2 in (0, 2] (dimensionless)
    #[arg(long)]
    pub alpha2: Option<f64>,
    /// Variance exponent beta > 0 (dimensionless); regime boundaries use exact equality
    #[arg(long)]
    pub beta: Option<f64>,
    /// Scale a1 > 0 (inverse time units)
    #[arg(long)]
    pub a1: Option<f64>,
    /// Scale a2 > 0 (inverse time units)
    #[arg(long)]
    pub a2: Option<f64>,
    /// Coupling a3 != 0 (inverse time units)
    #[arg(long)]
    pub a3: Option<f64>,
    /// Variance coefficient b > 0 (time^-beta)
    #[arg(long)]
    pub b: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AppKind {
    /// General field given by --alpha1 ... --b
    General,
    /// Shepp field of a stationary-increment input: --alpha --beta --a --b-inc
    IncrementShepp,
    /// Shepp field of a stationary input: --alpha1 --alpha2 --a1 --a2
    StationaryShepp,
    /// Shepp field of an fBm mixture on [0, S] x [0, 1]: --lambdas --hursts
    FbmMixture,
    /// Shepp field of an integrated stationary process: --cov --n --t
    Integrated,
    /// Storage workload with fBm input: --hurst --c
    Storage,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Which closed form to evaluate
    #[arg(long, value_enum, default_value = "general")]
    pub app: AppKind,
    #[command(flatten)]
    pub regime: RegimeArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Small-lag exponent alpha of an increment-Shepp input (dimensionless)
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Small-lag scale a of an increment-Shepp input (inverse time units)
    #[arg(long)]
    pub a: Option<f64>,
    /// Variance coefficient b of an increment-Shepp input (time^-beta)
    #[arg(long)]
    pub b_inc: Option<f64>,
    /// Horizon T of the integrated example (time units)
    #[arg(long)]
    pub t: Option<f64>,
    /// Level u at which to evaluate mu(u) (standard deviations)
    #[arg(long)]
    pub u: Option<f64>,
    /// Length S of the long side for the norming (time units)
    #[arg(long)]
    pub s: Option<f64>,
    /// Use the two-sided variant (interior variance maximum)
    #[arg(long)]
    pub two_sided: bool,
    /// Injected constant, e.g. pickands:1.5=0.8, piterbarg:2:1=1.2,
    /// piterbarg2:2:1=1.9, mixed=1.3, mixed2=1.8 (repeatable)
    #[arg(long = "constant", value_name = "KEY=VALUE")]
    pub constants: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstantKind {
    Pickands,
    Piterbarg,
    /// Pickands-Piterbarg constant of the field given by --alpha1 ... --b
    Mixed,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Which constant to estimate
    #[arg(long, value_enum)]
    pub kind: Option<ConstantKind>,
    /// Exponent alpha in (0, 2] (dimensionless)
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Drift coefficient b > 0 of the Piterbarg constant (dimensionless)
    #[arg(long = "drift")]
    pub drift: Option<f64>,
    #[command(flatten)]
    pub regime: RegimeArgs,
    /// Two-sided window [-T, T]
    #[arg(long)]
    pub two_sided: bool,
    /// Window length T (limit-field time units); default 8
    #[arg(long)]
    pub t: Option<f64>,
    /// Coarsest lattice step a (limit-field time units); default 0.005
    #[arg(long)]
    pub a: Option<f64>,
    /// Number of ladder levels a, a/2, ...; default 3
    #[arg(long)]
    pub levels: Option<usize>,
    /// Replications; default 1e5 (20000 for mixed)
    #[arg(long)]
    pub reps: Option<u64>,
    /// Estimator: ratio (default) or window
    #[arg(long)]
    pub method: Option<String>,
    /// Half-width L of the s window for the mixed constant (limit-field units); default 12
    #[arg(long)]
    pub s_window: Option<f64>,
    /// Lattice step d of the mixed constant (limit-field units); default 0.1
    #[arg(long)]
    pub d: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    /// Fractional Brownian motion: --hurst
    Fbm,
    /// sum lambda_i B_{H_i}: --lambdas --hursts
    FbmMixture,
    /// Stationary process: --cov
    Stationary,
    /// sum of n integrated stationary processes: --cov --n
    Integrated,
    /// Storage workload with fBm input: --hurst --c
    Storage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CovKind {
    /// exp(-|t|^alpha): --cov-alpha
    Exp,
    /// (1 + |t|^alpha)^(-beta / alpha): --cov-alpha --cov-beta
    Cauchy,
    /// exp(-t^2)
    Gauss,
    /// 1 / cosh(t)
    Sech,
}

#[derive(Debug, Args, Clone)]
pub struct ModelArgs {
    /// Input process whose Shepp field (or storage workload) is studied
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// Hurst index H (dimensionless)
    #[arg(long)]
    pub hurst: Option<f64>,
    /// Mixture weights lambda_i, comma separated (dimensionless)
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Vec<f64>,
    /// Mixture Hurst indices, strictly increasing, comma separated
    #[arg(long, value_delimiter = ',')]
    pub hursts: Vec<f64>,
    /// Correlation function of the stationary input
    #[arg(long, value_enum)]
    pub cov: Option<CovKind>,
    /// Exponent of exp/cauchy correlations in (0, 2] (dimensionless)
    #[arg(long)]
    pub cov_alpha: Option<f64>,
    /// Decay exponent of the cauchy correlation > 0 (dimensionless)
    #[arg(long)]
    pub cov_beta: Option<f64>,
    /// Number of integrated components (count)
    #[arg(long)]
    pub n: Option<usize>,
    /// Service rate c > 0 of the storage workload (work per time unit)
    #[arg(long)]
    pub c: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Lattice step (time units); default 0.01
    #[arg(long)]
    pub step: Option<f64>,
    /// Path length: the path covers [0, extent] (time units)
    #[arg(long)]
    pub extent: Option<f64>,
    /// Dump the Shepp field on [0, S] x [0, T] instead of the path: S (time units)
    #[arg(long)]
    pub field_s: Option<f64>,
    /// Shepp field T (time units)
    #[arg(long)]
    pub field_t: Option<f64>,
    /// Substream index of the draw
    #[arg(long, default_value_t = 0)]
    pub substream: u64,
}

#[derive(Debug, Args)]
pub struct TailArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Long side S (time units)
    #[arg(long)]
    pub s: Option<f64>,
    /// Short side T (time units); default 1
    #[arg(long)]
    pub t: Option<f64>,
    /// Lattice step (time units); default 0.05
    #[arg(long)]
    pub step: Option<f64>,
    /// Level u (standard deviations of the field at T)
    #[arg(long)]
    pub u: Option<f64>,
    /// Replications; default 10000
    #[arg(long)]
    pub reps: Option<u64>,
    /// Injected constant, as for eval (repeatable)
    #[arg(long = "constant", value_name = "KEY=VALUE")]
    pub constants: Vec<String>,
}

#[derive(Debug, Args)]
pub struct GumbelArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Increasing S values, comma separated (time units)
    #[arg(long, value_delimiter = ',')]
    pub ladder: Vec<f64>,
    /// Short side T (time units); default 1
    #[arg(long)]
    pub t: Option<f64>,
    /// Replications per S; default 2000
    #[arg(long)]
    pub reps: Option<u64>,
    /// Constants for the norming: fitted (re-estimated per S, default) or theory
    #[arg(long)]
    pub norming: Option<String>,
    /// Replications of each fitted constant; default 20000
    #[arg(long)]
    pub constant_reps: Option<u64>,
    /// Largest lattice step (time units); default 0.01
    #[arg(long)]
    pub max_step: Option<f64>,
    /// Lattice step in level units, h = min(max_step, d0 a_S^(-2/alpha)); default 0.1
    #[arg(long)]
    pub d0: Option<f64>,
    /// Shift added to b_S (fault injection, standard deviations)
    #[arg(long, default_value_t = 0.0)]
    pub b_shift: f64,
    /// Injected constant, as for eval (repeatable)
    #[arg(long = "constant", value_name = "KEY=VALUE")]
    pub constants: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Short side T at which the field variance peaks (time units); default 1
    #[arg(long)]
    pub t: Option<f64>,
    /// Strictly decreasing probe scales for the local expansion (time units)
    #[arg(long, value_delimiter = ',')]
    pub scales: Vec<f64>,
    /// Lags v > 1 for the dependence probe (time units)
    #[arg(long, value_delimiter = ',')]
    pub lags: Vec<f64>,
    /// Width of the s window of the dependence probe (time units); default 1
    #[arg(long)]
    pub s_window: Option<f64>,
}
