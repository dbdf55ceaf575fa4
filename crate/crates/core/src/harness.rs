//! Monte Carlo experiments comparing simulated field maxima with the tail
//! asymptotics and the Gumbel limit, plus report serialization.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::asymptotics::{
    eval_application, eval_mu, eval_norming, eval_storage, Application, ConstantProvider, Evaluated, NormingPair,
    Query, StorageOutput, StorageQuery, Variant,
};
use crate::constants::{
    estimate_pickands, estimate_pickands_piterbarg, estimate_piterbarg, ConstantKey, EstimatorOptions,
    MixedOptions,
};
use crate::error::{Error, Result};
use crate::model::{FieldModel, GridSpec, RegimeParams, Variogram};
use crate::par;
use crate::rng::RngStream;
use crate::simulate::{
    shepp_supremum_indices, FbmMethod, FbmSampler, IntegratedSampler, MixtureSampler, StationarySampler,
    StorageConfig, StorageSampler,
};
use crate::special::gumbel_cdf;

/// One-sample Kolmogorov-Smirnov distance between the empirical law of
/// `sample` and `cdf`.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::param("KS distance of an empty sample"));
    }
    if let Some(x) = sample.iter().find(|x| !x.is_finite()) {
        return Err(Error::Data(format!("non-finite sample entry {x}")));
    }
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    Ok(xs.iter().enumerate().fold(0.0, |d: f64, (i, &x)| {
        let f = cdf(x);
        d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
    }))
}

/// Two-sample Kolmogorov-Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::param("KS distance of an empty sample"));
    }
    if let Some(x) = a.iter().chain(b).find(|x| !x.is_finite()) {
        return Err(Error::Data(format!("non-finite sample entry {x}")));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Wilson score interval at normal quantile `z`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    // the endpoints are exactly 0 and 1 at the boundary counts
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes as f64 == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

const Z95: f64 = 1.959_963_984_540_054;

/// The index set `[0, S] x [0, T]` on a lattice of step `step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Region {
    pub s: f64,
    pub t: f64,
    pub step: f64,
}

impl Region {
    fn extents(&self) -> Result<(usize, usize)> {
        if !(self.s >= 0.0 && self.t > 0.0 && self.step > 0.0) {
            return Err(Error::param("region needs S >= 0, T > 0 and step > 0"));
        }
        let ns = (self.s / self.step).round();
        let nt = (self.t / self.step).round();
        let tol = 1e-9 * self.s.max(self.t);
        if (ns * self.step - self.s).abs() > tol || (nt * self.step - self.t).abs() > tol {
            return Err(Error::param(format!(
                "S = {} and T = {} must be multiples of the step {}",
                self.s, self.t, self.step
            )));
        }
        Ok((ns as usize, nt as usize))
    }
}

/// Sampler of the input process on `0, h, ..., (count - 1) h`.
enum PathSource {
    Stationary(StationarySampler),
    Fbm(FbmSampler),
    Mixture(MixtureSampler),
    Integrated(IntegratedSampler),
}

impl PathSource {
    fn new(model: &FieldModel, grid: GridSpec) -> Result<Self> {
        model.validate()?;
        Ok(match model {
            FieldModel::StationaryCovariance(r) => PathSource::Stationary(StationarySampler::new(r, grid)?),
            FieldModel::StationaryIncrementVariogram(Variogram::Power { hurst }) => {
                PathSource::Fbm(FbmSampler::new(*hurst, grid, FbmMethod::Auto)?)
            }
            FieldModel::FbmMixture(m) => PathSource::Mixture(MixtureSampler::new(m, grid)?),
            FieldModel::IntegratedStationary { r_zeta, n } => {
                PathSource::Integrated(IntegratedSampler::new(r_zeta, *n, grid)?)
            }
            FieldModel::StationaryIncrementVariogram(Variogram::Custom { name, .. }) => {
                return Err(Error::UnsupportedModel(format!("no path sampler for variogram '{name}'")))
            }
            FieldModel::Storage { .. } => {
                return Err(Error::UnsupportedModel("the storage workload is not a Shepp field".into()))
            }
        })
    }

    fn sample_into(&self, stream: &RngStream, out: &mut [f64]) {
        match self {
            PathSource::Stationary(s) => s.sample_into(&mut stream.rng(), out),
            PathSource::Fbm(s) => s.sample_into(&mut stream.rng(), out),
            PathSource::Mixture(s) => s.sample_into(stream, out),
            PathSource::Integrated(s) => s.sample_into(&mut stream.rng(), out),
        }
    }
}

/// The closed form used as theory for the Shepp field of `model` on
/// `[0, S] x [0, T]`: the application formula where one applies, otherwise
/// the general evaluator on the local parameters.
fn shepp_theory(model: &FieldModel, t: f64) -> Result<(Option<Application>, RegimeParams)> {
    let app = match model {
        FieldModel::IntegratedStationary { r_zeta, n } => Some(Application::IntegratedShepp {
            r_zeta: r_zeta.clone(),
            n: *n,
            t,
        }),
        FieldModel::FbmMixture(m) if t == 1.0 && (m.variance(1.0) - 1.0).abs() < 1e-12 => {
            Some(Application::FbmMixtureShepp(m.clone()))
        }
        _ => None,
    };
    let params = match &app {
        Some(a) => a.mapped_params()?,
        None => model.shepp_local_params(t)?,
    };
    Ok((app, params))
}

fn theory_mu(app: &Option<Application>, p: &RegimeParams, u: f64, cp: &ConstantProvider) -> Result<f64> {
    match app {
        Some(a) => match eval_application(a, Query::Tail { u }, cp)?.value {
            Evaluated::Mu(m) => Ok(m),
            Evaluated::Norming(_) => unreachable!("tail query"),
        },
        None => eval_mu(p, u, cp, Variant::OneSided),
    }
}

fn theory_norming(app: &Option<Application>, p: &RegimeParams, s: f64, cp: &ConstantProvider) -> Result<NormingPair> {
    match app {
        Some(a) => match eval_application(a, Query::Norming { s }, cp)?.value {
            Evaluated::Norming(n) => Ok(n),
            Evaluated::Mu(_) => unreachable!("norming query"),
        },
        None => eval_norming(s, p, cp, Variant::OneSided),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailExperimentReport {
    pub model: String,
    pub u: f64,
    pub s: f64,
    pub t: f64,
    pub grid_step: f64,
    /// Standard deviation the maxima were divided by (`sigma_X(T)` for Shepp
    /// fields, 1 for the storage workload).
    pub normalization: f64,
    pub replications: u64,
    pub exceedances: u64,
    pub empirical_prob: f64,
    pub empirical_ci95: (f64, f64),
    /// `S mu(u)`.
    pub theory_prob: f64,
    pub ratio: f64,
    pub seed: RngStream,
}

/// Maxima of the normalised Shepp field (or of the storage workload) over
/// `region`, one per replication.
pub fn simulate_maxima(
    model: &FieldModel,
    region: &Region,
    reps: u64,
    stream: &RngStream,
) -> Result<(Vec<f64>, f64)> {
    let (ns, nt) = region.extents()?;
    if let FieldModel::Storage { hurst, c } = model {
        model.validate()?;
        let cfg = StorageConfig {
            step: region.step,
            ..StorageConfig::default()
        };
        let sampler = StorageSampler::new(*hurst, *c, region.s, cfg)?;
        let maxima = par::replicate(reps, |r| {
            let p = sampler.sample(&stream.substream(r));
            p.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        });
        return Ok((maxima, 1.0));
    }
    let sigma = model.increment_variance(region.t)?.sqrt();
    if !(sigma > 0.0) {
        return Err(Error::model("Shepp field has zero variance at T"));
    }
    let grid = GridSpec::new(0.0, region.step, ns + nt + 1)?;
    let src = PathSource::new(model, grid)?;
    let maxima = par::replicate(reps, |r| {
        let mut x = vec![0.0; grid.count];
        src.sample_into(&stream.substream(r), &mut x);
        shepp_supremum_indices(&x, ns, nt) / sigma
    });
    Ok((maxima, sigma))
}

/// Estimate `P(sup Z / sigma_X(T) > u)` over `region` and compare it with
/// `S mu(u)`.
pub fn run_tail_experiment(
    model: &FieldModel,
    region: &Region,
    u: f64,
    reps: u64,
    cp: &ConstantProvider,
    stream: &RngStream,
) -> Result<TailExperimentReport> {
    if reps == 0 {
        return Err(Error::param("tail experiment needs at least one replication"));
    }
    let mu = match model {
        FieldModel::Storage { hurst, c } => match eval_storage(*hurst, *c, StorageQuery::Tail { u }, cp)? {
            StorageOutput::Tail(x) => x,
            _ => unreachable!("tail query"),
        },
        _ => {
            let (app, p) = shepp_theory(model, region.t)?;
            theory_mu(&app, &p, u, cp)?
        }
    };
    let theory = region.s * mu;
    let expected = reps as f64 * theory;
    if expected < 20.0 {
        log::warn!("expected exceedance count {expected:.1} < 20 at u = {u}; the ratio will be noisy");
    }
    let (maxima, sigma) = simulate_maxima(model, region, reps, stream)?;
    let hits = maxima.iter().filter(|&&m| m > u).count() as u64;
    let p = hits as f64 / reps as f64;
    Ok(TailExperimentReport {
        model: model.id(),
        u,
        s: region.s,
        t: region.t,
        grid_step: region.step,
        normalization: sigma,
        replications: reps,
        exceedances: hits,
        empirical_prob: p,
        empirical_ci95: wilson_interval(hits, reps, Z95),
        theory_prob: theory,
        ratio: p / theory,
        seed: *stream,
    })
}

/// Where the constants of the norming come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormingSource {
    /// The provider as given.
    Theory,
    /// Re-estimate the required constants for each `S` on the lattice the
    /// field is simulated on, rescaled to the limit field (`d = h a_S^2`
    /// for `alpha = 1`), and inject them.
    FittedConstant { reps: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GumbelOptions {
    pub reps_per_s: u64,
    pub norming: NormingSource,
    /// Largest lattice step.
    pub max_step: f64,
    /// Step in units of the level scale: `h = min(max_step, d0 a_S^(-2/alpha))`.
    pub d0: f64,
    /// Added to `b_S` (fault injection).
    pub b_shift: f64,
}

impl Default for GumbelOptions {
    fn default() -> Self {
        Self {
            reps_per_s: 2000,
            norming: NormingSource::FittedConstant { reps: 20_000 },
            max_step: 0.01,
            d0: 0.1,
            b_shift: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl Summary {
    fn of(xs: &[f64]) -> Self {
        let mut v = xs.to_vec();
        v.sort_by(f64::total_cmp);
        let (mean, se) = par::mean_and_se(&v);
        let n = v.len();
        let median = if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) };
        Self {
            mean,
            sd: se * (n as f64).sqrt(),
            min: v[0],
            median,
            max: v[n - 1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GumbelRow {
    pub s: f64,
    pub replications: u64,
    pub grid_step: f64,
    pub a_s: f64,
    pub b_s: f64,
    pub constants: Vec<(ConstantKey, f64)>,
    pub normalized: Summary,
    pub ks: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GumbelExperimentReport {
    pub model: String,
    pub t: f64,
    pub s_ladder: Vec<f64>,
    /// The lattice-step rule, e.g. `h = T / ceil(T / min(0.01, 0.1 a_S^-2))`.
    pub grid_rule: String,
    pub norming_source: String,
    pub b_shift: f64,
    pub rows: Vec<GumbelRow>,
    pub seed: RngStream,
}

impl GumbelExperimentReport {
    pub fn ks(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.ks).collect()
    }
}

/// Lattice step for level `a_S`: `min(max_step, d0 a_S^(-2/alpha))`, shrunk
/// so that it divides `T`.
pub fn gumbel_step(a_s: f64, alpha: f64, t: f64, max_step: f64, d0: f64) -> f64 {
    let h = max_step.min(d0 * a_s.powf(-2.0 / alpha));
    t / (t / h).ceil()
}

fn fitted_constants(
    p: &RegimeParams,
    keys: &[ConstantKey],
    d: f64,
    reps: u64,
    stream: &RngStream,
) -> Result<Vec<(ConstantKey, f64)>> {
    keys.iter()
        .enumerate()
        .map(|(i, key)| {
            let st = stream.child(i as u64 + 1);
            let one_d = EstimatorOptions {
                a: d,
                reps,
                levels: 1,
                ..EstimatorOptions::default()
            };
            let v = match *key {
                ConstantKey::Pickands { alpha } => estimate_pickands(alpha, &one_d, &st)?.value,
                ConstantKey::Piterbarg { alpha, b, two_sided } => {
                    estimate_piterbarg(alpha, b, two_sided, &one_d, &st)?.value
                }
                ConstantKey::PickandsPiterbarg { two_sided, .. } => {
                    let opts = MixedOptions {
                        d,
                        reps,
                        ..MixedOptions::default()
                    };
                    estimate_pickands_piterbarg(p, two_sided, &opts, &st)?.value
                }
            };
            Ok((*key, v))
        })
        .collect()
}

/// For each `S`, simulate maxima of the normalised Shepp field on
/// `[0, S] x [0, T]` and measure the KS distance of `a_S (max - b_S)` to the
/// Gumbel law.
pub fn run_gumbel_experiment(
    model: &FieldModel,
    s_ladder: &[f64],
    t: f64,
    opts: &GumbelOptions,
    cp: &ConstantProvider,
    stream: &RngStream,
) -> Result<GumbelExperimentReport> {
    if s_ladder.is_empty() || s_ladder.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("S ladder must be non-empty and strictly increasing"));
    }
    if opts.reps_per_s < 100 {
        return Err(Error::param("need at least 100 replications per S"));
    }
    if matches!(model, FieldModel::Storage { .. }) {
        return Err(Error::UnsupportedModel(
            "Gumbel experiments are defined for Shepp fields".into(),
        ));
    }
    let (app, p) = shepp_theory(model, t)?;
    let alpha = p.alpha1().min(p.alpha2());
    let keys = crate::asymptotics::required_constants(&p, Variant::OneSided);
    let mut rows = Vec::with_capacity(s_ladder.len());
    for (k, &s) in s_ladder.iter().enumerate() {
        let a_guess = (2.0 * s.ln()).sqrt();
        let h = gumbel_step(a_guess, alpha, t, opts.max_step, opts.d0);
        let mut cp_s = cp.clone();
        let mut constants = Vec::new();
        if let NormingSource::FittedConstant { reps } = opts.norming {
            let d = h * a_guess.powf(2.0 / alpha);
            constants = fitted_constants(&p, &keys, d, reps, &stream.child(1000 + k as u64))?;
            for &(key, v) in &constants {
                cp_s.insert(key, v);
            }
        } else {
            for key in &keys {
                constants.push((*key, cp_s.get(key)?));
            }
        }
        let norming = theory_norming(&app, &p, s, &cp_s)?;
        let b = norming.b_s + opts.b_shift;
        // S is rounded up to the lattice
        let s_grid = (s / h).ceil() * h;
        let region = Region { s: s_grid, t, step: h };
        let (maxima, _) = simulate_maxima(model, &region, opts.reps_per_s, &stream.child(k as u64 + 1))?;
        let z: Vec<f64> = maxima.iter().map(|m| norming.a_s * (m - b)).collect();
        rows.push(GumbelRow {
            s,
            replications: opts.reps_per_s,
            grid_step: h,
            a_s: norming.a_s,
            b_s: b,
            constants,
            normalized: Summary::of(&z),
            ks: ks_statistic(&z, gumbel_cdf)?,
        });
    }
    Ok(GumbelExperimentReport {
        model: model.id(),
        t,
        s_ladder: s_ladder.to_vec(),
        grid_rule: format!(
            "h = T / ceil(T / min({}, {} * (2 ln S)^(-1/alpha))), alpha = {alpha}",
            opts.max_step, opts.d0
        ),
        norming_source: match opts.norming {
            NormingSource::Theory => "theory".into(),
            NormingSource::FittedConstant { reps } => format!("fitted_constant(reps={reps})"),
        },
        b_shift: opts.b_shift,
        rows,
        seed: *stream,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(Error::param(format!("unknown report format '{s}' (json or csv)"))),
        }
    }
}

/// Canonical JSON: sorted keys, floats as `{:.16e}` (17 significant
/// digits, exact round trip), no whitespace.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Data(e.to_string()))?;
    let mut out = String::new();
    write_value(&v, &mut out);
    Ok(out)
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().expect("f64");
                let _ = write!(out, "{x:.16e}");
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(x, out);
            }
            out.push(']');
        }
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_value(&m[k], out);
            }
            out.push('}');
        }
    }
}

/// Reports that can be written by [`write_report`].
pub trait Report: Serialize {
    /// CSV header and rows, in a fixed column order.
    fn csv(&self) -> String;
}

impl Report for TailExperimentReport {
    /// Columns: model, u, s, t, grid_step, normalization, replications,
    /// exceedances, empirical_prob, ci95_low, ci95_high, theory_prob, ratio,
    /// master_seed, substream.
    fn csv(&self) -> String {
        format!(
            "model,u,s,t,grid_step,normalization,replications,exceedances,empirical_prob,ci95_low,ci95_high,theory_prob,ratio,master_seed,substream\n\
             {},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}\n",
            self.model,
            self.u,
            self.s,
            self.t,
            self.grid_step,
            self.normalization,
            self.replications,
            self.exceedances,
            self.empirical_prob,
            self.empirical_ci95.0,
            self.empirical_ci95.1,
            self.theory_prob,
            self.ratio,
            self.seed.master_seed,
            self.seed.substream_index
        )
    }
}

impl Report for GumbelExperimentReport {
    /// Columns: model, t, s, replications, grid_step, a_s, b_s, mean, sd,
    /// min, median, max, ks, master_seed, substream.
    fn csv(&self) -> String {
        let mut out = String::from("model,t,s,replications,grid_step,a_s,b_s,mean,sd,min,median,max,ks,master_seed,substream\n");
        for r in &self.rows {
            let n = &r.normalized;
            let _ = writeln!(
                out,
                "{},{:.16e},{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
                self.model,
                self.t,
                r.s,
                r.replications,
                r.grid_step,
                r.a_s,
                r.b_s,
                n.mean,
                n.sd,
                n.min,
                n.median,
                n.max,
                r.ks,
                self.seed.master_seed,
                self.seed.substream_index
            );
        }
        out
    }
}

pub fn write_report<R: Report>(report: &R, path: &Path, format: ReportFormat) -> Result<()> {
    let body = match format {
        ReportFormat::Json => {
            let mut s = canonical_json(report)?;
            s.push('\n');
            s
        }
        ReportFormat::Csv => report.csv(),
    };
    std::fs::write(path, body).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
