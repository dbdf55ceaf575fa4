use std::path::Path;

use gxtr_core::asymptotics::{
    eval_application, eval_mu, eval_norming, eval_storage, required_constants, storage_mapping, Application,
    ConstantKey, ConstantProvider, Evaluated, Query, StorageConstants, StorageOutput, StorageQuery, Variant,
};
use gxtr_core::constants::{
    estimate_pickands, estimate_pickands_piterbarg, estimate_piterbarg, ConstantEstimate, EstimatorOptions, Method,
    MixedOptions,
};
use gxtr_core::harness::{
    run_gumbel_experiment, run_tail_experiment, write_report, GumbelOptions, NormingSource, Region, ReportFormat,
};
use gxtr_core::model::{
    validate_local_expansion, weak_dependence_probe, Covariance, FbmMixture, FieldModel, GridSpec, RegimeParams,
    Variogram,
};
use gxtr_core::rng::RngStream;
use gxtr_core::simulate::{
    derive_shepp_field, sample_fbm, sample_fbm_mixture, sample_integrated_process, sample_stationary_path,
    sample_storage_path, write_field_binary, write_field_csv, write_path_binary, write_path_csv, StorageConfig,
};
use gxtr_core::{Error, Result};
use clap::ValueEnum;
use serde_json::{json, Value};

use crate::args::{
    AppKind, ConstantKind, CovKind, EstimateArgs, EvalArgs, GumbelArgs, ModelArgs, ModelKind, ProbeArgs, RegimeArgs,
    SimulateArgs, TailArgs,
};

/// Options shared by every subcommand.
pub struct Globals<'a> {
    pub seed: u64,
    pub out: Option<&'a Path>,
    pub format: Option<&'a str>,
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::Parameter(format!("--{flag} is required")))
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Data(e.to_string()))
}

impl RegimeArgs {
    fn is_empty(&self) -> bool {
        [self.alpha1, self.alpha2, self.beta, self.a1, self.a2, self.a3, self.b]
            .iter()
            .all(Option::is_none)
    }

    fn params(&self) -> Result<RegimeParams> {
        RegimeParams::new(
            need(self.alpha1, "alpha1")?,
            need(self.alpha2, "alpha2")?,
            need(self.beta, "beta")?,
            need(self.a1, "a1")?,
            need(self.a2, "a2")?,
            need(self.a3, "a3")?,
            need(self.b, "b")?,
        )
    }
}

fn covariance(m: &ModelArgs) -> Result<Covariance> {
    Ok(match need(m.cov, "cov")? {
        CovKind::Exp => Covariance::ExpAlpha {
            alpha: need(m.cov_alpha, "cov-alpha")?,
        },
        CovKind::Cauchy => Covariance::Cauchy {
            alpha: need(m.cov_alpha, "cov-alpha")?,
            beta: need(m.cov_beta, "cov-beta")?,
        },
        CovKind::Gauss => Covariance::Gauss,
        CovKind::Sech => Covariance::Sech,
    })
}

fn mixture(m: &ModelArgs) -> Result<FbmMixture> {
    if m.lambdas.is_empty() {
        return Err(Error::Parameter("--lambdas is required".into()));
    }
    FbmMixture::new(m.lambdas.clone(), m.hursts.clone())
}

impl ModelArgs {
    fn field_model(&self) -> Result<FieldModel> {
        let m = match need(self.model, "model")? {
            ModelKind::Fbm => FieldModel::StationaryIncrementVariogram(Variogram::Power {
                hurst: need(self.hurst, "hurst")?,
            }),
            ModelKind::FbmMixture => FieldModel::FbmMixture(mixture(self)?),
            ModelKind::Stationary => FieldModel::StationaryCovariance(covariance(self)?),
            ModelKind::Integrated => FieldModel::IntegratedStationary {
                r_zeta: covariance(self)?,
                n: need(self.n, "n")?,
            },
            ModelKind::Storage => FieldModel::Storage {
                hurst: need(self.hurst, "hurst")?,
                c: need(self.c, "c")?,
            },
        };
        m.validate()?;
        Ok(m)
    }
}

/// A `--constant` value before the key it names is resolved.
enum ConstantSpec {
    Key(ConstantKey),
    Mixed { two_sided: bool },
}

fn parse_constant(s: &str) -> Result<(ConstantSpec, f64)> {
    let bad = || Error::Parameter(format!("malformed --constant '{s}'"));
    let (key, value) = s.split_once('=').ok_or_else(bad)?;
    let value: f64 = value.trim().parse().map_err(|_| bad())?;
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::Parameter(format!("constant value must be positive, got {value}")));
    }
    let parts: Vec<&str> = key.trim().split(':').collect();
    let num = |i: usize| -> Result<f64> { parts.get(i).ok_or_else(bad)?.parse().map_err(|_| bad()) };
    let spec = match (parts[0], parts.len()) {
        ("pickands", 2) => ConstantSpec::Key(ConstantKey::Pickands { alpha: num(1)? }),
        ("piterbarg", 3) | ("piterbarg2", 3) => ConstantSpec::Key(ConstantKey::Piterbarg {
            alpha: num(1)?,
            b: num(2)?,
            two_sided: parts[0] == "piterbarg2",
        }),
        ("mixed", 1) => ConstantSpec::Mixed { two_sided: false },
        ("mixed2", 1) => ConstantSpec::Mixed { two_sided: true },
        _ => return Err(bad()),
    };
    Ok((spec, value))
}

/// Build a provider from `--constant` flags; `mixed` keys resolve against
/// `params`.
fn provider(specs: &[String], params: Option<&RegimeParams>) -> Result<ConstantProvider> {
    let mut cp = ConstantProvider::new();
    for s in specs {
        let (spec, value) = parse_constant(s)?;
        let key = match spec {
            ConstantSpec::Key(k) => k,
            ConstantSpec::Mixed { two_sided } => {
                let p = params.ok_or_else(|| {
                    Error::Parameter("a mixed constant needs local parameters to attach to".into())
                })?;
                ConstantKey::pickands_piterbarg(p, two_sided)
            }
        };
        cp.insert(key, value);
    }
    Ok(cp)
}

fn keys(ks: &[ConstantKey]) -> Value {
    Value::Array(ks.iter().map(|k| Value::String(k.to_string())).collect())
}

pub fn eval(a: &EvalArgs) -> Result<Value> {
    if a.u.is_none() && a.s.is_none() {
        return Err(Error::Parameter("give --u, --s or both".into()));
    }
    if let Some(u) = a.u {
        if !(u.is_finite() && u > 0.0) {
            return Err(Error::Parameter(format!("--u must be positive, got {u}")));
        }
    }
    if let Some(s) = a.s {
        if !(s.is_finite() && s > 1.0) {
            return Err(Error::Parameter(format!("--s must exceed 1, got {s}")));
        }
    }
    match a.app {
        AppKind::General => eval_general(a),
        AppKind::Storage => eval_storage_cmd(a),
        _ => eval_app(a),
    }
}

fn eval_general(a: &EvalArgs) -> Result<Value> {
    let p = a.regime.params()?;
    let variant = if a.two_sided { Variant::TwoSided } else { Variant::OneSided };
    let cp = provider(&a.constants, Some(&p))?;
    let mu = a.u.map(|u| eval_mu(&p, u, &cp, variant)).transpose()?;
    let norming = a.s.map(|s| eval_norming(s, &p, &cp, variant)).transpose()?;
    Ok(json!({
        "app": "general",
        "params": to_value(&p)?,
        "regime": p.regime().to_string(),
        "case": p.regime().case_label(),
        "variant": to_value(&variant)?,
        "required": keys(&required_constants(&p, variant)),
        "u": a.u,
        "mu": mu,
        "s": a.s,
        "norming": to_value(&norming)?,
    }))
}

fn application(a: &EvalArgs) -> Result<Application> {
    let r = &a.regime;
    Ok(match a.app {
        AppKind::StationaryShepp => Application::StationaryShepp {
            alpha1: need(r.alpha1, "alpha1")?,
            alpha2: need(r.alpha2, "alpha2")?,
            a1: need(r.a1, "a1")?,
            a2: need(r.a2, "a2")?,
        },
        AppKind::IncrementShepp => Application::IncrementShepp {
            alpha: need(a.alpha, "alpha")?,
            beta: need(r.beta, "beta")?,
            a: need(a.a, "a")?,
            b: need(a.b_inc, "b-inc")?,
        },
        AppKind::FbmMixture => Application::FbmMixtureShepp(mixture(&a.model)?),
        AppKind::Integrated => Application::IntegratedShepp {
            r_zeta: covariance(&a.model)?,
            n: need(a.model.n, "n")?,
            t: need(a.t, "t")?,
        },
        AppKind::General | AppKind::Storage => unreachable!("handled separately"),
    })
}

fn eval_app(a: &EvalArgs) -> Result<Value> {
    if a.two_sided {
        return Err(Error::Parameter("applications are one-sided; drop --two-sided".into()));
    }
    let app = application(a)?;
    let mapped = app.mapped_params()?;
    let cp = provider(&a.constants, Some(&mapped))?;
    let mu = match a.u {
        Some(u) => match eval_application(&app, Query::Tail { u }, &cp)?.value {
            Evaluated::Mu(m) => Some(m),
            Evaluated::Norming(_) => None,
        },
        None => None,
    };
    let norming = match a.s {
        Some(s) => match eval_application(&app, Query::Norming { s }, &cp)?.value {
            Evaluated::Norming(n) => Some(n),
            Evaluated::Mu(_) => None,
        },
        None => None,
    };
    Ok(json!({
        "app": a.app.to_possible_value().map(|v| v.get_name().to_string()),
        "params": to_value(&mapped)?,
        "regime": mapped.regime().to_string(),
        "case": mapped.regime().case_label(),
        "variant": to_value(&Variant::OneSided)?,
        "required": keys(&required_constants(&mapped, Variant::OneSided)),
        "u": a.u,
        "mu": mu,
        "s": a.s,
        "norming": to_value(&norming)?,
    }))
}

fn eval_storage_cmd(a: &EvalArgs) -> Result<Value> {
    let (h, c) = (need(a.model.hurst, "hurst")?, need(a.model.c, "c")?);
    let k = StorageConstants::new(h, c)?;
    let mapped = storage_mapping(h, c)?;
    let cp = provider(&a.constants, Some(&mapped))?;
    let mu = match a.u {
        Some(u) => match eval_storage(h, c, StorageQuery::Tail { u }, &cp)? {
            StorageOutput::Tail(m) => Some(m),
            _ => None,
        },
        None => None,
    };
    let norming = match a.s {
        Some(s) => match eval_storage(h, c, StorageQuery::Norming { s }, &cp)? {
            StorageOutput::Norming(n) => Some(n),
            _ => None,
        },
        None => None,
    };
    Ok(json!({
        "app": "storage",
        "storage": to_value(&k)?,
        "params": to_value(&mapped)?,
        "regime": mapped.regime().to_string(),
        "case": mapped.regime().case_label(),
        "variant": to_value(&Variant::TwoSided)?,
        "required": keys(&required_constants(&mapped, Variant::TwoSided)),
        "u": a.u,
        "mu": mu,
        "s": a.s,
        "norming": to_value(&norming)?,
    }))
}

pub fn estimate_constant(a: &EstimateArgs, g: &Globals) -> Result<Value> {
    let stream = RngStream::new(g.seed, 0);
    let method: Method = a.method.as_deref().unwrap_or("ratio").parse()?;
    let est: ConstantEstimate = match need(a.kind, "kind")? {
        ConstantKind::Mixed => {
            let p = a.regime.params()?;
            let d = MixedOptions::default();
            let opts = MixedOptions {
                s: a.s_window.unwrap_or(d.s),
                t: a.t.unwrap_or(d.t),
                d: a.d.unwrap_or(d.d),
                reps: a.reps.unwrap_or(d.reps),
                method,
            };
            estimate_pickands_piterbarg(&p, a.two_sided, &opts, &stream)?
        }
        kind => {
            if !a.regime.is_empty() {
                return Err(Error::Parameter("--alpha1 ... --b only apply to --kind mixed".into()));
            }
            let d = EstimatorOptions::default();
            let opts = EstimatorOptions {
                t: a.t.unwrap_or(d.t),
                a: a.a.unwrap_or(d.a),
                reps: a.reps.unwrap_or(d.reps),
                levels: a.levels.unwrap_or(d.levels),
                method,
                ..d
            };
            let alpha = need(a.alpha, "alpha")?;
            if kind == ConstantKind::Pickands {
                if a.two_sided || a.drift.is_some() {
                    return Err(Error::Parameter("--drift and --two-sided only apply to piterbarg".into()));
                }
                estimate_pickands(alpha, &opts, &stream)?
            } else {
                estimate_piterbarg(alpha, need(a.drift, "drift")?, a.two_sided, &opts, &stream)?
            }
        }
    };
    let v = to_value(&est)?;
    if let Some(out) = g.out {
        write_json(out, &v)?;
    }
    Ok(v)
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut body = gxtr_core::harness::canonical_json(v)?;
    body.push('\n');
    std::fs::write(path, body).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn simulate(a: &SimulateArgs, g: &Globals) -> Result<Value> {
    let out = g
        .out
        .ok_or_else(|| Error::Parameter("simulate needs --out".into()))?;
    let binary = match g.format.unwrap_or("bin") {
        "bin" => true,
        "csv" => false,
        f => return Err(Error::Parameter(format!("unknown dump format '{f}' (bin | csv)"))),
    };
    let model = a.model.field_model()?;
    let step = a.step.unwrap_or(0.01);
    let stream = RngStream::new(g.seed, 0).substream(a.substream);
    let field = match (a.field_s, a.field_t) {
        (Some(s), Some(t)) => Some((s, t)),
        (None, None) => None,
        _ => return Err(Error::Parameter("--field-s and --field-t go together".into())),
    };
    let extent = match (field, a.extent) {
        (Some((s, t)), None) => s + t,
        (None, Some(e)) => e,
        (Some(_), Some(_)) => return Err(Error::Parameter("--extent is implied by --field-s + --field-t".into())),
        (None, None) => return Err(Error::Parameter("--extent is required".into())),
    };
    let path = match &model {
        FieldModel::Storage { hurst, c } => {
            if field.is_some() {
                return Err(Error::UnsupportedModel("the storage workload is not a Shepp field".into()));
            }
            let cfg = StorageConfig {
                step,
                ..StorageConfig::default()
            };
            sample_storage_path(*hurst, *c, extent, &stream, cfg)?
        }
        m => {
            let grid = GridSpec::covering(extent, step)?;
            match m {
                FieldModel::StationaryIncrementVariogram(Variogram::Power { hurst }) => {
                    sample_fbm(*hurst, grid, &stream)?
                }
                FieldModel::FbmMixture(mix) => sample_fbm_mixture(mix.lambdas(), mix.hursts(), grid, &stream)?,
                FieldModel::StationaryCovariance(r) => sample_stationary_path(r, grid, &stream)?,
                FieldModel::IntegratedStationary { r_zeta, n } => {
                    sample_integrated_process(r_zeta, *n, grid, &stream)?
                }
                _ => return Err(Error::UnsupportedModel(model.id())),
            }
        }
    };
    let (kind, values) = match field {
        Some((s, t)) => {
            let f = derive_shepp_field(&path, s, t)?;
            if binary {
                write_field_binary(out, &f)?;
            } else {
                write_field_csv(out, &f)?;
            }
            ("field", f.values)
        }
        None => {
            if binary {
                write_path_binary(out, &path)?;
            } else {
                write_path_csv(out, &path)?;
            }
            ("path", path.values)
        }
    };
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(json!({
        "model": model.id(),
        "kind": kind,
        "step": step,
        "count": values.len(),
        "min": min,
        "max": max,
        "out": out.display().to_string(),
        "format": if binary { "bin" } else { "csv" },
        "seed": g.seed,
        "substream": a.substream,
    }))
}

fn report_format(g: &Globals) -> Result<ReportFormat> {
    g.format.unwrap_or("json").parse()
}

pub fn tail(a: &TailArgs, g: &Globals) -> Result<Value> {
    let model = a.model.field_model()?;
    let t = a.t.unwrap_or(1.0);
    let region = Region {
        s: need(a.s, "s")?,
        t,
        step: a.step.unwrap_or(0.05),
    };
    let p = model.shepp_local_params(t).ok();
    let cp = provider(&a.constants, p.as_ref())?;
    let format = report_format(g)?;
    let rep = run_tail_experiment(
        &model,
        &region,
        need(a.u, "u")?,
        a.reps.unwrap_or(10_000),
        &cp,
        &RngStream::new(g.seed, 0),
    )?;
    if let Some(out) = g.out {
        write_report(&rep, out, format)?;
    }
    to_value(&rep)
}

pub fn gumbel(a: &GumbelArgs, g: &Globals) -> Result<Value> {
    let model = a.model.field_model()?;
    let t = a.t.unwrap_or(1.0);
    if a.ladder.is_empty() {
        return Err(Error::Parameter("--ladder is required".into()));
    }
    let d = GumbelOptions::default();
    let norming = match a.norming.as_deref().unwrap_or("fitted") {
        "fitted" => NormingSource::FittedConstant {
            reps: a.constant_reps.unwrap_or(20_000),
        },
        "theory" => {
            if a.constant_reps.is_some() {
                return Err(Error::Parameter("--constant-reps only applies to --norming fitted".into()));
            }
            NormingSource::Theory
        }
        s => return Err(Error::Parameter(format!("unknown norming source '{s}' (fitted | theory)"))),
    };
    let opts = GumbelOptions {
        reps_per_s: a.reps.unwrap_or(d.reps_per_s),
        norming,
        max_step: a.max_step.unwrap_or(d.max_step),
        d0: a.d0.unwrap_or(d.d0),
        b_shift: a.b_shift,
    };
    let p = model.shepp_local_params(t).ok();
    let cp = provider(&a.constants, p.as_ref())?;
    let format = report_format(g)?;
    let rep = run_gumbel_experiment(&model, &a.ladder, t, &opts, &cp, &RngStream::new(g.seed, 0))?;
    if let Some(out) = g.out {
        write_report(&rep, out, format)?;
    }
    to_value(&rep)
}

pub fn probe(a: &ProbeArgs, g: &Globals) -> Result<Value> {
    let model = a.model.field_model()?;
    let t = a.t.unwrap_or(1.0);
    let p = model.shepp_local_params(t)?;
    let scales = if a.scales.is_empty() { vec![1e-2, 1e-3, 1e-4] } else { a.scales.clone() };
    let lags = if a.lags.is_empty() { vec![10.0, 100.0, 1000.0] } else { a.lags.clone() };
    let expansion = validate_local_expansion(&model, &p, t, &scales)?;
    let dependence = weak_dependence_probe(&model, &p, &lags, a.s_window.unwrap_or(1.0), t)?;
    let v = json!({
        "model": model.id(),
        "t": t,
        "params": to_value(&p)?,
        "regime": p.regime().to_string(),
        "case": p.regime().case_label(),
        "local_expansion": to_value(&expansion)?,
        "weak_dependence": dependence
            .iter()
            .map(|(v, x)| json!({"lag": v, "scaled_max_correlation": x}))
            .collect::<Vec<_>>(),
    });
    if let Some(out) = g.out {
        write_json(out, &v)?;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_flags_parse() {
        let (s, v) = parse_constant("piterbarg2:2:0.5=1.9").unwrap();
        assert_eq!(v, 1.9);
        assert!(matches!(
            s,
            ConstantSpec::Key(ConstantKey::Piterbarg { alpha, b, two_sided: true }) if alpha == 2.0 && b == 0.5
        ));
        assert!(matches!(parse_constant("mixed=1").unwrap().0, ConstantSpec::Mixed { two_sided: false }));
        for bad in ["pickands=1", "pickands:x=1", "mixed=-1", "nope:1=2", "pickands:1"] {
            assert!(parse_constant(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn mixed_constant_needs_params() {
        assert!(provider(&["mixed=1.2".into()], None).is_err());
        let p = RegimeParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let cp = provider(&["mixed=1.2".into()], Some(&p)).unwrap();
        assert_eq!(cp.get(&ConstantKey::pickands_piterbarg(&p, false)).unwrap(), 1.2);
    }
}
