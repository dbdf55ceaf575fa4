//! Closed-form tail asymptotics `mu(u)` and Gumbel norming sequences.
//!
//! Every tail formula has the shape `mu(u) = K u^p Psi(u)`; the norming is
//! `a_S = sqrt(2 ln S)`, `omega_S = ln((2 pi)^(-1/2) K a_S^(p - 1))` and
//! `b_S = a_S + omega_S / a_S`. `mu` is returned without the leading `S`.

use std::f64::consts::PI;

use serde::Serialize;

pub use crate::constants::ConstantKey;
use crate::constants::{lookup_known_constant, ConstantEstimate};
use crate::error::{Error, Result};
use crate::model::{classify_regime, Covariance, FbmMixture, FieldModel, Regime, RegimeParams};
pub use crate::special::{gumbel_cdf, normal_tail};
use crate::special::gamma;

/// One-sided (`t` in `[0, T]`) or two-sided (interior maximum) variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    #[default]
    OneSided,
    TwoSided,
}

impl Variant {
    pub fn is_two_sided(&self) -> bool {
        matches!(self, Variant::TwoSided)
    }
}

/// Values of the constants required by the tail formulas. Injected values
/// take precedence; otherwise the known closed forms are used; anything
/// else is an error.
#[derive(Debug, Clone, Default)]
pub struct ConstantProvider {
    entries: Vec<(ConstantKey, f64)>,
}

impl ConstantProvider {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: ConstantKey, value: f64) -> &mut Self {
        if let Some(e) = self.entries.iter_mut().find(|e| e.0 == key) {
            e.1 = value;
        } else {
            self.entries.push((key, value));
        }
        self
    }

    pub fn with(mut self, key: ConstantKey, value: f64) -> Self {
        self.insert(key, value);
        self
    }

    pub fn insert_estimate(&mut self, e: &ConstantEstimate) -> &mut Self {
        self.insert(e.key, e.value)
    }

    pub fn get(&self, key: &ConstantKey) -> Result<f64> {
        self.entries
            .iter()
            .find(|e| e.0 == *key)
            .map(|e| e.1)
            .or_else(|| lookup_known_constant(key))
            .ok_or(Error::UnresolvedConstant(*key))
    }

    pub fn entries(&self) -> &[(ConstantKey, f64)] {
        &self.entries
    }
}

/// Centering and scaling for the Gumbel limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormingPair {
    pub a_s: f64,
    pub b_s: f64,
    pub omega_s: f64,
    pub regime: Regime,
    pub variant: Variant,
}

impl NormingPair {
    fn new(a_s: f64, omega_s: f64, regime: Regime, variant: Variant) -> Self {
        Self {
            a_s,
            b_s: a_s + omega_s / a_s,
            omega_s,
            regime,
            variant,
        }
    }
}

fn pickands(alpha: f64) -> ConstantKey {
    ConstantKey::Pickands { alpha }
}

fn piterbarg_key_iii(p: &RegimeParams, variant: Variant) -> ConstantKey {
    ConstantKey::Piterbarg {
        alpha: p.alpha2(),
        b: p.b() * p.a2().powf(-p.alpha2()),
        two_sided: variant.is_two_sided(),
    }
}

fn piterbarg_key_vi(p: &RegimeParams, variant: Variant) -> ConstantKey {
    ConstantKey::Piterbarg {
        alpha: p.alpha1(),
        b: p.b() * (p.a3().abs() / (p.a1() * p.a2())).powf(p.alpha1()),
        two_sided: variant.is_two_sided(),
    }
}

/// The constants the regime of `p` needs.
pub fn required_constants(p: &RegimeParams, variant: Variant) -> Vec<ConstantKey> {
    let mut keys = match classify_regime(p) {
        Regime::BetaDominates => vec![pickands(p.alpha1()), pickands(p.alpha2())],
        Regime::AllEqual => vec![ConstantKey::pickands_piterbarg(p, variant.is_two_sided())],
        Regime::BetaEqA2GtA1 => vec![piterbarg_key_iii(p, variant), pickands(p.alpha1())],
        Regime::BetaLtA2EqA1 | Regime::BetaLtA2A1LtA2 => vec![pickands(p.alpha1())],
        Regime::BetaEqA1GtA2 => vec![piterbarg_key_vi(p, variant), pickands(p.alpha2())],
        Regime::BetaLtA1A2LtA1 => vec![pickands(p.alpha2())],
    };
    keys.dedup();
    keys
}

/// `(K, p)` with `mu(u) = K u^p Psi(u)`.
pub fn mu_coefficients(p: &RegimeParams, cp: &ConstantProvider, variant: Variant) -> Result<(f64, f64)> {
    let (a1, a2, a3, b) = (p.a1(), p.a2(), p.a3(), p.b());
    let (al1, al2, be) = (p.alpha1(), p.alpha2(), p.beta());
    let h = |alpha: f64| cp.get(&pickands(alpha));
    Ok(match classify_regime(p) {
        Regime::BetaDominates => {
            let g = gamma(1.0 / be + 1.0) * if variant.is_two_sided() { 2.0 } else { 1.0 };
            let k = g * a1 * h(al1)? * a2 * h(al2)? * b.powf(-1.0 / be);
            (k, 2.0 / al1 + 2.0 / al2 - 2.0 / be)
        }
        Regime::AllEqual => (
            cp.get(&ConstantKey::pickands_piterbarg(p, variant.is_two_sided()))?,
            2.0 / al1,
        ),
        Regime::BetaEqA2GtA1 => (a1 * a2 * cp.get(&piterbarg_key_iii(p, variant))? * h(al1)?, 2.0 / al1),
        Regime::BetaLtA2EqA1 => ((a1.powf(al1) + a3.abs().powf(al1)).powf(1.0 / al1) * h(al1)?, 2.0 / al1),
        Regime::BetaLtA2A1LtA2 => (a1 * h(al1)?, 2.0 / al1),
        Regime::BetaEqA1GtA2 => (a1 * cp.get(&piterbarg_key_vi(p, variant))? * h(al2)?, 2.0 / al2),
        Regime::BetaLtA1A2LtA1 => (a3.abs() * h(al2)?, 2.0 / al2),
    })
}

/// `mu(u)` for the regime of `p`, without the leading `S`.
pub fn eval_mu(p: &RegimeParams, u: f64, cp: &ConstantProvider, variant: Variant) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::param(format!("u must be positive, got {u}")));
    }
    let (k, pow) = mu_coefficients(p, cp, variant)?;
    Ok(k * u.powf(pow) * normal_tail(u))
}

fn a_s(s: f64) -> Result<f64> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::param(format!("S must exceed 1, got {s}")));
    }
    Ok((2.0 * s.ln()).sqrt())
}

fn omega(k: f64, pow: f64, a: f64) -> f64 {
    k.ln() - 0.5 * (2.0 * PI).ln() + (pow - 1.0) * a.ln()
}

pub fn eval_norming(s: f64, p: &RegimeParams, cp: &ConstantProvider, variant: Variant) -> Result<NormingPair> {
    let a = a_s(s)?;
    let (k, pow) = mu_coefficients(p, cp, variant)?;
    Ok(NormingPair::new(a, omega(k, pow, a), classify_regime(p), variant))
}

/// Applications whose tail and norming are stated in closed form.
#[derive(Debug, Clone)]
pub enum Application {
    /// Shepp field of a stationary input with `r(t) = r(T) + a1 |t - T|^alpha1`
    /// near `T`, `r(t) = 1 - a2 t^alpha2` near 0, normalised so that
    /// `2 (1 - r(T)) = 1`.
    StationaryShepp { alpha1: f64, alpha2: f64, a1: f64, a2: f64 },
    /// Shepp field of a stationary-increment input with
    /// `sigma_X(t) = 1 - b (T - t)^beta` and `sigma^2_X(t) = (a t)^alpha` at 0.
    IncrementShepp { alpha: f64, beta: f64, a: f64, b: f64 },
    /// Shepp field of `sum lambda_i B_{H_i}` on `[0, S] x [0, 1]`.
    FbmMixtureShepp(FbmMixture),
    /// Shepp field of `sum_{j<n} int_0^t zeta_j` on `[0, S] x [0, T]`,
    /// normalised by `sigma_X(T)`.
    IntegratedShepp { r_zeta: Covariance, n: usize, t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Query {
    Tail { u: f64 },
    Norming { s: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Evaluated {
    Mu(f64),
    Norming(NormingPair),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApplicationOutput {
    pub value: Evaluated,
    /// The general parameters the application reduces to.
    pub mapped: RegimeParams,
    pub required: Vec<ConstantKey>,
}

/// Parameters of a Shepp field with `sigma^2_X(t) ~ (a t)^alpha` at 0:
/// `a1 = a2 = a3 = 2^(-1/alpha) a`.
pub fn increment_shepp_params(alpha: f64, beta: f64, a: f64, b: f64) -> Result<RegimeParams> {
    let c = 2f64.powf(-1.0 / alpha) * a;
    RegimeParams::new(alpha, alpha, beta, c, c, c, b)
}

impl Application {
    pub fn mapped_params(&self) -> Result<RegimeParams> {
        match self {
            Application::StationaryShepp { alpha1, alpha2, a1, a2 } => {
                if !(*alpha2 < 2.0) {
                    return Err(Error::param("the small-lag exponent alpha2 must lie in (0, 2)"));
                }
                increment_shepp_params(*alpha2, *alpha1, (2.0 * a2).powf(1.0 / alpha2), *a1)
            }
            Application::IncrementShepp { alpha, beta, a, b } => increment_shepp_params(*alpha, *beta, *a, *b),
            Application::FbmMixtureShepp(m) => {
                let h = m.hursts()[0];
                let l1 = m.lambdas()[0];
                let b: f64 = m.lambdas().iter().zip(m.hursts()).map(|(l, h)| l * l * h).sum();
                increment_shepp_params(2.0 * h, 1.0, l1.powf(1.0 / h), b)
            }
            Application::IntegratedShepp { r_zeta, n, t } => {
                FieldModel::IntegratedStationary {
                    r_zeta: r_zeta.clone(),
                    n: *n,
                }
                .shepp_local_params(*t)
            }
        }
    }
}

/// Evaluate an application's closed form, also returning the general
/// parameters it maps to.
pub fn eval_application(app: &Application, q: Query, cp: &ConstantProvider) -> Result<ApplicationOutput> {
    let mapped = app.mapped_params()?;
    let required = required_constants(&mapped, Variant::OneSided);
    let value = match app {
        Application::StationaryShepp { alpha1, alpha2, a1, a2 } => match q {
            // only the norming is stated; the tail comes from the mapping
            Query::Tail { u } => Evaluated::Mu(eval_mu(&mapped, u, cp, Variant::OneSided)?),
            Query::Norming { s } => {
                let a = a_s(s)?;
                let ln_k = if alpha1 > alpha2 {
                    // H_2 as stated, not H_{alpha2}
                    let h = cp.get(&pickands(2.0))?;
                    let k = gamma(1.0 / alpha1 + 1.0) * h * h * a2.powf(2.0 / alpha2) * a1.powf(-1.0 / alpha1);
                    k.ln() + (4.0 / alpha2 - 2.0 / alpha1 - 1.0) * a.ln()
                } else if alpha1 == alpha2 {
                    let m = cp.get(&ConstantKey::pickands_piterbarg(&mapped, false))?;
                    m.ln() + (2.0 / alpha2 - 1.0) * a.ln()
                } else {
                    let k = (2.0 * a2).powf(1.0 / alpha2) * cp.get(&pickands(*alpha2))?;
                    k.ln() + (2.0 / alpha2 - 1.0) * a.ln()
                };
                Evaluated::Norming(NormingPair::new(
                    a,
                    ln_k - 0.5 * (2.0 * PI).ln(),
                    mapped.regime(),
                    Variant::OneSided,
                ))
            }
        },
        Application::IncrementShepp { alpha, beta, a, b } => {
            let (k, pow) = if alpha < beta {
                let h = cp.get(&pickands(*alpha))?;
                (
                    2f64.powf(-2.0 / alpha) * gamma(1.0 / beta + 1.0) * a * a * h * h * b.powf(-1.0 / beta),
                    4.0 / alpha - 2.0 / beta,
                )
            } else if alpha == beta {
                (cp.get(&ConstantKey::pickands_piterbarg(&mapped, false))?, 2.0 / alpha)
            } else {
                (a * cp.get(&pickands(*alpha))?, 2.0 / alpha)
            };
            closed_form(k, pow, q, &mapped)?
        }
        Application::FbmMixtureShepp(m) => {
            let h = m.hursts()[0];
            let l1 = m.lambdas()[0];
            let sum_lh: f64 = m.lambdas().iter().zip(m.hursts()).map(|(l, h)| l * l * h).sum();
            if h < 0.5 {
                let hc = cp.get(&pickands(2.0 * h))?;
                let k = 2f64.powf(-1.0 / h) * hc * hc * l1.powf(2.0 / h) / sum_lh;
                match q {
                    Query::Tail { u } => Evaluated::Mu(k * u.powf(2.0 / h - 2.0) * normal_tail(u)),
                    Query::Norming { s } => {
                        let a = a_s(s)?;
                        let w = (1.0 / h - 1.5) * s.ln().ln()
                            + (2f64.powf(-1.5) * 2f64.powf(1.0 / h) * k / (2.0 * PI).sqrt()).ln();
                        Evaluated::Norming(NormingPair::new(a, w, mapped.regime(), Variant::OneSided))
                    }
                }
            } else if h == 0.5 {
                let mc = cp.get(&ConstantKey::pickands_piterbarg(&mapped, false))?;
                match q {
                    Query::Tail { u } => Evaluated::Mu(mc * u * u * normal_tail(u)),
                    Query::Norming { s } => {
                        let a = a_s(s)?;
                        let w = 0.5 * s.ln().ln() + (mc / PI.sqrt()).ln();
                        Evaluated::Norming(NormingPair::new(a, w, mapped.regime(), Variant::OneSided))
                    }
                }
            } else {
                let hc = cp.get(&pickands(2.0 * h))?;
                let k = l1.powf(1.0 / h) * hc;
                match q {
                    Query::Tail { u } => Evaluated::Mu(k * u.powf(1.0 / h) * normal_tail(u)),
                    Query::Norming { s } => {
                        let a = a_s(s)?;
                        let e = 1.0 / (2.0 * h) - 0.5;
                        let w = e * s.ln().ln() + (2f64.powf(e) * k / (2.0 * PI).sqrt()).ln();
                        Evaluated::Norming(NormingPair::new(a, w, mapped.regime(), Variant::OneSided))
                    }
                }
            }
        }
        Application::IntegratedShepp { .. } => {
            // sqrt(n) / sigma_X(T) is carried by the mapped a1 = 2^(-1/2) a
            let a = mapped.a1() * 2f64.sqrt();
            match q {
                Query::Tail { u } => Evaluated::Mu(a / PI.sqrt() * u * normal_tail(u)),
                Query::Norming { s } => {
                    let a_s = a_s(s)?;
                    let w = (2f64.powf(-0.5) * a / PI).ln();
                    Evaluated::Norming(NormingPair::new(a_s, w, mapped.regime(), Variant::OneSided))
                }
            }
        }
    };
    Ok(ApplicationOutput {
        value,
        mapped,
        required,
    })
}

fn closed_form(k: f64, pow: f64, q: Query, mapped: &RegimeParams) -> Result<Evaluated> {
    Ok(match q {
        Query::Tail { u } => {
            if !(u > 0.0) {
                return Err(Error::param(format!("u must be positive, got {u}")));
            }
            Evaluated::Mu(k * u.powf(pow) * normal_tail(u))
        }
        Query::Norming { s } => {
            let a = a_s(s)?;
            Evaluated::Norming(NormingPair::new(a, omega(k, pow, a), mapped.regime(), Variant::OneSided))
        }
    })
}

/// Constants of the storage workload with fBm input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StorageConstants {
    /// Location `H / (c (1 - H))` of the variance maximum.
    pub t0: f64,
    pub a_cap: f64,
    pub b_cap: f64,
    /// `B / (2 A)`
    pub b_script: f64,
    /// `T0^(-2H) / 2`
    pub a_script: f64,
}

impl StorageConstants {
    pub fn new(hurst: f64, c: f64) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 0.5) {
            return Err(Error::OutOfScope(format!(
                "storage asymptotics are stated for H in (0, 1/2) only, got H = {hurst}"
            )));
        }
        if !(c > 0.0) {
            return Err(Error::param(format!("service rate must be positive, got {c}")));
        }
        let t0 = hurst / (c * (1.0 - hurst));
        let a_cap = t0.powf(-hurst) / (1.0 - hurst);
        let b_cap = hurst * t0.powf(-hurst - 2.0);
        Ok(Self {
            t0,
            a_cap,
            b_cap,
            b_script: b_cap / (2.0 * a_cap),
            a_script: 0.5 * t0.powf(-2.0 * hurst),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StorageQuery {
    Tail { u: f64 },
    Norming { s: f64 },
    Mapping,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum StorageOutput {
    Tail(f64),
    Norming(NormingPair),
    Mapping(RegimeParams),
}

/// General parameters of the rescaled storage field: `alpha1 = alpha2 =
/// 2H`, `a1 = a2 = a3 = 2^(-1/(2H)) / T0`, `beta = 2`, `b = B / (2A)`,
/// evaluated two-sided.
pub fn storage_mapping(hurst: f64, c: f64) -> Result<RegimeParams> {
    let k = StorageConstants::new(hurst, c)?;
    let a = 2f64.powf(-1.0 / (2.0 * hurst)) / k.t0;
    RegimeParams::new(2.0 * hurst, 2.0 * hurst, 2.0, a, a, a, k.b_script)
}

pub fn eval_storage(hurst: f64, c: f64, q: StorageQuery, cp: &ConstantProvider) -> Result<StorageOutput> {
    let k = StorageConstants::new(hurst, c)?;
    let h = hurst;
    Ok(match q {
        StorageQuery::Mapping => StorageOutput::Mapping(storage_mapping(h, c)?),
        StorageQuery::Tail { u } => {
            if !(u > 0.0) {
                return Err(Error::param(format!("u must be positive, got {u}")));
            }
            let hc = cp.get(&pickands(2.0 * h))?;
            let v = k.a_cap * u.powf(1.0 - h);
            StorageOutput::Tail(
                PI.sqrt() * hc * hc * k.a_script.powf(1.0 / h) * k.b_script.powf(-0.5) / u
                    * v.powf(2.0 / h - 1.0)
                    * normal_tail(v),
            )
        }
        StorageQuery::Norming { s } => {
            if !(s > 1.0) {
                return Err(Error::param(format!("S must exceed 1, got {s}")));
            }
            let hc = cp.get(&pickands(2.0 * h))?;
            let a = (2.0 * k.a_cap.powi(-2) * s.ln()).powf(1.0 / (2.0 * (1.0 - h)));
            let w = (hc * hc / 2f64.sqrt()
                * k.a_script.powf(1.0 / h)
                * k.b_script.powf(-0.5)
                * k.a_cap.powf(1.0 / h - 2.0)
                * a.powf((2.0 - 5.0 * h + 2.0 * h * h) / h))
                .ln();
            StorageOutput::Norming(NormingPair::new(a, w, Regime::BetaDominates, Variant::TwoSided))
        }
    })
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    fn params(al1: f64, al2: f64, be: f64, a1: f64, a2: f64, a3: f64, b: f64) -> RegimeParams {
        RegimeParams::new(al1, al2, be, a1, a2, a3, b).unwrap()
    }

    #[test]
    fn case_i_hand_value() {
        let p = params(1.0, 1.0, 2.0, 1.0, 1.0, 0.5, 1.0);
        let cp = ConstantProvider::new();
        let mu = eval_mu(&p, 3.0, &cp, Variant::OneSided).unwrap();
        assert!((mu / 0.032_300_531_520_649_25 - 1.0).abs() < 1e-13, "{mu}");
        let two = eval_mu(&p, 3.0, &cp, Variant::TwoSided).unwrap();
        assert_eq!(two, 2.0 * mu);
    }

    #[test]
    fn case_vii_hand_values() {
        let p = params(1.5, 1.0, 0.5, 1.0, 1.0, -2.0, 1.0);
        let cp = ConstantProvider::new();
        let mu = eval_mu(&p, 3.0, &cp, Variant::OneSided).unwrap();
        assert!((mu / 0.024_298_164_569_341_70 - 1.0).abs() < 1e-13, "{mu}");
        let n = eval_norming(2f64.exp(), &p, &cp, Variant::OneSided).unwrap();
        assert_eq!(n.a_s, 2.0);
        assert!((n.omega_s - 0.467_355_827_915_217_88).abs() < 1e-14, "{}", n.omega_s);
        assert!((n.b_s - 2.233_677_913_957_608_9).abs() < 1e-14);
        assert_eq!(n.b_s, n.a_s + n.omega_s / n.a_s);
    }

    #[test]
    fn unresolved_constant_is_named() {
        let p = params(1.5, 1.5, 3.0, 1.0, 1.0, 1.0, 1.0);
        let err = eval_mu(&p, 3.0, &ConstantProvider::new(), Variant::OneSided).unwrap_err();
        assert!(matches!(err, Error::UnresolvedConstant(ConstantKey::Pickands { alpha }) if alpha == 1.5));
        assert!(err.to_string().contains("H_{1.5}"));
        let cp = ConstantProvider::new().with(ConstantKey::Pickands { alpha: 1.5 }, 0.8);
        assert!(eval_mu(&p, 3.0, &cp, Variant::OneSided).is_ok());
    }

    #[test]
    fn injected_value_overrides_known() {
        let cp = ConstantProvider::new().with(ConstantKey::Pickands { alpha: 1.0 }, 2.0);
        assert_eq!(cp.get(&ConstantKey::Pickands { alpha: 1.0 }).unwrap(), 2.0);
    }

    #[test]
    fn variants_agree_where_unchanged() {
        let cp = ConstantProvider::new();
        for p in [
            params(1.0, 1.0, 0.5, 0.8, 1.0, -0.5, 1.0),
            params(1.0, 2.0, 1.0, 1.3, 1.0, 1.0, 1.0),
            params(2.0, 1.0, 0.5, 1.0, 1.0, -1.3, 1.0),
        ] {
            let a = eval_mu(&p, 4.0, &cp, Variant::OneSided).unwrap();
            let b = eval_mu(&p, 4.0, &cp, Variant::TwoSided).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn integrated_example_hand_value() {
        let app = Application::IntegratedShepp {
            r_zeta: Covariance::custom("unit", |_| 1.0),
            n: 1,
            t: 1.0,
        };
        // r = 1 gives sigma^2_X(1) = 1, the normalisation of the closed form
        let out = eval_application(&app, Query::Tail { u: 3.0 }, &ConstantProvider::new()).unwrap();
        let Evaluated::Mu(mu) = out.value else { panic!() };
        assert!((mu / 0.002_284_795_224_891_956_9 - 1.0).abs() < 1e-13, "{mu}");
        let out = eval_application(&app, Query::Norming { s: 1e4 }, &ConstantProvider::new()).unwrap();
        let Evaluated::Norming(n) = out.value else { panic!() };
        let expected = (2f64.powf(-0.5) / PI).ln();
        assert!((n.omega_s - expected).abs() < 1e-12);
    }

    #[test]
    fn mixture_half_maps_to_all_equal() {
        let app = Application::FbmMixtureShepp(FbmMixture::new(vec![1.0], vec![0.5]).unwrap());
        let m = app.mapped_params().unwrap();
        assert_eq!(m.regime(), Regime::AllEqual);
        assert_eq!((m.alpha1(), m.beta(), m.b()), (1.0, 1.0, 0.5));
        assert_eq!(m.a1(), 0.5);
        let err = eval_application(&app, Query::Tail { u: 3.0 }, &ConstantProvider::new()).unwrap_err();
        assert!(matches!(err, Error::UnresolvedConstant(_)));
    }

    #[test]
    fn mixture_quarter_hand_formula() {
        let app = Application::FbmMixtureShepp(FbmMixture::new(vec![1.0], vec![0.25]).unwrap());
        let hc = 1.7;
        let cp = ConstantProvider::new().with(ConstantKey::Pickands { alpha: 0.5 }, hc);
        let out = eval_application(&app, Query::Tail { u: 3.0 }, &cp).unwrap();
        let Evaluated::Mu(mu) = out.value else { panic!() };
        let expected = 0.25 * hc * hc * 3f64.powi(6) * normal_tail(3.0);
        assert!((mu / expected - 1.0).abs() < 1e-14);
    }

    #[test]
    fn storage_constants() {
        let k = StorageConstants::new(0.25, 1.0).unwrap();
        assert!((k.t0 - 1.0 / 3.0).abs() < 1e-15);
        assert!((k.a_cap - 4.0 / 3.0 * 3f64.powf(0.25)).abs() < 1e-14);
        assert!((k.a_cap - 1.754_765).abs() < 1e-6);
        assert!((k.a_script - 0.866_025).abs() < 1e-6);
        assert!(matches!(StorageConstants::new(0.5, 1.0), Err(Error::OutOfScope(_))));
        assert!(matches!(StorageConstants::new(0.7, 1.0), Err(Error::OutOfScope(_))));
    }
}
