//! Regime parameters, Gaussian model descriptions and numeric probes of the
//! local-structure and weak-dependence assumptions.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature;

/// The tuple `(alpha1, alpha2, beta, a1, a2, a3, b)` describing the local
/// behaviour of a field near its variance maximum:
/// `sigma(t) = 1 - b (T - t)^beta` and
/// `1 - r ~ |a1 ds|^alpha1 + |a2 dt + a3 ds|^alpha2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeParams {
    alpha1: f64,
    alpha2: f64,
    beta: f64,
    a1: f64,
    a2: f64,
    a3: f64,
    b: f64,
}

impl RegimeParams {
    pub fn new(alpha1: f64, alpha2: f64, beta: f64, a1: f64, a2: f64, a3: f64, b: f64) -> Result<Self> {
        let in_01_2 = |x: f64| x > 0.0 && x <= 2.0;
        if !in_01_2(alpha1) {
            return Err(Error::param(format!("alpha1 must lie in (0, 2], got {alpha1}")));
        }
        if !in_01_2(alpha2) {
            return Err(Error::param(format!("alpha2 must lie in (0, 2], got {alpha2}")));
        }
        for (name, v) in [("beta", beta), ("a1", a1), ("a2", a2), ("b", b)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if a3 == 0.0 || !a3.is_finite() {
            return Err(Error::param(format!("a3 must be non-zero and finite, got {a3}")));
        }
        Ok(Self {
            alpha1,
            alpha2,
            beta,
            a1,
            a2,
            a3,
            b,
        })
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }
    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn a1(&self) -> f64 {
        self.a1
    }
    pub fn a2(&self) -> f64 {
        self.a2
    }
    pub fn a3(&self) -> f64 {
        self.a3
    }
    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn regime(&self) -> Regime {
        classify_regime(self)
    }

    /// Exponent `c = 1 + max(0, beta - max(alpha1, alpha2))` of the
    /// logarithmic factor in the weak-dependence condition.
    pub fn dependence_exponent(&self) -> f64 {
        1.0 + (self.beta - self.alpha1.max(self.alpha2)).max(0.0)
    }
}

/// The seven orderings of `(alpha1, alpha2, beta)`, each with its own tail
/// asymptotic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Regime {
    /// `beta > max(alpha1, alpha2)`
    BetaDominates,
    /// `beta = alpha2 = alpha1`
    AllEqual,
    /// `beta = alpha2 > alpha1`
    BetaEqA2GtA1,
    /// `beta < alpha2 = alpha1`
    BetaLtA2EqA1,
    /// `beta < alpha2` and `alpha1 < alpha2`
    BetaLtA2A1LtA2,
    /// `beta = alpha1 > alpha2`
    BetaEqA1GtA2,
    /// `beta < alpha1` and `alpha2 < alpha1`
    BetaLtA1A2LtA1,
}

impl Regime {
    pub const ALL: [Regime; 7] = [
        Regime::BetaDominates,
        Regime::AllEqual,
        Regime::BetaEqA2GtA1,
        Regime::BetaLtA2EqA1,
        Regime::BetaLtA2A1LtA2,
        Regime::BetaEqA1GtA2,
        Regime::BetaLtA1A2LtA1,
    ];

    /// Roman-numeral case label, `"i"` to `"vii"`.
    pub fn case_label(&self) -> &'static str {
        match self {
            Regime::BetaDominates => "i",
            Regime::AllEqual => "ii",
            Regime::BetaEqA2GtA1 => "iii",
            Regime::BetaLtA2EqA1 => "iv",
            Regime::BetaLtA2A1LtA2 => "v",
            Regime::BetaEqA1GtA2 => "vi",
            Regime::BetaLtA1A2LtA1 => "vii",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Exact-comparison dispatch. Boundary orderings `beta = alpha2 < alpha1`
/// and `beta = alpha1 < alpha2` land in the strict-inequality cases
/// [`Regime::BetaLtA1A2LtA1`] and [`Regime::BetaLtA2A1LtA2`].
pub fn classify_regime(p: &RegimeParams) -> Regime {
    let (a1, a2, b) = (p.alpha1, p.alpha2, p.beta);
    if b > a1.max(a2) {
        Regime::BetaDominates
    } else if b == a2 && a2 == a1 {
        Regime::AllEqual
    } else if b == a2 && a2 > a1 {
        Regime::BetaEqA2GtA1
    } else if b == a1 && a1 > a2 {
        Regime::BetaEqA1GtA2
    } else if b < a2 && a2 == a1 {
        Regime::BetaLtA2EqA1
    } else if b < a2 && a1 < a2 {
        Regime::BetaLtA2A1LtA2
    } else {
        debug_assert!(b < a1 && a2 < a1);
        Regime::BetaLtA1A2LtA1
    }
}

/// One-dimensional lattice `origin + i * step`, `i = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub origin: f64,
    pub step: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn new(origin: f64, step: f64, count: usize) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::param(format!("grid step must be positive, got {step}")));
        }
        if count == 0 {
            return Err(Error::param("grid count must be at least 1"));
        }
        if !origin.is_finite() {
            return Err(Error::param("grid origin must be finite"));
        }
        Ok(Self { origin, step, count })
    }

    /// Grid on `[0, extent]` with the given step; `extent` must be a
    /// multiple of `step` up to rounding.
    pub fn covering(extent: f64, step: f64) -> Result<Self> {
        let n = (extent / step).round();
        if (n * step - extent).abs() > 1e-9 * extent.max(step) {
            return Err(Error::param(format!(
                "extent {extent} is not a multiple of step {step}"
            )));
        }
        Self::new(0.0, step, n as usize + 1)
    }

    pub fn point(&self, i: usize) -> f64 {
        self.origin + self.step * i as f64
    }

    pub fn extent(&self) -> f64 {
        self.step * (self.count - 1) as f64
    }
}

/// Product lattice over `(s, t)`; values are stored row-major with `t`
/// varying fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec2 {
    pub s: GridSpec,
    pub t: GridSpec,
}

impl GridSpec2 {
    pub fn len(&self) -> usize {
        self.s.count * self.t.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.t.count + j
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Stationary correlation functions `r(t)` with `r(0) = 1`.
#[derive(Clone)]
pub enum Covariance {
    /// `exp(-|t|^alpha)`
    ExpAlpha { alpha: f64 },
    /// `(1 + |t|^alpha)^(-beta)`
    Cauchy { alpha: f64, beta: f64 },
    /// `exp(-t^2)`
    Gauss,
    /// `1 / cosh t`
    Sech,
    /// Piecewise-linear interpolation of a table starting at lag 0; NaN
    /// beyond the last lag.
    Tabulated { lags: Vec<f64>, values: Vec<f64> },
    Custom { name: String, f: ScalarFn },
}

impl fmt::Debug for Covariance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Covariance::ExpAlpha { alpha } => write!(f, "ExpAlpha {{ alpha: {alpha} }}"),
            Covariance::Cauchy { alpha, beta } => write!(f, "Cauchy {{ alpha: {alpha}, beta: {beta} }}"),
            Covariance::Gauss => write!(f, "Gauss"),
            Covariance::Sech => write!(f, "Sech"),
            Covariance::Tabulated { lags, .. } => write!(f, "Tabulated {{ {} lags }}", lags.len()),
            Covariance::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl Covariance {
    pub fn custom(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Covariance::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn tabulated(lags: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if lags.len() != values.len() || lags.len() < 2 {
            return Err(Error::model("tabulated covariance needs at least two (lag, value) pairs of equal length"));
        }
        if lags[0] != 0.0 {
            return Err(Error::model("tabulated covariance must start at lag 0"));
        }
        if lags.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::model("tabulated lags must be strictly increasing"));
        }
        Ok(Covariance::Tabulated { lags, values })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = t.abs();
        match self {
            Covariance::ExpAlpha { alpha } => (-t.powf(*alpha)).exp(),
            Covariance::Cauchy { alpha, beta } => (1.0 + t.powf(*alpha)).powf(-beta),
            Covariance::Gauss => (-t * t).exp(),
            Covariance::Sech => 1.0 / t.cosh(),
            Covariance::Tabulated { lags, values } => {
                let last = *lags.last().expect("non-empty");
                if t > last {
                    return f64::NAN;
                }
                let k = lags.partition_point(|&x| x <= t).clamp(1, lags.len() - 1);
                let (x0, x1) = (lags[k - 1], lags[k]);
                let w = (t - x0) / (x1 - x0);
                values[k - 1] * (1.0 - w) + values[k] * w
            }
            Covariance::Custom { f, .. } => f(t),
        }
    }

    /// `(C, alpha)` with `1 - r(t) = C |t|^alpha (1 + o(1))` at 0, for the
    /// builtin catalog.
    pub fn local_expansion(&self) -> Option<(f64, f64)> {
        match self {
            Covariance::ExpAlpha { alpha } => Some((1.0, *alpha)),
            Covariance::Cauchy { alpha, beta } => Some((*beta, *alpha)),
            Covariance::Gauss => Some((1.0, 2.0)),
            Covariance::Sech => Some((0.5, 2.0)),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Covariance::ExpAlpha { .. } => "exp_alpha".into(),
            Covariance::Cauchy { .. } => "cauchy".into(),
            Covariance::Gauss => "gauss".into(),
            Covariance::Sech => "sech".into(),
            Covariance::Tabulated { .. } => "tabulated".into(),
            Covariance::Custom { name, .. } => name.clone(),
        }
    }

    fn validate_params(&self) -> Result<()> {
        match self {
            Covariance::ExpAlpha { alpha } if !(*alpha > 0.0 && *alpha <= 2.0) => {
                Err(Error::model(format!("exp_alpha needs alpha in (0, 2], got {alpha}")))
            }
            Covariance::Cauchy { alpha, beta } if !(*alpha > 0.0 && *alpha <= 2.0) || !(*beta > 0.0) => Err(
                Error::model(format!("cauchy needs alpha in (0, 2] and beta > 0, got ({alpha}, {beta})")),
            ),
            _ => Ok(()),
        }
    }
}

/// Variance function `sigma^2(t) = E (X(t) - X(0))^2` of a process with
/// stationary increments.
#[derive(Clone)]
pub enum Variogram {
    /// `|t|^(2H)`
    Power { hurst: f64 },
    Custom { name: String, f: ScalarFn },
}

impl fmt::Debug for Variogram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variogram::Power { hurst } => write!(f, "Power {{ hurst: {hurst} }}"),
            Variogram::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl Variogram {
    pub fn custom(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Variogram::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Variogram::Power { hurst } => t.abs().powf(2.0 * hurst),
            Variogram::Custom { f, .. } => f(t.abs()),
        }
    }
}

/// `Cov(X(t), X(s)) = (v(t) + v(s) - v(|t - s|)) / 2` for a process with
/// stationary increments, `X(0) = 0` and variogram `v`.
pub fn variogram_to_covariance(v: impl Fn(f64) -> f64, t: f64, s: f64) -> f64 {
    0.5 * (v(t) + v(s) - v((t - s).abs()))
}

/// `X = sum_i lambda_i B_{H_i}` with independent fBms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FbmMixture {
    lambdas: Vec<f64>,
    hursts: Vec<f64>,
}

impl FbmMixture {
    pub fn new(lambdas: Vec<f64>, hursts: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() || lambdas.len() != hursts.len() {
            return Err(Error::param("fbm mixture needs equally many (>= 1) weights and Hurst indices"));
        }
        if lambdas.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::param("fbm mixture weights must be positive"));
        }
        let norm: f64 = lambdas.iter().map(|l| l * l).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::param(format!(
                "fbm mixture weights must satisfy sum lambda^2 = 1, got {norm}"
            )));
        }
        if hursts.iter().any(|&h| !(h > 0.0 && h < 1.0)) {
            return Err(Error::param("Hurst indices must lie in (0, 1)"));
        }
        if hursts.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("Hurst indices must be strictly increasing"));
        }
        Ok(Self { lambdas, hursts })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn hursts(&self) -> &[f64] {
        &self.hursts
    }

    pub fn variance(&self, t: f64) -> f64 {
        self.components().map(|(l, h)| l * l * t.abs().powf(2.0 * h)).sum()
    }

    fn components(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.lambdas.iter().copied().zip(self.hursts.iter().copied())
    }
}

/// A one-dimensional Gaussian input model together with the fields derived
/// from it (Shepp increments or the storage workload).
#[derive(Debug, Clone)]
pub enum FieldModel {
    StationaryCovariance(Covariance),
    StationaryIncrementVariogram(Variogram),
    FbmMixture(FbmMixture),
    IntegratedStationary { r_zeta: Covariance, n: usize },
    Storage { hurst: f64, c: f64 },
}

const PROBE_POINTS: [f64; 10] = [0.0, 1e-3, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0];

impl FieldModel {
    /// Check the invariants that can be probed numerically.
    pub fn validate(&self) -> Result<()> {
        match self {
            FieldModel::StationaryCovariance(r) => check_correlation(r),
            FieldModel::IntegratedStationary { r_zeta, n } => {
                if *n == 0 {
                    return Err(Error::param("integrated process needs n >= 1 components"));
                }
                check_correlation(r_zeta)
            }
            FieldModel::StationaryIncrementVariogram(v) => {
                if let Variogram::Power { hurst } = v {
                    if !(*hurst > 0.0 && *hurst <= 1.0) {
                        return Err(Error::param(format!("Hurst index must lie in (0, 1], got {hurst}")));
                    }
                }
                let v0 = v.eval(0.0);
                if v0 != 0.0 {
                    return Err(Error::model(format!("variogram must vanish at 0, got {v0}")));
                }
                for &t in &PROBE_POINTS {
                    let x = v.eval(t);
                    if !x.is_finite() || x < 0.0 {
                        return Err(Error::model(format!("variogram({t}) = {x} is negative or non-finite")));
                    }
                }
                Ok(())
            }
            FieldModel::FbmMixture(_) => Ok(()),
            FieldModel::Storage { hurst, c } => {
                if !(*hurst > 0.0 && *hurst < 1.0) {
                    return Err(Error::param(format!("storage Hurst index must lie in (0, 1), got {hurst}")));
                }
                if !(*c > 0.0) {
                    return Err(Error::param(format!("service rate must be positive, got {c}")));
                }
                Ok(())
            }
        }
    }

    /// Short identifier used in reports.
    pub fn id(&self) -> String {
        match self {
            FieldModel::StationaryCovariance(r) => format!("stationary_covariance:{}", r.name()),
            FieldModel::StationaryIncrementVariogram(Variogram::Power { hurst }) => format!("fbm:H={hurst}"),
            FieldModel::StationaryIncrementVariogram(Variogram::Custom { name, .. }) => format!("variogram:{name}"),
            FieldModel::FbmMixture(m) => format!("fbm_mixture:H={:?}", m.hursts),
            FieldModel::IntegratedStationary { r_zeta, n } => format!("integrated:{}:n={n}", r_zeta.name()),
            FieldModel::Storage { hurst, c } => format!("storage:H={hurst}:c={c}"),
        }
    }

    /// `sigma^2_X(t) = E (X(t) - X(0))^2` of the input process.
    pub fn increment_variance(&self, t: f64) -> Result<f64> {
        let t = t.abs();
        match self {
            FieldModel::StationaryCovariance(r) => Ok(2.0 * (1.0 - r.eval(t))),
            FieldModel::StationaryIncrementVariogram(v) => Ok(v.eval(t)),
            FieldModel::FbmMixture(m) => Ok(m.variance(t)),
            FieldModel::IntegratedStationary { r_zeta, n } => integrated_variance(r_zeta, *n, t),
            FieldModel::Storage { .. } => Err(Error::UnsupportedModel(
                "the storage workload has no increment-variance representation".into(),
            )),
        }
    }

    /// Covariance of the Shepp field `Z(s, t) = X(s + t) - X(s)` at the
    /// points `(s, t)` and `(s2, t2)`.
    pub fn shepp_covariance(&self, s: f64, t: f64, s2: f64, t2: f64) -> Result<f64> {
        match self {
            FieldModel::StationaryCovariance(r) => {
                let d = s - s2;
                Ok(r.eval(d + t - t2) - r.eval(d + t) - r.eval(d - t2) + r.eval(d))
            }
            FieldModel::StationaryIncrementVariogram(Variogram::Power { hurst }) => {
                Ok(fbm_increment_cov(*hurst, s, t, s2, t2))
            }
            FieldModel::FbmMixture(m) => Ok(m
                .components()
                .map(|(l, h)| l * l * fbm_increment_cov(h, s, t, s2, t2))
                .sum()),
            _ => {
                let v = |x: f64| self.increment_variance(x);
                Ok(0.5 * (v(s + t - s2)? + v(s2 + t2 - s)? - v(s + t - s2 - t2)? - v(s - s2)?))
            }
        }
    }

    pub fn shepp_correlation(&self, s: f64, t: f64, s2: f64, t2: f64) -> Result<f64> {
        let c = self.shepp_covariance(s, t, s2, t2)?;
        let v = self.increment_variance(t)? * self.increment_variance(t2)?;
        if !(v > 0.0) {
            return Err(Error::model(format!(
                "Shepp field has zero variance at t = {t} or t = {t2}"
            )));
        }
        Ok(c / v.sqrt())
    }

    /// Local parameters of the Shepp field on `[0, S] x [0, t_max]`,
    /// normalised by its maximal standard deviation `sigma_X(t_max)`:
    /// `a1 = a2 = a3 = 2^(-1/alpha) a~` with `sigma^2_X(h) ~ (a~ h)^alpha
    /// sigma^2_X(t_max)` at 0, `beta = 1` and
    /// `b = (sigma^2_X)'(t_max) / (2 sigma^2_X(t_max))`.
    pub fn shepp_local_params(&self, t_max: f64) -> Result<RegimeParams> {
        if !(t_max > 0.0) {
            return Err(Error::param("t_max must be positive"));
        }
        let var_t = self.increment_variance(t_max)?;
        let (coef, alpha, dvar) = match self {
            FieldModel::FbmMixture(m) => {
                let (l1, h1) = (m.lambdas[0], m.hursts[0]);
                let dv = m
                    .components()
                    .map(|(l, h)| l * l * 2.0 * h * t_max.powf(2.0 * h - 1.0))
                    .sum();
                (l1 * l1, 2.0 * h1, dv)
            }
            FieldModel::StationaryIncrementVariogram(Variogram::Power { hurst }) => {
                (1.0, 2.0 * hurst, 2.0 * hurst * t_max.powf(2.0 * hurst - 1.0))
            }
            FieldModel::IntegratedStationary { r_zeta, n } => {
                let n = *n as f64;
                let int_r = quadrature::integrate(|x| r_zeta.eval(x), 0.0, t_max, 1e-10, 1e-14)?;
                (n, 2.0, 2.0 * n * int_r)
            }
            FieldModel::StationaryCovariance(r) => {
                let (c, alpha) = r.local_expansion().ok_or_else(|| {
                    Error::UnsupportedModel(format!(
                        "covariance '{}' has no known local expansion; supply regime parameters explicitly",
                        r.name()
                    ))
                })?;
                let h = 1e-5 * t_max;
                let dv = (r.eval(t_max - h) - r.eval(t_max + h)) / h;
                (2.0 * c, alpha, dv)
            }
            FieldModel::StationaryIncrementVariogram(Variogram::Custom { name, .. }) => {
                return Err(Error::UnsupportedModel(format!(
                    "variogram '{name}' has no known local expansion; supply regime parameters explicitly"
                )))
            }
            FieldModel::Storage { .. } => {
                return Err(Error::UnsupportedModel(
                    "storage workload is not a Shepp field; use the storage evaluator".into(),
                ))
            }
        };
        if !(dvar > 0.0) {
            return Err(Error::model(format!(
                "variance of the Shepp field is not increasing at t_max = {t_max}"
            )));
        }
        let a_tilde = (coef / var_t).powf(1.0 / alpha);
        let a = 2f64.powf(-1.0 / alpha) * a_tilde;
        RegimeParams::new(alpha, alpha, 1.0, a, a, a, dvar / (2.0 * var_t))
    }
}

fn check_correlation(r: &Covariance) -> Result<()> {
    r.validate_params()?;
    let r0 = r.eval(0.0);
    if (r0 - 1.0).abs() > 1e-12 {
        return Err(Error::model(format!("correlation must equal 1 at lag 0, got {r0}")));
    }
    for &t in &PROBE_POINTS {
        let x = r.eval(t);
        if x.is_nan() {
            // tabulated models are only defined on their table
            if matches!(r, Covariance::Tabulated { .. }) {
                continue;
            }
            return Err(Error::model(format!("correlation({t}) is not finite")));
        }
        if x.abs() > 1.0 + 1e-12 {
            return Err(Error::model(format!("|correlation({t})| = {} exceeds 1", x.abs())));
        }
    }
    Ok(())
}

/// `2 n int_0^t (t - s) r(s) ds`.
pub(crate) fn integrated_variance(r: &Covariance, n: usize, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let i = quadrature::integrate(|s| (t - s) * r.eval(s), 0.0, t, 1e-9, 1e-300)?;
    Ok(2.0 * n as f64 * i)
}

/// Covariance of the increments `B_H(s + t) - B_H(s)` and
/// `B_H(s2 + t2) - B_H(s2)`; for `H = 1/2` the exact overlap length.
fn fbm_increment_cov(h: f64, s: f64, t: f64, s2: f64, t2: f64) -> f64 {
    if h == 0.5 {
        let lo = s.min(s + t).max(s2.min(s2 + t2));
        let hi = s.max(s + t).min(s2.max(s2 + t2));
        return (hi - lo).max(0.0) * (t.signum() * t2.signum());
    }
    let v = |x: f64| x.abs().powf(2.0 * h);
    0.5 * (v(s + t - s2) + v(s2 + t2 - s) - v(s + t - s2 - t2) - v(s - s2))
}

/// One row of a local-expansion probe.
#[derive(Debug, Clone, Serialize)]
pub struct ExpansionRow {
    /// `"s"`, `"t"` or `"diagonal"`.
    pub direction: &'static str,
    pub scale: f64,
    pub one_minus_r: f64,
    pub predicted: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpansionReport {
    pub t_max: f64,
    pub rows: Vec<ExpansionRow>,
    /// True when some direction's ratio at the smallest scale is more than
    /// 5% away from 1.
    pub flagged: bool,
}

/// Compare `1 - r` of the Shepp field against
/// `|a1 ds|^alpha1 + |a2 dt + a3 ds|^alpha2` at `(0, t_max)` along the `s`,
/// `t` and anti-diagonal directions. A diagnostic only.
pub fn validate_local_expansion(
    m: &FieldModel,
    p: &RegimeParams,
    t_max: f64,
    probe_scales: &[f64],
) -> Result<ExpansionReport> {
    if probe_scales.iter().any(|&h| !(h > 0.0)) || probe_scales.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::param("probe scales must be positive and strictly decreasing"));
    }
    if matches!(m, FieldModel::Storage { .. }) {
        return Err(Error::UnsupportedModel(
            "the storage workload has no closed-form correlation".into(),
        ));
    }
    let directions: [(&'static str, f64, f64); 3] = [("s", 1.0, 0.0), ("t", 0.0, -1.0), ("diagonal", 1.0, -1.0)];
    let mut rows = Vec::new();
    let mut flagged = false;
    for (name, ds, dt) in directions {
        let mut last = None;
        for &h in probe_scales {
            let (ds, dt) = (ds * h, dt * h);
            let r = m.shepp_correlation(0.0, t_max, ds, t_max + dt)?;
            let predicted = (p.a1 * ds).abs().powf(p.alpha1) + (p.a2 * dt + p.a3 * ds).abs().powf(p.alpha2);
            let row = ExpansionRow {
                direction: name,
                scale: h,
                one_minus_r: 1.0 - r,
                predicted,
                ratio: (1.0 - r) / predicted,
            };
            last = Some(row.ratio);
            rows.push(row);
        }
        if let Some(ratio) = last {
            if !((ratio - 1.0).abs() <= 0.05) {
                log::warn!("local expansion along {name}: ratio {ratio:.4} at the smallest scale");
                flagged = true;
            }
        }
    }
    Ok(ExpansionReport { t_max, rows, flagged })
}

/// For each lag `v`, the maximum of `|r|` over `s - s' in [v, v + s_window]`
/// and `t, t' in (0, t_window]` on a coarse grid, multiplied by
/// `(ln v)^c` with `c = 1 + max(0, beta - max(alpha1, alpha2))`.
pub fn weak_dependence_probe(
    m: &FieldModel,
    p: &RegimeParams,
    lags: &[f64],
    s_window: f64,
    t_window: f64,
) -> Result<Vec<(f64, f64)>> {
    const NODES: usize = 8;
    if lags.iter().any(|&v| !(v > 1.0)) {
        return Err(Error::param("lags must exceed 1"));
    }
    if !(t_window > 0.0) || !(s_window >= 0.0) {
        return Err(Error::param("probe windows must be positive"));
    }
    let c = p.dependence_exponent();
    let ts: Vec<f64> = (1..=NODES).map(|k| t_window * k as f64 / NODES as f64).collect();
    let ds: Vec<f64> = (0..=NODES).map(|k| s_window * k as f64 / NODES as f64).collect();
    lags.iter()
        .map(|&v| {
            let mut worst: f64 = 0.0;
            for &d in &ds {
                for &t in &ts {
                    for &t2 in &ts {
                        let r = m.shepp_correlation(v + d, t, 0.0, t2)?;
                        worst = worst.max(r.abs());
                    }
                }
            }
            Ok((v, worst * v.ln().powf(c)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rp(a1: f64, a2: f64, b: f64) -> RegimeParams {
        RegimeParams::new(a1, a2, b, 1.0, 1.0, 0.5, 1.0).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_regime(&rp(1.0, 1.0, 2.0)), Regime::BetaDominates);
        assert_eq!(classify_regime(&rp(1.0, 1.0, 1.0)), Regime::AllEqual);
        assert_eq!(classify_regime(&rp(0.5, 1.0, 1.0)), Regime::BetaEqA2GtA1);
        assert_eq!(classify_regime(&rp(1.0, 0.5, 1.0)), Regime::BetaEqA1GtA2);
        assert_eq!(classify_regime(&rp(1.0, 1.0, 0.5)), Regime::BetaLtA2EqA1);
        assert_eq!(classify_regime(&rp(1.0, 1.5, 0.5)), Regime::BetaLtA2A1LtA2);
        assert_eq!(classify_regime(&rp(1.5, 1.0, 0.5)), Regime::BetaLtA1A2LtA1);
        // boundary orderings
        assert_eq!(classify_regime(&rp(1.5, 1.0, 1.0)), Regime::BetaLtA1A2LtA1);
        assert_eq!(classify_regime(&rp(1.0, 1.5, 1.0)), Regime::BetaLtA2A1LtA2);
    }

    #[test]
    fn rejects_invalid_params() {
        assert!(RegimeParams::new(0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(RegimeParams::new(2.1, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(RegimeParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0).is_err());
        assert!(RegimeParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, -1.0).is_err());
        assert!(RegimeParams::new(2.0, 2.0, 5.0, 1.0, 1.0, -3.0, 1.0).is_ok());
    }

    #[test]
    fn variogram_covariance_examples() {
        assert_eq!(variogram_to_covariance(|t| t, 1.0, 2.0), 1.0);
        let h = 0.75;
        let v = |t: f64| t.powf(2.0 * h);
        assert_eq!(variogram_to_covariance(v, 1.0, 1.0), 1.0);
        assert!((variogram_to_covariance(v, 1.0, 2.0) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn grid_spec() {
        let g = GridSpec::new(0.0, 0.5, 5).unwrap();
        assert_eq!(g.extent(), 2.0);
        assert_eq!(g.point(3), 1.5);
        assert!(GridSpec::new(0.0, 0.0, 5).is_err());
        assert!(GridSpec::new(0.0, 1.0, 0).is_err());
        let c = GridSpec::covering(1.0, 0.01).unwrap();
        assert_eq!(c.count, 101);
        assert!(GridSpec::covering(1.0, 0.3).is_err());
    }

    #[test]
    fn mixture_validation() {
        let s = 0.5f64.sqrt();
        assert!(FbmMixture::new(vec![s, s], vec![0.25, 0.75]).is_ok());
        assert!(FbmMixture::new(vec![0.5, 0.5], vec![0.25, 0.75]).is_err());
        assert!(FbmMixture::new(vec![s, s], vec![0.75, 0.25]).is_err());
        assert!(FbmMixture::new(vec![1.0], vec![1.0]).is_err());
    }

    #[test]
    fn model_validation() {
        assert!(FieldModel::StationaryCovariance(Covariance::Gauss).validate().is_ok());
        let bad = Covariance::custom("bad", |t| 1.0 + t);
        assert!(FieldModel::StationaryCovariance(bad).validate().is_err());
        let shifted = Variogram::custom("shifted", |t| t + 1.0);
        assert!(FieldModel::StationaryIncrementVariogram(shifted).validate().is_err());
        let tab = Covariance::tabulated(vec![0.0, 1.0, 2.0], vec![1.0, 0.5, 0.1]).unwrap();
        assert!((tab.eval(0.5) - 0.75).abs() < 1e-15);
        assert!(tab.eval(3.0).is_nan());
        assert!(FieldModel::StationaryCovariance(tab).validate().is_ok());
    }

    #[test]
    fn integrated_variance_closed_form() {
        let r = Covariance::ExpAlpha { alpha: 1.0 };
        let v = integrated_variance(&r, 1, 1.0).unwrap();
        assert!((v - 2.0 * (-1.0f64).exp()).abs() < 1e-10);
        let small = integrated_variance(&r, 3, 1e-3).unwrap();
        assert!((small / 1e-6 / 3.0 - 1.0).abs() < 0.01);
        assert_eq!(integrated_variance(&r, 1, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn brownian_local_expansion() {
        let m = FieldModel::FbmMixture(FbmMixture::new(vec![1.0], vec![0.5]).unwrap());
        let p = m.shepp_local_params(1.0).unwrap();
        assert_eq!(p.regime(), Regime::AllEqual);
        assert!((p.b() - 0.5).abs() < 1e-15 && (p.a1() - 0.5).abs() < 1e-15);
        let rep = validate_local_expansion(&m, &p, 1.0, &[1e-2, 1e-3, 1e-4]).unwrap();
        assert_eq!(rep.rows.len(), 9);
        assert!(!rep.flagged, "{rep:?}");
        assert!(validate_local_expansion(&m, &p, 1.0, &[]).unwrap().rows.is_empty());
    }

    #[test]
    fn exponential_local_expansion() {
        let m = FieldModel::StationaryCovariance(Covariance::ExpAlpha { alpha: 1.0 });
        let p = m.shepp_local_params(1.0).unwrap();
        let rep = validate_local_expansion(&m, &p, 1.0, &[1e-2, 1e-3]).unwrap();
        for row in &rep.rows {
            assert!((row.ratio - 1.0).abs() < 0.05, "{row:?}");
        }
    }

    #[test]
    fn storage_has_no_correlation() {
        let m = FieldModel::Storage { hurst: 0.25, c: 1.0 };
        let p = rp(1.0, 1.0, 1.0);
        assert!(matches!(
            validate_local_expansion(&m, &p, 1.0, &[0.1]),
            Err(Error::UnsupportedModel(_))
        ));
    }

    #[test]
    fn weak_dependence_examples() {
        let bm = FieldModel::FbmMixture(FbmMixture::new(vec![1.0], vec![0.5]).unwrap());
        let p = bm.shepp_local_params(1.0).unwrap();
        for (_, x) in weak_dependence_probe(&bm, &p, &[10.0, 100.0], 1.0, 1.0).unwrap() {
            assert_eq!(x, 0.0);
        }
        let f = FieldModel::StationaryIncrementVariogram(Variogram::Power { hurst: 0.25 });
        let p = f.shepp_local_params(1.0).unwrap();
        let out = weak_dependence_probe(&f, &p, &[10.0, 100.0, 1000.0], 1.0, 1.0).unwrap();
        assert!(out[0].1 > out[1].1 && out[1].1 > out[2].1, "{out:?}");
        let g = FieldModel::StationaryCovariance(Covariance::Gauss);
        let p = g.shepp_local_params(1.0).unwrap();
        for (_, x) in weak_dependence_probe(&g, &p, &[10.0, 100.0], 1.0, 1.0).unwrap() {
            assert!(x < 1e-8);
        }
    }
}
