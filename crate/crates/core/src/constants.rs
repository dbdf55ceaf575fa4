//! Monte Carlo estimators for the Pickands, Piterbarg and mixed
//! Pickands-Piterbarg constants, plus the handful of known closed forms.
//!
//! All estimators target the discrete constants on a lattice of step `a`
//! and refine along a geometric ladder `a, a/2, a/4, ...` simulated once at
//! the finest step (common random numbers). The reported value is the
//! Richardson extrapolation of the two finest levels, using the bias order
//! `a^(alpha/2)` (`a^2` for `alpha = 2`).

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{GridSpec, RegimeParams};
use crate::par;
use crate::rng::RngStream;
use crate::simulate::{FbmMethod, FbmSampler};

/// Exponents are clamped to this range before exponentiation.
const EXP_CLAMP: (f64, f64) = (-40.0, 700.0);
const EXP_WARN: f64 = 690.0;

/// Identifies a constant needed by a tail formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ConstantKey {
    /// `H_alpha`
    Pickands { alpha: f64 },
    /// `P_alpha^b` or, two-sided, `P~_alpha^b`
    Piterbarg { alpha: f64, b: f64, two_sided: bool },
    /// `M^b_{Y,beta}` or `M~^b_{Y,beta}` for the field
    /// `Y(s, t) = B~(a1 s) + B(a2 t - a3 s)` with `alpha1 = alpha2 = beta`.
    PickandsPiterbarg {
        alpha: f64,
        a1: f64,
        a2: f64,
        a3: f64,
        b: f64,
        two_sided: bool,
    },
}

impl ConstantKey {
    pub fn pickands_piterbarg(p: &RegimeParams, two_sided: bool) -> Self {
        ConstantKey::PickandsPiterbarg {
            alpha: p.alpha1(),
            a1: p.a1(),
            a2: p.a2(),
            a3: p.a3(),
            b: p.b(),
            two_sided,
        }
    }
}

impl fmt::Display for ConstantKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstantKey::Pickands { alpha } => write!(f, "H_{{{alpha}}}"),
            ConstantKey::Piterbarg { alpha, b, two_sided } => {
                let p = if *two_sided { "P~" } else { "P" };
                write!(f, "{p}_{{{alpha}}}^{{{b}}}")
            }
            ConstantKey::PickandsPiterbarg {
                alpha,
                a1,
                a2,
                a3,
                b,
                two_sided,
            } => {
                let m = if *two_sided { "M~" } else { "M" };
                write!(f, "{m}^{{{b}}}_{{Y,{alpha}}}(a1={a1}, a2={a2}, a3={a3})")
            }
        }
    }
}

/// Closed forms: `H_1 = 1`, `H_2 = 1/sqrt(pi)`, `P_1^b = 1 + 1/b`.
pub fn lookup_known_constant(key: &ConstantKey) -> Option<f64> {
    match *key {
        ConstantKey::Pickands { alpha: 1.0 } => Some(1.0),
        ConstantKey::Pickands { alpha: 2.0 } => Some(1.0 / std::f64::consts::PI.sqrt()),
        ConstantKey::Piterbarg {
            alpha,
            b,
            two_sided: false,
        } if alpha == 1.0 && b > 0.0 => Some(1.0 + 1.0 / b),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Window {
    Interval(f64),
    Rectangle { s: f64, t: f64 },
}

/// Estimate of one ladder level (or of an `S`-ladder entry for the mixed
/// constant).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelEstimate {
    pub grid_step: f64,
    pub window: Window,
    pub value: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantEstimate {
    pub key: ConstantKey,
    pub value: f64,
    pub std_error: f64,
    pub replications: u64,
    /// Coarsest lattice step `a`.
    pub grid_step: f64,
    pub window: Window,
    pub two_sided: bool,
    pub method: Method,
    pub levels: Vec<LevelEstimate>,
    /// Whether `value` is a Richardson extrapolation of the levels.
    pub extrapolated: bool,
    /// Largest exponent seen before clamping.
    pub max_exponent: f64,
}

/// Estimator representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Shift-invariant ratio `E[max e^W / (a sum e^W)]` over a two-sided
    /// window; unbiased for the discrete constant up to window truncation.
    #[default]
    Ratio,
    /// `E exp(max W) / T` over `[0, T]`.
    Window,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ratio" => Ok(Method::Ratio),
            "window" => Ok(Method::Window),
            _ => Err(Error::param(format!("unknown estimator method '{s}' (ratio | window)"))),
        }
    }
}

/// Knobs shared by the one-dimensional estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorOptions {
    pub t: f64,
    pub a: f64,
    pub reps: u64,
    /// Number of ladder levels `a, a/2, ..., a/2^(levels-1)`.
    pub levels: usize,
    pub method: Method,
    pub fbm_method: FbmMethod,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        Self {
            t: 8.0,
            a: 0.005,
            reps: 100_000,
            levels: 3,
            method: Method::Ratio,
            fbm_method: FbmMethod::Auto,
        }
    }
}

fn richardson_order(alpha: f64) -> f64 {
    if alpha == 2.0 {
        2.0
    } else {
        alpha / 2.0
    }
}

/// Per-level values for all replications plus the extrapolated column,
/// reduced into an estimate.
fn reduce(
    key: ConstantKey,
    opts: &EstimatorOptions,
    window: Window,
    two_sided: bool,
    order: f64,
    per_rep: Vec<(Vec<f64>, f64)>,
) -> ConstantEstimate {
    let levels = opts.levels;
    let max_exponent = per_rep.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    if max_exponent > EXP_WARN {
        log::warn!("exponent {max_exponent:.1} is close to the overflow cap; shrink the window");
    }
    let level_estimates: Vec<LevelEstimate> = (0..levels)
        .map(|l| {
            let col: Vec<f64> = per_rep.iter().map(|r| r.0[l]).collect();
            let (value, std_error) = par::mean_and_se(&col);
            LevelEstimate {
                grid_step: opts.a / 2f64.powi(l as i32),
                window,
                value,
                std_error,
            }
        })
        .collect();
    let (value, std_error, extrapolated) = if levels >= 2 {
        let c = 2f64.powf(order);
        let col: Vec<f64> = per_rep
            .iter()
            .map(|r| (c * r.0[levels - 1] - r.0[levels - 2]) / (c - 1.0))
            .collect();
        let (v, se) = par::mean_and_se(&col);
        (v, se, true)
    } else {
        (level_estimates[0].value, level_estimates[0].std_error, false)
    };
    ConstantEstimate {
        key,
        value,
        std_error,
        replications: opts.reps,
        grid_step: opts.a,
        window,
        two_sided,
        method: opts.method,
        levels: level_estimates,
        extrapolated,
        max_exponent,
    }
}

fn check_common(alpha: f64, opts: &EstimatorOptions) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::param(format!("alpha must lie in (0, 2], got {alpha}")));
    }
    if !(opts.a > 0.0) || !(opts.t >= 0.0) || !opts.t.is_finite() {
        return Err(Error::param("need a > 0 and a finite T >= 0"));
    }
    if opts.reps == 0 {
        return Err(Error::param("reps must be positive"));
    }
    if opts.levels == 0 || opts.levels > 12 {
        return Err(Error::param("levels must lie in 1..=12"));
    }
    Ok(())
}

/// Finest step and half-window in finest-step units; `T` must be a multiple
/// of the coarsest step `a` (up to rounding).
fn lattice(opts: &EstimatorOptions) -> Result<(f64, usize)> {
    let stride = 1usize << (opts.levels - 1);
    let coarse = (opts.t / opts.a).round();
    if (coarse * opts.a - opts.t).abs() > 1e-9 * opts.t.max(opts.a) {
        return Err(Error::param(format!(
            "T = {} must be a multiple of the grid step a = {}",
            opts.t, opts.a
        )));
    }
    let fine = opts.a / stride as f64;
    Ok((fine, coarse as usize * stride))
}

/// Two-sided fBm on `[-n h, n h]` with `B(0) = 0`, as a prepared sampler of
/// `2n + 1` points; callers subtract the centre value.
fn two_sided_sampler(hurst: f64, step: f64, half: usize, method: FbmMethod) -> Result<FbmSampler> {
    FbmSampler::new(hurst, GridSpec::new(0.0, step, 2 * half + 1)?, method)
}

/// Estimate `H_alpha` from the discrete constants `H_alpha(a)` on the
/// ladder.
pub fn estimate_pickands(alpha: f64, opts: &EstimatorOptions, stream: &RngStream) -> Result<ConstantEstimate> {
    check_common(alpha, opts)?;
    if !(opts.t > 0.0) {
        return Err(Error::param("the Pickands window needs T > 0"));
    }
    let (fine, half) = lattice(opts)?;
    if half < 1 {
        return Err(Error::param("window must span at least two lattice points"));
    }
    let key = ConstantKey::Pickands { alpha };
    let levels = opts.levels;
    let hurst = alpha / 2.0;
    match opts.method {
        Method::Ratio => {
            let sampler = two_sided_sampler(hurst, fine, half, opts.fbm_method)?;
            let drift: Vec<f64> = (0..=2 * half)
                .map(|k| (fine * k.abs_diff(half) as f64).powf(alpha))
                .collect();
            let per_rep = par::replicate(opts.reps, |r| {
                let mut b = vec![0.0; 2 * half + 1];
                sampler.sample_into(&mut stream.substream(r).rng(), &mut b);
                let centre = b[half];
                let w: Vec<f64> = b
                    .iter()
                    .zip(&drift)
                    .map(|(x, d)| std::f64::consts::SQRT_2 * (x - centre) - d)
                    .collect();
                ratio_levels(&w, half, fine, levels)
            });
            Ok(reduce(key, opts, Window::Interval(opts.t), true, richardson_order(alpha), per_rep))
        }
        Method::Window => {
            let sampler = FbmSampler::new(hurst, GridSpec::new(0.0, fine, half + 1)?, opts.fbm_method)?;
            let drift: Vec<f64> = (0..=half).map(|k| (fine * k as f64).powf(alpha)).collect();
            let t = opts.t;
            let per_rep = par::replicate(opts.reps, |r| {
                let mut b = vec![0.0; half + 1];
                sampler.sample_into(&mut stream.substream(r).rng(), &mut b);
                let w: Vec<f64> = b
                    .iter()
                    .zip(&drift)
                    .map(|(x, d)| std::f64::consts::SQRT_2 * x - d)
                    .collect();
                let (vals, m) = window_levels(&w, levels);
                (vals.into_iter().map(|v| v / t).collect(), m)
            });
            Ok(reduce(key, opts, Window::Interval(opts.t), false, richardson_order(alpha), per_rep))
        }
    }
}

/// Ratio `max e^W / (step sum e^W)` at each ladder level for a two-sided
/// path with centre index `centre`; level 0 is the coarsest.
fn ratio_levels(w: &[f64], centre: usize, fine: f64, levels: usize) -> (Vec<f64>, f64) {
    let m_fine = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = w.iter().map(|x| (x - m_fine).exp()).collect();
    let vals = (0..levels)
        .map(|l| {
            let stride = 1usize << (levels - 1 - l);
            let step = fine * stride as f64;
            let start = centre % stride;
            let (mut sum, mut top) = (0.0, 0.0f64);
            for k in (start..e.len()).step_by(stride) {
                sum += e[k];
                top = top.max(e[k]);
            }
            top / (step * sum)
        })
        .collect();
    (vals, 0.0)
}

/// `exp(max W)` at each ladder level for a one-sided path starting at
/// index 0, with the exponent clamped; returns the largest raw exponent.
fn window_levels(w: &[f64], levels: usize) -> (Vec<f64>, f64) {
    let mut raw = f64::NEG_INFINITY;
    let vals = (0..levels)
        .map(|l| {
            let stride = 1usize << (levels - 1 - l);
            let m = w.iter().step_by(stride).copied().fold(f64::NEG_INFINITY, f64::max);
            raw = raw.max(m);
            m.clamp(EXP_CLAMP.0, EXP_CLAMP.1).exp()
        })
        .collect();
    (vals, raw)
}

/// Estimate `P_alpha^b` (or `P~_alpha^b` over `[-T, T]`) as the mean of
/// `exp(max sqrt(2) B_{alpha/2}(t) - (1 + b)|t|^alpha)` over the lattice.
pub fn estimate_piterbarg(
    alpha: f64,
    b: f64,
    two_sided: bool,
    opts: &EstimatorOptions,
    stream: &RngStream,
) -> Result<ConstantEstimate> {
    check_common(alpha, opts)?;
    if !(b > 0.0) {
        return Err(Error::param(format!("b must be positive, got {b}")));
    }
    let key = ConstantKey::Piterbarg { alpha, b, two_sided };
    let window = Window::Interval(opts.t);
    let order = richardson_order(alpha);
    let (fine, half) = lattice(opts)?;
    if half == 0 {
        // the lattice is the single point 0, where the exponent vanishes
        let per_rep = vec![(vec![1.0; opts.levels], 0.0); opts.reps as usize];
        return Ok(reduce(key, opts, window, two_sided, order, per_rep));
    }
    let hurst = alpha / 2.0;
    let levels = opts.levels;
    let npts = if two_sided { 2 * half + 1 } else { half + 1 };
    let centre = if two_sided { half } else { 0 };
    let sampler = FbmSampler::new(hurst, GridSpec::new(0.0, fine, npts)?, opts.fbm_method)?;
    let drift: Vec<f64> = (0..npts)
        .map(|k| (1.0 + b) * (fine * k.abs_diff(centre) as f64).powf(alpha))
        .collect();
    let per_rep = par::replicate(opts.reps, |r| {
        let mut x = vec![0.0; npts];
        sampler.sample_into(&mut stream.substream(r).rng(), &mut x);
        let c = x[centre];
        let w: Vec<f64> = x
            .iter()
            .zip(&drift)
            .map(|(v, d)| std::f64::consts::SQRT_2 * (v - c) - d)
            .collect();
        // for the two-sided window align the ladder on the centre
        let w = &w[centre % (1 << (levels - 1))..];
        window_levels(w, levels)
    });
    Ok(reduce(key, opts, window, two_sided, order, per_rep))
}

/// Knobs for the mixed constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedOptions {
    /// Half-width `L` of the `s` window `[-L, L]` (ratio method) or the
    /// length `S` of `[0, S]` (window method).
    pub s: f64,
    pub t: f64,
    /// `t`-step `d`; the `s`-step is `a2 d / |a3|`.
    pub d: f64,
    pub reps: u64,
    pub method: Method,
}

impl Default for MixedOptions {
    fn default() -> Self {
        Self {
            s: 12.0,
            t: 10.0,
            d: 0.1,
            reps: 20_000,
            method: Method::Ratio,
        }
    }
}

/// Variance `|a1 s|^alpha1 + |a2 t - a3 s|^alpha2` of
/// `Y(s, t) = B~(a1 s) + B(a2 t - a3 s)`.
pub fn mixed_field_variance(p: &RegimeParams, s: f64, t: f64) -> f64 {
    (p.a1() * s).abs().powf(p.alpha1()) + (p.a2() * t - p.a3() * s).abs().powf(p.alpha2())
}

/// The lattice of the mixed field: `s_i = i hs`, `t_j = j d`, and `B` is
/// needed at `delta k` with `k = j - sign(a3) i`, `delta = a2 d`.
struct MixedLattice {
    hs: f64,
    i_range: (i64, i64),
    j_range: (i64, i64),
    k_min: i64,
    tilde: FbmSampler,
    main: FbmSampler,
    sign: i64,
}

impl MixedLattice {
    fn new(p: &RegimeParams, i_range: (i64, i64), j_range: (i64, i64), d: f64) -> Result<Self> {
        let hs = p.a2() * d / p.a3().abs();
        let sign = if p.a3() > 0.0 { 1 } else { -1 };
        let ks = [
            j_range.0 - sign * i_range.0,
            j_range.0 - sign * i_range.1,
            j_range.1 - sign * i_range.0,
            j_range.1 - sign * i_range.1,
        ];
        let k_min = *ks.iter().min().expect("non-empty").min(&0);
        let k_max = *ks.iter().max().expect("non-empty").max(&0);
        let i_min = i_range.0.min(0);
        let i_max = i_range.1.max(0);
        let hurst = p.alpha1() / 2.0;
        let tilde = FbmSampler::new(
            hurst,
            GridSpec::new(0.0, p.a1() * hs, (i_max - i_min) as usize + 1)?,
            FbmMethod::Auto,
        )?;
        let main = FbmSampler::new(
            hurst,
            GridSpec::new(0.0, p.a2() * d, (k_max - k_min) as usize + 1)?,
            FbmMethod::Auto,
        )?;
        Ok(Self {
            hs,
            i_range,
            j_range,
            k_min,
            tilde,
            main,
            sign,
        })
    }

    /// `g_i = max_j sqrt(2) Y(s_i, t_j) - var - b |t_j|^beta` for each `i`.
    fn row_maxima(&self, p: &RegimeParams, d: f64, stream: &RngStream) -> Vec<f64> {
        let sqrt2 = std::f64::consts::SQRT_2;
        let i_min = self.i_range.0.min(0);
        let mut bt = vec![0.0; self.tilde.grid().count];
        self.tilde.sample_into(&mut stream.child(1).rng(), &mut bt);
        let bt0 = bt[(-i_min) as usize];
        let mut bm = vec![0.0; self.main.grid().count];
        self.main.sample_into(&mut stream.child(2).rng(), &mut bm);
        let bm0 = bm[(-self.k_min) as usize];
        let delta = p.a2() * d;
        let alpha = p.alpha1();
        let pk: Vec<f64> = (0..bm.len())
            .map(|idx| {
                let k = idx as i64 + self.k_min;
                sqrt2 * (bm[idx] - bm0) - (delta * k as f64).abs().powf(alpha)
            })
            .collect();
        let pt: Vec<f64> = (self.j_range.0..=self.j_range.1)
            .map(|j| p.b() * (d * j as f64).abs().powf(p.beta()))
            .collect();
        (self.i_range.0..=self.i_range.1)
            .map(|i| {
                let s_term = sqrt2 * (bt[(i - i_min) as usize] - bt0) - (p.a1() * self.hs * i as f64).abs().powf(alpha);
                let mut best = f64::NEG_INFINITY;
                for (jj, j) in (self.j_range.0..=self.j_range.1).enumerate() {
                    let k = j - self.sign * i;
                    best = best.max(pk[(k - self.k_min) as usize] - pt[jj]);
                }
                s_term + best
            })
            .collect()
    }
}

/// Estimate `M^b_{Y,beta}` (or its two-sided version over `t in [-T, T]`)
/// at lattice step `d`. Requires `alpha1 = alpha2 = beta`.
pub fn estimate_pickands_piterbarg(
    p: &RegimeParams,
    two_sided: bool,
    opts: &MixedOptions,
    stream: &RngStream,
) -> Result<ConstantEstimate> {
    if !(p.alpha1() == p.alpha2() && p.alpha2() == p.beta()) {
        return Err(Error::param(format!(
            "the mixed constant needs alpha1 = alpha2 = beta, got ({}, {}, {})",
            p.alpha1(),
            p.alpha2(),
            p.beta()
        )));
    }
    if !(opts.d > 0.0) || !(opts.s > 0.0) || !(opts.t >= 0.0) || opts.reps == 0 {
        return Err(Error::param("need d > 0, S > 0, T >= 0 and reps > 0"));
    }
    let key = ConstantKey::pickands_piterbarg(p, two_sided);
    let d = opts.d;
    let hs = p.a2() * d / p.a3().abs();
    let nt = (opts.t / d).round() as i64;
    let ns = (opts.s / hs).round() as i64;
    if ns < 1 {
        return Err(Error::param(format!("S = {} is shorter than one s-step {hs}", opts.s)));
    }
    let j_range = if two_sided { (-nt, nt) } else { (0, nt) };
    let est_opts = EstimatorOptions {
        t: opts.t,
        a: d,
        reps: opts.reps,
        levels: 1,
        method: opts.method,
        fbm_method: FbmMethod::Auto,
    };
    match opts.method {
        Method::Ratio => {
            let lat = MixedLattice::new(p, (-ns, ns), j_range, d)?;
            let per_rep = par::replicate(opts.reps, |r| {
                let g = lat.row_maxima(p, d, &stream.substream(r));
                let m = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let sum: f64 = g.iter().map(|x| (x - m).exp()).sum();
                let g0 = g[ns as usize];
                (vec![g0.clamp(EXP_CLAMP.0, EXP_CLAMP.1).exp() / (hs * sum)], g0)
            });
            let window = Window::Rectangle {
                s: ns as f64 * hs,
                t: opts.t,
            };
            let mut e = reduce(key, &est_opts, window, two_sided, 1.0, per_rep);
            e.grid_step = d;
            Ok(e)
        }
        Method::Window => {
            // simulate [0, 2S] once and report the S-ladder (S, 2S)
            let lat = MixedLattice::new(p, (0, 2 * ns), j_range, d)?;
            let s_len = ns as f64 * hs;
            let per_rep = par::replicate(opts.reps, |r| {
                let g = lat.row_maxima(p, d, &stream.substream(r));
                let m1 = g[..=ns as usize].iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let m2 = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let e = |m: f64| m.clamp(EXP_CLAMP.0, EXP_CLAMP.1).exp();
                (vec![e(m1) / s_len, e(m2) / (2.0 * s_len)], m2)
            });
            let ladder: Vec<LevelEstimate> = (0..2)
                .map(|l| {
                    let col: Vec<f64> = per_rep.iter().map(|x| x.0[l]).collect();
                    let (value, std_error) = par::mean_and_se(&col);
                    LevelEstimate {
                        grid_step: d,
                        window: Window::Rectangle {
                            s: s_len * (l + 1) as f64,
                            t: opts.t,
                        },
                        value,
                        std_error,
                    }
                })
                .collect();
            let max_exponent = per_rep.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
            if max_exponent > EXP_WARN {
                log::warn!("exponent {max_exponent:.1} is close to the overflow cap");
            }
            Ok(ConstantEstimate {
                key,
                value: ladder[0].value,
                std_error: ladder[0].std_error,
                replications: opts.reps,
                grid_step: d,
                window: ladder[0].window,
                two_sided,
                method: Method::Window,
                levels: ladder,
                extrapolated: false,
                max_exponent,
            })
        }
    }
}
