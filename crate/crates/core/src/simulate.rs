//! Grid samplers for the Gaussian processes and derived fields.
//!
//! Samplers come in two flavours: one-shot functions taking a
//! [`RngStream`], and prepared samplers (factorizations and FFT plans built
//! once) for Monte Carlo loops.

use std::collections::VecDeque;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::model::{Covariance, FbmMixture, GridSpec, GridSpec2};
use crate::rng::{self, RngStream};

/// Default cap on the number of points factorized densely.
pub const DENSE_CAP: usize = 4096;

/// Extra embedding doublings tried before falling back to a dense
/// factorization.
const MAX_DOUBLINGS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplePath1D {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldSample2D {
    pub grid: GridSpec2,
    pub values: Vec<f64>,
}

impl SamplePath1D {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.count {
            return Err(Error::size(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.count
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::numerical("sampled path contains non-finite values"));
        }
        Ok(Self { grid, values })
    }
}

impl FieldSample2D {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }
}

/// Exact sampler for a stationary Gaussian sequence with autocovariance
/// `c(k)`, via circulant embedding.
#[derive(Clone)]
pub struct CirculantSampler {
    n: usize,
    weights: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for CirculantSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CirculantSampler {{ n: {}, m: {} }}", self.n, self.weights.len())
    }
}

impl CirculantSampler {
    /// Returns `Ok(None)` when no embedding up to `2^MAX_DOUBLINGS` times the
    /// minimal size is non-negative definite.
    pub fn new(acf: impl Fn(usize) -> f64, n: usize) -> Result<Option<Self>> {
        if n < 2 {
            return Err(Error::size("circulant embedding needs at least two points"));
        }
        let mut planner = FftPlanner::new();
        let mut m = 2 * (n - 1).next_power_of_two();
        for _ in 0..=MAX_DOUBLINGS {
            let half = m / 2;
            let row: Vec<f64> = (0..=half).map(&acf).collect();
            if let Some(bad) = row.iter().position(|x| !x.is_finite()) {
                return Err(Error::model(format!("covariance is not finite at lag index {bad}")));
            }
            let mut buf: Vec<Complex<f64>> = (0..m)
                .map(|k| Complex::new(row[k.min(m - k)], 0.0))
                .collect();
            let fft = planner.plan_fft_forward(m);
            fft.process(&mut buf);
            let max = buf.iter().map(|c| c.re).fold(f64::MIN, f64::max);
            let min = buf.iter().map(|c| c.re).fold(f64::MAX, f64::min);
            if min >= -1e-10 * max.abs() {
                let weights = buf.iter().map(|c| (c.re.max(0.0) / m as f64).sqrt()).collect();
                return Ok(Some(Self { n, weights, fft }));
            }
            log::debug!("circulant embedding of size {m} has eigenvalue {min:e}; doubling");
            m *= 2;
        }
        Ok(None)
    }

    pub fn embedding_size(&self) -> usize {
        self.weights.len()
    }

    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let mut buf: Vec<Complex<f64>> = self
            .weights
            .iter()
            .map(|&w| Complex::new(w * rng::normal(rng), w * rng::normal(rng)))
            .collect();
        self.fft.process(&mut buf);
        for (o, c) in out.iter_mut().zip(&buf[..self.n]) {
            *o = c.re;
        }
    }
}

/// Exact sampler from a dense covariance matrix.
#[derive(Debug, Clone)]
pub struct DenseSampler {
    chol: Cholesky,
}

impl DenseSampler {
    pub fn new(cov: &[f64], n: usize) -> Result<Self> {
        if cov.iter().any(|x| !x.is_finite()) {
            return Err(Error::model("covariance matrix has non-finite entries"));
        }
        Ok(Self {
            chol: Cholesky::factor_with_jitter(cov, n)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.chol.dim()
    }

    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let mut z = vec![0.0; self.dim()];
        rng::fill_normal(rng, &mut z);
        self.chol.mul_vec(&z, out);
    }
}

#[derive(Debug, Clone)]
enum StationaryMethod {
    Single(f64),
    Circulant(CirculantSampler),
    Dense(DenseSampler),
}

/// Prepared sampler for a stationary process on a 1-D grid.
#[derive(Debug, Clone)]
pub struct StationarySampler {
    grid: GridSpec,
    method: StationaryMethod,
}

impl StationarySampler {
    pub fn new(r: &Covariance, grid: GridSpec) -> Result<Self> {
        let step = grid.step;
        Self::from_acf(|k| r.eval(k as f64 * step), grid)
    }

    /// From the autocovariance at lag index `k` (lag `k * step`).
    pub fn from_acf(acf: impl Fn(usize) -> f64, grid: GridSpec) -> Result<Self> {
        let n = grid.count;
        let c0 = acf(0);
        if !c0.is_finite() || c0 < 0.0 {
            return Err(Error::model(format!("covariance at lag 0 is {c0}")));
        }
        if n == 1 {
            return Ok(Self {
                grid,
                method: StationaryMethod::Single(c0.sqrt()),
            });
        }
        if let Some(c) = CirculantSampler::new(&acf, n)? {
            return Ok(Self {
                grid,
                method: StationaryMethod::Circulant(c),
            });
        }
        if n > DENSE_CAP {
            return Err(Error::numerical(format!(
                "circulant embedding failed and {n} points exceed the dense cap {DENSE_CAP}"
            )));
        }
        log::info!("circulant embedding not non-negative definite; using dense factorization");
        let cov = toeplitz(&acf, n)?;
        Ok(Self {
            grid,
            method: StationaryMethod::Dense(DenseSampler::new(&cov, n)?),
        })
    }

    /// Force the dense factorization, for cross-checking the embedding.
    pub fn dense_from_acf(acf: impl Fn(usize) -> f64, grid: GridSpec) -> Result<Self> {
        let n = grid.count;
        if n > DENSE_CAP {
            return Err(Error::size(format!("{n} points exceed the dense cap {DENSE_CAP}")));
        }
        let cov = toeplitz(&acf, n)?;
        Ok(Self {
            grid,
            method: StationaryMethod::Dense(DenseSampler::new(&cov, n)?),
        })
    }

    pub fn method_name(&self) -> &'static str {
        match self.method {
            StationaryMethod::Single(_) => "single",
            StationaryMethod::Circulant(_) => "circulant",
            StationaryMethod::Dense(_) => "dense",
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match &self.method {
            StationaryMethod::Single(sd) => out[0] = sd * rng::normal(rng),
            StationaryMethod::Circulant(c) => c.sample_into(rng, out),
            StationaryMethod::Dense(d) => d.sample_into(rng, out),
        }
    }

    pub fn sample(&self, stream: &RngStream) -> SamplePath1D {
        let mut values = vec![0.0; self.grid.count];
        self.sample_into(&mut stream.rng(), &mut values);
        SamplePath1D {
            grid: self.grid,
            values,
        }
    }
}

fn toeplitz(acf: impl Fn(usize) -> f64, n: usize) -> Result<Vec<f64>> {
    let row: Vec<f64> = (0..n).map(acf).collect();
    if row.iter().any(|x| !x.is_finite()) {
        return Err(Error::model("covariance is not finite on the grid"));
    }
    let mut cov = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            cov[i * n + j] = row[i.abs_diff(j)];
        }
    }
    Ok(cov)
}

/// One realization of a stationary process with correlation `r` on `grid`.
pub fn sample_stationary_path(r: &Covariance, grid: GridSpec, stream: &RngStream) -> Result<SamplePath1D> {
    Ok(StationarySampler::new(r, grid)?.sample(stream))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FbmMethod {
    /// Independent increments for `H = 1/2`, the line `t N` for `H = 1`,
    /// circulant embedding of fractional Gaussian noise otherwise.
    #[default]
    Auto,
    /// Always embed the increment sequence.
    Circulant,
}

#[derive(Debug, Clone)]
enum FbmKind {
    Brownian,
    Line,
    Noise(StationarySampler),
}

/// Prepared fractional Brownian motion sampler on a grid starting at 0.
#[derive(Debug, Clone)]
pub struct FbmSampler {
    hurst: f64,
    grid: GridSpec,
    kind: FbmKind,
}

impl FbmSampler {
    pub fn new(hurst: f64, grid: GridSpec, method: FbmMethod) -> Result<Self> {
        if !(hurst > 0.0 && hurst <= 1.0) {
            return Err(Error::param(format!("Hurst index must lie in (0, 1], got {hurst}")));
        }
        if grid.origin != 0.0 {
            return Err(Error::param("fBm grids must start at 0"));
        }
        let kind = match (method, hurst) {
            (FbmMethod::Auto, 0.5) => FbmKind::Brownian,
            (FbmMethod::Auto, 1.0) => FbmKind::Line,
            _ if grid.count == 1 => FbmKind::Brownian,
            _ => {
                let scale = grid.step.powf(2.0 * hurst);
                let acf = |k: usize| scale * fgn_acf(hurst, k);
                let noise_grid = GridSpec::new(0.0, grid.step, grid.count - 1)?;
                FbmKind::Noise(StationarySampler::from_acf(acf, noise_grid)?)
            }
        };
        Ok(Self { hurst, grid, kind })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let n = self.grid.count;
        out[0] = 0.0;
        match &self.kind {
            FbmKind::Brownian => {
                let sd = self.grid.step.sqrt();
                let mut acc = 0.0;
                for o in out[1..n].iter_mut() {
                    acc += sd * rng::normal(rng);
                    *o = acc;
                }
            }
            FbmKind::Line => {
                let z = rng::normal(rng);
                for (i, o) in out[1..n].iter_mut().enumerate() {
                    *o = z * self.grid.step * (i + 1) as f64;
                }
            }
            FbmKind::Noise(s) => {
                s.sample_into(rng, &mut out[1..n]);
                let mut acc = 0.0;
                for o in out[1..n].iter_mut() {
                    acc += *o;
                    *o = acc;
                }
            }
        }
    }

    pub fn sample(&self, stream: &RngStream) -> SamplePath1D {
        let mut values = vec![0.0; self.grid.count];
        self.sample_into(&mut stream.rng(), &mut values);
        SamplePath1D {
            grid: self.grid,
            values,
        }
    }
}

/// Autocovariance of unit-step fractional Gaussian noise at lag `k`.
fn fgn_acf(h: f64, k: usize) -> f64 {
    let k = k as f64;
    let p = 2.0 * h;
    0.5 * ((k + 1.0).powf(p) - 2.0 * k.powf(p) + (k - 1.0).abs().powf(p))
}

pub fn sample_fbm(hurst: f64, grid: GridSpec, stream: &RngStream) -> Result<SamplePath1D> {
    Ok(FbmSampler::new(hurst, grid, FbmMethod::Auto)?.sample(stream))
}

/// Prepared sampler for `sum_i lambda_i B_{H_i}`; component `i` draws from
/// `stream.child(i)`.
#[derive(Debug, Clone)]
pub struct MixtureSampler {
    lambdas: Vec<f64>,
    parts: Vec<FbmSampler>,
}

impl MixtureSampler {
    pub fn new(mix: &FbmMixture, grid: GridSpec) -> Result<Self> {
        let parts = mix
            .hursts()
            .iter()
            .map(|&h| FbmSampler::new(h, grid, FbmMethod::Auto))
            .collect::<Result<_>>()?;
        Ok(Self {
            lambdas: mix.lambdas().to_vec(),
            parts,
        })
    }

    pub fn grid(&self) -> GridSpec {
        self.parts[0].grid
    }

    pub fn sample_into(&self, stream: &RngStream, out: &mut [f64]) {
        out.fill(0.0);
        let mut buf = vec![0.0; out.len()];
        for (i, (l, part)) in self.lambdas.iter().zip(&self.parts).enumerate() {
            part.sample_into(&mut stream.child(i as u64).rng(), &mut buf);
            for (o, b) in out.iter_mut().zip(&buf) {
                *o += l * b;
            }
        }
    }

    pub fn sample(&self, stream: &RngStream) -> SamplePath1D {
        let mut values = vec![0.0; self.grid().count];
        self.sample_into(stream, &mut values);
        SamplePath1D {
            grid: self.grid(),
            values,
        }
    }
}

pub fn sample_fbm_mixture(
    lambdas: &[f64],
    hursts: &[f64],
    grid: GridSpec,
    stream: &RngStream,
) -> Result<SamplePath1D> {
    let mix = FbmMixture::new(lambdas.to_vec(), hursts.to_vec())?;
    Ok(MixtureSampler::new(&mix, grid)?.sample(stream))
}

/// Prepared sampler for `X(t) = sum_{j<n} int_0^t zeta_j`, drawn from its
/// exact covariance.
#[derive(Debug, Clone)]
pub struct IntegratedSampler {
    grid: GridSpec,
    dense: Option<DenseSampler>,
}

impl IntegratedSampler {
    pub fn new(r_zeta: &Covariance, n: usize, grid: GridSpec) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("integrated process needs n >= 1 components"));
        }
        if grid.origin != 0.0 {
            return Err(Error::param("integrated-process grids must start at 0"));
        }
        let m = grid.count - 1;
        if m > DENSE_CAP {
            return Err(Error::size(format!("{m} points exceed the dense cap {DENSE_CAP}")));
        }
        if m == 0 {
            return Ok(Self { grid, dense: None });
        }
        let var: Vec<f64> = (0..=m)
            .map(|k| crate::model::integrated_variance(r_zeta, n, k as f64 * grid.step))
            .collect::<Result<_>>()?;
        // X(0) = 0 is dropped from the factorization.
        let mut cov = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                cov[i * m + j] = 0.5 * (var[i + 1] + var[j + 1] - var[i.abs_diff(j)]);
            }
        }
        Ok(Self {
            grid,
            dense: Some(DenseSampler::new(&cov, m)?),
        })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        out[0] = 0.0;
        if let Some(d) = &self.dense {
            d.sample_into(rng, &mut out[1..]);
        }
    }

    pub fn sample(&self, stream: &RngStream) -> SamplePath1D {
        let mut values = vec![0.0; self.grid.count];
        self.sample_into(&mut stream.rng(), &mut values);
        SamplePath1D {
            grid: self.grid,
            values,
        }
    }
}

pub fn sample_integrated_process(
    r_zeta: &Covariance,
    n: usize,
    grid: GridSpec,
    stream: &RngStream,
) -> Result<SamplePath1D> {
    Ok(IntegratedSampler::new(r_zeta, n, grid)?.sample(stream))
}

/// Prepared dense sampler for a 2-D field with covariance
/// `cov((s, t), (s', t'))`.
#[derive(Debug, Clone)]
pub struct FieldSampler {
    grid: GridSpec2,
    dense: DenseSampler,
}

impl FieldSampler {
    pub fn new(cov: impl Fn((f64, f64), (f64, f64)) -> f64, grid: GridSpec2, cap: usize) -> Result<Self> {
        let n = grid.len();
        if n > cap {
            return Err(Error::size(format!("{n} grid points exceed the dense cap {cap}")));
        }
        let pts: Vec<(f64, f64)> = (0..grid.s.count)
            .flat_map(|i| (0..grid.t.count).map(move |j| (grid.s.point(i), grid.t.point(j))))
            .collect();
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let c = cov(pts[i], pts[j]);
                if i != j {
                    let c2 = cov(pts[j], pts[i]);
                    if (c - c2).abs() > 1e-10 * c.abs().max(1.0) {
                        return Err(Error::model(format!(
                            "covariance is not symmetric at {:?}, {:?}: {c} vs {c2}",
                            pts[i], pts[j]
                        )));
                    }
                }
                m[i * n + j] = c;
                m[j * n + i] = c;
            }
        }
        Ok(Self {
            grid,
            dense: DenseSampler::new(&m, n)?,
        })
    }

    pub fn sample(&self, stream: &RngStream) -> FieldSample2D {
        let mut values = vec![0.0; self.grid.len()];
        self.dense.sample_into(&mut stream.rng(), &mut values);
        FieldSample2D {
            grid: self.grid,
            values,
        }
    }
}

pub fn sample_field_cholesky(
    cov: impl Fn((f64, f64), (f64, f64)) -> f64,
    grid: GridSpec2,
    stream: &RngStream,
) -> Result<FieldSample2D> {
    Ok(FieldSampler::new(cov, grid, DENSE_CAP)?.sample(stream))
}

/// Index extents `(ns, nt)` of the Shepp grid `[0, S] x [0, T]` on a path
/// with the given step.
fn shepp_extents(path: &SamplePath1D, s: f64, t: f64) -> Result<(usize, usize)> {
    let h = path.grid.step;
    let ns = (s / h).round();
    let nt = (t / h).round();
    if s < 0.0 || t < 0.0 || (ns * h - s).abs() > 1e-9 * s.max(h) || (nt * h - t).abs() > 1e-9 * t.max(h) {
        return Err(Error::param(format!("S = {s} and T = {t} must be non-negative multiples of the step {h}")));
    }
    let (ns, nt) = (ns as usize, nt as usize);
    if ns + nt + 1 > path.values.len() {
        return Err(Error::size(format!(
            "path spans {} points but [0, S + T] needs {}",
            path.values.len(),
            ns + nt + 1
        )));
    }
    Ok((ns, nt))
}

/// `Z(s, t) = X(s + t) - X(s)` on `[0, S] x [0, T]`.
pub fn derive_shepp_field(path: &SamplePath1D, s: f64, t: f64) -> Result<FieldSample2D> {
    let (ns, nt) = shepp_extents(path, s, t)?;
    let h = path.grid.step;
    let grid = GridSpec2 {
        s: GridSpec::new(0.0, h, ns + 1)?,
        t: GridSpec::new(0.0, h, nt + 1)?,
    };
    let x = &path.values;
    let mut values = Vec::with_capacity(grid.len());
    for i in 0..=ns {
        for j in 0..=nt {
            values.push(x[i + j] - x[i]);
        }
    }
    Ok(FieldSample2D { grid, values })
}

/// `max_{0<=i<=ns, 0<=j<=nt} x[i + j] - x[i]` in linear time with a
/// monotone deque.
pub fn shepp_supremum_indices(x: &[f64], ns: usize, nt: usize) -> f64 {
    assert!(ns + nt < x.len());
    let mut dq: VecDeque<usize> = VecDeque::new();
    let mut best = f64::NEG_INFINITY;
    let mut next = 0;
    for i in 0..=ns {
        while next <= i + nt {
            while dq.back().is_some_and(|&k| x[k] <= x[next]) {
                dq.pop_back();
            }
            dq.push_back(next);
            next += 1;
        }
        while dq.front().is_some_and(|&k| k < i) {
            dq.pop_front();
        }
        let m = x[*dq.front().expect("window non-empty")];
        best = best.max(m - x[i]);
    }
    best
}

/// Supremum of the Shepp field over `[0, S] x [0, T]` without materializing
/// it.
pub fn shepp_supremum(path: &SamplePath1D, s: f64, t: f64) -> Result<f64> {
    let (ns, nt) = shepp_extents(path, s, t)?;
    Ok(shepp_supremum_indices(&path.values, ns, nt))
}

/// Settings for [`sample_storage_path`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StorageConfig {
    pub step: f64,
    /// The inner supremum is truncated at `S + horizon_mult * T0 * u_ref`.
    pub horizon_mult: f64,
    pub u_ref: f64,
    /// Reject `horizon_mult < 5` instead of warning.
    pub strict: bool,
}

impl Default for StorageConfig {
    fn default() -> Self {
        Self {
            step: 0.01,
            horizon_mult: 10.0,
            u_ref: 1.0,
            strict: false,
        }
    }
}

/// Prepared sampler for the workload `Z(s) = sup_{t>=s} (B_H(t) - B_H(s) -
/// c (t - s))` on `[0, S]`.
#[derive(Debug, Clone)]
pub struct StorageSampler {
    c: f64,
    fbm: FbmSampler,
    out_grid: GridSpec,
}

impl StorageSampler {
    pub fn new(hurst: f64, c: f64, s: f64, cfg: StorageConfig) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(Error::param(format!("storage Hurst index must lie in (0, 1), got {hurst}")));
        }
        if !(c > 0.0) {
            return Err(Error::param(format!("service rate must be positive, got {c}")));
        }
        if cfg.horizon_mult < 5.0 {
            let msg = format!("horizon_mult = {} < 5 truncates the inner supremum", cfg.horizon_mult);
            if cfg.strict {
                return Err(Error::Config(msg));
            }
            log::warn!("{msg}");
        }
        let t0 = hurst / (c * (1.0 - hurst));
        let out_grid = GridSpec::covering(s, cfg.step)?;
        let horizon = (cfg.horizon_mult * t0 * cfg.u_ref / cfg.step).ceil() as usize;
        let fbm = FbmSampler::new(hurst, GridSpec::new(0.0, cfg.step, out_grid.count + horizon)?, FbmMethod::Auto)?;
        Ok(Self { c, fbm, out_grid })
    }

    pub fn sample(&self, stream: &RngStream) -> SamplePath1D {
        let g = self.fbm.grid();
        let mut y = vec![0.0; g.count];
        self.fbm.sample_into(&mut stream.rng(), &mut y);
        for (k, v) in y.iter_mut().enumerate() {
            *v -= self.c * g.point(k);
        }
        // suffix maxima
        let mut run = f64::NEG_INFINITY;
        let mut sup = vec![0.0; g.count];
        for k in (0..g.count).rev() {
            run = run.max(y[k]);
            sup[k] = run;
        }
        let values = (0..self.out_grid.count).map(|i| sup[i] - y[i]).collect();
        SamplePath1D {
            grid: self.out_grid,
            values,
        }
    }
}

pub fn sample_storage_path(
    hurst: f64,
    c: f64,
    s: f64,
    stream: &RngStream,
    cfg: StorageConfig,
) -> Result<SamplePath1D> {
    Ok(StorageSampler::new(hurst, c, s, cfg)?.sample(stream))
}

fn index_range(g: &GridSpec, lo: f64, hi: f64) -> std::ops::RangeInclusive<usize> {
    let eps = 1e-9 * g.step;
    let first = ((lo - g.origin - eps) / g.step).ceil().max(0.0) as usize;
    let last = ((hi - g.origin + eps) / g.step).floor();
    if last < 0.0 {
        #[allow(clippy::reversed_empty_ranges)]
        return 1..=0;
    }
    first..=(last as usize).min(g.count - 1)
}

/// Maximum over grid points in `[lo, hi]`.
pub fn grid_supremum_1d(path: &SamplePath1D, lo: f64, hi: f64) -> Result<f64> {
    let r = index_range(&path.grid, lo, hi);
    if r.is_empty() {
        return Err(Error::size(format!("no grid points in [{lo}, {hi}]")));
    }
    Ok(path.values[r].iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

/// Maximum over grid points in `[s_lo, s_hi] x [t_lo, t_hi]`.
pub fn grid_supremum_2d(field: &FieldSample2D, s: (f64, f64), t: (f64, f64)) -> Result<f64> {
    let rs = index_range(&field.grid.s, s.0, s.1);
    let rt = index_range(&field.grid.t, t.0, t.1);
    if rs.is_empty() || rt.is_empty() {
        return Err(Error::size(format!("no grid points in {s:?} x {t:?}")));
    }
    let mut m = f64::NEG_INFINITY;
    for i in rs {
        for j in rt.clone() {
            m = m.max(field.get(i, j));
        }
    }
    Ok(m)
}

const MAGIC: &[u8; 4] = b"GXTR";
const DUMP_VERSION: u16 = 1;

/// Contents of a binary dump: dimension, counts and values.
#[derive(Debug, Clone, PartialEq)]
pub struct Dump {
    pub dim: u16,
    pub counts: [u32; 2],
    pub values: Vec<f64>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_dump(path: &Path, dim: u16, counts: [u32; 2], values: &[f64]) -> Result<()> {
    let f = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(f);
    let mut header = Vec::with_capacity(16);
    header.extend_from_slice(MAGIC);
    header.extend_from_slice(&DUMP_VERSION.to_le_bytes());
    header.extend_from_slice(&dim.to_le_bytes());
    header.extend_from_slice(&counts[0].to_le_bytes());
    header.extend_from_slice(&counts[1].to_le_bytes());
    w.write_all(&header).map_err(io_err(path))?;
    for v in values {
        w.write_all(&v.to_le_bytes()).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn count_u32(n: usize) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::size(format!("{n} points do not fit the dump header")))
}

pub fn write_path_binary(path: &Path, p: &SamplePath1D) -> Result<()> {
    write_dump(path, 1, [count_u32(p.grid.count)?, 1], &p.values)
}

pub fn write_field_binary(path: &Path, f: &FieldSample2D) -> Result<()> {
    write_dump(path, 2, [count_u32(f.grid.s.count)?, count_u32(f.grid.t.count)?], &f.values)
}

pub fn read_binary(path: &Path) -> Result<Dump> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(io_err(path))?;
    if bytes.len() < 16 || &bytes[..4] != MAGIC {
        return Err(Error::Data(format!("{} is not a GXTR dump", path.display())));
    }
    let u16_at = |k: usize| u16::from_le_bytes([bytes[k], bytes[k + 1]]);
    let u32_at = |k: usize| u32::from_le_bytes(bytes[k..k + 4].try_into().expect("4 bytes"));
    let version = u16_at(4);
    if version != DUMP_VERSION {
        return Err(Error::Data(format!("unsupported dump version {version}")));
    }
    let dim = u16_at(6);
    let counts = [u32_at(8), u32_at(12)];
    let n = counts[0] as usize * counts[1] as usize;
    if bytes.len() != 16 + 8 * n {
        return Err(Error::Data(format!(
            "dump declares {n} values but holds {} bytes of data",
            bytes.len() - 16
        )));
    }
    let values = bytes[16..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Ok(Dump { dim, counts, values })
}

/// CSV with header `t,value`.
pub fn write_path_csv(path: &Path, p: &SamplePath1D) -> Result<()> {
    let f = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(f);
    writeln!(w, "t,value").map_err(io_err(path))?;
    for (i, v) in p.values.iter().enumerate() {
        writeln!(w, "{:.16e},{:.16e}", p.grid.point(i), v).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// CSV with header `s,t,value`.
pub fn write_field_csv(path: &Path, f: &FieldSample2D) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "s,t,value").map_err(io_err(path))?;
    for i in 0..f.grid.s.count {
        for j in 0..f.grid.t.count {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e}",
                f.grid.s.point(i),
                f.grid.t.point(j),
                f.get(i, j)
            )
            .map_err(io_err(path))?;
        }
    }
    w.flush().map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(step: f64, count: usize) -> GridSpec {
        GridSpec::new(0.0, step, count).unwrap()
    }

    #[test]
    fn fbm_starts_at_zero_and_is_deterministic() {
        for h in [0.25, 0.5, 0.75, 1.0] {
            let s = RngStream::new(11, 5);
            let a = sample_fbm(h, grid(0.01, 200), &s).unwrap();
            let b = sample_fbm(h, grid(0.01, 200), &s).unwrap();
            assert_eq!(a.values[0], 0.0);
            assert_eq!(a, b);
        }
        assert!(sample_fbm(1.2, grid(0.01, 10), &RngStream::new(1, 0)).is_err());
        assert!(sample_fbm(0.5, GridSpec::new(1.0, 0.1, 10).unwrap(), &RngStream::new(1, 0)).is_err());
    }

    #[test]
    fn circulant_weights_reproduce_covariance() {
        // Var of each coordinate equals sum of weights^2.
        let c = CirculantSampler::new(|k| (-(k as f64 * 0.1)).exp(), 50).unwrap().unwrap();
        let s: f64 = c.weights.iter().map(|w| w * w).sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert_eq!(c.embedding_size(), 128);
    }

    #[test]
    fn single_point_grid() {
        let p = sample_stationary_path(&Covariance::Gauss, grid(0.1, 1), &RngStream::new(3, 0)).unwrap();
        assert_eq!(p.values.len(), 1);
    }

    #[test]
    fn shepp_field_and_supremum_agree() {
        let p = sample_fbm(0.5, grid(0.1, 41), &RngStream::new(2, 0)).unwrap();
        let f = derive_shepp_field(&p, 3.0, 1.0).unwrap();
        for i in 0..f.grid.s.count {
            assert_eq!(f.get(i, 0), 0.0);
        }
        let brute = f.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(shepp_supremum(&p, 3.0, 1.0).unwrap(), brute);
        assert!(derive_shepp_field(&p, 3.5, 1.0).is_err());
        assert!(matches!(derive_shepp_field(&p, 3.0, 1.05), Err(Error::Parameter(_))));
    }

    #[test]
    fn deque_supremum_matches_brute_force() {
        let x: Vec<f64> = (0..60).map(|k| ((k * 37 % 17) as f64).sin()).collect();
        for (ns, nt) in [(0, 0), (10, 0), (0, 10), (20, 7), (30, 29)] {
            let mut brute = f64::NEG_INFINITY;
            for i in 0..=ns {
                for j in 0..=nt {
                    brute = brute.max(x[i + j] - x[i]);
                }
            }
            assert_eq!(shepp_supremum_indices(&x, ns, nt), brute);
        }
    }

    #[test]
    fn storage_is_non_negative() {
        let cfg = StorageConfig::default();
        let z = sample_storage_path(0.25, 1.0, 2.0, &RngStream::new(9, 1), cfg).unwrap();
        assert!(z.values.iter().all(|&v| v >= 0.0));
        let strict = StorageConfig {
            horizon_mult: 3.0,
            strict: true,
            ..cfg
        };
        assert!(matches!(
            sample_storage_path(0.25, 1.0, 2.0, &RngStream::new(9, 1), strict),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn grid_supremum_examples() {
        let p = SamplePath1D::new(grid(1.0, 3), vec![1.0, 5.0, 2.0]).unwrap();
        assert_eq!(grid_supremum_1d(&p, 0.0, 2.0).unwrap(), 5.0);
        assert_eq!(grid_supremum_1d(&p, 2.0, 2.0).unwrap(), 2.0);
        assert!(grid_supremum_1d(&p, 0.2, 0.8).is_err());
        let g2 = GridSpec2 {
            s: grid(1.0, 2),
            t: grid(1.0, 2),
        };
        let f = FieldSample2D {
            grid: g2,
            values: vec![3.0; 4],
        };
        assert_eq!(grid_supremum_2d(&f, (0.0, 1.0), (0.0, 1.0)).unwrap(), 3.0);
    }

    #[test]
    fn field_sampler_rejects_asymmetry_and_cap() {
        let g2 = GridSpec2 {
            s: grid(1.0, 2),
            t: grid(1.0, 2),
        };
        let bad = |x: (f64, f64), y: (f64, f64)| if x == y { 1.0 } else { 0.1 + 0.01 * x.0 };
        assert!(matches!(
            sample_field_cholesky(bad, g2, &RngStream::new(1, 0)),
            Err(Error::Model(_))
        ));
        let big = GridSpec2 {
            s: grid(1.0, 65),
            t: grid(1.0, 64),
        };
        assert!(matches!(
            FieldSampler::new(|_, _| 1.0, big, DENSE_CAP),
            Err(Error::Size(_))
        ));
        let one = GridSpec2 {
            s: grid(1.0, 1),
            t: grid(1.0, 1),
        };
        let f = sample_field_cholesky(|_, _| 4.0, one, &RngStream::new(1, 0)).unwrap();
        assert_eq!(f.values.len(), 1);
    }

    #[test]
    fn binary_and_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = sample_fbm(0.3, grid(0.1, 17), &RngStream::new(4, 4)).unwrap();
        let bin = dir.path().join("p.bin");
        write_path_binary(&bin, &p).unwrap();
        let d = read_binary(&bin).unwrap();
        assert_eq!((d.dim, d.counts), (1, [17, 1]));
        assert_eq!(d.values, p.values);
        assert_eq!(std::fs::metadata(&bin).unwrap().len(), 16 + 17 * 8);
        let csv = dir.path().join("p.csv");
        write_path_csv(&csv, &p).unwrap();
        let text = std::fs::read_to_string(&csv).unwrap();
        let line = text.lines().nth(3).unwrap();
        let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(v, p.values[2]);
        let f = derive_shepp_field(&p, 1.0, 0.5).unwrap();
        write_field_binary(&bin, &f).unwrap();
        let d = read_binary(&bin).unwrap();
        assert_eq!((d.dim, d.counts), (2, [11, 6]));
        let e = write_path_csv(Path::new("/nonexistent-dir/x.csv"), &p).unwrap_err();
        assert!(e.to_string().contains("/nonexistent-dir/x.csv"));
    }
}
