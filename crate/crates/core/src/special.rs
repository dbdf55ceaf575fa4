//! Scalar special functions used by the closed-form evaluators.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Gamma function (NaN at the poles `0, -1, -2, ...`).
pub fn gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return f64::NAN;
    }
    libm::tgamma(x)
}

/// Standard normal upper tail `P(N > u)`.
///
/// Accurate to roughly `u^2 * 1e-16` relative error while the result is a
/// normal f64; below about 1e-300 (u > 37) use [`ln_normal_tail`].
pub fn normal_tail(u: f64) -> f64 {
    0.5 * libm::erfc(u * FRAC_1_SQRT_2)
}

/// Natural log of the standard normal upper tail, usable far beyond the
/// underflow point of [`normal_tail`].
pub fn ln_normal_tail(u: f64) -> f64 {
    if u < 30.0 {
        return normal_tail(u).ln();
    }
    // Asymptotic Mills-ratio series; the truncation error at u = 30 is
    // about 945 / u^10.
    let z = 1.0 / (u * u);
    let series = 1.0 - z * (1.0 - 3.0 * z * (1.0 - 5.0 * z * (1.0 - 7.0 * z)));
    -0.5 * u * u - u.ln() - 0.5 * (2.0 * PI).ln() + series.ln()
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Gumbel distribution function `exp(-e^{-x})`.
pub fn gumbel_cdf(x: f64) -> f64 {
    (-(-x).exp()).exp()
}

/// Gumbel quantile function, inverse of [`gumbel_cdf`].
pub fn gumbel_quantile(p: f64) -> f64 {
    -(-p.ln()).ln()
}
