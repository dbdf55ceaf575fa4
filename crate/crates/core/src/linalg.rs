//! Dense Cholesky factorization for covariance sampling.

use crate::error::{Error, Result};

/// Lower-triangular factor `L` with `L L^T = A`, stored row-major (full
/// square storage, upper part zero).
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    lower: Vec<f64>,
    jitter: f64,
}

/// Jitter ladder applied to the diagonal (relative to the mean diagonal)
/// when a pivot fails.
const JITTER_LADDER: [f64; 6] = [0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8];

impl Cholesky {
    /// Plain factorization; on failure returns the index of the first
    /// non-positive pivot.
    pub fn factor(a: &[f64], n: usize) -> std::result::Result<Self, usize> {
        Self::factor_shifted(a, n, 0.0)
    }

    fn factor_shifted(a: &[f64], n: usize, shift: f64) -> std::result::Result<Self, usize> {
        assert_eq!(a.len(), n * n);
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut sum = a[i * n + j];
                if i == j {
                    sum += shift;
                }
                let (ri, rj) = (&l[i * n..i * n + j], &l[j * n..j * n + j]);
                sum -= ri.iter().zip(rj).map(|(x, y)| x * y).sum::<f64>();
                if i == j {
                    if !(sum > 0.0) || !sum.is_finite() {
                        return Err(i);
                    }
                    l[i * n + i] = sum.sqrt();
                } else {
                    l[i * n + j] = sum / l[j * n + j];
                }
            }
        }
        Ok(Self {
            n,
            lower: l,
            jitter: shift,
        })
    }

    /// Factorization with diagonal jitter escalation 1e-12 .. 1e-8 (relative
    /// to the mean variance) on pivot failure.
    pub fn factor_with_jitter(a: &[f64], n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::size("empty covariance matrix"));
        }
        let scale = (0..n).map(|i| a[i * n + i]).sum::<f64>() / n as f64;
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::numerical(format!(
                "covariance diagonal has non-positive or non-finite mean {scale}"
            )));
        }
        let mut last_pivot = 0;
        for &rel in &JITTER_LADDER {
            match Self::factor_shifted(a, n, rel * scale) {
                Ok(c) => {
                    if rel > 0.0 {
                        log::debug!("cholesky needed relative jitter {rel:e}");
                    }
                    return Ok(c);
                }
                Err(p) => last_pivot = p,
            }
        }
        Err(Error::numerical(format!(
            "Cholesky factorization failed at pivot {last_pivot} of {n} even with relative jitter 1e-8"
        )))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Diagonal shift that was needed to factor the matrix.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// `out = L z`.
    pub fn mul_vec(&self, z: &[f64], out: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let row = &self.lower[i * n..i * n + i + 1];
            out[i] = row.iter().zip(&z[..=i]).map(|(a, b)| a * b).sum();
        }
    }
}
