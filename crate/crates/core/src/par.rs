//! Replication-parallel map with results in replication order.

use rayon::prelude::*;

/// Evaluate `f(r)` for `r = 0..reps` in parallel and return the results in
/// index order, so reductions over them are independent of scheduling.
pub fn replicate<T, F>(reps: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..reps).into_par_iter().map(f).collect()
}

/// Fallible variant of [`replicate`]; returns the error of the lowest failing
/// index.
pub fn try_replicate<T, E, F>(reps: u64, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(u64) -> Result<T, E> + Sync + Send,
{
    let out: Vec<Result<T, E>> = replicate(reps, f);
    out.into_iter().collect()
}

/// Mean and standard error of the mean.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
