//! Monte-Carlo draws from the covariant estimate distribution.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::special::CompensatedSum;

/// Grid size of the tabulated inverse CDF.
pub const SAMPLING_GRID: usize = 1 << 16;

/// Draws `count` estimates `θ_est ∈ [0, 2π)` for true phase `theta`.
///
/// The offset density is tabulated on [`SAMPLING_GRID`] points, integrated
/// with the trapezoid rule and inverted with linear interpolation. The
/// output depends only on the arguments.
pub fn sample_estimates(v: &FockVector, theta: f64, count: usize, seed: u64) -> Result<Vec<f64>> {
    v.ensure_normalized("sample_estimates")?;
    if count == 0 {
        return Err(Error::EmptyRequest("sample count must be positive".into()));
    }
    let m = SAMPLING_GRID;
    let h = 2.0 * PI / m as f64;
    let p = super::offset_density_grid(v.amplitudes(), m);

    let mut cdf = Vec::with_capacity(m + 1);
    let mut acc = CompensatedSum::new();
    cdf.push(0.0);
    for j in 0..m {
        acc.add(0.5 * h * (p[j] + p[(j + 1) % m]));
        cdf.push(acc.value());
    }
    let total = cdf[m];

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let out = (0..count)
        .map(|_| {
            let u = rng.gen::<f64>() * total;
            // first index with cdf[j+1] > u
            let j = cdf[1..].partition_point(|&c| c <= u).min(m - 1);
            let width = cdf[j + 1] - cdf[j];
            let frac = if width > 0.0 { (u - cdf[j]) / width } else { 0.0 };
            let delta = (j as f64 + frac) * h;
            (theta + delta).rem_euclid(2.0 * PI)
        })
        .collect();
    Ok(out)
}

/// Sample mean of the loss `2 sin²(θ_est − θ)` with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalError {
    pub mean: f64,
    pub std_error: f64,
    pub count: usize,
}

pub fn empirical_error(samples: &[f64], theta: f64) -> Result<EmpiricalError> {
    if samples.is_empty() {
        return Err(Error::EmptyRequest("no samples".into()));
    }
    let n = samples.len() as f64;
    let loss = |x: &f64| 2.0 * (x - theta).sin().powi(2);
    let mean = samples.iter().map(loss).collect::<CompensatedSum>().value() / n;
    let var = samples.iter().map(|x| (loss(x) - mean).powi(2)).collect::<CompensatedSum>().value()
        / (n - 1.0).max(1.0);
    Ok(EmpiricalError { mean, std_error: (var / n).sqrt(), count: samples.len() })
}
