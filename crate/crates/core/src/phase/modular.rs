//! Pointer-based realization of the covariant measurement.
//!
//! The probe is coupled to a continuous pointer `φ` supported in
//! `[−1/2, 1/2)`; measuring the pointer momentum `p` and reducing it modulo
//! 2π yields an estimate with density
//! `|Σ ψ_n e^{in(θ_est−θ)}|²/2π · Σ_k |α_k(θ_est)|²`, where
//! `α_k(θ_est) = ∫ e^{i(θ_est+2πk)x} φ(x) dx` are the Fourier-series
//! coefficients of `e^{iθ_est x} φ(x)`. Parseval makes the k-sum equal to
//! one, so truncating it at `|k| ≤ k_max` measures how fast the wrapped
//! distribution approaches the covariant one.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::fock::FockVector;

const SUPPORT_EPS: f64 = 1e-12;
const MIN_WINDOW: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointerShape {
    /// `√(8/3) cos²(πx)`
    RaisedCosine,
    /// Constant 1 on the window.
    Box,
}

impl std::str::FromStr for PointerShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raised-cosine" | "cos2" => Ok(PointerShape::RaisedCosine),
            "box" => Ok(PointerShape::Box),
            other => Err(Error::Invalid(format!("unknown pointer shape '{other}'"))),
        }
    }
}

/// Real pointer wavefunction sampled on `x_i = −1/2 + i/M`, `i = 0..M`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointerProfile {
    samples: Vec<f64>,
}

impl PointerProfile {
    pub fn new(shape: PointerShape, points: usize) -> Result<Self> {
        let m = points.max(2);
        let step = 1.0 / m as f64;
        let samples = (0..m)
            .map(|i| {
                let x = -0.5 + i as f64 * step;
                match shape {
                    PointerShape::RaisedCosine => (8.0f64 / 3.0).sqrt() * (PI * x).cos().powi(2),
                    PointerShape::Box => 1.0,
                }
            })
            .collect();
        Self::from_window(samples)
    }

    pub fn raised_cosine() -> Self {
        Self::new(PointerShape::RaisedCosine, MIN_WINDOW).expect("built-in profile is normalized")
    }

    pub fn boxcar() -> Self {
        Self::new(PointerShape::Box, MIN_WINDOW).expect("built-in profile is normalized")
    }

    fn from_window(samples: Vec<f64>) -> Result<Self> {
        let step = 1.0 / samples.len() as f64;
        let norm = step * samples.iter().map(|v| v * v).sum::<f64>();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Contract(format!("pointer must have unit L² norm, got {norm}")));
        }
        Ok(Self { samples })
    }

    /// Pointer given on an arbitrary uniform grid `x0 + i·step`.
    ///
    /// Samples outside `[−1/2, 1/2)` must vanish; the profile is then
    /// linearly interpolated onto the internal window grid and renormalized.
    pub fn from_samples(x0: f64, step: f64, values: &[f64]) -> Result<Self> {
        if !(step > 0.0) || values.is_empty() {
            return Err(Error::Invalid("pointer grid needs a positive step and samples".into()));
        }
        for (i, &v) in values.iter().enumerate() {
            let x = x0 + i as f64 * step;
            if !(-0.5 - SUPPORT_EPS..0.5).contains(&x) && v.abs() > SUPPORT_EPS {
                return Err(Error::Support { x, value: v.abs() });
            }
        }
        let norm = step * values.iter().map(|v| v * v).sum::<f64>();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Contract(format!("pointer must have unit L² norm, got {norm}")));
        }
        let m = ((1.0 / step).ceil() as usize).next_power_of_two().max(MIN_WINDOW);
        let h = 1.0 / m as f64;
        let interp = |x: f64| -> f64 {
            let t = (x - x0) / step;
            if t < 0.0 {
                return 0.0;
            }
            let i = t.floor() as usize;
            let f = t - i as f64;
            let a = values.get(i).copied().unwrap_or(0.0);
            let b = values.get(i + 1).copied().unwrap_or(0.0);
            a + f * (b - a)
        };
        let mut samples: Vec<f64> = (0..m).map(|i| interp(-0.5 + i as f64 * h)).collect();
        let n2 = h * samples.iter().map(|v| v * v).sum::<f64>();
        samples.iter_mut().for_each(|v| *v /= n2.sqrt());
        Ok(Self { samples })
    }

    pub fn window_points(&self) -> usize {
        self.samples.len()
    }

    pub fn step(&self) -> f64 {
        1.0 / self.samples.len() as f64
    }

    /// `Σ_{|k| ≤ k_max} |α_k(θ_est)|²`.
    fn wrapped_weight(&self, theta_est: f64, k_max: usize, fft: &dyn rustfft::Fft<f64>) -> f64 {
        let m = self.samples.len();
        let h = self.step();
        let mut buf: Vec<Complex64> = self
            .samples
            .iter()
            .enumerate()
            .map(|(i, &v)| Complex64::from_polar(v, theta_est * (-0.5 + i as f64 * h)))
            .collect();
        fft.process(&mut buf);
        // |α_k| = h |Σ_i g_i e^{2πi k i/M}|; the e^{−iπk} phase drops out
        let mut total = buf[0].norm_sqr();
        for k in 1..=k_max {
            total += buf[k].norm_sqr() + buf[m - k].norm_sqr();
        }
        h * h * total
    }
}

/// Wrapped pointer density and the covariant density on `grid` estimates
/// `θ_est = 2πj/grid`.
pub fn modular_wrapped_density(
    v: &FockVector,
    theta: f64,
    pointer: &PointerProfile,
    k_max: usize,
    grid: usize,
) -> Result<Vec<(f64, f64, f64)>> {
    v.ensure_normalized("modular_measurement_check")?;
    if grid == 0 {
        return Err(Error::EmptyRequest("grid must be positive".into()));
    }
    let m = pointer.window_points();
    if 2 * k_max + 1 > m {
        return Err(Error::Range(format!(
            "k_max = {k_max} needs at least {} pointer samples, have {m}",
            2 * k_max + 1
        )));
    }
    let fft = FftPlanner::new().plan_fft_inverse(m);
    let rows = (0..grid)
        .map(|j| {
            let theta_est = 2.0 * PI * j as f64 / grid as f64;
            let covariant = super::amplitude_sum(v.amplitudes(), theta_est - theta).norm_sqr() / (2.0 * PI);
            let wrapped = covariant * pointer.wrapped_weight(theta_est, k_max, fft.as_ref());
            (theta_est, wrapped, covariant)
        })
        .collect();
    Ok(rows)
}

/// Largest absolute gap between the wrapped pointer density and the
/// covariant density over the estimate grid.
pub fn modular_measurement_check(v: &FockVector, pointer: &PointerProfile, k_max: usize, grid: usize) -> Result<f64> {
    let rows = modular_wrapped_density(v, 0.0, pointer, k_max, grid)?;
    Ok(rows.iter().map(|(_, w, c)| (w - c).abs()).fold(0.0, f64::max))
}
