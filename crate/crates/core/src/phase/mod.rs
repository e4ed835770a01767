//! Covariant phase measurement and its average error.
//!
//! For a probe `|ψ⟩ = Σ ψ_n |n⟩` the covariant measurement returns an
//! estimate whose offset `δ = θ_est − θ` has density
//! `|Σ ψ_n e^{inδ}|² / 2π`. Averaging the loss `2 sin²δ` against it gives
//! the closed form `D(ψ) = 1 − Σ_n Re(ψ*_n ψ_{n+2})`.

mod modular;
mod sampling;
mod tau;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::Result;
use crate::fock::FockVector;
use crate::special::ksum;

pub use modular::{modular_measurement_check, modular_wrapped_density, PointerProfile, PointerShape};
pub use sampling::{empirical_error, sample_estimates, EmpiricalError, SAMPLING_GRID};
pub use tau::{minimize_tau, TauResult};

/// Average loss `2 sin²(θ_est − θ)` of the covariant measurement on `v`.
pub fn covariant_error(v: &FockVector) -> Result<f64> {
    v.ensure_normalized("covariant_error")?;
    Ok(error_functional(v.amplitudes()))
}

/// Error of the best measurement in the covariant family, i.e. with the
/// measurement phases matched to the amplitude phases: `1 − Σ |ψ_n||ψ_{n+2}|`.
///
/// States produced by squeezing carry a `(−1)^n` pattern on `|2n⟩`, which
/// the plain covariant measurement reads as an offset of π/2; this is the
/// figure of merit for such probes.
pub fn aligned_covariant_error(v: &FockVector) -> Result<f64> {
    v.ensure_normalized("aligned_covariant_error")?;
    let a = v.amplitudes();
    Ok(1.0 - ksum(a.windows(3).map(|w| w[0].norm() * w[2].norm())))
}

pub(crate) fn error_functional(a: &[Complex64]) -> f64 {
    1.0 - ksum(a.windows(3).map(|w| (w[0].conj() * w[2]).re))
}

/// Estimate distribution of the covariant measurement for a fixed true phase.
#[derive(Debug, Clone)]
pub struct CovariantDistribution {
    source: FockVector,
    theta: f64,
}

pub fn covariant_distribution(v: &FockVector, theta: f64) -> Result<CovariantDistribution> {
    v.ensure_normalized("covariant_distribution")?;
    Ok(CovariantDistribution { source: v.clone(), theta })
}

impl CovariantDistribution {
    pub fn source(&self) -> &FockVector {
        &self.source
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Probability per radian of the estimate `theta_est`.
    pub fn density(&self, theta_est: f64) -> f64 {
        self.density_offset(theta_est - self.theta)
    }

    /// Probability per radian of the offset `δ = θ_est − θ`.
    pub fn density_offset(&self, delta: f64) -> f64 {
        amplitude_sum(self.source.amplitudes(), delta).norm_sqr() / (2.0 * PI)
    }

    /// Offset density at `δ_j = 2πj/m`, `j = 0..m`.
    pub fn offset_grid(&self, m: usize) -> Vec<f64> {
        offset_density_grid(self.source.amplitudes(), m)
    }
}

/// `Σ ψ_n e^{inδ}` (Horner in `e^{iδ}`).
pub(crate) fn amplitude_sum(a: &[Complex64], delta: f64) -> Complex64 {
    let z = Complex64::from_polar(1.0, delta);
    a.iter().rev().fold(Complex64::default(), |acc, &c| acc * z + c)
}

/// `|Σ ψ_n e^{inδ_j}|² / 2π` on the uniform grid `δ_j = 2πj/m`, by FFT.
pub(crate) fn offset_density_grid(a: &[Complex64], m: usize) -> Vec<f64> {
    assert!(m > 0);
    let mut buf = vec![Complex64::default(); m];
    for (n, c) in a.iter().enumerate() {
        buf[n % m] += c;
    }
    let fft: Arc<dyn rustfft::Fft<f64>> = FftPlanner::new().plan_fft_inverse(m);
    fft.process(&mut buf);
    buf.iter().map(|c| c.norm_sqr() / (2.0 * PI)).collect()
}
