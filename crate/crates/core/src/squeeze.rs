//! Squeezing-operator matrix elements and squeezed number-state
//! superpositions.
//!
//! `S(r) = exp(r(a² − a†²)/2)` with real `r ≥ 0`. Its number-basis elements
//! are evaluated from the finite alternating sum
//!
//! ```text
//! S_{j,m} = √(m! j!) / cosh(r)^{j+½} · (tanh r / 2)^{(m−j)/2} · F(r, m, j)
//! F       = Σ_k (−1)^k (sinh r / 2)^{2k} / (k! (j−2k)! (k + (m−j)/2)!)
//! ```
//!
//! for `j − m` even (zero otherwise), every factor in log space. When the
//! alternating sum cancels by more than a digit the sum is redone with
//! double-double term recurrences.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::continuum::{ContinuumProfile, PsiA};
use crate::error::{Error, Result};
use crate::fock::{FockVector, Parity};
use crate::special::{binomial, ksum, ln_factorial, signed_log_sum, DoubleDouble};

/// Largest admissible squeezed-vacuum mass outside the truncation.
pub const SQUEEZE_TAIL_LIMIT: f64 = 1e-6;
/// Cancellation ratio `max|term|/|sum|` that triggers the extended sum.
pub const CANCELLATION_LIMIT: f64 = 10.0;
/// Largest Pascal dimension kept in exact integer arithmetic.
pub const PASCAL_MAX: usize = 30;

/// Core amplitudes `(c₀, c₂, c₄)` of the near-optimal probe.
pub fn psi74_core_coefficients() -> [f64; 3] {
    [(3.0f64 / 35.0).sqrt(), -(24.0f64 / 35.0).sqrt(), (8.0f64 / 35.0).sqrt()]
}

struct LogHyper {
    ln_half_sinh: f64,
    ln_cosh: f64,
    ln_half_tanh: f64,
    quarter_sinh2: DoubleDouble,
}

impl LogHyper {
    fn new(r: f64) -> Self {
        // stable for large r: cosh r = e^r (1 + e^{-2r}) / 2
        let e = (-2.0 * r).exp();
        let ln_cosh = r + e.ln_1p() - std::f64::consts::LN_2;
        let ln_sinh = if r < 1.0 { r.sinh().ln() } else { r + (-e).ln_1p() - std::f64::consts::LN_2 };
        let s = DoubleDouble::from_f64(r.sinh());
        Self {
            ln_half_sinh: ln_sinh - std::f64::consts::LN_2,
            ln_cosh,
            ln_half_tanh: ln_sinh - ln_cosh - std::f64::consts::LN_2,
            quarter_sinh2: (s * s).div_f64(4.0),
        }
    }
}

/// Single element `⟨j|S(r)|m⟩`.
pub fn squeeze_element(r: f64, j: usize, m: usize) -> f64 {
    if (j + m) % 2 == 1 {
        return 0.0;
    }
    if r == 0.0 {
        return if j == m { 1.0 } else { 0.0 };
    }
    element_with(&LogHyper::new(r), j, m, false)
}

fn element_with(h: &LogHyper, j: usize, m: usize, force_extended: bool) -> f64 {
    let half = (j as i64 - m as i64) / 2;
    let kmin = half.max(0) as usize;
    let kmax = j / 2;
    let ln_term = |k: usize| -> f64 {
        2.0 * k as f64 * h.ln_half_sinh
            - ln_factorial(k)
            - ln_factorial(j - 2 * k)
            - ln_factorial((k as i64 - half) as usize)
    };
    let ln_pre = 0.5 * (ln_factorial(m) + ln_factorial(j)) - (j as f64 + 0.5) * h.ln_cosh
        - half as f64 * h.ln_half_tanh;

    let terms: Vec<(f64, f64)> = (kmin..=kmax)
        .map(|k| (if k % 2 == 0 { 1.0 } else { -1.0 }, ln_term(k)))
        .collect();
    let (sign, ln_abs, ratio) = signed_log_sum(&terms);
    if !force_extended && ratio <= CANCELLATION_LIMIT {
        return sign * (ln_pre + ln_abs).exp();
    }

    // term ratio t_{k+1}/t_k = −(sinh r/2)² (j−2k)(j−2k−1) / ((k+1)(k+1−half))
    let mut term = DoubleDouble::from_f64(1.0);
    let mut sum = term;
    let mut exponent = 0i32;
    for k in kmin..kmax {
        let num = ((j - 2 * k) * (j - 2 * k - 1)) as f64;
        let den = ((k + 1) as f64) * ((k as i64 + 1 - half) as f64);
        term = -(term * h.quarter_sinh2).mul_f64(num).div_f64(den);
        sum = sum + term;
        if term.hi.abs() > 2f64.powi(500) {
            term = term.scale_pow2(-500);
            sum = sum.scale_pow2(-500);
            exponent += 500;
        }
    }
    let s = sum.to_f64();
    if s == 0.0 {
        return 0.0;
    }
    let sign0 = if kmin.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign0 * s.signum() * (ln_pre + ln_term(kmin) + exponent as f64 * std::f64::consts::LN_2 + s.abs().ln()).exp()
}

/// Column `S(r)|m⟩` truncated to `dim` photon numbers.
pub fn squeeze_column(r: f64, m: usize, dim: usize) -> Vec<f64> {
    if r == 0.0 {
        return (0..dim).map(|j| if j == m { 1.0 } else { 0.0 }).collect();
    }
    let h = LogHyper::new(r);
    (0..dim)
        .map(|j| if (j + m) % 2 == 1 { 0.0 } else { element_with(&h, j, m, false) })
        .collect()
}

/// Truncated matrix of `S(r)`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SqueezeKernel {
    r: f64,
    dim: usize,
    matrix: Vec<f64>,
}

impl SqueezeKernel {
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, j: usize, m: usize) -> f64 {
        self.matrix[j * self.dim + m]
    }

    pub fn column(&self, m: usize) -> Vec<f64> {
        (0..self.dim).map(|j| self.get(j, m)).collect()
    }

    pub fn column_norm(&self, m: usize) -> f64 {
        ksum((0..self.dim).map(|j| self.get(j, m).powi(2))).sqrt()
    }

    /// Columns whose squeezed state fits the truncation by the
    /// `40·sinh²r·(m+1) + 64 ≤ dim` rule (column 0 always included).
    pub fn resolved_columns(&self) -> usize {
        let s2 = self.r.sinh().powi(2);
        let mut m = 1;
        while m < self.dim && 40.0 * s2 * (m as f64 + 1.0) + 64.0 <= self.dim as f64 {
            m += 1;
        }
        m
    }

    /// Applies the truncated matrix to `v` (zero-padded or cut to `dim`).
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|j| ksum(v.iter().take(self.dim).enumerate().map(|(m, x)| self.get(j, m) * x)))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for j in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|m| format!("{:.16e}", self.get(j, m))).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Builds the `dim × dim` kernel; fails when `S(r)|0⟩` loses more than
/// [`SQUEEZE_TAIL_LIMIT`] of its mass to the truncation.
pub fn squeeze_matrix(r: f64, dim: usize) -> Result<SqueezeKernel> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Precondition(format!("squeezing parameter must be >= 0, got {r}")));
    }
    if dim == 0 {
        return Err(Error::Precondition("dim must be >= 1".into()));
    }
    let columns: Vec<Vec<f64>> = (0..dim).into_par_iter().map(|m| squeeze_column(r, m, dim)).collect();
    let tail = 1.0 - ksum(columns[0].iter().map(|x| x * x));
    if tail > SQUEEZE_TAIL_LIMIT {
        return Err(Error::Truncation { tail_mass: tail, limit: SQUEEZE_TAIL_LIMIT });
    }
    let mut matrix = vec![0.0; dim * dim];
    for (m, col) in columns.iter().enumerate() {
        for (j, v) in col.iter().enumerate() {
            matrix[j * dim + m] = *v;
        }
    }
    Ok(SqueezeKernel { r, dim, matrix })
}

/// Lower-triangular Pascal matrix and its signed inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PascalPair {
    pub dim: usize,
    pub pascal: Vec<Vec<i64>>,
    pub inverse: Vec<Vec<i64>>,
}

impl PascalPair {
    pub fn product_is_identity(&self) -> bool {
        (0..self.dim).all(|i| {
            (0..self.dim).all(|k| {
                let s: i128 = (0..self.dim).map(|j| self.pascal[i][j] as i128 * self.inverse[j][k] as i128).sum();
                s == i128::from(i == k)
            })
        })
    }
}

pub fn pascal_pair(m_max: usize) -> Result<PascalPair> {
    if m_max == 0 || m_max > PASCAL_MAX {
        return Err(Error::Range(format!("Pascal dimension must be in 1..={PASCAL_MAX}, got {m_max}")));
    }
    let entry = |m: usize, l: usize| -> i64 {
        if l > m {
            0
        } else {
            binomial(m as u64, l as u64).expect("fits for m <= 30") as i64
        }
    };
    let pascal = (0..m_max).map(|m| (0..m_max).map(|l| entry(m, l)).collect()).collect();
    let inverse = (0..m_max)
        .map(|m| {
            (0..m_max)
                .map(|l| if (m + l) % 2 == 0 { entry(m, l) } else { -entry(m, l) })
                .collect()
        })
        .collect();
    Ok(PascalPair { dim: m_max, pascal, inverse })
}

/// Finite superposition of squeezed number states of one parity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaState {
    pub l: usize,
    pub parity: Parity,
    pub r: f64,
    #[serde(skip)]
    pub vector: FockVector,
    /// Weights of `S(r)|2j⟩` (or `|2j+1⟩`), `j = 0..=l`, before normalization.
    pub weights: Vec<f64>,
    /// `1/√Σw²`: the exact normalizer of the untruncated superposition.
    pub normalizer: f64,
}

impl AlphaState {
    /// Signed coefficients on `|2n⟩` (or `|2n+1⟩`), `n = 0..`.
    pub fn sector_coefficients(&self) -> Vec<f64> {
        self.vector.amplitudes().iter().skip(self.parity.offset()).step_by(2).map(|a| a.re).collect()
    }
}

/// Superposition weights `(−1)^{l−j} C(l,j) 2^j j! coth^j r / √((2j+o)!)`.
pub fn alpha_weights(l: usize, parity: Parity, r: f64) -> Result<Vec<f64>> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Precondition(format!("α states need r > 0, got {r}")));
    }
    let pascal = pascal_pair(l + 1)?;
    let ln_coth = (1.0 / r.tanh()).ln();
    Ok((0..=l)
        .map(|j| {
            let ln_mag = j as f64 * std::f64::consts::LN_2 + ln_factorial(j) + j as f64 * ln_coth
                - 0.5 * ln_factorial(2 * j + parity.offset());
            pascal.inverse[l][j] as f64 * ln_mag.exp()
        })
        .collect())
}

/// Photon-number dimension that covers `x = n/sinh²r` up to `8l + 60`.
pub fn alpha_default_dim(l: usize, r: f64) -> usize {
    let s2 = r.sinh().powi(2);
    (2.0 * (8.0 * l as f64 + 60.0) * s2.max(1.0)).ceil() as usize + 2 * l + 8
}

pub fn alpha_state(l: usize, parity: Parity, r: f64, dim: usize) -> Result<AlphaState> {
    let weights = alpha_weights(l, parity, r)?;
    let total: f64 = ksum(weights.iter().map(|w| w * w));
    let cols: Vec<Vec<f64>> = weights
        .par_iter()
        .enumerate()
        .map(|(j, _)| squeeze_column(r, 2 * j + parity.offset(), dim))
        .collect();
    let mut amps = vec![0.0; dim];
    for (w, col) in weights.iter().zip(&cols) {
        for (a, c) in amps.iter_mut().zip(col) {
            *a += w * c;
        }
    }
    let kept = ksum(amps.iter().map(|a| a * a));
    let tail = 1.0 - kept / total;
    if tail > SQUEEZE_TAIL_LIMIT {
        return Err(Error::Truncation { tail_mass: tail, limit: SQUEEZE_TAIL_LIMIT });
    }
    let vector = FockVector::from_real(&amps)?.normalize()?;
    Ok(AlphaState { l, parity, r, vector, weights, normalizer: total.sqrt().recip() })
}

/// Closed-form coefficient magnitudes `α_{2l,r|n}` / `α_{2l+1,r|n}` for
/// `n = 0..count` (zero below `n = l`), prefactor included as printed.
///
/// Only the `n`-dependence is reliable: the printed even-parity prefactor
/// does not normalize the state, so callers compare shapes after
/// renormalizing.
pub fn alpha_closed_form(l: usize, parity: Parity, r: f64, count: usize) -> Vec<f64> {
    let big_r = r.sinh().powi(2);
    let lg = crate::special::ln_gamma;
    let lf = |n: usize| ln_factorial(n);
    let ln_pre = 0.5 * (lg(0.5) - lg(l as f64 + 0.5))
        - 0.5
            * match parity {
                Parity::Even => ((lf(l) - l as f64 * big_r.ln()).exp() + (lg(2.0 * l as f64 + 0.5) - lg(l as f64 + 0.5)).exp()).ln(),
                Parity::Odd => ((lf(l) - l as f64 * big_r.ln()).exp() * (2 * l + 1) as f64
                    + (lg(2.0 * l as f64 + 0.5) - lg(l as f64 + 0.5)).exp() * (4 * l + 1) as f64)
                    .ln(),
            };
    let ratio = (big_r / (1.0 + big_r)).ln();
    (0..count)
        .map(|n| {
            if n < l {
                return 0.0;
            }
            let (fact, damp) = match parity {
                Parity::Even => (0.5 * lf(2 * n), 0.25),
                Parity::Odd => (0.5 * lf(2 * n + 1), 0.75),
            };
            (ln_pre + fact - damp * big_r.ln_1p() - n as f64 * std::f64::consts::LN_2 - lf(n)
                + 0.5 * n as f64 * ratio
                + lf(n)
                - lf(n - l)
                - l as f64 * big_r.ln())
            .exp()
        })
        .collect()
}

/// Row of [`alpha_asymptotics`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticRow {
    pub r: f64,
    pub scale: f64,
    pub sup_deviation: f64,
}

/// For each `r`: `max_n | |α_n| − ψ_{l∓1/4}(n/R)/√R |` with `R = sinh²r`,
/// over the sector coefficients of the normalized α state. The `n = 0`
/// point is skipped when the limit profile is singular at the origin.
pub fn alpha_asymptotics(l: usize, parity: Parity, r_list: &[f64]) -> Result<Vec<AsymptoticRow>> {
    let a = match parity {
        Parity::Even => l as f64 - 0.25,
        Parity::Odd => l as f64 + 0.25,
    };
    let limit = PsiA::new(a)?;
    r_list
        .iter()
        .map(|&r| {
            let scale = r.sinh().powi(2);
            if scale < 10.0 {
                return Err(Error::Precondition(format!("sinh²r must be >= 10 for the comparison, got {scale} at r = {r}")));
            }
            let st = alpha_state(l, parity, r, alpha_default_dim(l, r))?;
            let inv = scale.sqrt().recip();
            let start = if a < 0.0 { 1 } else { 0 };
            let dev = st
                .sector_coefficients()
                .iter()
                .enumerate()
                .skip(start)
                .map(|(n, c)| (c.abs() - limit.value(n as f64 / scale) * inv).abs())
                .fold(0.0, f64::max);
            Ok(AsymptoticRow { r, scale, sup_deviation: dev })
        })
        .collect()
}

/// `S(r)(c₀|0⟩ + c₂|2⟩ + c₄|4⟩)` truncated to `dim`.
pub fn psi74_state(r: f64, dim: usize) -> Result<FockVector> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Precondition(format!("squeezing parameter must be >= 0, got {r}")));
    }
    if dim < 5 {
        return Err(Error::Truncation { tail_mass: 1.0, limit: SQUEEZE_TAIL_LIMIT });
    }
    let c = psi74_core_coefficients();
    let cols: Vec<Vec<f64>> = [0usize, 2, 4].par_iter().map(|&m| squeeze_column(r, m, dim)).collect();
    let amps: Vec<f64> = (0..dim).map(|j| c[0] * cols[0][j] + c[1] * cols[1][j] + c[2] * cols[2][j]).collect();
    let tail = 1.0 - ksum(amps.iter().map(|a| a * a));
    if tail > SQUEEZE_TAIL_LIMIT {
        return Err(Error::Truncation { tail_mass: tail, limit: SQUEEZE_TAIL_LIMIT });
    }
    FockVector::new(amps.into_iter().map(|a| Complex64::new(a, 0.0)).collect())?.normalize()
}

/// Truncation used by default for [`psi74_state`].
pub fn psi74_default_dim(r: f64) -> usize {
    (64.0 * r.sinh().powi(2)).ceil() as usize + 256
}
