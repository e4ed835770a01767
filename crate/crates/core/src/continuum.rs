//! Scaling limit of Fock amplitudes.
//!
//! A sector state with amplitudes `f(k/R)/√R` on photon numbers `2k` (or
//! `2k+1`) has energy `≈ 2R⟨Q⟩` and covariant error
//! `≈ |f(0)|²/2R + ⟨P²⟩/2R²`, so for profiles with `f(0) = 0` the product
//! `E²·D` tends to `2⟨Q⟩²⟨P²⟩`. This module evaluates those moments
//! (analytically for the `ψ_a` family, by quadrature otherwise), the cost
//! curve of the family, and the discretization back into Fock space.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockVector, Parity};
use crate::special::ln_gamma;

/// Step of the central differences used for profiles without a derivative.
pub const DERIVATIVE_STEP: f64 = 1e-5;
/// Allowed deviation of `∫|f|²` from one.
pub const NORM_TOLERANCE: f64 = 1e-9;
/// Largest profile mass that may be cut off by `discretize`.
pub const DISCRETIZE_TAIL_LIMIT: f64 = 1e-8;

const QUAD_TOL: f64 = 1e-14;

/// Universal lower bound on `2⟨Q⟩²⟨P²⟩`.
pub const COST_LOWER_BOUND: f64 = 0.125;

/// Square-integrable amplitude profile on `x ≥ 0`.
pub trait ContinuumProfile: Send + Sync {
    fn value(&self, x: f64) -> f64;

    /// Pointwise `f'(x)` when known in closed form.
    fn derivative(&self, _x: f64) -> Option<f64> {
        None
    }

    /// Point beyond which the profile mass is negligible (< 1e-12).
    fn support_end(&self) -> f64;

    /// Whether `f(0) = 0` holds.
    fn f0_zero(&self) -> bool;

    fn analytic_q(&self) -> Option<f64> {
        None
    }

    fn analytic_p2(&self) -> Option<Result<f64>> {
        None
    }
}

/// `ψ_a(x) = x^a e^{−x/2} / √Γ(1+2a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiA {
    a: f64,
    ln_norm: f64,
}

impl PsiA {
    /// Any `a > −1/2` is square integrable; `⟨P²⟩` needs `a > 1/2`.
    pub fn new(a: f64) -> Result<Self> {
        if !(a > -0.5) || !a.is_finite() {
            return Err(Error::Precondition(format!("ψ_a needs a > -1/2, got {a}")));
        }
        Ok(Self { a, ln_norm: 0.5 * ln_gamma(1.0 + 2.0 * a) })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
}

impl ContinuumProfile for PsiA {
    fn value(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return match self.a {
                a if a > 0.0 => 0.0,
                0.0 => (-self.ln_norm).exp(),
                _ => f64::INFINITY,
            };
        }
        (self.a * x.ln() - 0.5 * x - self.ln_norm).exp()
    }

    fn derivative(&self, x: f64) -> Option<f64> {
        if x <= 0.0 {
            return None;
        }
        Some((self.a / x - 0.5) * self.value(x))
    }

    fn support_end(&self) -> f64 {
        8.0 * self.a.max(0.0) + 60.0
    }

    fn f0_zero(&self) -> bool {
        self.a > 0.0
    }

    fn analytic_q(&self) -> Option<f64> {
        Some(2.0 * self.a + 1.0)
    }

    fn analytic_p2(&self) -> Option<Result<f64>> {
        Some(if self.a > 0.5 {
            Ok(1.0 / (4.0 * (2.0 * self.a - 1.0)))
        } else {
            Err(Error::Singularity(format!("⟨P²⟩ of ψ_a diverges for a <= 1/2 (a = {})", self.a)))
        })
    }
}

/// Profile given by an arbitrary closure.
pub struct FnProfile {
    f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    support_end: f64,
    f0_zero: bool,
}

impl std::fmt::Debug for FnProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FnProfile")
            .field("support_end", &self.support_end)
            .field("f0_zero", &self.f0_zero)
            .finish()
    }
}

impl FnProfile {
    /// Checks `∫|f|² = 1` over `[0, support_end]`; `f0_zero` is derived
    /// from `|f(0)| < 1e-12`.
    pub fn new<F>(f: F, support_end: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(support_end > 0.0) {
            return Err(Error::Precondition("support end must be positive".into()));
        }
        let f0_zero = f(0.0).abs() < 1e-12;
        let p = Self { f: Box::new(f), support_end, f0_zero };
        let norm = integrate(|x| p.value(x).powi(2), 0.0, support_end);
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Contract(format!("profile must have unit L² norm, got {norm}")));
        }
        Ok(p)
    }

    /// Rescales `f` to unit norm first.
    pub fn normalized<F>(f: F, support_end: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let n2 = integrate(|x| f(x).powi(2), 0.0, support_end);
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::Normalization);
        }
        let s = n2.sqrt().recip();
        Self::new(move |x| s * f(x), support_end)
    }
}

impl ContinuumProfile for FnProfile {
    fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    fn support_end(&self) -> f64 {
        self.support_end
    }

    fn f0_zero(&self) -> bool {
        self.f0_zero
    }
}

/// Tanh-sinh quadrature over panels split at 1, 4, 16, … so that the
/// peak and the endpoint behaviour are resolved separately; the panel at
/// the origin is integrated in `u = √x`.
pub(crate) fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let mut cuts = vec![a];
    let mut c = 1.0;
    while c < b {
        if c > a {
            cuts.push(c);
        }
        c *= 4.0;
    }
    cuts.push(b);
    cuts.windows(2)
        .map(|w| {
            if w[0] == 0.0 {
                // x = u² softens the x^{2a−2} endpoint behaviour of |f'|²
                let g = |u: f64| 2.0 * u * f(u * u);
                quadrature::double_exponential::integrate(g, 0.0, w[1].sqrt(), QUAD_TOL).integral
            } else {
                quadrature::double_exponential::integrate(&f, w[0], w[1], QUAD_TOL).integral
            }
        })
        .sum()
}

fn numeric_derivative<P: ContinuumProfile + ?Sized>(p: &P, x: f64) -> f64 {
    if let Some(d) = p.derivative(x) {
        return d;
    }
    let h = DERIVATIVE_STEP;
    if x >= h {
        (p.value(x + h) - p.value(x - h)) / (2.0 * h)
    } else {
        (-3.0 * p.value(x) + 4.0 * p.value(x + h) - p.value(x + 2.0 * h)) / (2.0 * h)
    }
}

/// `∫ x |f|² dx` by quadrature.
pub fn moment_q_quadrature<P: ContinuumProfile + ?Sized>(p: &P) -> Result<f64> {
    let v = integrate(|x| x * p.value(x).powi(2), 0.0, p.support_end());
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Moment("⟨Q⟩ integral is not finite".into()))
    }
}

/// `∫ |f'|² dx` by quadrature (closed-form pointwise derivative when the
/// profile has one, central differences otherwise).
pub fn moment_p2_quadrature<P: ContinuumProfile + ?Sized>(p: &P) -> Result<f64> {
    let v = integrate(|x| numeric_derivative(p, x).powi(2), 0.0, p.support_end());
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Singularity("⟨P²⟩ integral is not finite".into()))
    }
}

/// Position moment `⟨f|Q|f⟩`.
pub fn moment_q<P: ContinuumProfile + ?Sized>(p: &P) -> Result<f64> {
    match p.analytic_q() {
        Some(q) => Ok(q),
        None => moment_q_quadrature(p),
    }
}

/// Kinetic moment `⟨f|P²|f⟩`.
pub fn moment_p2<P: ContinuumProfile + ?Sized>(p: &P) -> Result<f64> {
    match p.analytic_p2() {
        Some(r) => r,
        None => moment_p2_quadrature(p),
    }
}

/// Scaling-limit value of `E²·D`: `2⟨Q⟩²⟨P²⟩`.
pub fn asymptotic_cost<P: ContinuumProfile + ?Sized>(p: &P) -> Result<f64> {
    if !p.f0_zero() {
        return Err(Error::Precondition(
            "f(0) != 0: the |f(0)|²/2R term dominates and E²D diverges".into(),
        ));
    }
    let q = moment_q(p)?;
    let p2 = moment_p2(p)?;
    Ok(2.0 * q * q * p2)
}

/// `c(a) = (2a+1)² / (2(2a−1))`, the cost of `ψ_a`.
pub fn family_cost(a: f64) -> f64 {
    (2.0 * a + 1.0).powi(2) / (2.0 * (2.0 * a - 1.0))
}

/// Minimizer of [`family_cost`].
pub const FAMILY_OPTIMUM: f64 = 1.5;

pub fn cost_curve(a_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    a_grid
        .iter()
        .map(|&a| {
            if a > 0.5 {
                Ok((a, family_cost(a)))
            } else {
                Err(Error::Precondition(format!("cost curve needs a > 1/2, got {a}")))
            }
        })
        .collect()
}

/// Places `f(k/R)/√R` on photon number `2k` (even) or `2k+1` (odd) for all
/// `k` that fit in `n_trunc`, then renormalizes.
pub fn discretize<P: ContinuumProfile + ?Sized>(
    p: &P,
    scale: f64,
    parity: Parity,
    n_trunc: usize,
) -> Result<FockVector> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::Precondition(format!("scale R must be positive, got {scale}")));
    }
    let sector_len = (n_trunc + 1 - parity.offset()) / 2;
    if sector_len == 0 {
        return Err(Error::Truncation { tail_mass: 1.0, limit: DISCRETIZE_TAIL_LIMIT });
    }
    let cut = sector_len as f64 / scale;
    let end = p.support_end();
    let tail = if cut < end { integrate(|x| p.value(x).powi(2), cut, end) } else { 0.0 };
    if tail > DISCRETIZE_TAIL_LIMIT {
        return Err(Error::Truncation { tail_mass: tail, limit: DISCRETIZE_TAIL_LIMIT });
    }
    let s = scale.sqrt().recip();
    let mut amps = vec![Complex64::default(); n_trunc];
    for k in 0..sector_len {
        let v = p.value(k as f64 / scale);
        if !v.is_finite() {
            return Err(Error::Precondition(format!("profile is not finite at x = {}", k as f64 / scale)));
        }
        amps[parity.photon_number(k)] = Complex64::new(v * s, 0.0);
    }
    FockVector::new(amps)?.normalize()
}
