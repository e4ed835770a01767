//! Amplitude model of the four-photon heralding scheme.
//!
//! One mode of a two-mode squeezed vacuum (`q = tanh r₂`) is split four
//! ways, each arm is displaced by `−β_i` and a fourfold coincidence heralds
//! the other mode in `Σ_{k≤4} φ_k |k⟩`, with the `φ_k` elementary symmetric
//! polynomials of the displacements:
//!
//! ```text
//! φ₀ = β₁β₂β₃β₄          φ₁ = (q/2) e₃(β)       φ₂ = (q²√2/4) e₂(β)
//! φ₃ = (q³√6/8) e₁(β)    φ₄ = q⁴√24/16
//! ```
//!
//! Choosing `β₃β₄ = β₁β₂ = p` and `β₃+β₄ = −(β₁+β₂) = −s` removes the odd
//! amplitudes and leaves `φ₀ = p²`, `φ₂ = (q²√2/4)(2p − s²)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{fidelity, FockVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeraldConfig {
    pub q: f64,
    pub betas: [f64; 4],
}

impl HeraldConfig {
    pub fn new(q: f64, betas: [f64; 4]) -> Result<Self> {
        let cfg = Self { q, betas };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(Error::Precondition(format!("q must lie in (0, 1), got {}", self.q)));
        }
        if self.betas.iter().any(|b| !b.is_finite()) {
            return Err(Error::Precondition("displacements must be finite".into()));
        }
        Ok(())
    }

    /// Displacements with the parity constraints built in.
    pub fn from_sum_product(q: f64, p: f64, s: f64) -> Result<Self> {
        let disc = s * s - 4.0 * p;
        if disc < 0.0 {
            return Err(Error::Infeasible(format!("z² − {s}z + {p} has no real roots (s² − 4p = {disc:.3e})")));
        }
        let root = disc.sqrt();
        let b1 = 0.5 * (s - root);
        let b2 = 0.5 * (s + root);
        Self::new(q, [b1, b2, -b1, -b2])
    }

    /// `(β₁β₂, β₁+β₂)`.
    pub fn sum_product(&self) -> (f64, f64) {
        (self.betas[0] * self.betas[1], self.betas[0] + self.betas[1])
    }
}

/// The published operating point.
pub fn published_config() -> HeraldConfig {
    let (b1, b2) = (0.343824, 2.59058);
    HeraldConfig { q: 2f64.tanh(), betas: [b1, b2, -b1, -b2] }
}

/// Normalizer quoted alongside [`published_config`].
pub const PUBLISHED_NORMALIZER: f64 = 2.73989;
/// Fidelity quoted alongside [`published_config`].
pub const PUBLISHED_FIDELITY: f64 = 0.9994;
/// Quoted `β₁β₂` and `β₁+β₂`.
pub const PUBLISHED_PRODUCT: f64 = 0.890702;
pub const PUBLISHED_SUM: f64 = 2.9344;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeraldedState {
    pub phi: [f64; 5],
    pub normalizer: f64,
    #[serde(skip)]
    pub state: FockVector,
}

pub fn herald_amplitudes(cfg: &HeraldConfig) -> Result<HeraldedState> {
    cfg.validate()?;
    let [b1, b2, b3, b4] = cfg.betas;
    let q = cfg.q;
    let e1 = b1 + b2 + b3 + b4;
    let e2 = b1 * b2 + b1 * b3 + b1 * b4 + b2 * b3 + b2 * b4 + b3 * b4;
    let e3 = b1 * b2 * b3 + b1 * b2 * b4 + b1 * b3 * b4 + b2 * b3 * b4;
    let e4 = b1 * b2 * b3 * b4;
    let phi = [
        e4,
        0.5 * q * e3,
        q * q * 2f64.sqrt() / 4.0 * e2,
        q.powi(3) * 6f64.sqrt() / 8.0 * e1,
        q.powi(4) * 24f64.sqrt() / 16.0,
    ];
    let normalizer = phi.iter().map(|x| x * x).sum::<f64>().sqrt();
    let state = FockVector::new(phi.iter().map(|x| Complex64::new(x / normalizer, 0.0)).collect())?;
    Ok(HeraldedState { phi, normalizer, state })
}

pub fn herald_fidelity(cfg: &HeraldConfig, target: &FockVector) -> Result<f64> {
    target.ensure_normalized("herald_fidelity")?;
    Ok(fidelity(&herald_amplitudes(cfg)?.state, target))
}

/// Target amplitudes `(t₀, t₂, t₄)`; everything else must vanish.
fn even_core(target: &FockVector) -> Result<[f64; 3]> {
    target.ensure_normalized("optimize_betas")?;
    for (n, a) in target.amplitudes().iter().enumerate() {
        let allowed = n % 2 == 0 && n <= 4;
        if !allowed && a.norm() > 1e-12 {
            return Err(Error::Precondition(format!("target must live on |0⟩, |2⟩, |4⟩; ψ_{n} = {a}")));
        }
    }
    let amp = |n: usize| target.amplitude(n);
    // a global phase is irrelevant; remove it using the largest entry
    let lead = [amp(0), amp(2), amp(4)].into_iter().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
    let phase = lead.conj() / lead.norm();
    let t = [amp(0) * phase, amp(2) * phase, amp(4) * phase];
    if t.iter().any(|c| c.im.abs() > 1e-12) {
        return Err(Error::Precondition("real displacements only reach real targets".into()));
    }
    Ok([t[0].re, t[1].re, t[2].re])
}

/// Ratio residuals `(φ₀ t₄ − φ₄ t₀, φ₂ t₄ − φ₄ t₂)` in `(p, s)`.
fn residual(q: f64, t: [f64; 3], p: f64, s: f64) -> [f64; 2] {
    let c2 = q * q * 2f64.sqrt() / 4.0;
    let phi4 = q.powi(4) * 24f64.sqrt() / 16.0;
    [p * p * t[2] - phi4 * t[0], c2 * (2.0 * p - s * s) * t[2] - phi4 * t[1]]
}

fn newton(q: f64, t: [f64; 3], mut p: f64, mut s: f64) -> Option<(f64, f64)> {
    let c2 = q * q * 2f64.sqrt() / 4.0;
    let norm = |r: [f64; 2]| r[0].hypot(r[1]);
    let mut r = residual(q, t, p, s);
    for _ in 0..200 {
        if norm(r) < 1e-15 {
            return Some((p, s));
        }
        // Jacobian [[2p t4, 0], [2 c2 t4, −2 c2 s t4]]
        let (j11, j21, j22) = (2.0 * p * t[2], 2.0 * c2 * t[2], -2.0 * c2 * s * t[2]);
        if j11 == 0.0 || j22 == 0.0 {
            // nudge off the singular lines
            p += 1e-3;
            s += 1e-3;
            r = residual(q, t, p, s);
            continue;
        }
        let dp = -r[0] / j11;
        let ds = -(r[1] + j21 * dp) / j22;
        let mut lambda = 1.0;
        loop {
            let (np, ns) = (p + lambda * dp, s + lambda * ds);
            let nr = residual(q, t, np, ns);
            if norm(nr) < norm(r) || lambda < 1e-10 {
                p = np;
                s = ns;
                r = nr;
                break;
            }
            lambda *= 0.5;
        }
    }
    (norm(r) < 1e-12).then_some((p, s))
}

/// Best real displacements for `target` at fixed `q`.
///
/// Solves the two amplitude-ratio equations for `(p, s)` by damped Newton
/// from several starts and keeps the real factorization with the highest
/// fidelity (`p ≥ 0` first on ties; `s ≥ 0` always, since only `s²`
/// enters). Targets the ratio system cannot match exactly fall back to
/// direct maximization of the fidelity.
pub fn optimize_betas(q: f64, target: &FockVector) -> Result<HeraldConfig> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Precondition(format!("q must lie in (0, 1), got {q}")));
    }
    let t = even_core(target)?;
    if t[0] == 0.0 && t[1] == 0.0 {
        return HeraldConfig::new(q, [0.0; 4]);
    }

    let mut roots: Vec<(f64, f64)> = Vec::new();
    let mut best_residual = f64::INFINITY;
    if t[2] != 0.0 {
        for p0 in [-4.0, -1.0, -0.25, 0.25, 1.0, 4.0] {
            for s0 in [0.5, 2.0, 5.0] {
                if let Some((p, s)) = newton(q, t, p0, s0) {
                    let s = s.abs();
                    if !roots.iter().any(|&(a, b)| (a - p).abs() < 1e-9 && (b - s).abs() < 1e-9) {
                        roots.push((p, s));
                    }
                } else {
                    let r = residual(q, t, p0, s0);
                    best_residual = best_residual.min(r[0].hypot(r[1]));
                }
            }
        }
    }

    if !roots.is_empty() {
        let feasible: Vec<HeraldConfig> =
            roots.iter().filter_map(|&(p, s)| HeraldConfig::from_sum_product(q, p, s).ok()).collect();
        if feasible.is_empty() {
            let (p, s) = roots[0];
            return Err(Error::Infeasible(format!("ratio solution p = {p}, s = {s} has s² < 4p")));
        }
        return pick_best(feasible, target);
    }
    least_squares(q, target).ok_or(Error::Convergence { residual: best_residual })
}

fn pick_best(mut cands: Vec<HeraldConfig>, target: &FockVector) -> Result<HeraldConfig> {
    // p ≥ 0 first, then fidelity
    cands.sort_by(|a, b| {
        let fa = herald_fidelity(a, target).unwrap_or(0.0);
        let fb = herald_fidelity(b, target).unwrap_or(0.0);
        fb.total_cmp(&fa).then_with(|| (a.sum_product().0 < 0.0).cmp(&(b.sum_product().0 < 0.0)))
    });
    let best = cands[0];
    let fb = herald_fidelity(&best, target)?;
    Ok(cands
        .into_iter()
        .find(|c| c.sum_product().0 >= 0.0 && herald_fidelity(c, target).unwrap_or(0.0) >= fb - 1e-12)
        .unwrap_or(best))
}

/// Pattern search for the fidelity maximum over feasible `(p, s)`.
fn least_squares(q: f64, target: &FockVector) -> Option<HeraldConfig> {
    let fid = |p: f64, s: f64| -> f64 {
        HeraldConfig::from_sum_product(q, p, s).and_then(|c| herald_fidelity(&c, target)).unwrap_or(-1.0)
    };
    let mut best = (0.0, 0.0, fid(0.0, 0.0));
    for i in -40..=40 {
        for j in 0..=60 {
            let (p, s) = (i as f64 * 0.125, j as f64 * 0.125);
            let f = fid(p, s);
            if f > best.2 {
                best = (p, s, f);
            }
        }
    }
    let mut step = 0.0625;
    while step > 1e-10 {
        let (p, s, f) = best;
        let moved = [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)]
            .into_iter()
            .map(|(dp, ds)| (p + dp, (s + ds).abs(), fid(p + dp, (s + ds).abs())))
            .filter(|c| c.2 > f)
            .max_by(|a, b| a.2.total_cmp(&b.2));
        match moved {
            Some(c) => best = c,
            None => step *= 0.5,
        }
    }
    (best.2 >= 0.0).then(|| HeraldConfig::from_sum_product(q, best.0, best.1).ok()).flatten()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::squeeze::psi74_core_coefficients;
    use approx::assert_abs_diff_eq;

    fn core() -> FockVector {
        let c = psi74_core_coefficients();
        FockVector::from_real(&[c[0], 0.0, c[1], 0.0, c[2]]).unwrap()
    }

    #[test]
    fn zero_displacements_give_four_photons() {
        let h = herald_amplitudes(&HeraldConfig::new(0.5, [0.0; 4]).unwrap()).unwrap();
        assert_eq!(h.state, FockVector::basis(4, 5).unwrap());
    }

    #[test]
    fn parity_constraints_remove_odd_terms() {
        let h = herald_amplitudes(&published_config()).unwrap();
        assert_eq!(h.phi[1], 0.0);
        assert_eq!(h.phi[3], 0.0);
        let split = crate::fock::parity_split(&h.state).unwrap();
        assert_eq!(split.lambda, 1.0);
    }

    #[test]
    fn permutation_symmetry() {
        let a = herald_amplitudes(&HeraldConfig::new(0.7, [0.3, -1.2, 2.0, 0.5]).unwrap()).unwrap();
        let b = herald_amplitudes(&HeraldConfig::new(0.7, [2.0, 0.5, -1.2, 0.3]).unwrap()).unwrap();
        for (x, y) in a.phi.iter().zip(&b.phi) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-14);
        }
    }

    #[test]
    fn self_fidelity_and_small_q() {
        let cfg = published_config();
        let h = herald_amplitudes(&cfg).unwrap();
        assert_abs_diff_eq!(herald_fidelity(&cfg, &h.state).unwrap(), 1.0, epsilon = 1e-14);
        let small = HeraldConfig { q: 0.3, ..cfg };
        assert!(herald_fidelity(&small, &core()).unwrap() < 0.9);
    }

    #[test]
    fn optimizer_hits_core_exactly() {
        let q = 2f64.tanh();
        let cfg = optimize_betas(q, &core()).unwrap();
        assert_abs_diff_eq!(herald_fidelity(&cfg, &core()).unwrap(), 1.0, epsilon = 1e-10);
        let published = herald_fidelity(&published_config(), &core()).unwrap();
        assert!(herald_fidelity(&cfg, &core()).unwrap() >= published - 1e-6);
        let (p, s) = cfg.sum_product();
        assert!(p >= 0.0 && s >= 0.0);
    }

    #[test]
    fn four_photon_target() {
        let cfg = optimize_betas(0.6, &FockVector::basis(4, 5).unwrap()).unwrap();
        assert_eq!(cfg.betas, [0.0; 4]);
    }

    #[test]
    fn odd_target_rejected() {
        let t = FockVector::basis(1, 3).unwrap();
        assert!(matches!(optimize_betas(0.5, &t), Err(Error::Precondition(_))));
    }

    #[test]
    fn unreachable_ratio_falls_back() {
        // t₀/t₄ < 0 with a positive φ₀ = p² has no exact solution
        let t = FockVector::from_real(&[-0.3, 0.0, 0.5, 0.0, 0.8]).unwrap().normalize().unwrap();
        let cfg = optimize_betas(0.8, &t).unwrap();
        let f = herald_fidelity(&cfg, &t).unwrap();
        assert!(f > 0.5 && f < 1.0);
    }

    #[test]
    fn json_round_trip() {
        let cfg = published_config();
        let s = serde_json::to_string(&cfg).unwrap();
        assert!(s.contains("\"betas\""));
        let back: HeraldConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back, cfg);
    }
}
