//! Minimal covariant error under a mean photon-number budget.
//!
//! Within one parity sector the error is the quadratic form
//! `1 − Σ a_k a_{k+1}` over real amplitudes `a_k` on photon numbers `n_k`.
//! Adding the budget with a multiplier `μ ≥ 0` turns the problem into the
//! ground state of the tridiagonal matrix with diagonal `1 + μ n_k` and
//! off-diagonal `−1/2`. The ground-state energy `Σ n_k a_k²` falls
//! monotonically in `μ`, so `μ` is bisected until the budget is met.

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fock::{FockVector, Parity};
use crate::special::ksum;
use crate::tridiag::SymTridiag;

/// Tail mass (over the top eighth of the sector) above which the
/// truncation is reported as too small.
pub const TAIL_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct TauResult {
    pub energy_bound: f64,
    pub tau: f64,
    pub optimizer: FockVector,
    /// `None` when the budget leaves only the vacuum (`E = 0`).
    pub multiplier: Option<f64>,
    pub n_trunc: usize,
    pub sector: Parity,
    /// `‖T(μ)a − λ_min a‖` of the returned sector eigenvector.
    pub stationarity_residual: f64,
    pub tail_mass: f64,
}

impl TauResult {
    pub fn e2tau(&self) -> f64 {
        self.energy_bound * self.energy_bound * self.tau
    }
}

impl Serialize for TauResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("TauResult", 7)?;
        st.serialize_field("E", &self.energy_bound)?;
        st.serialize_field("tau", &self.tau)?;
        st.serialize_field("E2tau", &self.e2tau())?;
        st.serialize_field("mu", &self.multiplier)?;
        st.serialize_field("n_trunc", &self.n_trunc)?;
        st.serialize_field("sector", &self.sector)?;
        let amps: Vec<[f64; 2]> = self.optimizer.amplitudes().iter().map(|a| [a.re, a.im]).collect();
        st.serialize_field("amplitudes", &amps)?;
        st.end()
    }
}

struct SectorSolution {
    amps: Vec<f64>,
    photon_numbers: Vec<f64>,
    multiplier: f64,
    error: f64,
    residual: f64,
    tail_mass: f64,
}

struct Sector {
    photon_numbers: Vec<f64>,
    off: Vec<f64>,
}

impl Sector {
    fn new(parity: Parity, n_trunc: usize) -> Self {
        let len = (n_trunc + 1 - parity.offset()) / 2;
        Self {
            photon_numbers: (0..len).map(|k| parity.photon_number(k) as f64).collect(),
            off: vec![-0.5; len.saturating_sub(1)],
        }
    }

    fn len(&self) -> usize {
        self.photon_numbers.len()
    }

    /// Ground state of `T(μ)` and its energy.
    fn ground(&self, mu: f64) -> (Vec<f64>, f64, f64) {
        let diag: Vec<f64> = self.photon_numbers.iter().map(|n| 1.0 + mu * n).collect();
        let ep = SymTridiag { diag: &diag, off: &self.off }.lowest();
        let energy = ksum(ep.vector.iter().zip(&self.photon_numbers).map(|(a, n)| n * a * a));
        (ep.vector, energy, ep.residual)
    }

    fn solve(&self, budget: f64) -> Result<SectorSolution> {
        let (mut amps, energy0, mut residual) = self.ground(0.0);
        let mut mu = 0.0;
        if energy0 > budget {
            let mut lo = 0.0;
            let mut hi = 1.0;
            loop {
                let (a, e, r) = self.ground(hi);
                if e <= budget {
                    amps = a;
                    residual = r;
                    break;
                }
                lo = hi;
                hi *= 2.0;
                if hi > 1e200 {
                    return Err(Error::Convergence { residual: e - budget });
                }
            }
            for _ in 0..400 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi || hi - lo <= 1e-15 * hi {
                    break;
                }
                let (a, e, r) = self.ground(mid);
                if e <= budget {
                    hi = mid;
                    amps = a;
                    residual = r;
                } else {
                    lo = mid;
                }
            }
            mu = hi;
        }
        let error = 1.0 - ksum(amps.windows(2).map(|w| w[0] * w[1]));
        let tail_len = self.len().div_ceil(8);
        let tail_mass = ksum(amps[self.len() - tail_len..].iter().map(|a| a * a));
        Ok(SectorSolution {
            amps,
            photon_numbers: self.photon_numbers.clone(),
            multiplier: mu,
            error,
            residual,
            tail_mass,
        })
    }
}

/// `τ(E)`: minimal covariant error over states with `⟨n̂⟩ ≤ E` in a space of
/// dimension `n_trunc`.
///
/// Each parity sector is solved separately and the strictly better one is
/// reported (even on ties).
pub fn minimize_tau(energy_bound: f64, n_trunc: usize) -> Result<TauResult> {
    if !(energy_bound >= 0.0) || !energy_bound.is_finite() {
        return Err(Error::Precondition(format!("energy bound must be finite and >= 0, got {energy_bound}")));
    }
    if n_trunc == 0 {
        return Err(Error::Precondition("n_trunc must be >= 1".into()));
    }
    if energy_bound == 0.0 {
        return Ok(TauResult {
            energy_bound,
            tau: 1.0,
            optimizer: FockVector::basis(0, n_trunc)?,
            multiplier: None,
            n_trunc,
            sector: Parity::Even,
            stationarity_residual: 0.0,
            tail_mass: 0.0,
        });
    }

    let mut best: Option<(Parity, SectorSolution)> = None;
    for parity in [Parity::Even, Parity::Odd] {
        let sector = Sector::new(parity, n_trunc);
        if sector.len() == 0 || sector.photon_numbers[0] > energy_bound {
            continue;
        }
        let sol = sector.solve(energy_bound)?;
        let better = match &best {
            None => true,
            Some((_, b)) => sol.error < b.error,
        };
        if better {
            best = Some((parity, sol));
        }
    }
    let (sector, sol) = best.expect("the even sector is always feasible for E > 0");
    if sol.tail_mass > TAIL_LIMIT {
        return Err(Error::Truncation { tail_mass: sol.tail_mass, limit: TAIL_LIMIT });
    }

    let mut amps = vec![Complex64::default(); n_trunc];
    for (a, n) in sol.amps.iter().zip(&sol.photon_numbers) {
        amps[*n as usize] = Complex64::new(*a, 0.0);
    }
    let optimizer = FockVector::new(amps)?;
    Ok(TauResult {
        energy_bound,
        tau: super::error_functional(optimizer.amplitudes()),
        optimizer,
        multiplier: Some(sol.multiplier),
        n_trunc,
        sector,
        stationarity_residual: sol.residual,
        tail_mass: sol.tail_mass,
    })
}
