//! Fisher information of the phase family and the two-point family whose
//! Cramér-Rao bound vanishes under a fixed energy budget.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{mean_photon, second_photon_moment, FockVector};
use crate::phase::{minimize_tau, TauResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FisherReport {
    /// SLD Fisher information `4 Var(n̂)`.
    #[serde(rename = "J")]
    pub j: f64,
    /// `2/J`; `None` when `J = 0`.
    pub mcrb: Option<f64>,
    pub mean_photon: f64,
    #[serde(rename = "E_bound")]
    pub energy_bound: f64,
}

impl FisherReport {
    pub fn mcrb_is_infinite(&self) -> bool {
        self.mcrb.is_none()
    }
}

pub fn sld_fisher(v: &FockVector) -> Result<FisherReport> {
    let n1 = mean_photon(v)?;
    let n2 = second_photon_moment(v)?;
    let j = (4.0 * (n2 - n1 * n1)).max(0.0);
    Ok(FisherReport {
        j,
        mcrb: (j > 0.0).then(|| 2.0 / j),
        mean_photon: n1,
        energy_bound: n1,
    })
}

/// Photon-number distribution `P(0) = 1 − 1/t`, `P(m) = 1/t`, `m = ⌊E t⌋`.
///
/// `⌊E t⌋` is the plain floating-point floor; when `E·t` lies within about
/// `1e−9` of an integer the rounding of the product decides `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceProbe {
    pub t: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    pub m: u64,
}

impl DivergenceProbe {
    pub fn new(energy: f64, t: f64) -> Result<Self> {
        if !(energy > 0.0) || !energy.is_finite() {
            return Err(Error::Precondition(format!("energy must be > 0, got {energy}")));
        }
        if !(t > 1.0) || !t.is_finite() {
            return Err(Error::Precondition(format!("t must be > 1, got {t}")));
        }
        Ok(Self { t, energy, m: (energy * t).floor() as u64 })
    }

    pub fn probabilities(&self) -> [(u64, f64); 2] {
        [(0, 1.0 - 1.0 / self.t), (self.m, 1.0 / self.t)]
    }

    pub fn mean(&self) -> f64 {
        self.m as f64 / self.t
    }

    pub fn variance(&self) -> f64 {
        let m = self.m as f64;
        m * m / self.t * (1.0 - 1.0 / self.t)
    }

    /// `1/(2 Var)`; `None` when `m = 0`.
    pub fn mcrb(&self) -> Option<f64> {
        let v = self.variance();
        (v > 0.0).then(|| 0.5 / v)
    }

    /// Amplitudes `√P(n)` on `n_trunc = m + 1` levels.
    pub fn lift(&self) -> Result<FockVector> {
        let mut amps = vec![Complex64::default(); self.m as usize + 1];
        for (n, p) in self.probabilities() {
            amps[n as usize] += Complex64::new(p.sqrt(), 0.0);
        }
        if self.m == 0 {
            amps[0] = Complex64::new(1.0, 0.0);
        }
        FockVector::new(amps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceRow {
    pub t: f64,
    pub mean: f64,
    pub variance: f64,
    pub mcrb: Option<f64>,
    #[serde(rename = "E2mcrb")]
    pub e2mcrb: Option<f64>,
}

pub fn divergence_family(energy: f64, t_list: &[f64]) -> Result<Vec<DivergenceRow>> {
    t_list
        .iter()
        .map(|&t| {
            let p = DivergenceProbe::new(energy, t)?;
            let mcrb = p.mcrb();
            Ok(DivergenceRow {
                t,
                mean: p.mean(),
                variance: p.variance(),
                mcrb,
                e2mcrb: mcrb.map(|m| energy * energy * m),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    #[serde(rename = "E")]
    pub energy: f64,
    pub rows: Vec<DivergenceRow>,
    pub tau: f64,
    #[serde(rename = "E2tau")]
    pub e2tau: f64,
    /// Smallest `E² mcrb` over the family.
    pub inf_e2mcrb: Option<f64>,
    /// `E²τ / inf E² mcrb`.
    pub gap: Option<f64>,
    /// True when the budget is zero and nothing can be compared.
    pub vacuous: bool,
    pub statement: String,
}

/// Puts the family's `E²·mcrb` next to the attainable `E²τ(E)`.
pub fn crb_gap_report(energy: f64, n_trunc: usize, t_list: &[f64]) -> Result<GapReport> {
    let tau: TauResult = minimize_tau(energy, n_trunc)?;
    if energy == 0.0 {
        return Ok(GapReport {
            energy,
            rows: Vec::new(),
            tau: tau.tau,
            e2tau: 0.0,
            inf_e2mcrb: None,
            gap: None,
            vacuous: true,
            statement: "E = 0 admits only the vacuum (tau = 1); the comparison is vacuous".into(),
        });
    }
    let rows = divergence_family(energy, t_list)?;
    let inf = rows.iter().filter_map(|r| r.e2mcrb).min_by(f64::total_cmp);
    let e2tau = tau.e2tau();
    let gap = inf.map(|m| e2tau / m);
    let statement = match (inf, gap) {
        (Some(m), Some(g)) => format!(
            "E^2*mcrb reaches {m:.6e} while E^2*tau(E) = {e2tau:.6e}: the Cramer-Rao bound undershoots the attainable error by a factor {g:.6e}"
        ),
        _ => "no family member has nonzero variance; choose larger t".into(),
    };
    Ok(GapReport { energy, rows, tau: tau.tau, e2tau, inf_e2mcrb: inf, gap, vacuous: false, statement })
}
