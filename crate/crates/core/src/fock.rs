//! Truncated photon-number states.
//!
//! A [`FockVector`] stores the complex amplitudes `ψ_n` for `n = 0..n_trunc`.
//! The truncation is part of the value: nothing in this crate grows a vector
//! behind the caller's back, so convergence in the truncation has to be
//! checked explicitly (see the `Truncation` error raised by the builders).

use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::ksum;

static NORM_TOLERANCE_BITS: AtomicU64 = AtomicU64::new(0x3D71_9799_812D_EA11); // 1e-12

/// Tolerance on `|‖v‖² − 1|` used by every "normalized input" contract.
pub fn norm_tolerance() -> f64 {
    f64::from_bits(NORM_TOLERANCE_BITS.load(Ordering::Relaxed))
}

/// Replace the process-wide normalization tolerance.
pub fn set_norm_tolerance(tol: f64) {
    assert!(tol > 0.0 && tol.is_finite(), "tolerance must be positive");
    NORM_TOLERANCE_BITS.store(tol.to_bits(), Ordering::Relaxed);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// Photon number carried by sector index `k`.
    pub fn photon_number(self, k: usize) -> usize {
        match self {
            Parity::Even => 2 * k,
            Parity::Odd => 2 * k + 1,
        }
    }

    pub fn offset(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

impl std::str::FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" | "e" => Ok(Parity::Even),
            "odd" | "o" => Ok(Parity::Odd),
            other => Err(Error::Invalid(format!("unknown parity '{other}'"))),
        }
    }
}

/// Pure single-mode state in the truncated photon-number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: Vec<Complex64>,
}

impl FockVector {
    /// Wraps the amplitudes as given; `n_trunc` is `amps.len()`.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::Invalid("a Fock vector needs n_trunc >= 1".into()));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::Invalid("non-finite amplitude".into()));
        }
        Ok(Self { amps })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Number state `|n⟩` in a space of dimension `n_trunc`.
    pub fn basis(n: usize, n_trunc: usize) -> Result<Self> {
        if n >= n_trunc {
            return Err(Error::Invalid(format!("|{n}⟩ does not fit in n_trunc = {n_trunc}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); n_trunc];
        amps[n] = Complex64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    /// Normalized equal-weight superposition of the listed number states.
    pub fn superposition(ns: &[usize], n_trunc: usize) -> Result<Self> {
        let mut amps = vec![Complex64::new(0.0, 0.0); n_trunc];
        for &n in ns {
            let slot = amps
                .get_mut(n)
                .ok_or_else(|| Error::Invalid(format!("|{n}⟩ does not fit in n_trunc = {n_trunc}")))?;
            *slot += 1.0;
        }
        Self::new(amps)?.normalize()
    }

    pub fn n_trunc(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    /// `ψ_n`, zero beyond the truncation.
    pub fn amplitude(&self, n: usize) -> Complex64 {
        self.amps.get(n).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        ksum(self.amps.iter().map(|a| a.norm_sqr()))
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= norm_tolerance()
    }

    pub(crate) fn ensure_normalized(&self, what: &str) -> Result<()> {
        let n2 = self.norm_sqr();
        if (n2 - 1.0).abs() <= norm_tolerance() {
            Ok(())
        } else {
            Err(Error::Contract(format!("{what} needs a normalized state, got ‖ψ‖² = {n2}")))
        }
    }

    /// Unit-norm copy pointing in the same direction.
    pub fn normalize(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 || !n2.is_finite() {
            return Err(Error::Normalization);
        }
        let s = n2.sqrt().recip();
        Ok(Self { amps: self.amps.iter().map(|a| a * s).collect() })
    }

    /// Zero-pad (or keep) to `n_trunc`; never drops nonzero amplitudes.
    pub fn padded(&self, n_trunc: usize) -> Result<Self> {
        if n_trunc < self.amps.len() && self.amps[n_trunc..].iter().any(|a| a.norm_sqr() > 0.0) {
            return Err(Error::Invalid(format!(
                "cannot shrink to n_trunc = {n_trunc}: nonzero amplitudes would be lost"
            )));
        }
        let mut amps = self.amps.clone();
        amps.resize(n_trunc.max(1), Complex64::default());
        Ok(Self { amps })
    }

    /// `|ψ_n|²` for every `n`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Same moduli with all phases removed.
    pub fn moduli(&self) -> Self {
        Self { amps: self.amps.iter().map(|a| Complex64::new(a.norm(), 0.0)).collect() }
    }

    /// Inner product `⟨self|other⟩`, shorter vector zero-padded.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        let re = ksum(self.amps.iter().zip(&other.amps).map(|(a, b)| (a.conj() * b).re));
        let im = ksum(self.amps.iter().zip(&other.amps).map(|(a, b)| (a.conj() * b).im));
        Complex64::new(re, im)
    }
}

/// `⟨n̂⟩ = Σ n |ψ_n|²`.
pub fn mean_photon(v: &FockVector) -> Result<f64> {
    v.ensure_normalized("mean_photon")?;
    Ok(ksum(v.amps.iter().enumerate().map(|(n, a)| n as f64 * a.norm_sqr())))
}

/// `⟨n̂²⟩ = Σ n² |ψ_n|²`.
pub fn second_photon_moment(v: &FockVector) -> Result<f64> {
    v.ensure_normalized("second_photon_moment")?;
    Ok(ksum(v.amps.iter().enumerate().map(|(n, a)| (n * n) as f64 * a.norm_sqr())))
}

/// `|⟨u|v⟩|²`, clamped to `[0, 1]`.
pub fn fidelity(u: &FockVector, v: &FockVector) -> f64 {
    u.inner(v).norm_sqr().clamp(0.0, 1.0)
}

/// Decomposition `ψ = √λ ψ_e ⊕ √(1−λ) ψ_o` over the parity sectors.
///
/// Sector vectors are indexed by `k`, where even index `k` is photon number
/// `2k` and odd index `k` is photon number `2k+1`. A sector with zero weight
/// is `None` and its weight is exactly 0 (or `lambda` exactly 1).
#[derive(Debug, Clone, PartialEq)]
pub struct ParitySplit {
    pub lambda: f64,
    pub even: Option<FockVector>,
    pub odd: Option<FockVector>,
    n_trunc: usize,
}

impl ParitySplit {
    /// Truncation of the state that was split.
    pub fn n_trunc(&self) -> usize {
        self.n_trunc
    }

    pub fn sector(&self, parity: Parity) -> Option<&FockVector> {
        match parity {
            Parity::Even => self.even.as_ref(),
            Parity::Odd => self.odd.as_ref(),
        }
    }

    /// Reassembles `√λ·even` on `|2k⟩` and `√(1−λ)·odd` on `|2k+1⟩`.
    pub fn recombine(&self) -> FockVector {
        let mut amps = vec![Complex64::default(); self.n_trunc];
        let we = self.lambda.sqrt();
        let wo = (1.0 - self.lambda).max(0.0).sqrt();
        for (parity, w) in [(Parity::Even, we), (Parity::Odd, wo)] {
            if let Some(sector) = self.sector(parity) {
                for (k, a) in sector.amps.iter().enumerate() {
                    amps[parity.photon_number(k)] = a * w;
                }
            }
        }
        FockVector { amps }
    }
}

/// Photon-number embedding of a sector vector (`k ↦ 2k` or `2k+1`).
pub fn embed_sector(sector: &FockVector, parity: Parity) -> FockVector {
    let n_trunc = parity.photon_number(sector.n_trunc() - 1) + 1;
    let mut amps = vec![Complex64::default(); n_trunc];
    for (k, a) in sector.amps.iter().enumerate() {
        amps[parity.photon_number(k)] = *a;
    }
    FockVector { amps }
}

pub fn parity_split(v: &FockVector) -> Result<ParitySplit> {
    v.ensure_normalized("parity_split")?;
    let n = v.n_trunc();
    let pick = |parity: Parity| -> Vec<Complex64> {
        v.amps.iter().skip(parity.offset()).step_by(2).copied().collect()
    };
    let even = pick(Parity::Even);
    let odd = pick(Parity::Odd);
    let we = ksum(even.iter().map(|a| a.norm_sqr()));
    let wo = ksum(odd.iter().map(|a| a.norm_sqr()));

    let sector = |amps: Vec<Complex64>, w: f64| -> Result<Option<FockVector>> {
        if w == 0.0 {
            Ok(None)
        } else {
            Ok(Some(FockVector::new(amps)?.normalize()?))
        }
    };
    let lambda = if wo == 0.0 {
        1.0
    } else if we == 0.0 {
        0.0
    } else {
        we / (we + wo)
    };
    Ok(ParitySplit { lambda, even: sector(even, we)?, odd: sector(odd, wo)?, n_trunc: n })
}

#[derive(Serialize, Deserialize)]
struct FockVectorRepr {
    n_trunc: usize,
    amplitudes: Vec<[f64; 2]>,
}

impl Serialize for FockVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FockVectorRepr {
            n_trunc: self.n_trunc(),
            amplitudes: self.amps.iter().map(|a| [a.re, a.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FockVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = FockVectorRepr::deserialize(d)?;
        if repr.n_trunc < repr.amplitudes.len() {
            return Err(D::Error::custom(format!(
                "n_trunc = {} is smaller than the {} listed amplitudes",
                repr.n_trunc,
                repr.amplitudes.len()
            )));
        }
        let mut amps: Vec<Complex64> =
            repr.amplitudes.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        amps.resize(repr.n_trunc, Complex64::default());
        FockVector::new(amps).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn normalize_examples() {
        let v = FockVector::from_real(&[1.0, 0.0, 0.0]).unwrap().normalize().unwrap();
        assert_eq!(v.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);

        let v = FockVector::from_real(&[1.0, 1.0]).unwrap().normalize().unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(v.amplitude(0).re, h, epsilon = 1e-15);
        assert_abs_diff_eq!(v.amplitude(1).re, h, epsilon = 1e-15);

        let v = FockVector::new(vec![c(3.0, 0.0), c(0.0, 4.0)]).unwrap().normalize().unwrap();
        assert_abs_diff_eq!(v.amplitude(0).re, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(v.amplitude(1).im, 0.8, epsilon = 1e-15);
    }

    #[test]
    fn normalize_rejects_zero() {
        let v = FockVector::from_real(&[0.0, 0.0]).unwrap();
        assert_eq!(v.normalize(), Err(Error::Normalization));
        assert!(FockVector::new(vec![]).is_err());
    }

    #[test]
    fn photon_moments() {
        let one = FockVector::basis(1, 4).unwrap();
        assert_eq!(mean_photon(&one).unwrap(), 1.0);
        let two = FockVector::basis(2, 4).unwrap();
        assert_eq!(second_photon_moment(&two).unwrap(), 4.0);

        let s02 = FockVector::superposition(&[0, 2], 5).unwrap();
        assert_abs_diff_eq!(mean_photon(&s02).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(second_photon_moment(&s02).unwrap(), 2.0, epsilon = 1e-15);
        let s04 = FockVector::superposition(&[0, 4], 5).unwrap();
        assert_abs_diff_eq!(second_photon_moment(&s04).unwrap(), 8.0, epsilon = 1e-14);

        // c0|0⟩ + c2|2⟩ + c4|4⟩ with c² = 3/35, 24/35, 8/35
        let core = FockVector::from_real(&[
            (3.0f64 / 35.0).sqrt(),
            0.0,
            -(24.0f64 / 35.0).sqrt(),
            0.0,
            (8.0f64 / 35.0).sqrt(),
        ])
        .unwrap();
        assert_abs_diff_eq!(mean_photon(&core).unwrap(), 80.0 / 35.0, epsilon = 1e-14);
    }

    #[test]
    fn moments_require_normalized_input() {
        let v = FockVector::from_real(&[1.0, 1.0]).unwrap();
        assert!(matches!(mean_photon(&v), Err(Error::Contract(_))));
        assert!(matches!(second_photon_moment(&v), Err(Error::Contract(_))));
    }

    #[test]
    fn parity_split_examples() {
        let vac = FockVector::basis(0, 3).unwrap();
        let s = parity_split(&vac).unwrap();
        assert_eq!(s.lambda, 1.0);
        assert_eq!(s.even.as_ref().unwrap().amplitude(0), c(1.0, 0.0));
        assert!(s.odd.is_none());

        let s01 = FockVector::superposition(&[0, 1], 2).unwrap();
        let s = parity_split(&s01).unwrap();
        assert_abs_diff_eq!(s.lambda, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.even.unwrap().amplitude(0).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.odd.unwrap().amplitude(0).re, 1.0, epsilon = 1e-15);

        let v = FockVector::superposition(&[0, 2, 3], 4).unwrap();
        let s = parity_split(&v).unwrap();
        assert_abs_diff_eq!(s.lambda, 2.0 / 3.0, epsilon = 1e-15);
        let e = s.even.unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(e.amplitude(0).re, h, epsilon = 1e-15);
        assert_abs_diff_eq!(e.amplitude(1).re, h, epsilon = 1e-15);

        let one = FockVector::basis(1, 3).unwrap();
        let s = parity_split(&one).unwrap();
        assert_eq!(s.lambda, 0.0);
        assert!(s.even.is_none());
    }

    #[test]
    fn fidelity_examples() {
        let v0 = FockVector::basis(0, 3).unwrap();
        let v1 = FockVector::basis(1, 2).unwrap();
        assert_eq!(fidelity(&v0, &v0), 1.0);
        assert_eq!(fidelity(&v0, &v1), 0.0);
        let s02 = FockVector::superposition(&[0, 2], 3).unwrap();
        assert_abs_diff_eq!(fidelity(&s02, &v0), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn json_schema() {
        let v = FockVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"n_trunc":2,"amplitudes":[[0.6,0.0],[0.0,0.8]]}"#);
        let padded: FockVector = serde_json::from_str(r#"{"n_trunc":4,"amplitudes":[[1.0,0.0]]}"#).unwrap();
        assert_eq!(padded.n_trunc(), 4);
        assert!(serde_json::from_str::<FockVector>(r#"{"n_trunc":1,"amplitudes":[[1,0],[0,0]]}"#).is_err());
    }

    pub(crate) fn arb_state(max_len: usize) -> impl Strategy<Value = FockVector> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..max_len)
            .prop_filter_map("nonzero", |v| {
                FockVector::new(v.into_iter().map(|(r, i)| Complex64::new(r, i)).collect())
                    .ok()?
                    .normalize()
                    .ok()
            })
    }

    proptest! {
        #[test]
        fn split_recombine_is_identity(v in arb_state(40)) {
            let s = parity_split(&v).unwrap();
            let w = s.recombine();
            prop_assert_eq!(w.n_trunc(), v.n_trunc());
            for (a, b) in v.amplitudes().iter().zip(w.amplitudes()) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }

        #[test]
        fn mean_photon_splits_over_sectors(v in arb_state(40)) {
            let s = parity_split(&v).unwrap();
            let part = |p: Parity| s.sector(p).map(|x| mean_photon(&embed_sector(x, p)).unwrap()).unwrap_or(0.0);
            let total = s.lambda * part(Parity::Even) + (1.0 - s.lambda) * part(Parity::Odd);
            prop_assert!((total - mean_photon(&v).unwrap()).abs() < 1e-10);
        }

        #[test]
        fn fidelity_symmetric_and_unit_on_self(u in arb_state(20), v in arb_state(20)) {
            prop_assert!((fidelity(&u, &v) - fidelity(&v, &u)).abs() < 1e-14);
            prop_assert!((fidelity(&u, &u) - 1.0).abs() < 1e-12);
        }
    }
}
