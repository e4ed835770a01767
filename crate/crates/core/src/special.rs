//! Log-space special functions and compensated summation.

use std::sync::OnceLock;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma needs a positive argument, got {x}");
    if x < 0.5 {
        // reflection
        let s = (std::f64::consts::PI * x).sin();
        return (std::f64::consts::PI / s).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

const EXACT_TABLE: usize = 171;

fn factorial_table() -> &'static [f64; EXACT_TABLE] {
    static TABLE: OnceLock<[f64; EXACT_TABLE]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; EXACT_TABLE];
        let mut acc = 1.0f64;
        for (n, slot) in t.iter_mut().enumerate() {
            if n > 0 {
                acc *= n as f64;
            }
            *slot = acc.ln();
        }
        t
    })
}

/// `ln n!`, exact to rounding for `n < 171`.
pub fn ln_factorial(n: usize) -> f64 {
    if n < EXACT_TABLE {
        factorial_table()[n]
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// Exact binomial coefficient, `None` on `u64` overflow.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    u64::try_from(acc).ok()
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Compensated sum of an iterator.
pub fn ksum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// Signed-log sum `Σ s_i·exp(l_i)` returned as `(sign, ln|sum|)`, together
/// with the cancellation ratio `max|term| / |sum|`.
pub fn signed_log_sum(terms: &[(f64, f64)]) -> (f64, f64, f64) {
    let lmax = terms
        .iter()
        .map(|&(_, l)| l)
        .fold(f64::NEG_INFINITY, f64::max);
    if !lmax.is_finite() {
        return (0.0, f64::NEG_INFINITY, 1.0);
    }
    let s = ksum(terms.iter().map(|&(sg, l)| sg * (l - lmax).exp()));
    if s == 0.0 {
        return (0.0, f64::NEG_INFINITY, f64::INFINITY);
    }
    (s.signum(), lmax + s.abs().ln(), 1.0 / s.abs())
}


/// Double-double number `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        (s, b - (s - a))
    }

    pub fn mul_f64(self, b: f64) -> Self {
        self * Self::from_f64(b)
    }

    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let r = self + Self::from_f64(b).mul_f64(-q1);
        let q2 = r.hi / b;
        let (hi, lo) = Self::quick_two_sum(q1, q2);
        Self { hi, lo }
    }

    pub fn scale_pow2(self, e: i32) -> Self {
        let f = 2f64.powi(e);
        Self { hi: self.hi * f, lo: self.lo * f }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

impl std::ops::Add for DoubleDouble {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        let (s, e) = Self::two_sum(self.hi, o.hi);
        let (t, f) = Self::two_sum(self.lo, o.lo);
        let (s, e) = Self::quick_two_sum(s, e + t);
        let (hi, lo) = Self::quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl std::ops::Mul for DoubleDouble {
    type Output = Self;

    fn mul(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = Self::quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl std::ops::Neg for DoubleDouble {
    type Output = Self;

    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}
