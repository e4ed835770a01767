//! Lowest eigenpair of a real symmetric tridiagonal matrix.
//!
//! Sturm-sequence bisection pins the smallest eigenvalue, then shifted
//! inverse iteration (LDLᵀ solve, shift strictly below the spectrum so the
//! factorization is positive definite) produces the eigenvector.

#[derive(Debug, Clone)]
pub(crate) struct SymTridiag<'a> {
    pub diag: &'a [f64],
    /// `off[i]` couples rows `i` and `i + 1`.
    pub off: &'a [f64],
}

#[derive(Debug, Clone)]
pub(crate) struct Eigenpair {
    #[cfg_attr(not(test), allow(dead_code))]
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

impl SymTridiag<'_> {
    fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Number of eigenvalues strictly below `x`.
    fn sturm_count(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.len() {
            let e2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            q = self.diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    fn min_eigenvalue(&self) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sturm_count(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 2.0 * f64::EPSILON * scale {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solves `(T − σ) x = b` for `σ` below the spectrum (LDLᵀ, no pivoting).
    fn shifted_solve(&self, sigma: f64, b: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n.saturating_sub(1)];
        d[0] = self.diag[0] - sigma;
        for i in 1..n {
            l[i - 1] = self.off[i - 1] / d[i - 1];
            d[i] = self.diag[i] - sigma - l[i - 1] * self.off[i - 1];
        }
        let mut y = b.to_vec();
        for i in 1..n {
            y[i] -= l[i - 1] * y[i - 1];
        }
        for i in 0..n {
            y[i] /= d[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            y[i] -= l[i] * y[i + 1];
        }
        y
    }

    /// Smallest eigenvalue with a unit eigenvector whose component sum is
    /// nonnegative.
    pub fn lowest(&self) -> Eigenpair {
        let n = self.len();
        assert!(n > 0 && self.off.len() + 1 == n, "malformed tridiagonal matrix");
        if n == 1 {
            return Eigenpair { value: self.diag[0], vector: vec![1.0], residual: 0.0 };
        }
        let lam = self.min_eigenvalue();
        let (glo, ghi) = self.gershgorin();
        let scale = (ghi - glo).max(1.0);
        let sigma = lam - 1e-10 * scale;

        let mut x = vec![1.0 / (n as f64).sqrt(); n];
        let mut value = lam;
        let mut residual = f64::INFINITY;
        for _ in 0..8 {
            let mut y = self.shifted_solve(sigma, &x);
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            y.iter_mut().for_each(|v| *v /= norm);
            let ty = self.apply(&y);
            value = y.iter().zip(&ty).map(|(a, b)| a * b).sum();
            residual = ty.iter().zip(&y).map(|(t, v)| (t - value * v).powi(2)).sum::<f64>().sqrt();
            x = y;
            if residual < 1e-13 * scale {
                break;
            }
        }
        if x.iter().sum::<f64>() < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        Eigenpair { value, vector: x, residual }
    }
}
