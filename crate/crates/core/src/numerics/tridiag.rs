use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix: `diag[i]` on the diagonal, `off[i]` at `(i, i+1)`.
#[derive(Clone, Debug)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len());
        SymTridiag { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence / LDLᵀ inertia).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut d = self.diag[0] - x;
        if d < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            if d == 0.0 {
                d = f64::EPSILON * (self.off[i - 1].abs() + f64::MIN_POSITIVE);
            }
            d = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / d;
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (zero based), by bisection to machine precision.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let pad = 1e-12 * (hi.abs().max(lo.abs()) + 1.0);
        lo -= pad;
        hi += pad;
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return mid;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }

    /// Unit eigenvector for the (simple) eigenvalue `lambda`, by inverse iteration.
    pub fn eigenvector(&self, lambda: f64) -> Result<Vec<f64>> {
        let n = self.diag.len();
        let scale = self.gershgorin().1.abs().max(1.0);
        let shift = lambda + 1e-13 * scale;
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.01 * ((i * 7919) % 13) as f64)
            .collect();
        for _ in 0..4 {
            x = self.solve_shifted(shift, &x)?;
            let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !nrm.is_finite() || nrm == 0.0 {
                return Err(Error::Numerical("inverse iteration breakdown".into()));
            }
            x.iter_mut().for_each(|v| *v /= nrm);
        }
        Ok(x)
    }

    /// Solve `(T − s I) x = b` by Gaussian elimination with partial pivoting.
    fn solve_shifted(&self, s: f64, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.diag.len();
        // Rows hold (col i, col i+1, col i+2) after pivoting.
        let mut r0: Vec<f64> = self.diag.iter().map(|d| d - s).collect();
        let mut r1: Vec<f64> = (0..n)
            .map(|i| if i + 1 < n { self.off[i] } else { 0.0 })
            .collect();
        let mut r2 = vec![0.0; n];
        let mut lower: Vec<f64> = (0..n)
            .map(|i| if i > 0 { self.off[i - 1] } else { 0.0 })
            .collect();
        let mut rhs = b.to_vec();
        for i in 0..n.saturating_sub(1) {
            // Candidate pivot rows: i (entries r0[i], r1[i], r2[i]) and i+1 (lower[i+1], r0[i+1], r1[i+1]).
            if lower[i + 1].abs() > r0[i].abs() {
                let (a0, a1, a2) = (r0[i], r1[i], r2[i]);
                r0[i] = lower[i + 1];
                r1[i] = r0[i + 1];
                r2[i] = r1[i + 1];
                lower[i + 1] = a0;
                r0[i + 1] = a1;
                r1[i + 1] = a2;
                rhs.swap(i, i + 1);
            }
            if r0[i] == 0.0 {
                r0[i] = f64::EPSILON * (1.0 + s.abs());
            }
            let m = lower[i + 1] / r0[i];
            r0[i + 1] -= m * r1[i];
            r1[i + 1] -= m * r2[i];
            rhs[i + 1] -= m * rhs[i];
        }
        if r0[n - 1] == 0.0 {
            r0[n - 1] = f64::EPSILON * (1.0 + s.abs());
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut v = rhs[i];
            if i + 1 < n {
                v -= r1[i] * x[i + 1];
            }
            if i + 2 < n {
                v -= r2[i] * x[i + 2];
            }
            x[i] = v / r0[i];
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> SymTridiag {
        SymTridiag::new(vec![2.0; n], vec![-1.0; n - 1])
    }

    #[test]
    fn second_difference_spectrum() {
        let n = 50;
        let t = laplacian(n);
        for k in 0..5 {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((t.eigenvalue(k) - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn eigenvector_is_discrete_sine() {
        let n = 40;
        let t = laplacian(n);
        let lam = t.eigenvalue(1);
        let v = t.eigenvector(lam).unwrap();
        let s: Vec<f64> = (1..=n)
            .map(|j| (2.0 * std::f64::consts::PI * j as f64 / (n + 1) as f64).sin())
            .collect();
        let ns = s.iter().map(|x| x * x).sum::<f64>().sqrt();
        let dot: f64 = v.iter().zip(&s).map(|(a, b)| a * b / ns).sum();
        assert!((dot.abs() - 1.0).abs() < 1e-12);
    }
}
