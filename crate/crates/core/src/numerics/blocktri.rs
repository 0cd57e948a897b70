use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Block tridiagonal system `L_i x_{i-1} + D_i x_i + U_i x_{i+1} = b_i`,
/// solved by block forward elimination with dense pivoted LU on each block.
pub struct BlockTridiag {
    pub lower: Vec<DMatrix<f64>>,
    pub diag: Vec<DMatrix<f64>>,
    pub upper: Vec<DMatrix<f64>>,
}

impl BlockTridiag {
    pub fn new(blocks: usize, m: usize) -> Self {
        BlockTridiag {
            lower: vec![DMatrix::zeros(m, m); blocks],
            diag: vec![DMatrix::zeros(m, m); blocks],
            upper: vec![DMatrix::zeros(m, m); blocks],
        }
    }

    pub fn solve(&self, rhs: &[DVector<f64>]) -> Result<Vec<DVector<f64>>> {
        let n = self.diag.len();
        let mut c_prime: Vec<DMatrix<f64>> = Vec::with_capacity(n);
        let mut d_prime: Vec<DVector<f64>> = Vec::with_capacity(n);
        for i in 0..n {
            let (a, r) = if i == 0 {
                (self.diag[0].clone(), rhs[0].clone())
            } else {
                (
                    &self.diag[i] - &self.lower[i] * &c_prime[i - 1],
                    &rhs[i] - &self.lower[i] * &d_prime[i - 1],
                )
            };
            let lu = a.lu();
            let c = lu
                .solve(&self.upper[i])
                .ok_or_else(|| Error::Numerical(format!("singular diagonal block {i}")))?;
            let d = lu
                .solve(&r)
                .ok_or_else(|| Error::Numerical(format!("singular diagonal block {i}")))?;
            c_prime.push(c);
            d_prime.push(d);
        }
        let mut x = vec![DVector::zeros(0); n];
        x[n - 1] = d_prime[n - 1].clone();
        for i in (0..n - 1).rev() {
            x[i] = &d_prime[i] - &c_prime[i] * &x[i + 1];
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_2d_poisson_blocks() {
        let (nb, m) = (6, 5);
        let mut sys = BlockTridiag::new(nb, m);
        for i in 0..nb {
            for j in 0..m {
                sys.diag[i][(j, j)] = 4.0;
                if j + 1 < m {
                    sys.diag[i][(j, j + 1)] = -1.0;
                    sys.diag[i][(j + 1, j)] = -1.0;
                }
                sys.lower[i][(j, j)] = -1.0;
                sys.upper[i][(j, j)] = -1.0;
            }
        }
        let exact: Vec<DVector<f64>> = (0..nb)
            .map(|i| DVector::from_fn(m, |j, _| (i * m + j) as f64 * 0.1))
            .collect();
        let rhs: Vec<DVector<f64>> = (0..nb)
            .map(|i| {
                let mut r = &sys.diag[i] * &exact[i];
                if i > 0 {
                    r += &sys.lower[i] * &exact[i - 1];
                }
                if i + 1 < nb {
                    r += &sys.upper[i] * &exact[i + 1];
                }
                r
            })
            .collect();
        let x = sys.solve(&rhs).unwrap();
        for i in 0..nb {
            assert!((&x[i] - &exact[i]).norm() < 1e-12);
        }
    }
}
