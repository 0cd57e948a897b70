use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Ordinary least-squares line `y = intercept + slope·x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub rms: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> LineFit {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ssr: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let r2 = if syy > 0.0 { 1.0 - ssr / syy } else { 1.0 };
    LineFit {
        slope,
        intercept,
        r2,
        rms: (ssr / n).sqrt(),
    }
}

/// Slope of `log|v|` against `log r`.
pub fn loglog_fit(r: &[f64], v: &[f64]) -> LineFit {
    let lx: Vec<f64> = r.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = v
        .iter()
        .map(|x| x.abs().max(f64::MIN_POSITIVE).ln())
        .collect();
    linear_fit(&lx, &ly)
}

/// Least squares for `y ≈ Σ c_k columns[k]`; returns coefficients and the residual sum of squares.
pub fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> (Vec<f64>, f64) {
    let m = y.len();
    let n = columns.len();
    let a = DMatrix::from_fn(m, n, |i, j| columns[j][i]);
    let b = DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let c = svd.solve(&b, 1e-14).unwrap_or_else(|_| DVector::zeros(n));
    let r = &a * &c - &b;
    (c.iter().copied().collect(), r.norm_squared())
}

/// Coefficient of determination of a fit with residual sum `ssr`.
pub fn r_squared(y: &[f64], ssr: f64) -> f64 {
    let n = y.len() as f64;
    let my = y.iter().sum::<f64>() / n;
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if syy > 0.0 {
        1.0 - ssr / syy
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let f = linear_fit(&x, &y);
        assert!((f.slope + 0.5).abs() < 1e-14 && (f.intercept - 2.0).abs() < 1e-14);
        assert!((f.r2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn recovers_power_law() {
        let r = [1e-4, 1e-3, 1e-2, 1e-1];
        let v: Vec<f64> = r.iter().map(|x: &f64| 3.0 * x.powf(1.5)).collect();
        assert!((loglog_fit(&r, &v).slope - 1.5).abs() < 1e-12);
    }

    #[test]
    fn least_squares_quadratic() {
        let x: Vec<f64> = (0..10).map(|i| i as f64 / 9.0).collect();
        let y: Vec<f64> = x.iter().map(|v| 1.0 + 2.0 * v + 3.0 * v * v).collect();
        let cols = vec![vec![1.0; 10], x.clone(), x.iter().map(|v| v * v).collect()];
        let (c, ssr) = least_squares(&cols, &y);
        assert!(
            (c[0] - 1.0).abs() < 1e-10 && (c[1] - 2.0).abs() < 1e-10 && (c[2] - 3.0).abs() < 1e-10
        );
        assert!(ssr < 1e-20);
    }
}
