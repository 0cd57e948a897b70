/// Four-point Lagrange interpolation on the uniform grid `x0 + i·h`,
/// returning the value and first derivative at `x`.
pub fn cubic_uniform(vals: &[f64], x0: f64, h: f64, x: f64) -> (f64, f64) {
    let n = vals.len();
    assert!(n >= 4, "cubic interpolation needs four nodes");
    let s = (x - x0) / h;
    let i = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let u = s - i as f64;
    // Lagrange basis on nodes 0,1,2,3 evaluated at u.
    let l = [
        -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0,
        u * (u - 2.0) * (u - 3.0) / 2.0,
        -u * (u - 1.0) * (u - 3.0) / 2.0,
        u * (u - 1.0) * (u - 2.0) / 6.0,
    ];
    let dl = [
        -((u - 2.0) * (u - 3.0) + (u - 1.0) * (u - 3.0) + (u - 1.0) * (u - 2.0)) / 6.0,
        ((u - 2.0) * (u - 3.0) + u * (u - 3.0) + u * (u - 2.0)) / 2.0,
        -((u - 1.0) * (u - 3.0) + u * (u - 3.0) + u * (u - 1.0)) / 2.0,
        ((u - 1.0) * (u - 2.0) + u * (u - 2.0) + u * (u - 1.0)) / 6.0,
    ];
    let mut v = 0.0;
    let mut d = 0.0;
    for k in 0..4 {
        v += l[k] * vals[i + k];
        d += dl[k] * vals[i + k];
    }
    (v, d / h)
}

/// Fourth-order first derivative on a uniform grid with odd reflection
/// about both endpoints (appropriate for Dirichlet eigenfunctions).
pub fn derivative_odd_reflect(vals: &[f64], h: f64) -> Vec<f64> {
    let n = vals.len();
    let at = |k: isize| -> f64 {
        if k < 0 {
            2.0 * vals[0] - vals[(-k) as usize]
        } else if k as usize >= n {
            let m = 2 * (n as isize - 1) - k;
            2.0 * vals[n - 1] - vals[m as usize]
        } else {
            vals[k as usize]
        }
    };
    (0..n as isize)
        .map(|k| (-at(k + 2) + 8.0 * at(k + 1) - 8.0 * at(k - 1) + at(k - 2)) / (12.0 * h))
        .collect()
}

/// Start index and four-point Lagrange weights (value, derivative) for `x` on
/// the uniform grid `x0 + i·h` with `n` nodes.
pub fn lagrange4(n: usize, x0: f64, h: f64, x: f64) -> (usize, [f64; 4], [f64; 4]) {
    assert!(n >= 4, "cubic interpolation needs four nodes");
    let s = (x - x0) / h;
    let i = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let u = s - i as f64;
    let l = [
        -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0,
        u * (u - 2.0) * (u - 3.0) / 2.0,
        -u * (u - 1.0) * (u - 3.0) / 2.0,
        u * (u - 1.0) * (u - 2.0) / 6.0,
    ];
    let dl = [
        -((u - 2.0) * (u - 3.0) + (u - 1.0) * (u - 3.0) + (u - 1.0) * (u - 2.0)) / (6.0 * h),
        ((u - 2.0) * (u - 3.0) + u * (u - 3.0) + u * (u - 2.0)) / (2.0 * h),
        -((u - 1.0) * (u - 3.0) + u * (u - 3.0) + u * (u - 1.0)) / (2.0 * h),
        ((u - 1.0) * (u - 2.0) + u * (u - 2.0) + u * (u - 1.0)) / (6.0 * h),
    ];
    (i, l, dl)
}

/// Fourth-order first derivative on a uniform grid: central in the interior,
/// one-sided at the two nodes next to each end.
pub fn derivative_uniform(vals: &[f64], h: f64) -> Vec<f64> {
    let n = vals.len();
    assert!(n >= 5, "fourth-order differences need five nodes");
    let v = vals;
    (0..n)
        .map(|k| {
            if k >= 2 && k + 2 < n {
                (-v[k + 2] + 8.0 * v[k + 1] - 8.0 * v[k - 1] + v[k - 2]) / (12.0 * h)
            } else if k < 2 {
                let o = k;
                let w: [[f64; 5]; 2] = [
                    [-25.0, 48.0, -36.0, 16.0, -3.0],
                    [-3.0, -10.0, 18.0, -6.0, 1.0],
                ];
                (0..5).map(|j| w[o][j] * v[j]).sum::<f64>() / (12.0 * h)
            } else {
                let o = n - 1 - k;
                let w: [[f64; 5]; 2] = [
                    [-25.0, 48.0, -36.0, 16.0, -3.0],
                    [-3.0, -10.0, 18.0, -6.0, 1.0],
                ];
                -(0..5).map(|j| w[o][j] * v[n - 1 - j]).sum::<f64>() / (12.0 * h)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_is_exact_on_cubics() {
        let h = 0.1;
        let vals: Vec<f64> = (0..12)
            .map(|i| (i as f64 * h).powi(3) - (i as f64 * h))
            .collect();
        for &x in &[0.05, 0.33, 1.02] {
            let (v, d) = cubic_uniform(&vals, 0.0, h, x);
            assert!((v - (x * x * x - x)).abs() < 1e-13);
            assert!((d - (3.0 * x * x - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn one_sided_derivative_is_fourth_order() {
        let h = 0.01;
        let vals: Vec<f64> = (0..40).map(|i| (i as f64 * h).exp()).collect();
        let d = derivative_uniform(&vals, h);
        for (i, di) in d.iter().enumerate() {
            assert!((di - (i as f64 * h).exp()).abs() < 1e-8, "{i}");
        }
    }

    #[test]
    fn reflected_derivative_of_sine() {
        let n = 201;
        let h = std::f64::consts::PI / (n - 1) as f64;
        let vals: Vec<f64> = (0..n).map(|i| (i as f64 * h).sin()).collect();
        let d = derivative_odd_reflect(&vals, h);
        for (i, di) in d.iter().enumerate() {
            assert!((di - (i as f64 * h).cos()).abs() < 1e-8);
        }
    }
}
