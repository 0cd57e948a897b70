//! Small numerical kernels shared by the analysis modules.

pub mod blocktri;
pub mod fit;
pub mod interp;
pub mod quad;
pub mod roots;
pub mod tridiag;

/// `n` logarithmically spaced values from `a` to `b` inclusive.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(a > 0.0 && b > 0.0 && n >= 2);
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Log-spaced radii with `per_decade` points per decade, from `lo` up to `hi`.
pub fn radii_per_decade(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = ((decades * per_decade as f64).round() as usize).max(1) + 1;
    logspace(lo, hi, n)
}
