//! Frequency function of exact sector modes: `N(r)` is constant and equal
//! to `k/α`, and the height grows exactly like `r^{2γ}`.

use corner_lens::almgren::{derivative_identity_residual, frequency_trace, growth_audit};
use corner_lens::cases::straight_sector;
use corner_lens::field::GridSpec;
use corner_lens::numerics::radii_per_decade;
use std::error::Error;

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}

pub fn run() -> Result<(), Box<dyn Error>> {
    let grid = GridSpec::new(1e-6, 1.0, 4, 32);
    let radii = radii_per_decade(1e-6, 1e-2, 4);
    for alpha in [0.5, 2.0 / 3.0, 1.5] {
        for k in [1, 2] {
            let setup = straight_sector(alpha, &[(k, 1.0)], grid)?;
            let t = frequency_trace(&setup, &radii)?;
            let g = k as f64 / alpha;
            let dev = t.n.iter().fold(0.0f64, |m, n| m.max((n - g).abs()));
            let d = derivative_identity_residual(&t)?;
            let audit = growth_audit(&t, g)?;
            println!(
                "alpha {alpha:.4} k {k}: gamma = {:.12}, max |N - k/alpha| = {dev:.1e}, identity {:.1e}, class {:?}",
                t.gamma.value, d.max_abs, audit.class
            );
        }
    }
    Ok(())
}
