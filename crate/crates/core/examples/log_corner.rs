//! The curved corner whose harmonic function has a logarithmic leading term:
//! the height grows like `r^{2γ}log²r` and the frequency approaches `γ` only
//! at the rate `1/|log r|`.

use corner_lens::almgren::{frequency_trace, growth_audit, log_square_fit};
use corner_lens::cases::log_corner;
use corner_lens::field::GridSpec;
use corner_lens::numerics::radii_per_decade;
use std::error::Error;

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}

pub fn run() -> Result<(), Box<dyn Error>> {
    let (corner, setup) = log_corner(0.5, 0.3, GridSpec::new(1e-12, 0.5, 8, 32))?;
    let gamma = corner.gamma();
    let worst = corner
        .curve_samples(400)?
        .iter()
        .fold(0.0f64, |m, s| m.max(s.scaled));
    println!("u_log on the curves (scaled): {worst:.1e}");

    let t = frequency_trace(&setup, &radii_per_decade(1e-10, 0.1, 4))?;
    for (r, n) in t.radii.iter().zip(&t.n).step_by(8) {
        println!(
            "  r = {r:.1e}: N = {n:.8}, (N - {gamma})|log r| = {:.5}",
            (n - gamma) * r.ln().abs()
        );
    }
    let fit = log_square_fit(&t, gamma, 1e-6, 1e-2)?;
    println!(
        "H/r^{} ~ c log^2 r: c = {:.6}, R^2 = {:.6}",
        2.0 * gamma,
        fit.c,
        fit.r2
    );
    println!("growth class {:?}", growth_audit(&t, gamma)?.class);

    for x in [1e-3, 1e-5, 1e-7] {
        println!(
            "  normalized defect at x1 = {x:.0e}: {:.6}",
            corner.normalized_defect(x)?
        );
    }
    let ext = corner.extrapolated_defect(&[1e-4, 1e-5, 1e-6, 1e-7])?;
    println!("extrapolated {ext:.6}, limit {:.6}", corner.defect_limit());
    Ok(())
}
