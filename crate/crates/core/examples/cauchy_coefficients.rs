//! Radius-independent coefficients of the leading profile, for a modal
//! mixture and for the straightened perturbed case, compared with blow-ups.

use corner_lens::almgren::blowup;
use corner_lens::cases::{straight_sector, PerturbedCase, PerturbedSpec};
use corner_lens::coefficients::CoefficientBundle;
use corner_lens::field::GridSpec;
use corner_lens::fourier::{beta_table, limit_profile, profile_distance, upsilon, SectorModes};
use corner_lens::geometry::ConeSection;
use nalgebra::DVector;
use std::error::Error;
use std::f64::consts::PI;

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}

pub fn run() -> Result<(), Box<dyn Error>> {
    let alpha = 2.0 / 3.0;
    let cone = ConeSection::sector(alpha);
    let basis = SectorModes { cone, count: 3 };
    let norm = (2.0 / (alpha * PI)).sqrt();

    // Weights 1 and 0.1 on the normalized modes.
    let grid = GridSpec::new(1e-6, 1.0, 4, 32);
    let mix = straight_sector(alpha, &[(1, norm), (2, 0.1 * norm)], grid)?;
    let t = beta_table(
        mix.field.as_ref(),
        &CoefficientBundle::trivial(2),
        None,
        &basis,
        grid,
        &[0, 1, 2],
        0.5,
    )?;
    for e in &t {
        println!(
            "mixture beta_{} = {:.12}  (R vs R/2: {:.1e})",
            e.i, e.beta, e.r_independence
        );
    }

    let grid = GridSpec::new(1e-6, 0.1, 8, 32);
    let case = PerturbedCase::new(PerturbedSpec::default(), grid)?;
    let v = case.straightened();
    let hat = case.hat();
    let src = |x: &DVector<f64>| case.hat_source(x);
    let t = beta_table(&v, &hat, Some(&src), &basis, grid, &[0], 0.05)?;
    println!(
        "perturbed beta_1 = {:.8} (R vs R/2: {:.1e})",
        t[0].beta, t[0].r_independence
    );
    for lam in [1e-5, 1e-4, 1e-3] {
        let u = upsilon(&v, &hat, None, &basis, grid, lam, 0)?;
        println!("  source-free Upsilon_1({lam:.0e}) = {:.3e}", u.total());
    }
    let p = limit_profile(&[(0, t[0].beta)], &basis, 64);
    let snap = blowup(&case.setup, 1e-5)?;
    println!(
        "cap norm {:.12}, profile vs blow-up distance {:.2e}",
        snap.cap_norm,
        profile_distance(&p, &basis, &snap)?
    );
    Ok(())
}
