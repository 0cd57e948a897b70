//! Blow-ups of a two-mode mixture approach the leading mode at the rate
//! `λ^{γ₂−γ₁}`.

use corner_lens::almgren::{blowup, blowup_distance};
use corner_lens::cases::straight_sector;
use corner_lens::field::{ClosedForm, FieldRef, FieldSpec, GridSpec, ModeTerm};
use corner_lens::geometry::ConeSection;
use corner_lens::numerics::{fit::loglog_fit, radii_per_decade};
use std::error::Error;
use std::f64::consts::PI;
use std::sync::Arc;

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}

pub fn run() -> Result<(), Box<dyn Error>> {
    let alpha = 2.0 / 3.0;
    let c = (2.0 / (alpha * PI)).sqrt();
    let setup = straight_sector(
        alpha,
        &[(1, c), (2, 0.1 * c)],
        GridSpec::new(1e-8, 1.0, 8, 32),
    )?;
    let lead: FieldRef = Arc::new(ClosedForm::new(
        FieldSpec::ModalSum {
            terms: vec![ModeTerm { k: 1, c }],
        },
        ConeSection::sector(alpha),
    )?);
    let lambdas = radii_per_decade(1e-6, 1e-1, 2);
    let mut dist = Vec::new();
    for &l in &lambdas {
        let snap = blowup(&setup, l)?;
        let d = blowup_distance(&snap, &lead, &setup)?;
        println!(
            "lambda {l:.2e}: cap norm {:.14}, distance {d:.3e}",
            snap.cap_norm
        );
        dist.push(d);
    }
    let fit = loglog_fit(&lambdas, &dist);
    println!(
        "decay slope {:.6} (gamma_2 - gamma_1 = {})",
        fit.slope,
        1.0 / alpha
    );
    Ok(())
}
