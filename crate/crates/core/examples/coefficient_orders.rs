//! Smallness orders of the transformed coefficients near the vertex:
//! `Ã − Id = O(|y|^δ)`, `|b̃| = O(|y|^{δ−1})`, `|h̃| = O(|y|^{δ−2})`.

use corner_lens::cases::full_bundle;
use corner_lens::coefficients::{order_audit, transform_bundle, Coefficients};
use corner_lens::geometry::polar_point;
use corner_lens::numerics::logspace;
use nalgebra::DMatrix;
use std::error::Error;

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}

pub fn run() -> Result<(), Box<dyn Error>> {
    let delta = 0.5;
    let t = transform_bundle(full_bundle(), 0.25, delta)?;
    let radii = logspace(1e-8, 1e-3, 16);
    let at = |r: f64| polar_point(2, r, 1.3);
    let a = order_audit(
        |r| Ok((t.a(&at(r))? - DMatrix::identity(2, 2)).norm()),
        delta,
        &radii,
        0.05,
    )?;
    let b = order_audit(|r| Ok(t.b(&at(r))?.norm()), -0.5, &radii, 0.05)?;
    let h = order_audit(|r| t.h(&at(r)), -1.5, &radii, 0.05)?;
    for (name, rep) in [("A - Id", a), ("b", b), ("h", h)] {
        println!(
            "{name:7} slope {:.4} (needs >= {:.2}) {}",
            rep.slope,
            rep.expected - rep.margin,
            if rep.pass { "ok" } else { "FAIL" }
        );
    }
    Ok(())
}
