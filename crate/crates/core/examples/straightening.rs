//! The radius-preserving straightening of a curved corner: admissible `C₀`,
//! bijectivity radius, and the round trip `Ξ∘Φ = Id`.

use corner_lens::geometry::{min_c0, polar_point, BoundaryProfile, Straightening};
use std::error::Error;

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}

pub fn run() -> Result<(), Box<dyn Error>> {
    let profile = BoundaryProfile::power_bump(2.0 / 3.0, 0.5, 0.5, 1.0);
    let c = min_c0(&profile, 0.5)?;
    println!("smallest admissible C0 = {c:.8}");
    if let Err(e) = Straightening::new(profile.clone(), 0.9 * c, 0.5) {
        println!("C0 below the threshold: {e}");
    }
    let s = Straightening::new(profile, c * (1.0 + 1e-6), 0.5)?;
    println!("bijective below r_hat = {:.6}", s.r_hat);

    let cone = s.cone();
    let mut worst: f64 = 0.0;
    for r in [1e-8, 1e-5, 1e-2, 0.5 * s.r_hat] {
        let (lo, hi) = s.arc(r)?;
        println!(
            "  r = {r:.1e}: pushed arc ({lo:.8}, {hi:.8}) vs cone ({:.8}, {:.8})",
            cone.lo, cone.hi
        );
        for t in [0.1, 0.5, 0.9] {
            let x = polar_point(2, r, cone.lo + t * cone.width());
            let back = s.straighten(&s.unstraighten(&x)?)?;
            worst = worst.max((back - &x).norm() / r);
        }
    }
    println!("round-trip error {worst:.1e}");
    Ok(())
}
