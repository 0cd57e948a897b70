//! Randomized certification of the boundary Hardy inequalities on the
//! hemisphere cone.

use corner_lens::coefficients::PotentialSpec;
use corner_lens::geometry::ConeSection;
use corner_lens::spectral::hardy_certificate;
use std::error::Error;
use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}

pub fn run() -> Result<(), Box<dyn Error>> {
    let cap = ConeSection::cap(FRAC_PI_2);
    for v in [PotentialSpec::Zero, PotentialSpec::Constant { c: 0.5 }] {
        let t = Instant::now();
        let rep = hardy_certificate(cap, v, 1.0, 1000, 256, 42)?;
        println!(
            "{v:?}: {} trials, mu_1 = {:.6}, Lambda = {:.6}, min slack sharp/half/gradient = {:.3e} / {:.3e} / {:.3e} ({:.2?})",
            rep.trials,
            rep.mu1,
            rep.lambda,
            rep.min_slack_sharp,
            rep.min_slack_half,
            rep.min_slack_gradient,
            t.elapsed()
        );
        assert!(
            rep.min_slack_sharp >= -1e-10
                && rep.min_slack_half >= -1e-10
                && rep.min_slack_gradient >= -1e-10
        );
    }
    Ok(())
}
