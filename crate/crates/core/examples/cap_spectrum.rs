//! Dirichlet eigenvalues of the cap operator on planar arcs and spherical
//! caps, with characteristic exponents and the Hardy constant.

use corner_lens::coefficients::PotentialSpec;
use corner_lens::geometry::ConeSection;
use corner_lens::spectral::{exponents, lambda_v, solve_cap_eigen};
use std::error::Error;
use std::f64::consts::FRAC_PI_2;

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}

pub fn run() -> Result<(), Box<dyn Error>> {
    for alpha in [0.5, 2.0 / 3.0, 1.5] {
        let sys = solve_cap_eigen(ConeSection::sector(alpha), PotentialSpec::Zero, 3, 1024)?;
        println!("sector alpha = {alpha:.4}");
        for (i, p) in sys.pairs.iter().enumerate() {
            let exact = ((i + 1) as f64 / alpha).powi(2);
            let e = exponents(p.mu, 2)?;
            println!(
                "  mu_{} = {:.12}  exact {:.12}  sigma+ = {:.8}",
                i + 1,
                p.mu,
                exact,
                e.sigma_plus
            );
            assert!((p.mu - exact).abs() < 1e-6);
        }
    }

    let hemi = ConeSection::cap(FRAC_PI_2);
    for v in [
        PotentialSpec::Zero,
        PotentialSpec::Constant { c: 0.5 },
        PotentialSpec::Cosine { c: 0.5 },
    ] {
        let sys = solve_cap_eigen(hemi, v, 2, 1024)?;
        let lam = lambda_v(hemi, v, 512)?;
        println!(
            "hemisphere {v:?}: mu_1 = {:.10} (+/- {:.1e}), Lambda = {:.8}, admissible = {}",
            sys.pairs[0].mu, sys.pairs[0].error, lam.lambda, lam.admissible
        );
    }
    Ok(())
}
