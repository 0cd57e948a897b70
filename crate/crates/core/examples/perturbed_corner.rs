//! A curved corner `φ = φ₀ + a|x₁|^{3/2}` with the full coefficient bundle:
//! the frequency still converges to the exponent of the tangent cone, while
//! the derivative identity picks up a residual decaying like `r^δ`.

use corner_lens::almgren::{derivative_identity_residual, frequency_trace, growth_audit};
use corner_lens::cases::{PerturbedCase, PerturbedSpec};
use corner_lens::field::GridSpec;
use corner_lens::numerics::radii_per_decade;
use std::error::Error;

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}

pub fn run() -> Result<(), Box<dyn Error>> {
    let spec = PerturbedSpec::default();
    let case = PerturbedCase::new(spec.clone(), GridSpec::new(1e-6, 0.1, 8, 32))?;
    println!(
        "C0 = {:.6}, bijective below r = {:.4}",
        case.straightening.c0, case.straightening.r_hat
    );

    let t = frequency_trace(&case.setup, &radii_per_decade(1e-6, 0.05, 4))?;
    for (r, n) in t.radii.iter().zip(&t.n).step_by(4) {
        println!("  r = {r:.2e}  N = {n:.10}");
    }
    println!(
        "gamma = {:.6} +/- {:.1e} ({:?})",
        t.gamma.value, t.gamma.uncertainty, t.gamma.model
    );

    let d = derivative_identity_residual(&t)?;
    if let Some(fit) = d.fit {
        println!(
            "identity residual slope {:.3} (delta = {})",
            fit.slope, spec.delta
        );
    }
    let g = growth_audit(&t, t.gamma.value)?;
    println!(
        "variation {:.2e}, doubling deviation {:.2e}, class {:?}",
        g.variation, g.doubling_deviation, g.class
    );
    Ok(())
}
