//! Log-polar finite differences for the Dirichlet problem on a sector,
//! checked against the exact mode and fed into the frequency pipeline.

use corner_lens::almgren::{frequency_trace, Setup};
use corner_lens::coefficients::CoefficientBundle;
use corner_lens::field::{solve_linear_dirichlet, ClosedForm, Field, GridSpec, SolverSpec};
use corner_lens::numerics::radii_per_decade;
use std::error::Error;
use std::sync::Arc;

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}

pub fn run() -> Result<(), Box<dyn Error>> {
    let alpha = 2.0 / 3.0;
    let exact = ClosedForm::mode(alpha, 1);
    let cone = exact.cone;
    let bundle = CoefficientBundle::trivial(2);
    let data = |a: f64| exact.sample(1.0, a).map(|s| s.value).unwrap_or(0.0);
    for n in [16, 32] {
        let spec = SolverSpec {
            r_min: 1e-3,
            r_max: 1.0,
            nodes_per_decade: n,
            angular_nodes: 2 * n + 1,
            inner_decades: 5.0,
            sensitivity: true,
        };
        let sol = solve_linear_dirichlet(&bundle, cone, &data, None, &spec)?;
        let mut err: f64 = 0.0;
        for r in [1e-3, 1e-2, 0.1, 0.5] {
            for t in [0.25, 0.5, 0.75] {
                let a = cone.lo + t * cone.width();
                let e = exact.sample(r, a)?.value;
                err = err.max((sol.field.sample(r, a)?.value - e).abs() / r.powf(1.5));
            }
        }
        println!(
            "n = {n}: max relative error {err:.3e}, inner shift {:?}",
            sol.inner_shift
        );
        if n == 32 {
            let setup = Setup::new(
                Arc::new(sol.field),
                Arc::new(bundle.clone()),
                Arc::new(cone),
                GridSpec::new(1e-3, 1.0, 4, 32),
            )?;
            let t = frequency_trace(&setup, &radii_per_decade(1e-3, 0.1, 4))?;
            println!(
                "frequency of the discrete solution: gamma = {:.6}",
                t.gamma.value
            );
        }
    }
    Ok(())
}
