//! Pohozaev identity for a zonal mode on the hemisphere cone with a constant
//! potential and a cubic nonlinearity balanced by a manufactured source.

use corner_lens::almgren::pohozaev_residual;
use corner_lens::cases::zonal_hemisphere;
use corner_lens::coefficients::{CoefficientBundle, NonlinearitySpec, PotentialSpec};
use corner_lens::field::ManufacturedProblem;
use corner_lens::geometry::ConeSection;
use nalgebra::DVector;
use std::error::Error;
use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}

pub fn run() -> Result<(), Box<dyn Error>> {
    let c = 0.5;
    let (field, sigma) = zonal_hemisphere(c)?;
    let mut bundle = CoefficientBundle::trivial(3);
    bundle.v = PotentialSpec::Constant { c };
    bundle.f = NonlinearitySpec { c: 1.0, p: 4.0 };
    let problem = ManufacturedProblem::new(Arc::new(field.clone()), Arc::new(bundle.clone()));
    let src = |y: &DVector<f64>| problem.source(y);
    println!("sigma = {sigma:.10}");
    let mut prev: Option<f64> = None;
    for n in [64, 128, 256, 512] {
        let rep = pohozaev_residual(
            &field,
            &bundle,
            ConeSection::cap(FRAC_PI_2),
            Some(&src),
            0.8,
            n,
        )?;
        let ratio = prev.map(|p| p / rep.relative);
        println!(
            "n = {n:4}: lhs {:.10e}, relative residual {:.3e}, ratio {:?}",
            rep.lhs, rep.relative, ratio
        );
        prev = Some(rep.relative);
    }
    Ok(())
}
