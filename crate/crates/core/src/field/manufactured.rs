use super::FieldRef;
use crate::coefficients::Coefficients;
use crate::error::Result;
use nalgebra::DVector;
use std::sync::Arc;

/// An exact field together with the coefficients of the operator; the source
/// is whatever the operator leaves over.
#[derive(Clone)]
pub struct ManufacturedProblem {
    pub exact: FieldRef,
    pub coeffs: Arc<dyn Coefficients>,
    /// Relative step of the flux differences.
    pub step: f64,
}

impl ManufacturedProblem {
    pub fn new(exact: FieldRef, coeffs: Arc<dyn Coefficients>) -> Self {
        ManufacturedProblem {
            exact,
            coeffs,
            step: 1e-3,
        }
    }

    /// `A(y)∇u(y)`.
    pub fn flux(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        let (_, g) = self.exact.eval_point(y)?;
        Ok(self.coeffs.a(y)? * g)
    }

    /// `div(A∇u)` by fourth-order central differences of the flux.
    pub fn divergence(&self, y: &DVector<f64>) -> Result<f64> {
        let h = self.step * y.norm();
        let mut div = 0.0;
        for k in 0..y.len() {
            let at = |s: f64| -> Result<f64> {
                let mut z = y.clone();
                z[k] += s * h;
                Ok(self.flux(&z)?[k])
            };
            div += (-at(2.0)? + 8.0 * at(1.0)? - 8.0 * at(-1.0)? + at(-2.0)?) / (12.0 * h);
        }
        Ok(div)
    }

    /// `g = −div(A∇u) + b·∇u − V|y|⁻²u − hu − f(y,u)`.
    pub fn source(&self, y: &DVector<f64>) -> Result<f64> {
        let (u, g) = self.exact.eval_point(y)?;
        let c = &self.coeffs;
        let r2 = y.norm_squared();
        Ok(-self.divergence(y)? + c.b(y)?.dot(&g)
            - c.potential(y) / r2 * u
            - c.h(y)? * u
            - c.f(y, u)?)
    }

    /// Operator residual of a candidate source at `y`, relative to the
    /// largest term of the operator.
    pub fn relative_residual(&self, y: &DVector<f64>, candidate: f64) -> Result<f64> {
        let (u, g) = self.exact.eval_point(y)?;
        let c = &self.coeffs;
        let terms = [
            self.divergence(y)?,
            c.b(y)?.dot(&g),
            c.potential(y) / y.norm_squared() * u,
            c.h(y)? * u,
            c.f(y, u)?,
        ];
        let scale = terms
            .iter()
            .fold(0.0f64, |m, t| m.max(t.abs()))
            .max(f64::MIN_POSITIVE);
        Ok((self.source(y)? - candidate).abs() / scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{CoefficientBundle, NonlinearitySpec, PowerSpec};
    use crate::field::{ClosedForm, Field, FieldSpec};
    use crate::geometry::{polar_point, ConeSection};

    #[test]
    fn harmonic_mode_leaves_lower_order_terms() {
        let alpha = 2.0 / 3.0;
        let exact: FieldRef = Arc::new(ClosedForm::mode(alpha, 1));
        let mut bundle = CoefficientBundle::trivial(2);
        bundle.b = PowerSpec {
            order: -0.5,
            amp: 0.3,
        };
        bundle.h = PowerSpec {
            order: -1.5,
            amp: 0.2,
        };
        bundle.f = NonlinearitySpec { c: 1.0, p: 4.0 };
        let coeffs: Arc<dyn Coefficients> = Arc::new(bundle.clone());
        let p = ManufacturedProblem::new(exact.clone(), coeffs);
        for &(r, th) in &[(0.1, 1.2), (1e-3, 0.9), (0.5, 2.0)] {
            let y = polar_point(2, r, th);
            let (u, g) = exact.eval_point(&y).unwrap();
            let expected = 0.3 * r.powf(-0.5) * g[1] - 0.2 * r.powf(-1.5) * u - u.abs().powi(2) * u;
            let got = p.source(&y).unwrap();
            assert!(
                (got - expected).abs() <= 1e-8 * expected.abs(),
                "{got} vs {expected}"
            );
            assert!(p.relative_residual(&y, expected).unwrap() < 1e-8);
        }
    }

    #[test]
    fn zonal_mode_balances_potential() {
        use crate::coefficients::PotentialSpec;
        let c: f64 = 0.5;
        let mu: f64 = 2.0 - c;
        let sigma = -0.5 + (0.25 + mu).sqrt();
        let exact: FieldRef = Arc::new(
            ClosedForm::new(
                FieldSpec::Zonal { sigma, c: 1.0 },
                ConeSection::cap(std::f64::consts::FRAC_PI_2),
            )
            .unwrap(),
        );
        let mut bundle = CoefficientBundle::trivial(3);
        bundle.v = PotentialSpec::Constant { c };
        let p = ManufacturedProblem::new(exact, Arc::new(bundle));
        let y = DVector::from_vec(vec![0.1, -0.2, 0.25]);
        assert!(p.source(&y).unwrap().abs() < 1e-9);
    }
}
