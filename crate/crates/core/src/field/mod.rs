//! Scalar fields on corner domains, their quadrature, a log-polar Dirichlet
//! solver and manufactured problems.
//!
//! Fields are sampled in polar (plane) or meridian (space) coordinates; spatial
//! fields are rotationally symmetric about the `x₃` axis.

pub mod domain;
mod grid;
mod manufactured;
mod quadrature;
mod solver;

pub use domain::Domain;
pub use grid::GridField;
pub use manufactured::ManufacturedProblem;
pub use quadrature::{BulkResult, GridSpec, Quadrature};
pub use solver::{solve_linear_dirichlet, DirichletSolution, SolverSpec};

use crate::error::{domain, Error, Result};
use crate::geometry::{angle_of, polar_point, ConeSection, DiffMap};
use crate::logexample::{im_zm_log_z, u_log, u_log_gradient};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

/// Optional right-hand side `g(y)` of an equation.
pub type Source<'a> = Option<&'a (dyn Fn(&DVector<f64>) -> Result<f64> + Sync)>;

/// Value and polar derivatives `(∂_r, ∂_angle)` at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub value: f64,
    pub dr: f64,
    pub dtheta: f64,
}

/// Orthonormal polar frame `(e_r, e_angle)` at `y`.
pub fn polar_frame(y: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
    let r = y.norm();
    let er = y / r;
    let et = if y.len() == 3 {
        let rp = (y[0] * y[0] + y[1] * y[1]).sqrt();
        let (c, s) = if rp > 0.0 {
            (y[0] / rp, y[1] / rp)
        } else {
            (1.0, 0.0)
        };
        let phi = angle_of(y);
        DVector::from_vec(vec![phi.cos() * c, phi.cos() * s, -phi.sin()])
    } else {
        DVector::from_vec(vec![-y[1] / r, y[0] / r])
    };
    (er, et)
}

/// A scalar field with gradient.
pub trait Field: Send + Sync {
    fn dim(&self) -> usize;

    /// Value and polar derivatives at radius `r` and meridian angle `angle`.
    fn sample(&self, r: f64, angle: f64) -> Result<Sample>;

    /// Value and Cartesian gradient at `y`.
    fn eval_point(&self, y: &DVector<f64>) -> Result<(f64, DVector<f64>)> {
        let r = y.norm();
        if r == 0.0 {
            return Ok((0.0, DVector::zeros(y.len())));
        }
        let s = self.sample(r, angle_of(y))?;
        let (er, et) = polar_frame(y);
        Ok((s.value, er * s.dr + et * (s.dtheta / r)))
    }
}

/// Shared field handle.
pub type FieldRef = Arc<dyn Field>;

impl<T: Field + ?Sized> Field for Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn sample(&self, r: f64, angle: f64) -> Result<Sample> {
        (**self).sample(r, angle)
    }
    fn eval_point(&self, y: &DVector<f64>) -> Result<(f64, DVector<f64>)> {
        (**self).eval_point(y)
    }
}

/// One term `c · r^{k/α} sin(k(θ − θ₋)/α)` of a modal sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeTerm {
    pub k: usize,
    pub c: f64,
}

/// Closed-form field families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldSpec {
    /// `r^{k/α} sin(k(θ − θ₋)/α)` on the planar sector.
    Mode { k: usize },
    /// Finite sum of planar modes.
    ModalSum { terms: Vec<ModeTerm> },
    /// The harmonic function with a logarithmic leading term.
    LogExample { alpha: f64 },
    /// `Im(z^m log z)`.
    ImZmLogZ { m: f64 },
    /// `c r^σ cos φ` in space.
    Zonal { sigma: f64, c: f64 },
}

/// A closed-form field bound to its cone.
#[derive(Clone, Debug)]
pub struct ClosedForm {
    pub spec: FieldSpec,
    pub cone: ConeSection,
}

impl ClosedForm {
    pub fn new(spec: FieldSpec, cone: ConeSection) -> Result<Self> {
        let planar = !matches!(spec, FieldSpec::Zonal { .. });
        if planar != (cone.dim == 2) {
            return Err(Error::Config(format!(
                "field {spec:?} does not live in dimension {}",
                cone.dim
            )));
        }
        match &spec {
            FieldSpec::Mode { k } if *k == 0 => {
                return Err(Error::Config("mode index starts at 1".into()))
            }
            FieldSpec::ModalSum { terms } if terms.is_empty() || terms.iter().any(|t| t.k == 0) => {
                return Err(Error::Config("modal sum needs terms with k >= 1".into()))
            }
            FieldSpec::LogExample { alpha } if !(*alpha > 0.0 && *alpha < 2.0) => {
                return Err(Error::Config(format!("alpha = {alpha} outside (0,2)")))
            }
            _ => {}
        }
        Ok(ClosedForm { spec, cone })
    }

    /// Pure mode on the symmetric sector of opening `απ`.
    pub fn mode(alpha: f64, k: usize) -> Self {
        ClosedForm {
            spec: FieldSpec::Mode { k },
            cone: ConeSection::sector(alpha),
        }
    }

    /// Angular section on which the field has zero trace, when it has one.
    pub fn natural_cone(&self) -> Option<ConeSection> {
        match self.spec {
            FieldSpec::Mode { .. } | FieldSpec::ModalSum { .. } | FieldSpec::Zonal { .. } => {
                Some(self.cone)
            }
            FieldSpec::LogExample { alpha } => Some(ConeSection::sector(alpha)),
            FieldSpec::ImZmLogZ { m } => Some(ConeSection {
                dim: 2,
                lo: 0.0,
                hi: PI / m,
            }),
        }
    }

    fn mode_terms(&self, r: f64, theta: f64, terms: &[(usize, f64)]) -> Sample {
        let alpha = self.cone.alpha();
        let x = theta - self.cone.lo;
        let mut s = Sample {
            value: 0.0,
            dr: 0.0,
            dtheta: 0.0,
        };
        for &(k, c) in terms {
            let g = k as f64 / alpha;
            let rg = r.powf(g);
            let (sn, cs) = (g * x).sin_cos();
            s.value += c * rg * sn;
            s.dr += c * g * rg / r * sn;
            s.dtheta += c * rg * g * cs;
        }
        s
    }
}

impl Field for ClosedForm {
    fn dim(&self) -> usize {
        self.cone.dim
    }

    fn sample(&self, r: f64, angle: f64) -> Result<Sample> {
        if !(r > 0.0) {
            return Ok(Sample {
                value: 0.0,
                dr: 0.0,
                dtheta: 0.0,
            });
        }
        Ok(match &self.spec {
            FieldSpec::Mode { k } => self.mode_terms(r, angle, &[(*k, 1.0)]),
            FieldSpec::ModalSum { terms } => {
                let t: Vec<(usize, f64)> = terms.iter().map(|t| (t.k, t.c)).collect();
                self.mode_terms(r, angle, &t)
            }
            FieldSpec::LogExample { alpha } => {
                let (dr, dt) = u_log_gradient(r, angle, *alpha);
                Sample {
                    value: u_log(r, angle, *alpha),
                    dr,
                    dtheta: dt,
                }
            }
            FieldSpec::ImZmLogZ { m } => {
                let (v, dr, dt) = im_zm_log_z(*m, r, angle);
                Sample {
                    value: v,
                    dr,
                    dtheta: dt,
                }
            }
            FieldSpec::Zonal { sigma, c } => {
                let rs = r.powf(*sigma);
                Sample {
                    value: c * rs * angle.cos(),
                    dr: c * sigma * rs / r * angle.cos(),
                    dtheta: -c * rs * angle.sin(),
                }
            }
        })
    }
}

/// `w = v∘M`, with `∇w = J_Mᵀ ∇v(M)`.
#[derive(Clone)]
pub struct MappedField {
    pub inner: FieldRef,
    pub map: Arc<dyn DiffMap>,
}

impl MappedField {
    pub fn new(inner: FieldRef, map: Arc<dyn DiffMap>) -> Self {
        MappedField { inner, map }
    }
}

impl Field for MappedField {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval_point(&self, y: &DVector<f64>) -> Result<(f64, DVector<f64>)> {
        if y.norm() == 0.0 {
            return Ok((0.0, DVector::zeros(y.len())));
        }
        let e = self.map.eval(y)?;
        let (v, g) = self.inner.eval_point(&e.value)?;
        Ok((v, e.jacobian.transpose() * g))
    }

    fn sample(&self, r: f64, angle: f64) -> Result<Sample> {
        let y = polar_point(self.dim(), r, angle);
        let (v, g) = self.eval_point(&y)?;
        let (er, et) = polar_frame(&y);
        Ok(Sample {
            value: v,
            dr: g.dot(&er),
            dtheta: r * g.dot(&et),
        })
    }
}

/// `w^λ(x) = w(λx) / scale`.
#[derive(Clone)]
pub struct RescaledField {
    pub inner: FieldRef,
    pub lambda: f64,
    pub scale: f64,
}

impl Field for RescaledField {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn sample(&self, r: f64, angle: f64) -> Result<Sample> {
        let s = self.inner.sample(self.lambda * r, angle)?;
        Ok(Sample {
            value: s.value / self.scale,
            dr: s.dr * self.lambda / self.scale,
            dtheta: s.dtheta / self.scale,
        })
    }
}

/// Samples a closed form on a uniform `(log r, angle)` grid over `cone`.
pub fn sample_closed_form(
    spec: FieldSpec,
    cone: ConeSection,
    grid: &GridSpec,
) -> Result<GridField> {
    let f = ClosedForm::new(spec, cone)?;
    if let Some(nat) = f.natural_cone() {
        if (nat.lo - cone.lo).abs() > 1e-12 || (nat.hi - cone.hi).abs() > 1e-12 {
            return domain(format!(
                "field is defined on ({:.6}, {:.6}), not on ({:.6}, {:.6})",
                nat.lo, nat.hi, cone.lo, cone.hi
            ));
        }
    }
    grid.validate()?;
    let nt = ((grid.decades() * (4 * grid.rings_per_decade) as f64).ceil() as usize + 1).max(5);
    let (t0, t1) = (grid.r_min.ln(), grid.r_max.ln());
    GridField::from_field(
        &f,
        cone,
        t0,
        (t1 - t0) / (nt - 1) as f64,
        nt,
        grid.angular_nodes.max(5),
    )
}

/// Half-plane section `(0, π)`.
pub fn half_plane() -> ConeSection {
    ConeSection {
        dim: 2,
        lo: 0.0,
        hi: PI,
    }
}

/// Hemisphere cap.
pub fn hemisphere() -> ConeSection {
    ConeSection::cap(FRAC_PI_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_mode_has_unit_gradient() {
        let f = ClosedForm::mode(1.0, 1);
        for th in [0.2, 1.0, 2.5] {
            let (v, g) = f.eval_point(&polar_point(2, 0.7, th)).unwrap();
            assert!((v - 0.7 * th.sin()).abs() < 1e-15);
            assert!((g.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn quarter_mode_is_product() {
        let f = ClosedForm::new(
            FieldSpec::Mode { k: 1 },
            ConeSection {
                dim: 2,
                lo: 0.0,
                hi: FRAC_PI_2,
            },
        )
        .unwrap();
        let y = polar_point(2, 0.3, 0.5);
        let (v, g) = f.eval_point(&y).unwrap();
        assert!((v - 2.0 * y[0] * y[1]).abs() < 1e-15);
        assert!((g[0] - 2.0 * y[1]).abs() < 1e-14 && (g[1] - 2.0 * y[0]).abs() < 1e-14);
    }

    #[test]
    fn log_z_trace_is_not_zero() {
        let f = ClosedForm::new(FieldSpec::ImZmLogZ { m: 2.0 }, half_plane()).unwrap();
        assert_eq!(f.sample(0.5, 0.0).unwrap().value, 0.0);
        assert!(f.sample(0.5, PI).unwrap().value.abs() > 0.1);
    }

    #[test]
    fn zonal_gradient_off_meridian() {
        let f = ClosedForm::new(FieldSpec::Zonal { sigma: 1.0, c: 1.0 }, hemisphere()).unwrap();
        let y = DVector::from_vec(vec![0.1, 0.2, 0.3]);
        let (v, g) = f.eval_point(&y).unwrap();
        assert!((v - 0.3).abs() < 1e-15);
        assert!((g - DVector::from_vec(vec![0.0, 0.0, 1.0])).norm() < 1e-14);
    }

    #[test]
    fn wrong_sector_is_rejected() {
        let spec = FieldSpec::LogExample { alpha: 0.5 };
        let g = GridSpec {
            r_min: 1e-3,
            r_max: 1e-1,
            rings_per_decade: 8,
            angular_nodes: 16,
            radial_order: 8,
        };
        assert!(sample_closed_form(spec, half_plane(), &g).is_err());
    }
}
