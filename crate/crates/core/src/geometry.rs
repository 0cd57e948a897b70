//! Corner domains near the origin and the two maps used to analyse them.
//!
//! Points are `nalgebra` vectors with the distinguished coordinate last. In the
//! plane the angle `θ` is measured from the `x₁` axis and taken in
//! `(−π/2, 3π/2)`; in space the meridian coordinate is the colatitude `φ`
//! measured from the `x₃` axis, and profiles are rotationally symmetric.
//!
//! * `Ψ(y) = (y′, y_N + 2C₀|y|^{1+δ})` bends the boundary so that the pushed
//!   domain `Ω̃` is star-shaped with a quantitative margin.
//! * `Ξ` maps `Ω̃` onto the tangent cone while preserving `|y|`; `Φ = Ξ⁻¹`.

use crate::error::{domain, Error, Result};
use crate::logexample::LogCorner;
use crate::numerics::logspace;
use crate::numerics::roots::{bisect, newton_bracketed};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Perturbation of a straight cone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum Perturbation {
    None,
    /// `φ = φ₀ + a|x′|^{1+δ}`.
    PowerBump {
        a: f64,
        delta: f64,
    },
    /// The logarithmic corner of opening `απ`.
    LogCorner {
        alpha: f64,
        sigma: f64,
    },
}

fn no_perturbation() -> Perturbation {
    Perturbation::None
}

/// Boundary of `Ω ∩ B_R = {x_N > φ(x′)}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryProfile {
    pub dim: usize,
    /// Plane: `[g(+1), g(−1)]`. Space: `[g]`, the constant slope of the cone.
    pub g: Vec<f64>,
    #[serde(default = "no_perturbation")]
    pub perturbation: Perturbation,
    pub radius: f64,
}

/// Angular extent of a cone section.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeSection {
    pub dim: usize,
    /// Plane: `θ₋`. Space: `0` (the pole).
    pub lo: f64,
    /// Plane: `θ₊`. Space: the colatitude opening `φ₀`.
    pub hi: f64,
}

impl ConeSection {
    /// Symmetric planar sector of opening `απ`.
    pub fn sector(alpha: f64) -> Self {
        ConeSection {
            dim: 2,
            lo: FRAC_PI_2 * (1.0 - alpha),
            hi: FRAC_PI_2 * (1.0 + alpha),
        }
    }

    /// Spherical cap of colatitude opening `φ₀`.
    pub fn cap(phi0: f64) -> Self {
        ConeSection {
            dim: 3,
            lo: 0.0,
            hi: phi0,
        }
    }

    /// Length of the angular interval.
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Opening fraction `α` with `θ₊ − θ₋ = απ` (plane only).
    pub fn alpha(&self) -> f64 {
        self.width() / PI
    }

    /// Surface weight `ω(angle)` of the unit sphere in meridian coordinates.
    pub fn weight(&self, angle: f64) -> f64 {
        sphere_weight(self.dim, angle)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.dim {
            2 => self.lo > -FRAC_PI_2 && self.hi < 1.5 * PI && self.hi > self.lo,
            3 => self.lo == 0.0 && self.hi > 0.0 && self.hi < PI,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Geometry(format!(
                "empty or improper cone section {self:?}"
            )))
        }
    }
}

/// Unit-sphere surface weight in meridian coordinates.
pub fn sphere_weight(dim: usize, angle: f64) -> f64 {
    if dim == 3 {
        2.0 * PI * angle.sin()
    } else {
        1.0
    }
}

/// Point at radius `r` and meridian angle `angle` (azimuth along `x₁` in space).
pub fn polar_point(dim: usize, r: f64, angle: f64) -> DVector<f64> {
    let (s, c) = angle.sin_cos();
    if dim == 3 {
        DVector::from_vec(vec![r * s, 0.0, r * c])
    } else {
        DVector::from_vec(vec![r * c, r * s])
    }
}

/// Meridian angle of `y`.
pub fn angle_of(y: &DVector<f64>) -> f64 {
    let n = y.len();
    if n == 3 {
        let rp = (y[0] * y[0] + y[1] * y[1]).sqrt();
        rp.atan2(y[2])
    } else {
        let t = y[1].atan2(y[0]);
        if t < -FRAC_PI_2 {
            t + 2.0 * PI
        } else {
            t
        }
    }
}

fn norm_prime(xp: &[f64]) -> f64 {
    xp.iter().map(|v| v * v).sum::<f64>().sqrt()
}

impl BoundaryProfile {
    /// Straight symmetric sector of opening `απ`.
    pub fn sector(alpha: f64, radius: f64) -> Self {
        let g = (alpha * FRAC_PI_2).cos() / (alpha * FRAC_PI_2).sin();
        BoundaryProfile {
            dim: 2,
            g: vec![g, g],
            perturbation: Perturbation::None,
            radius,
        }
    }

    /// Sector of opening `απ` with the bump `a|x₁|^{1+δ}` added.
    pub fn power_bump(alpha: f64, a: f64, delta: f64, radius: f64) -> Self {
        BoundaryProfile {
            perturbation: Perturbation::PowerBump { a, delta },
            ..Self::sector(alpha, radius)
        }
    }

    /// Rotationally symmetric cone in space with cap opening `φ₀`.
    pub fn cone3(phi0: f64, radius: f64) -> Self {
        let g = phi0.cos() / phi0.sin();
        BoundaryProfile {
            dim: 3,
            g: vec![g],
            perturbation: Perturbation::None,
            radius,
        }
    }

    /// The logarithmic corner; the validity radius is set inside the curve range.
    pub fn log_corner(alpha: f64, sigma: f64) -> Result<Self> {
        let corner = LogCorner::new(alpha, sigma)?;
        let g = (alpha * FRAC_PI_2).cos() / (alpha * FRAC_PI_2).sin();
        Ok(BoundaryProfile {
            dim: 2,
            g: vec![g, g],
            perturbation: Perturbation::LogCorner { alpha, sigma },
            radius: 0.9 * corner.x1_max(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        match (self.dim, self.g.len()) {
            (2, 2) | (3, 1) => {}
            _ => return bad(format!("dim {} with {} slopes", self.dim, self.g.len())),
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return bad(format!("radius {} must be positive", self.radius));
        }
        if self.g.iter().any(|v| !v.is_finite()) {
            return bad("slopes must be finite".into());
        }
        match self.perturbation {
            Perturbation::None => {}
            Perturbation::PowerBump { a, delta } => {
                if !(delta > 0.0 && delta < 1.0 && a.is_finite()) {
                    return bad(format!("power bump needs delta in (0,1), got {delta}"));
                }
            }
            Perturbation::LogCorner { alpha, sigma } => {
                if self.dim != 2 {
                    return Err(Error::Unsupported("the log corner is planar".into()));
                }
                let c = LogCorner::new(alpha, sigma)?;
                if self.radius >= c.x1_max() {
                    return bad(format!(
                        "radius {} exceeds the curve range {}",
                        self.radius,
                        c.x1_max()
                    ));
                }
            }
        }
        self.cone().validate()
    }

    /// Tangent cone section.
    pub fn cone(&self) -> ConeSection {
        if self.dim == 3 {
            ConeSection::cap(1f64.atan2(self.g[0]))
        } else {
            ConeSection {
                dim: 2,
                lo: self.g[0].atan2(1.0),
                hi: self.g[1].atan2(-1.0),
            }
        }
    }

    fn check_radius(&self, xp: &[f64]) -> Result<f64> {
        if xp.len() + 1 != self.dim {
            return domain(format!("point has {} tangential coordinates", xp.len()));
        }
        let t = norm_prime(xp);
        if t < self.radius {
            Ok(t)
        } else {
            domain(format!(
                "|x'| = {t:e} outside the validity radius {:e}",
                self.radius
            ))
        }
    }

    fn slope_at(&self, xp: &[f64]) -> f64 {
        if self.dim == 2 && xp[0] < 0.0 {
            self.g[1]
        } else {
            self.g[0]
        }
    }

    /// `φ₀(x′) = |x′| g(x′/|x′|)`.
    pub fn phi0(&self, xp: &[f64]) -> Result<f64> {
        let t = self.check_radius(xp)?;
        Ok(t * self.slope_at(xp))
    }

    /// `∇φ₀`, one-sided at the planar corner and zero on the spatial axis.
    pub fn grad_phi0(&self, xp: &[f64]) -> Vec<f64> {
        if self.dim == 2 {
            return vec![if xp[0] < 0.0 { -self.g[1] } else { self.g[0] }];
        }
        let t = norm_prime(xp);
        if t == 0.0 {
            return vec![0.0; xp.len()];
        }
        xp.iter().map(|v| self.g[0] * v / t).collect()
    }

    /// Boundary function `φ`.
    pub fn phi(&self, xp: &[f64]) -> Result<f64> {
        let t = self.check_radius(xp)?;
        match self.perturbation {
            Perturbation::None => Ok(t * self.slope_at(xp)),
            Perturbation::PowerBump { a, delta } => {
                Ok(t * self.slope_at(xp) + a * t.powf(1.0 + delta))
            }
            Perturbation::LogCorner { alpha, sigma } => LogCorner {
                alpha,
                sigma,
                branch: branch_of(alpha),
            }
            .phi(xp[0]),
        }
    }

    /// `∇φ`, analytic for every family.
    pub fn grad_phi(&self, xp: &[f64]) -> Result<Vec<f64>> {
        let t = self.check_radius(xp)?;
        let mut g0 = self.grad_phi0(xp);
        match self.perturbation {
            Perturbation::None => Ok(g0),
            Perturbation::PowerBump { a, delta } => {
                if t > 0.0 {
                    let c = a * (1.0 + delta) * t.powf(delta - 1.0);
                    for (g, v) in g0.iter_mut().zip(xp) {
                        *g += c * v;
                    }
                }
                Ok(g0)
            }
            Perturbation::LogCorner { alpha, sigma } => {
                let c = LogCorner {
                    alpha,
                    sigma,
                    branch: branch_of(alpha),
                };
                if xp[0] == 0.0 {
                    return Ok(g0);
                }
                Ok(vec![c.dphi(xp[0])?])
            }
        }
    }

    /// Decay exponent of `φ − φ₀`, when it is a power.
    pub fn decay_delta(&self) -> Option<f64> {
        match self.perturbation {
            Perturbation::None => Some(1.0),
            Perturbation::PowerBump { delta, .. } => Some(delta),
            Perturbation::LogCorner { .. } => None,
        }
    }

    /// Whether `φ` satisfies the power-rate corner hypotheses.
    pub fn is_compliant(&self) -> bool {
        !matches!(self.perturbation, Perturbation::LogCorner { .. })
    }
}

fn branch_of(alpha: f64) -> crate::logexample::Branch {
    if alpha < 1.0 {
        crate::logexample::Branch::AlphaLt1
    } else {
        crate::logexample::Branch::AlphaGe1
    }
}

/// `φ₀(x′)`.
pub fn eval_phi0(profile: &BoundaryProfile, xp: &[f64]) -> Result<f64> {
    profile.phi0(xp)
}

/// Corner defect `φ(x′) − ∇φ(x′)·x′`.
pub fn corner_defect(profile: &BoundaryProfile, xp: &[f64]) -> Result<f64> {
    if norm_prime(xp) == 0.0 {
        return domain("corner defect is undefined at the vertex");
    }
    let phi = profile.phi(xp)?;
    let g = profile.grad_phi(xp)?;
    Ok(phi - g.iter().zip(xp).map(|(a, b)| a * b).sum::<f64>())
}

/// Value, Jacobian and Jacobian determinant of a map at a point.
#[derive(Clone, Debug)]
pub struct MapEvaluation {
    pub value: DVector<f64>,
    pub jacobian: DMatrix<f64>,
    pub det: f64,
}

/// A differentiable map of a neighbourhood of the vertex.
pub trait DiffMap: Sync + Send {
    fn dim(&self) -> usize;
    fn eval(&self, y: &DVector<f64>) -> Result<MapEvaluation>;
}

/// `Ψ(y) = (y′, y_N + 2C₀|y|^{1+δ})`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsiMap {
    pub dim: usize,
    pub c0: f64,
    pub delta: f64,
}

impl DiffMap for PsiMap {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, y: &DVector<f64>) -> Result<MapEvaluation> {
        Ok(psi_map(self.c0, self.delta, y))
    }
}

/// Evaluates `Ψ`; the Jacobian at the origin is the identity.
pub fn psi_map(c0: f64, delta: f64, y: &DVector<f64>) -> MapEvaluation {
    let n = y.len();
    let r = y.norm();
    let mut value = y.clone();
    let mut jacobian = DMatrix::identity(n, n);
    if r > 0.0 && c0 != 0.0 {
        value[n - 1] += 2.0 * c0 * r.powf(1.0 + delta);
        let c = 2.0 * c0 * (1.0 + delta) * r.powf(delta - 1.0);
        for j in 0..n {
            jacobian[(n - 1, j)] += c * y[j];
        }
    }
    let det = jacobian[(n - 1, n - 1)];
    MapEvaluation {
        value,
        jacobian,
        det,
    }
}

/// Solves `φ̃ + 2C₀(|y′|² + φ̃²)^{(1+δ)/2} = φ(y′)`.
pub fn tilde_phi(profile: &BoundaryProfile, c0: f64, delta: f64, yp: &[f64]) -> Result<f64> {
    let phi = profile.phi(yp)?;
    let t2 = yp.iter().map(|v| v * v).sum::<f64>();
    if c0 == 0.0 {
        return Ok(phi);
    }
    let t = t2.sqrt();
    if t == 0.0 && phi == 0.0 {
        return Ok(0.0);
    }
    let e = 1.0 + delta;
    let f = |s: f64| {
        let rho2 = t2 + s * s;
        let rho = rho2.sqrt();
        let val = s + 2.0 * c0 * rho.powf(e) - phi;
        let der = 1.0 + 2.0 * c0 * e * rho.powf(delta - 1.0) * s;
        (val, der)
    };
    let hi = phi;
    let scale = t.max(phi.abs()).max(f64::MIN_POSITIVE);
    let mut step = scale;
    let mut lo = phi - step;
    let mut k = 0;
    while f(lo).0 >= 0.0 {
        step *= 2.0;
        lo = phi - step;
        k += 1;
        if k > 60 {
            return Err(Error::Geometry(format!(
                "cannot bracket the pushed boundary at |y'| = {t:e}; radius too large"
            )));
        }
    }
    if f(hi).0 == 0.0 {
        return Ok(hi);
    }
    newton_bracketed(f, lo, hi, 1e-15 * scale)
        .map_err(|e| Error::Geometry(format!("pushed boundary root failed: {e}")))
}

/// `∇φ̃` by implicit differentiation.
pub fn grad_tilde_phi(
    profile: &BoundaryProfile,
    c0: f64,
    delta: f64,
    yp: &[f64],
    tphi: f64,
) -> Result<Vec<f64>> {
    let gp = profile.grad_phi(yp)?;
    if c0 == 0.0 {
        return Ok(gp);
    }
    let rho = (yp.iter().map(|v| v * v).sum::<f64>() + tphi * tphi).sqrt();
    if rho == 0.0 {
        return Ok(gp);
    }
    let c = 2.0 * c0 * (1.0 + delta) * rho.powf(delta - 1.0);
    let den = 1.0 + c * tphi;
    Ok(gp.iter().zip(yp).map(|(g, y)| (g - c * y) / den).collect())
}

/// The radius-preserving straightening `Ξ: Ω̃ → 𝒞` and its inverse `Φ`.
#[derive(Clone, Debug)]
pub struct Straightening {
    pub profile: BoundaryProfile,
    pub c0: f64,
    pub delta: f64,
    /// Radius below which `Ξ` is a verified bijection.
    pub r_hat: f64,
    cone: ConeSection,
}

impl Straightening {
    /// Validates `C₀` against the corner defect (compliant profiles only) and
    /// computes the bijectivity radius.
    pub fn new(profile: BoundaryProfile, c0: f64, delta: f64) -> Result<Self> {
        profile.validate()?;
        if !(c0 >= 0.0 && c0.is_finite()) {
            return Err(Error::Config(format!("C0 = {c0} must be nonnegative")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Config(format!("delta = {delta} outside (0,1)")));
        }
        if profile.is_compliant() {
            if let Some(worst) = defect_ratio(&profile, delta)? {
                if worst > c0 * (1.0 + 1e-9) + 1e-300 {
                    return Err(Error::Config(format!(
                        "C0 = {c0} violates the corner-defect bound (needs >= {worst:.6e})"
                    )));
                }
            }
        }
        let cone = profile.cone();
        let mut s = Straightening {
            profile,
            c0,
            delta,
            r_hat: 0.0,
            cone,
        };
        s.r_hat = s.find_r_hat()?;
        Ok(s)
    }

    /// Straight geometry with `Ψ = Id`.
    pub fn identity(profile: BoundaryProfile) -> Result<Self> {
        Self::new(profile, 0.0, 0.5)
    }

    pub fn dim(&self) -> usize {
        self.profile.dim
    }

    /// Tangent cone section.
    pub fn cone(&self) -> ConeSection {
        self.cone
    }

    /// `φ̃(y′)`.
    pub fn tilde_phi(&self, yp: &[f64]) -> Result<f64> {
        tilde_phi(&self.profile, self.c0, self.delta, yp)
    }

    /// `Ψ` with this straightening's parameters.
    pub fn psi(&self) -> PsiMap {
        PsiMap {
            dim: self.dim(),
            c0: self.c0,
            delta: self.delta,
        }
    }

    /// Whether `y` lies in the closure of `Ω̃` (up to `tol·|y|`).
    pub fn contains(&self, y: &DVector<f64>, tol: f64) -> Result<bool> {
        let n = y.len();
        let tp = self.tilde_phi(&y.as_slice()[..n - 1])?;
        Ok(y[n - 1] >= tp - tol * y.norm())
    }

    fn xi_raw(&self, y: &DVector<f64>) -> Result<MapEvaluation> {
        let n = y.len();
        let yp = &y.as_slice()[..n - 1];
        let r = y.norm();
        if r == 0.0 {
            return Ok(MapEvaluation {
                value: y.clone(),
                jacobian: DMatrix::identity(n, n),
                det: 1.0,
            });
        }
        let tp = self.tilde_phi(yp)?;
        let d = self.profile.phi0(yp)? - tp;
        let gt = grad_tilde_phi(&self.profile, self.c0, self.delta, yp, tp)?;
        let g0 = self.profile.grad_phi0(yp);
        let on_axis = norm_prime(yp) == 0.0;
        let mut num = y.clone();
        num[n - 1] += d;
        let nn = num.norm();
        let nh = &num / nn;
        let value = &nh * r;
        let mut jn = DMatrix::identity(n, n);
        if !on_axis {
            for j in 0..n - 1 {
                jn[(n - 1, j)] += g0[j] - gt[j];
            }
        }
        let proj = DMatrix::identity(n, n) - &nh * nh.transpose();
        let jacobian = &nh * (y / r).transpose() + proj * jn * (r / nn);
        let det = jacobian.determinant();
        Ok(MapEvaluation {
            value,
            jacobian,
            det,
        })
    }

    fn check_ball(&self, y: &DVector<f64>) -> Result<()> {
        if y.len() != self.dim() {
            return domain(format!(
                "point of dimension {} in a {}-d geometry",
                y.len(),
                self.dim()
            ));
        }
        let r = y.norm();
        if r >= self.r_hat {
            return domain(format!(
                "|y| = {r:e} outside the straightening radius {:e}",
                self.r_hat
            ));
        }
        Ok(())
    }

    /// `Ξ(y)` with Jacobian; `y` must lie in `Ω̃ ∩ B_{R̂}`.
    pub fn xi(&self, y: &DVector<f64>) -> Result<MapEvaluation> {
        self.check_ball(y)?;
        if !self.contains(y, 1e-10)? {
            return domain("point lies outside the pushed domain");
        }
        self.xi_raw(y)
    }

    /// Straightened point `Ξ(y)`.
    pub fn straighten(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(self.xi(y)?.value)
    }

    /// Angular interval of `Ω̃ ∩ ∂B_r` in meridian coordinates.
    pub fn arc(&self, r: f64) -> Result<(f64, f64)> {
        if !(r > 0.0) {
            return domain("arc radius must be positive");
        }
        let dim = self.dim();
        let cone = self.cone;
        // g(s) > 0 inside the domain.
        let g = |s: f64| -> (f64, f64) {
            let p = polar_point(dim, r, s);
            let yp = &p.as_slice()[..dim - 1];
            match self.tilde_phi(yp) {
                Ok(tp) => {
                    let gr = grad_tilde_phi(&self.profile, self.c0, self.delta, yp, tp)
                        .map(|v| v[0])
                        .unwrap_or(0.0);
                    let (sn, cs) = s.sin_cos();
                    if dim == 3 {
                        (r * cs - tp, -r * sn - gr * r * cs)
                    } else {
                        (r * sn - tp, r * cs + gr * r * sn)
                    }
                }
                Err(_) => (f64::NAN, 0.0),
            }
        };
        let mid = if dim == 3 {
            0.0
        } else {
            0.5 * (cone.lo + cone.hi)
        };
        if !(g(mid).0 > 0.0) {
            return Err(Error::Geometry(format!(
                "domain axis is not interior at r = {r:e}"
            )));
        }
        let hi_end = if dim == 3 {
            Some(find_edge(&g, cone.hi, 0.0, PI)?)
        } else {
            None
        };
        if let Some(h) = hi_end {
            return Ok((0.0, h));
        }
        let lo = find_edge(&g, cone.lo, mid, -FRAC_PI_2)?;
        let hi = find_edge(&g, cone.hi, mid, 1.5 * PI)?;
        Ok((lo, hi))
    }

    fn angle_map(&self, r: f64, s: f64, azimuth: &[f64]) -> Result<(f64, f64, MapEvaluation)> {
        let dim = self.dim();
        let (sn, cs) = s.sin_cos();
        let (y, dy) = if dim == 3 {
            (
                DVector::from_vec(vec![r * sn * azimuth[0], r * sn * azimuth[1], r * cs]),
                DVector::from_vec(vec![r * cs * azimuth[0], r * cs * azimuth[1], -r * sn]),
            )
        } else {
            (
                DVector::from_vec(vec![r * cs, r * sn]),
                DVector::from_vec(vec![-r * sn, r * cs]),
            )
        };
        let e = self.xi_raw(&y)?;
        let dx = &e.jacobian * dy;
        let x = &e.value;
        let r2 = x.norm_squared();
        let (ang, dang) = if dim == 3 {
            let rp = (x[0] * x[0] + x[1] * x[1]).sqrt();
            let drp = if rp > 0.0 {
                (x[0] * dx[0] + x[1] * dx[1]) / rp
            } else {
                dx[0].hypot(dx[1])
            };
            (rp.atan2(x[2]), (x[2] * drp - rp * dx[2]) / r2)
        } else {
            (angle_of(x), (x[0] * dx[1] - x[1] * dx[0]) / r2)
        };
        Ok((ang, dang, e))
    }

    fn azimuth_of(&self, x: &DVector<f64>) -> Vec<f64> {
        if self.dim() == 3 {
            let rp = (x[0] * x[0] + x[1] * x[1]).sqrt();
            if rp > 0.0 {
                vec![x[0] / rp, x[1] / rp]
            } else {
                vec![1.0, 0.0]
            }
        } else {
            vec![]
        }
    }

    fn unstraighten_raw(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let r = x.norm();
        if r == 0.0 {
            return Ok(x.clone());
        }
        let target = angle_of(x);
        let tol = 1e-12;
        if target < self.cone.lo - tol || target > self.cone.hi + tol {
            return domain(format!("angle {target} outside the cone section"));
        }
        let target = target.clamp(self.cone.lo, self.cone.hi);
        let az = self.azimuth_of(x);
        let (a, b) = self.arc(r)?;
        let point = |s: f64| -> DVector<f64> {
            let (sn, cs) = s.sin_cos();
            if self.dim() == 3 {
                DVector::from_vec(vec![r * sn * az[0], r * sn * az[1], r * cs])
            } else {
                DVector::from_vec(vec![r * cs, r * sn])
            }
        };
        if self.dim() == 3 && target == 0.0 {
            return Ok(point(0.0));
        }
        if target <= self.cone.lo {
            return Ok(point(a));
        }
        if target >= self.cone.hi {
            return Ok(point(b));
        }
        let s = newton_bracketed(
            |s| match self.angle_map(r, s, &az) {
                Ok((ang, d, _)) => (ang - target, d),
                Err(_) => (f64::NAN, 0.0),
            },
            a,
            b,
            1e-15,
        )?;
        Ok(point(s))
    }

    /// `Φ(x) = Ξ⁻¹(x)` with Jacobian `JΞ(Φ(x))⁻¹`.
    pub fn phi_map(&self, x: &DVector<f64>) -> Result<MapEvaluation> {
        self.check_ball(x)?;
        let y = self.unstraighten_raw(x)?;
        let e = self.xi_raw(&y)?;
        let jacobian = e
            .jacobian
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Numerical("singular straightening Jacobian".into()))?;
        Ok(MapEvaluation {
            value: y,
            jacobian,
            det: 1.0 / e.det,
        })
    }

    /// `Φ(x)`.
    pub fn unstraighten(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(self.phi_map(x)?.value)
    }

    fn ring_is_regular(&self, r: f64) -> bool {
        let Ok((a, b)) = self.arc(r) else {
            return false;
        };
        let az = [1.0, 0.0];
        let n = 64;
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=n {
            let s = a + (b - a) * i as f64 / n as f64;
            let Ok((ang, d, e)) = self.angle_map(r, s, &az) else {
                return false;
            };
            if !(e.det > 0.0 && d > 0.0 && ang > prev) {
                return false;
            }
            let expect = if i == 0 {
                Some(self.cone.lo)
            } else if i == n {
                Some(self.cone.hi)
            } else {
                None
            };
            if let Some(t) = expect {
                if (ang - t).abs() > 1e-8 {
                    return false;
                }
            }
            prev = ang;
        }
        true
    }

    fn find_r_hat(&self) -> Result<f64> {
        let cap = self.profile.radius / 4.0;
        let rings: Vec<f64> = (0..32).map(|k| cap * 0.5f64.powi(k)).collect();
        let ok: Vec<bool> = rings.iter().map(|&r| self.ring_is_regular(r)).collect();
        // Smallest ring index from which every smaller ring is regular.
        let mut first_good = rings.len();
        for k in (0..rings.len()).rev() {
            if ok[k] {
                first_good = k;
            } else {
                break;
            }
        }
        if first_good == rings.len() {
            return Err(Error::Geometry(
                "straightening is not a bijection near the vertex".into(),
            ));
        }
        if first_good == 0 {
            return Ok(cap);
        }
        let (good, bad) = (rings[first_good], rings[first_good - 1]);
        let r = bisect(
            |r| if self.ring_is_regular(r) { -1.0 } else { 1.0 },
            good,
            bad,
            1e-6 * good,
        )?;
        Ok(r.min(bad) * (1.0 - 1e-6))
    }
}

impl DiffMap for Straightening {
    fn dim(&self) -> usize {
        self.profile.dim
    }

    /// Accepts points up to `10⁻²|y|` outside `Ω̃`, where the formula for `Ξ`
    /// still holds; difference stencils near the boundary need this.
    fn eval(&self, y: &DVector<f64>) -> Result<MapEvaluation> {
        self.check_ball(y)?;
        if !self.contains(y, 1e-2)? {
            return domain("point lies outside the pushed domain");
        }
        self.xi_raw(y)
    }
}

/// `Φ = Ξ⁻¹` as a map.
#[derive(Clone, Debug)]
pub struct InverseStraightening(pub std::sync::Arc<Straightening>);

impl DiffMap for InverseStraightening {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval(&self, x: &DVector<f64>) -> Result<MapEvaluation> {
        self.0.phi_map(x)
    }
}

fn find_edge<G>(g: &G, guess: f64, inside: f64, limit: f64) -> Result<f64>
where
    G: Fn(f64) -> (f64, f64),
{
    let dir = (limit - inside).signum();
    let mut step = 0.02 * (guess - inside).abs().max(0.05);
    let mut out = guess + dir * step;
    let mut k = 0;
    while !(g(out).0 < 0.0) {
        step *= 1.6;
        out = guess + dir * step;
        if (out - limit) * dir >= 0.0 {
            out = limit - dir * 1e-12;
        }
        k += 1;
        if k > 80 {
            return Err(Error::Geometry(
                "cannot locate the domain boundary on the ring".into(),
            ));
        }
    }
    let mut inn = guess - dir * step.min(0.5 * (guess - inside).abs());
    let mut k = 0;
    while !(g(inn).0 > 0.0) {
        inn = 0.5 * (inn + inside);
        k += 1;
        if k > 80 {
            return Err(Error::Geometry(
                "cannot locate the domain boundary on the ring".into(),
            ));
        }
    }
    newton_bracketed(g, inn, out, 1e-15)
}

/// Smallest admissible `C₀` for a profile: `sup |φ − φ₀| / |x′|^{1+δ}` over
/// sampled points, or zero for an unperturbed cone.
pub fn min_c0(profile: &BoundaryProfile, delta: f64) -> Result<f64> {
    Ok(defect_ratio(profile, delta)?.unwrap_or(0.0))
}

fn defect_ratio(profile: &BoundaryProfile, delta: f64) -> Result<Option<f64>> {
    if matches!(profile.perturbation, Perturbation::None) {
        return Ok(None);
    }
    let mut worst: f64 = 0.0;
    for t in logspace(1e-8 * profile.radius, 0.5 * profile.radius, 48) {
        let signs: &[f64] = if profile.dim == 2 {
            &[1.0, -1.0]
        } else {
            &[1.0]
        };
        for &s in signs {
            let mut xp = vec![0.0; profile.dim - 1];
            xp[0] = s * t;
            let d = corner_defect(profile, &xp)?;
            worst = worst.max(d.abs() / t.powf(1.0 + delta));
        }
    }
    Ok(Some(worst))
}

/// Outer unit normal of `Ω̃` at a boundary point `y` and the transversality
/// scalar `Ã(y)y·ν̃(y)`.
///
/// `atilde` supplies `Ã`; `None` means the pushforward of `A = Id` under `Ψ`.
/// Matrix-valued coefficient `y ↦ A(y)`.
pub type MatrixFn<'a> = &'a dyn Fn(&DVector<f64>) -> Result<DMatrix<f64>>;

pub fn normal_and_transversality(
    s: &Straightening,
    y: &DVector<f64>,
    atilde: Option<MatrixFn<'_>>,
) -> Result<(DVector<f64>, f64)> {
    let n = y.len();
    if y.norm() == 0.0 {
        return domain("the vertex has no normal");
    }
    let yp = &y.as_slice()[..n - 1];
    let tp = s.tilde_phi(yp)?;
    if (y[n - 1] - tp).abs() > 1e-10 {
        return domain(format!("point is {:e} off the boundary", y[n - 1] - tp));
    }
    let g = grad_tilde_phi(&s.profile, s.c0, s.delta, yp, tp)?;
    let mut nu = DVector::zeros(n);
    for j in 0..n - 1 {
        nu[j] = g[j];
    }
    nu[n - 1] = -1.0;
    nu /= nu.norm();
    let a = match atilde {
        Some(f) => f(y)?,
        None => {
            let e = psi_map(s.c0, s.delta, y);
            let ji = e
                .jacobian
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::Numerical("singular Jacobian".into()))?;
            &ji * ji.transpose() * e.det.abs()
        }
    };
    let scalar = (a * y).dot(&nu);
    Ok((nu, scalar))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_vec(x.to_vec())
    }

    #[test]
    fn phi0_examples() {
        let p = BoundaryProfile {
            dim: 2,
            g: vec![0.0, 0.0],
            perturbation: Perturbation::None,
            radius: 1.0,
        };
        assert_eq!(p.phi0(&[0.3]).unwrap(), 0.0);
        let q = BoundaryProfile {
            g: vec![1.0, -1.0],
            ..p.clone()
        };
        assert_eq!(q.phi0(&[0.5]).unwrap(), 0.5);
        assert_eq!(q.phi0(&[0.0]).unwrap(), 0.0);
        assert!(q.phi0(&[1.5]).is_err());
    }

    #[test]
    fn sector_cone_section() {
        let c = BoundaryProfile::sector(2.0 / 3.0, 1.0).cone();
        assert!((c.alpha() - 2.0 / 3.0).abs() < 1e-14);
        assert!((c.lo - PI / 6.0).abs() < 1e-14);
        let h = BoundaryProfile::cone3(FRAC_PI_2, 1.0).cone();
        assert!((h.hi - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn psi_examples() {
        let e = psi_map(1.0, 0.5, &v(&[0.0, 1.0]));
        assert!((e.value[1] - 3.0).abs() < 1e-15);
        let z = psi_map(1.0, 0.5, &v(&[0.0, 0.0]));
        assert_eq!(z.jacobian, DMatrix::identity(2, 2));
    }

    #[test]
    fn psi_jacobian_matches_differences() {
        let y = v(&[0.3, -0.2, 0.4]);
        let e = psi_map(0.7, 0.5, &y);
        let h = 1e-6;
        for j in 0..3 {
            let mut yp = y.clone();
            let mut ym = y.clone();
            yp[j] += h;
            ym[j] -= h;
            let col = (psi_map(0.7, 0.5, &yp).value - psi_map(0.7, 0.5, &ym).value) / (2.0 * h);
            for i in 0..3 {
                assert!((col[i] - e.jacobian[(i, j)]).abs() < 1e-8);
            }
        }
        assert!((e.det - e.jacobian.determinant()).abs() < 1e-12);
    }

    #[test]
    fn tilde_phi_flat_oracle() {
        let p = BoundaryProfile {
            dim: 2,
            g: vec![0.0, 0.0],
            perturbation: Perturbation::None,
            radius: 1.0,
        };
        let t = tilde_phi(&p, 1.0, 0.5, &[0.01]).unwrap();
        let oracle = bisect(|s| s + 2.0 * (1e-4 + s * s).powf(0.75), -0.01, 0.0, 1e-16).unwrap();
        assert!((t - oracle).abs() < 1e-14);
        assert_eq!(tilde_phi(&p, 1.0, 0.5, &[0.0]).unwrap(), 0.0);
    }

    #[test]
    fn power_bump_defect_is_closed_form() {
        let p = BoundaryProfile::power_bump(2.0 / 3.0, 0.3, 0.5, 1.0);
        for x in [0.1, -0.02, 1e-4] {
            let d = corner_defect(&p, &[x]).unwrap();
            let expect = -0.3 * 0.5 * f64::abs(x).powf(1.5);
            assert!((d - expect).abs() < 1e-14);
        }
        assert!(corner_defect(&p, &[0.0]).is_err());
    }

    #[test]
    fn c0_below_defect_is_rejected() {
        let p = BoundaryProfile::power_bump(2.0 / 3.0, 0.3, 0.5, 1.0);
        assert!(Straightening::new(p.clone(), 0.1, 0.5).is_err());
        assert!(Straightening::new(p, 0.2, 0.5).is_ok());
    }

    #[test]
    fn straight_cone_without_bend_is_identity() {
        let s = Straightening::identity(BoundaryProfile::sector(2.0 / 3.0, 1.0)).unwrap();
        let y = polar_point(2, 0.1, 1.2);
        let x = s.straighten(&y).unwrap();
        assert!((x - &y).norm() < 1e-15);
    }

    #[test]
    fn round_trip_and_radius() {
        let p = BoundaryProfile::power_bump(2.0 / 3.0, 0.3, 0.5, 1.0);
        let s = Straightening::new(p, 0.5, 0.5).unwrap();
        assert!(s.r_hat > 0.0);
        for r in [1e-5, 1e-3, 0.5 * s.r_hat] {
            let (a, b) = s.arc(r).unwrap();
            for k in 1..8 {
                let t = a + (b - a) * k as f64 / 8.0;
                let y = polar_point(2, r, t);
                let x = s.straighten(&y).unwrap();
                assert!((x.norm() - r).abs() < 1e-12 * r.max(1.0));
                let back = s.unstraighten(&x).unwrap();
                assert!((back - y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn spatial_round_trip() {
        let p = BoundaryProfile::cone3(1.2, 1.0);
        let s = Straightening::new(p, 0.3, 0.5).unwrap();
        let y = DVector::from_vec(vec![0.01, 0.004, 0.005]);
        let x = s.straighten(&y).unwrap();
        assert!((x.norm() - y.norm()).abs() < 1e-15);
        assert!((s.unstraighten(&x).unwrap() - y).norm() < 1e-12);
    }

    #[test]
    fn flat_boundary_normal() {
        let p = BoundaryProfile {
            dim: 2,
            g: vec![0.0, 0.0],
            perturbation: Perturbation::None,
            radius: 1.0,
        };
        let s = Straightening::new(p, 1e-8, 0.5).unwrap();
        let yp = 0.01;
        let y = v(&[yp, s.tilde_phi(&[yp]).unwrap()]);
        let (nu, sc) = normal_and_transversality(&s, &y, None).unwrap();
        assert!((nu[1] + 1.0).abs() < 1e-8);
        assert!(sc >= -1e-12);
    }
}
