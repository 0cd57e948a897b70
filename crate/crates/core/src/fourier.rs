//! Fourier analysis on the straightened cone: the coefficients `φ_i(λ)`, the
//! correction functionals `Υ_i`, the radius-independent coefficients `β_i` of
//! the leading profile and its reconstruction.

use crate::almgren::BlowupSnapshot;
use crate::coefficients::Coefficients;
use crate::error::{Error, Result};
use crate::field::{polar_frame, Field, FieldRef, GridSpec, MappedField, Quadrature};
use crate::geometry::{polar_point, ConeSection, InverseStraightening, Straightening};
use crate::numerics::interp::lagrange4;
use crate::numerics::quad::GaussRule;
use crate::spectral::{exponents, CapEigensystem};
use nalgebra::DMatrix;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

/// An `L²(C)`-orthonormal family of Dirichlet eigenfunctions on a cap.
pub trait AngularBasis: Send + Sync {
    fn cone(&self) -> ConeSection;
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    /// Eigenvalue of the zero-based index `i`.
    fn mu(&self, i: usize) -> f64;
    /// `ψ_i(angle)` and its angular derivative.
    fn eval(&self, i: usize, angle: f64) -> (f64, f64);
}

/// Closed-form eigenfunctions `√(2/(απ)) sin(k(θ−θ₋)/α)` of a planar arc.
#[derive(Clone, Copy, Debug)]
pub struct SectorModes {
    pub cone: ConeSection,
    pub count: usize,
}

impl AngularBasis for SectorModes {
    fn cone(&self) -> ConeSection {
        self.cone
    }
    fn len(&self) -> usize {
        self.count
    }
    fn mu(&self, i: usize) -> f64 {
        ((i + 1) as f64 / self.cone.alpha()).powi(2)
    }
    fn eval(&self, i: usize, angle: f64) -> (f64, f64) {
        let a = self.cone.alpha();
        let c = (2.0 / (a * PI)).sqrt();
        let g = (i + 1) as f64 / a;
        let (s, co) = (g * (angle - self.cone.lo)).sin_cos();
        (c * s, c * g * co)
    }
}

/// Grid eigenfunctions interpolated with four-point Lagrange weights, with
/// odd reflection at Dirichlet ends and even reflection at the pole.
pub struct InterpolatedBasis {
    sys: CapEigensystem,
    ext: Vec<Vec<f64>>,
    dext: Vec<Vec<f64>>,
    pad: usize,
}

impl InterpolatedBasis {
    pub fn new(sys: CapEigensystem) -> Self {
        let pad = 3;
        let h = sys.spacing();
        let pole_even = sys.cap.dim == 3 && sys.m == 0;
        let mut ext = Vec::new();
        let mut dext = Vec::new();
        for p in &sys.pairs {
            let v = &p.psi;
            let n = v.len();
            let mut e = Vec::with_capacity(n + 2 * pad);
            for k in (1..=pad).rev() {
                e.push(if pole_even { v[k] } else { -v[k] });
            }
            e.extend_from_slice(v);
            for k in 1..=pad {
                e.push(-v[n - 1 - k]);
            }
            let d: Vec<f64> = (0..e.len())
                .map(|k| {
                    if k < 2 || k + 2 >= e.len() {
                        0.0
                    } else {
                        (-e[k + 2] + 8.0 * e[k + 1] - 8.0 * e[k - 1] + e[k - 2]) / (12.0 * h)
                    }
                })
                .collect();
            ext.push(e);
            dext.push(d);
        }
        InterpolatedBasis {
            sys,
            ext,
            dext,
            pad,
        }
    }

    pub fn system(&self) -> &CapEigensystem {
        &self.sys
    }
}

impl AngularBasis for InterpolatedBasis {
    fn cone(&self) -> ConeSection {
        self.sys.cap
    }
    fn len(&self) -> usize {
        self.sys.len()
    }
    fn mu(&self, i: usize) -> f64 {
        self.sys.pairs[i].mu
    }
    fn eval(&self, i: usize, angle: f64) -> (f64, f64) {
        let h = self.sys.spacing();
        let x0 = self.sys.grid[0] - self.pad as f64 * h;
        let (j, l, _) = lagrange4(self.ext[i].len(), x0, h, angle);
        let mut v = 0.0;
        let mut d = 0.0;
        for k in 0..4 {
            v += l[k] * self.ext[i][j + k];
            d += l[k] * self.dext[i][j + k];
        }
        (v, d)
    }
}

/// `v = w∘Φ` on the straight cone.
pub fn straightened_field(w: FieldRef, s: Arc<Straightening>) -> MappedField {
    MappedField::new(w, Arc::new(InverseStraightening(s)))
}

fn cone_quadrature(basis: &dyn AngularBasis, grid: GridSpec) -> (ConeSection, GridSpec) {
    (basis.cone(), grid)
}

/// `φ_i(λ) = ∫_C v(λθ)ψ_i(θ) dσ` for every basis index.
pub fn phi_coeffs(
    v: &dyn Field,
    basis: &dyn AngularBasis,
    grid: GridSpec,
    lambda: f64,
) -> Result<Vec<f64>> {
    let (cone, grid) = cone_quadrature(basis, grid);
    let q = Quadrature::new(&cone, grid)?;
    let nodes = q.sphere_nodes(lambda)?;
    let vals: Vec<f64> = nodes
        .iter()
        .map(|&(a, _)| Ok(v.sample(lambda, a)?.value))
        .collect::<Result<_>>()?;
    Ok((0..basis.len())
        .map(|i| {
            nodes
                .iter()
                .zip(&vals)
                .map(|(&(a, w), x)| w * x * basis.eval(i, a).0)
                .sum()
        })
        .collect())
}

/// `(Σφ_i², ∫_C v(λθ)² dσ)`.
pub fn parseval(
    v: &dyn Field,
    basis: &dyn AngularBasis,
    grid: GridSpec,
    lambda: f64,
) -> Result<(f64, f64)> {
    let phi = phi_coeffs(v, basis, grid, lambda)?;
    let cone = basis.cone();
    let q = Quadrature::new(&cone, grid)?;
    let [l2] = q.sphere(lambda, |a| Ok([v.sample(lambda, a)?.value.powi(2)]))?;
    Ok((phi.iter().map(|x| x * x).sum(), l2))
}

pub use crate::field::Source;

/// Bulk and surface densities of `Υ_i` at a point of the cone.
fn densities(
    v: &dyn Field,
    hat: &dyn Coefficients,
    source: Source<'_>,
    basis: &dyn AngularBasis,
    i: usize,
    rho: f64,
    a: f64,
) -> Result<(f64, f64, f64)> {
    let n = basis.cone().dim;
    let y = polar_point(n, rho, a);
    let (val, g) = v.eval_point(&y)?;
    let m = hat.a(&y)? - DMatrix::identity(n, n);
    let mg = &m * &g;
    let (psi, dpsi) = basis.eval(i, a);
    let (er, et) = polar_frame(&y);
    let grad = -mg.dot(&et) * dpsi / rho;
    let src = match source {
        Some(f) => f(&y)?,
        None => 0.0,
    };
    let lower = (-hat.b(&y)?.dot(&g) + hat.h(&y)? * val + hat.f(&y, val)? + src) * psi;
    let surface = mg.dot(&er) * psi;
    Ok((grad, lower, surface))
}

/// The three pieces of `Υ_i(λ)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct UpsilonParts {
    pub gradient: f64,
    pub lower: f64,
    pub surface: f64,
}

impl UpsilonParts {
    pub fn total(&self) -> f64 {
        self.gradient + self.lower + self.surface
    }
}

/// `Υ_i(λ)` for the zero-based basis index `i`.
pub fn upsilon(
    v: &dyn Field,
    hat: &dyn Coefficients,
    source: Source<'_>,
    basis: &dyn AngularBasis,
    grid: GridSpec,
    lambda: f64,
    i: usize,
) -> Result<UpsilonParts> {
    let cone = basis.cone();
    let q = Quadrature::new(&cone, grid)?;
    let [gradient, lower] = q.bulk(lambda, |rho, a| {
        let (g, l, _) = densities(v, hat, source, basis, i, rho, a)?;
        Ok([g, l])
    })?;
    let [s] = q.sphere(lambda, |a| {
        Ok([densities(v, hat, source, basis, i, lambda, a)?.2])
    })?;
    Ok(UpsilonParts {
        gradient,
        lower,
        surface: s * lambda.powi(cone.dim as i32 - 1),
    })
}

/// One row of the coefficient table.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BetaEntry {
    /// One-based eigenvalue index.
    pub i: usize,
    pub mu: f64,
    pub sigma: f64,
    pub r: f64,
    pub beta: f64,
    /// `R^{−σ}φ_i(R)`.
    pub boundary: f64,
    /// Weighted `Υ_i` integrals divided by `2−N−2σ`.
    pub correction: f64,
    /// `|β_i(R) − β_i(R/2)|`, filled by [`beta_table`].
    pub r_independence: f64,
}

/// `β_i` for the zero-based indices in `which`, using each index's own
/// exponent `σ_i⁺`:
/// `β_i = R^{−σ}φ_i(R) + (2−N−2σ)⁻¹ ∫_0^R W′(s)Υ_i(s) ds` with
/// `W(s) = s^{2−N−σ} − s^σR^{2−N−2σ}`. Since `Υ_i` is a bulk integral plus a
/// surface term and `W(R) = 0`, the radial integral is evaluated as one bulk
/// integral over `C ∩ B_R`.
pub fn beta_coeffs(
    v: &dyn Field,
    hat: &dyn Coefficients,
    source: Source<'_>,
    basis: &dyn AngularBasis,
    grid: GridSpec,
    which: &[usize],
    r: f64,
) -> Result<Vec<BetaEntry>> {
    let cone = basis.cone();
    let n = cone.dim as f64;
    let q = Quadrature::new(&cone, grid)?;
    let phi = phi_coeffs(v, basis, grid, r)?;
    which
        .iter()
        .map(|&i| {
            if i >= basis.len() {
                return Err(Error::Config(format!(
                    "index {} beyond the {} computed eigenpairs",
                    i + 1,
                    basis.len()
                )));
            }
            let mu = basis.mu(i);
            let sigma = exponents(mu, cone.dim)?.sigma_plus;
            let den = 2.0 - n - 2.0 * sigma;
            if den.abs() < 1e-12 {
                return Err(Error::Unsupported(format!(
                    "degenerate denominator 2-N-2σ at σ = {sigma}"
                )));
            }
            let rr = r.powf(2.0 - n - 2.0 * sigma);
            let w = |s: f64| s.powf(2.0 - n - sigma) - s.powf(sigma) * rr;
            let dw = |s: f64| {
                (2.0 - n - sigma) * s.powf(1.0 - n - sigma) - sigma * s.powf(sigma - 1.0) * rr
            };
            let [corr] = q.bulk(r, |rho, a| {
                let (g, l, s) = densities(v, hat, source, basis, i, rho, a)?;
                Ok([-(g + l) * w(rho) + dw(rho) * s])
            })?;
            let boundary = r.powf(-sigma) * phi[i];
            let correction = corr / den;
            Ok(BetaEntry {
                i: i + 1,
                mu,
                sigma,
                r,
                beta: boundary + correction,
                boundary,
                correction,
                r_independence: f64::NAN,
            })
        })
        .collect()
}

/// [`beta_coeffs`] at `R` with the `R/2` comparison filled in.
pub fn beta_table(
    v: &dyn Field,
    hat: &dyn Coefficients,
    source: Source<'_>,
    basis: &dyn AngularBasis,
    grid: GridSpec,
    which: &[usize],
    r: f64,
) -> Result<Vec<BetaEntry>> {
    let mut a = beta_coeffs(v, hat, source, basis, grid, which, r)?;
    let b = beta_coeffs(v, hat, source, basis, grid, which, 0.5 * r)?;
    for (x, y) in a.iter_mut().zip(&b) {
        x.r_independence = (x.beta - y.beta).abs();
    }
    Ok(a)
}

/// First index and multiplicity of the eigenvalue block whose exponent
/// matches `gamma` within `tol`.
pub fn identify_block(gamma: f64, basis: &dyn AngularBasis, tol: f64) -> Result<(usize, usize)> {
    let dim = basis.cone().dim;
    for j0 in 0..basis.len() {
        let s = exponents(basis.mu(j0), dim)?.sigma_plus;
        if (s - gamma).abs() < tol {
            let mu0 = basis.mu(j0);
            let m = (j0..basis.len())
                .take_while(|&k| (basis.mu(k) - mu0).abs() <= 1e-6 * mu0.abs().max(1.0))
                .count();
            return Ok((j0, m));
        }
    }
    Err(Error::Numerical(format!(
        "no cap exponent within {tol} of γ = {gamma}"
    )))
}

/// `Σβ_iψ_i` sampled on the cap.
#[derive(Clone, Debug, Serialize)]
pub struct LimitProfile {
    pub angles: Vec<f64>,
    pub values: Vec<f64>,
    /// `‖Σβ_iψ_i‖_{L²(C)}`.
    pub norm: f64,
}

/// Reconstructs the profile from `(zero-based index, β)` pairs at the Gauss
/// nodes of the cap.
pub fn limit_profile(
    betas: &[(usize, f64)],
    basis: &dyn AngularBasis,
    nodes: usize,
) -> LimitProfile {
    let cone = basis.cone();
    let rule = GaussRule::new(nodes.max(4));
    let mut angles = Vec::new();
    let mut values = Vec::new();
    let mut norm2 = 0.0;
    for (a, w) in rule.points(cone.lo, cone.hi) {
        let v: f64 = betas.iter().map(|&(i, b)| b * basis.eval(i, a).0).sum();
        norm2 += w * crate::geometry::sphere_weight(cone.dim, a) * v * v;
        angles.push(a);
        values.push(v);
    }
    LimitProfile {
        angles,
        values,
        norm: norm2.sqrt(),
    }
}

/// `L²(C)` distance between the normalized profile and the angular trace of a
/// blow-up snapshot (zero outside the snapshot's arc).
pub fn profile_distance(
    p: &LimitProfile,
    basis: &dyn AngularBasis,
    snap: &BlowupSnapshot,
) -> Result<f64> {
    let cone = basis.cone();
    let rule = GaussRule::new(p.angles.len());
    let trace = snap.trace(&p.angles)?;
    let mut d2 = 0.0;
    for ((k, (_, w)), t) in rule.points(cone.lo, cone.hi).enumerate().zip(&trace) {
        let a = p.angles[k];
        let diff = p.values[k] / p.norm - t;
        d2 += w * crate::geometry::sphere_weight(cone.dim, a) * diff * diff;
    }
    Ok(d2.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::CoefficientBundle;
    use crate::coefficients::PotentialSpec;
    use crate::field::{ClosedForm, FieldSpec, ModeTerm};
    use crate::spectral::solve_cap_eigen;

    fn grid() -> GridSpec {
        GridSpec::new(1e-6, 1.0, 4, 32)
    }

    #[test]
    fn pure_mode_projects_to_unit_vector() {
        let alpha = 2.0 / 3.0;
        let cone = ConeSection::sector(alpha);
        let basis = SectorModes { cone, count: 4 };
        let c = (2.0 / (alpha * PI)).sqrt();
        let v = ClosedForm::new(
            FieldSpec::ModalSum {
                terms: vec![ModeTerm { k: 2, c }],
            },
            cone,
        )
        .unwrap();
        let phi = phi_coeffs(&v, &basis, grid(), 0.3).unwrap();
        let g = 2.0 / alpha;
        for (i, p) in phi.iter().enumerate() {
            let want = if i == 1 { 0.3f64.powf(g) } else { 0.0 };
            assert!((p - want).abs() < 1e-12, "{i} {p}");
        }
        let t = beta_table(
            &v,
            &CoefficientBundle::trivial(2),
            None,
            &basis,
            grid(),
            &[0, 1, 2],
            0.5,
        )
        .unwrap();
        assert!((t[1].beta - 1.0).abs() < 1e-12 && t[0].beta.abs() < 1e-12);
        assert_eq!(identify_block(3.0, &basis, 0.05).unwrap(), (1, 1));
    }

    #[test]
    fn interpolated_basis_matches_hemisphere_mode() {
        let sys = solve_cap_eigen(ConeSection::cap(PI / 2.0), PotentialSpec::Zero, 2, 512).unwrap();
        let b = InterpolatedBasis::new(sys);
        let c = (3.0 / (2.0 * PI)).sqrt();
        let sign = b.eval(0, 0.3).0.signum();
        for a in [0.0, 0.4, 1.2, 1.5] {
            let (v, d) = b.eval(0, a);
            assert!((sign * v - c * a.cos()).abs() < 1e-4, "{a} {v}");
            assert!((sign * d + c * a.sin()).abs() < 1e-3, "{a} {d}");
        }
    }
}
