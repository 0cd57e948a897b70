//! Coefficient fields of the equation and their pushforwards under a change of
//! variables.
//!
//! The equation is `−div(A∇u) + b·∇u − V(x/|x|)|x|⁻²u = h u + f(x, u)`. Under
//! `u ↦ u∘M` the coefficients transform as
//!
//! * `Ã = |det J| J⁻¹ A(M) J⁻ᵀ`, `b̃ = |det J| J⁻¹ b(M)`, `f̃ = |det J| f(M, ·)`,
//! * `h̃ = |det J| h(M) + |det J|(V(M̂)/|M|² − V(ŷ)/|y|²) + (|det J| − 1)V(ŷ)/|y|²`,
//!
//! while the angular potential `V` keeps its form.

use crate::error::{domain, Error, Result};
use crate::geometry::{DiffMap, PsiMap};
use crate::numerics::fit::loglog_fit;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Evaluable coefficient data.
pub trait Coefficients: Send + Sync {
    fn dim(&self) -> usize;
    fn a(&self, y: &DVector<f64>) -> Result<DMatrix<f64>>;
    fn b(&self, y: &DVector<f64>) -> Result<DVector<f64>>;
    fn h(&self, y: &DVector<f64>) -> Result<f64>;
    /// Nonlinearity `f(y, s)`.
    fn f(&self, y: &DVector<f64>, s: f64) -> Result<f64>;
    /// Primitive `F(y, s) = ∫₀ˢ f(y, t) dt`.
    fn big_f(&self, y: &DVector<f64>, s: f64) -> Result<f64>;
    /// `V(y/|y|)`.
    fn potential(&self, y: &DVector<f64>) -> f64;
}

impl<T: Coefficients + ?Sized> Coefficients for Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn a(&self, y: &DVector<f64>) -> Result<DMatrix<f64>> {
        (**self).a(y)
    }
    fn b(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        (**self).b(y)
    }
    fn h(&self, y: &DVector<f64>) -> Result<f64> {
        (**self).h(y)
    }
    fn f(&self, y: &DVector<f64>, s: f64) -> Result<f64> {
        (**self).f(y, s)
    }
    fn big_f(&self, y: &DVector<f64>, s: f64) -> Result<f64> {
        (**self).big_f(y, s)
    }
    fn potential(&self, y: &DVector<f64>) -> f64 {
        (**self).potential(y)
    }
}

/// Principal part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatrixSpec {
    #[default]
    Identity,
    /// `A_ij = δ_ij + eps (x_i + x_j)`.
    Linear { eps: f64 },
}

/// A power-law magnitude `amp |x|^order`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSpec {
    pub order: f64,
    pub amp: f64,
}

impl PowerSpec {
    pub fn zero() -> Self {
        PowerSpec {
            order: 0.0,
            amp: 0.0,
        }
    }
}

fn zero_power() -> PowerSpec {
    PowerSpec::zero()
}

/// Angular potential on the sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSpec {
    #[default]
    Zero,
    Constant {
        c: f64,
    },
    /// `V = c cos φ` with `φ` the colatitude.
    Cosine {
        c: f64,
    },
}

impl PotentialSpec {
    /// Value at the unit direction with last coordinate `cos_angle`.
    pub fn at_cos(&self, cos_angle: f64) -> f64 {
        match *self {
            PotentialSpec::Zero => 0.0,
            PotentialSpec::Constant { c } => c,
            PotentialSpec::Cosine { c } => c * cos_angle,
        }
    }

    /// Value at colatitude `phi`.
    pub fn at_angle(&self, phi: f64) -> f64 {
        self.at_cos(phi.cos())
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            PotentialSpec::Zero => true,
            PotentialSpec::Constant { c } | PotentialSpec::Cosine { c } => c == 0.0,
        }
    }
}

/// `f(x, s) = c |s|^{p−2} s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearitySpec {
    pub c: f64,
    pub p: f64,
}

impl Default for NonlinearitySpec {
    fn default() -> Self {
        NonlinearitySpec { c: 0.0, p: 2.0 }
    }
}

/// Closed-form coefficients with the smallness orders built in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientBundle {
    #[serde(default, rename = "A")]
    pub a: MatrixSpec,
    #[serde(default = "zero_power")]
    pub b: PowerSpec,
    #[serde(default = "zero_power")]
    pub h: PowerSpec,
    #[serde(default, rename = "V")]
    pub v: PotentialSpec,
    #[serde(default)]
    pub f: NonlinearitySpec,
    #[serde(skip, default = "default_dim")]
    pub dim: usize,
}

fn default_dim() -> usize {
    2
}

impl CoefficientBundle {
    /// `A = Id`, everything else zero.
    pub fn trivial(dim: usize) -> Self {
        CoefficientBundle {
            a: MatrixSpec::Identity,
            b: PowerSpec::zero(),
            h: PowerSpec::zero(),
            v: PotentialSpec::Zero,
            f: NonlinearitySpec::default(),
            dim,
        }
    }

    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = dim;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.dim == 2 || self.dim == 3) {
            return bad(format!("dimension {} unsupported", self.dim));
        }
        if self.dim == 2 && !self.v.is_zero() {
            return bad("the angular potential must vanish in the plane".into());
        }
        if self.b.amp != 0.0 && !(self.b.order > -1.0) {
            return bad(format!("drift order {} must exceed -1", self.b.order));
        }
        if self.h.amp != 0.0 && !(self.h.order > -2.0) {
            return bad(format!("potential order {} must exceed -2", self.h.order));
        }
        if self.f.c != 0.0 {
            let crit = if self.dim == 3 { 6.0 } else { f64::INFINITY };
            if !(self.f.p >= 2.0 && self.f.p <= crit) {
                return bad(format!("exponent p = {} outside [2, {crit}]", self.f.p));
            }
        }
        if let MatrixSpec::Linear { eps } = self.a {
            if !eps.is_finite() {
                return bad("non-finite matrix perturbation".into());
            }
        }
        Ok(())
    }

    /// Radius below which the principal part stays uniformly elliptic with
    /// constant at least 1/2.
    pub fn elliptic_radius(&self) -> f64 {
        match self.a {
            MatrixSpec::Identity => f64::INFINITY,
            // ‖eps(x⊗1 + 1⊗x)‖ ≤ 2|eps|√N|x|.
            MatrixSpec::Linear { eps } => {
                if eps == 0.0 {
                    f64::INFINITY
                } else {
                    0.25 / (eps.abs() * (self.dim as f64).sqrt())
                }
            }
        }
    }
}

fn nonzero(y: &DVector<f64>) -> Result<f64> {
    let r = y.norm();
    if r > 0.0 {
        Ok(r)
    } else {
        domain("coefficient is singular at the vertex")
    }
}

impl Coefficients for CoefficientBundle {
    fn dim(&self) -> usize {
        self.dim
    }

    fn a(&self, y: &DVector<f64>) -> Result<DMatrix<f64>> {
        let n = y.len();
        let mut m = DMatrix::identity(n, n);
        if let MatrixSpec::Linear { eps } = self.a {
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] += eps * (y[i] + y[j]);
                }
            }
        }
        Ok(m)
    }

    fn b(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        let n = y.len();
        let mut v = DVector::zeros(n);
        if self.b.amp != 0.0 {
            v[n - 1] = self.b.amp * nonzero(y)?.powf(self.b.order);
        }
        Ok(v)
    }

    fn h(&self, y: &DVector<f64>) -> Result<f64> {
        if self.h.amp == 0.0 {
            return Ok(0.0);
        }
        Ok(self.h.amp * nonzero(y)?.powf(self.h.order))
    }

    fn f(&self, _y: &DVector<f64>, s: f64) -> Result<f64> {
        if self.f.c == 0.0 || s == 0.0 {
            return Ok(0.0);
        }
        Ok(self.f.c * s.abs().powf(self.f.p - 2.0) * s)
    }

    fn big_f(&self, _y: &DVector<f64>, s: f64) -> Result<f64> {
        if self.f.c == 0.0 {
            return Ok(0.0);
        }
        Ok(self.f.c * s.abs().powf(self.f.p) / self.f.p)
    }

    fn potential(&self, y: &DVector<f64>) -> f64 {
        let r = y.norm();
        if r == 0.0 {
            return self.v.at_cos(1.0);
        }
        self.v.at_cos(y[y.len() - 1] / r)
    }
}

/// Coefficients pushed forward under `u ↦ u∘M`.
#[derive(Clone, Debug)]
pub struct Pushforward<M, C> {
    pub map: M,
    pub inner: C,
}

/// Coefficients of the equation satisfied by `u∘Ψ`.
pub type TransformedBundle = Pushforward<PsiMap, CoefficientBundle>;

/// Builds `Ã, b̃, h̃, f̃` for the map `Ψ` with parameters `C₀`, `δ`.
pub fn transform_bundle(
    bundle: CoefficientBundle,
    c0: f64,
    delta: f64,
) -> Result<TransformedBundle> {
    bundle.validate()?;
    Ok(Pushforward {
        map: PsiMap {
            dim: bundle.dim,
            c0,
            delta,
        },
        inner: bundle,
    })
}

impl<M: DiffMap, C: Coefficients> Pushforward<M, C> {
    fn parts(&self, y: &DVector<f64>) -> Result<(crate::geometry::MapEvaluation, DMatrix<f64>)> {
        let e = self.map.eval(y)?;
        let ji = e
            .jacobian
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Numerical("singular Jacobian in pushforward".into()))?;
        Ok((e, ji))
    }
}

impl<M: DiffMap, C: Coefficients> Coefficients for Pushforward<M, C> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn a(&self, y: &DVector<f64>) -> Result<DMatrix<f64>> {
        let (e, ji) = self.parts(y)?;
        let a = self.inner.a(&e.value)?;
        let m = &ji * a * ji.transpose() * e.det.abs();
        Ok((&m + m.transpose()) * 0.5)
    }

    fn b(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        nonzero(y)?;
        let (e, ji) = self.parts(y)?;
        Ok(ji * self.inner.b(&e.value)? * e.det.abs())
    }

    fn h(&self, y: &DVector<f64>) -> Result<f64> {
        let r = nonzero(y)?;
        let e = self.map.eval(y)?;
        let d = e.det.abs();
        let rm = e.value.norm();
        let vy = self.inner.potential(y) / (r * r);
        let vm = self.inner.potential(&e.value) / (rm * rm);
        Ok(d * self.inner.h(&e.value)? + d * (vm - vy) + (d - 1.0) * vy)
    }

    fn f(&self, y: &DVector<f64>, s: f64) -> Result<f64> {
        let e = self.map.eval(y)?;
        Ok(e.det.abs() * self.inner.f(&e.value, s)?)
    }

    fn big_f(&self, y: &DVector<f64>, s: f64) -> Result<f64> {
        let e = self.map.eval(y)?;
        Ok(e.det.abs() * self.inner.big_f(&e.value, s)?)
    }

    fn potential(&self, y: &DVector<f64>) -> f64 {
        self.inner.potential(y)
    }
}

/// `μ(y) = |y|⁻² Ã(y)y·y`.
pub fn mu_field(c: &dyn Coefficients, y: &DVector<f64>) -> Result<f64> {
    let r = nonzero(y)?;
    let a = c.a(y)?;
    Ok((a * y).dot(y) / (r * r))
}

/// `β(y) = Ã(y)y / μ(y)`.
pub fn beta_field(c: &dyn Coefficients, y: &DVector<f64>) -> Result<DVector<f64>> {
    let mu = mu_field(c, y)?;
    Ok(c.a(y)? * y / mu)
}

/// `Jac β` by central differences with step `|y|·1e−5`.
pub fn jac_beta(c: &dyn Coefficients, y: &DVector<f64>) -> Result<DMatrix<f64>> {
    let n = y.len();
    let h = nonzero(y)? * 1e-5;
    let mut j = DMatrix::zeros(n, n);
    for k in 0..n {
        let mut yp = y.clone();
        let mut ym = y.clone();
        yp[k] += h;
        ym[k] -= h;
        let col = (beta_field(c, &yp)? - beta_field(c, &ym)?) / (2.0 * h);
        j.set_column(k, &col);
    }
    Ok(j)
}

/// `div β`.
pub fn div_beta(c: &dyn Coefficients, y: &DVector<f64>) -> Result<f64> {
    Ok(jac_beta(c, y)?.trace())
}

/// Outcome of a power-law order check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderReport {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub rms: f64,
    pub expected: f64,
    pub margin: f64,
    pub pass: bool,
}

/// Fits `log|field(r)|` against `log r` and checks `slope ≥ expected − margin`.
pub fn order_audit<F>(
    mut field: F,
    expected: f64,
    radii: &[f64],
    margin: f64,
) -> Result<OrderReport>
where
    F: FnMut(f64) -> Result<f64>,
{
    if radii.len() < 8 {
        return domain("an order audit needs at least eight radii");
    }
    let vals: Vec<f64> = radii
        .iter()
        .map(|&r| field(r).map(f64::abs))
        .collect::<Result<_>>()?;
    if vals.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::Numerical(
            "order audit needs finite nonzero samples".into(),
        ));
    }
    let fit = loglog_fit(radii, &vals);
    Ok(OrderReport {
        slope: fit.slope,
        intercept: fit.intercept,
        r2: fit.r2,
        rms: fit.rms,
        expected,
        margin,
        pass: fit.slope >= expected - margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::logspace;

    fn ray(r: f64, dir: &[f64]) -> DVector<f64> {
        let d = DVector::from_vec(dir.to_vec());
        &d / d.norm() * r
    }

    #[test]
    fn identity_limit_is_trivial() {
        let t = transform_bundle(CoefficientBundle::trivial(2), 0.0, 0.5).unwrap();
        let y = ray(0.1, &[0.3, 1.0]);
        assert!((t.a(&y).unwrap() - DMatrix::identity(2, 2)).norm() < 1e-15);
        assert_eq!(t.h(&y).unwrap(), 0.0);
    }

    #[test]
    fn atilde_decays_like_delta() {
        let t = transform_bundle(CoefficientBundle::trivial(2), 1.0, 0.5).unwrap();
        let radii = logspace(1e-6, 1e-2, 12);
        let rep = order_audit(
            |r| Ok((t.a(&ray(r, &[0.2, 1.0]))? - DMatrix::identity(2, 2)).norm()),
            0.5,
            &radii,
            0.05,
        )
        .unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn mu_matches_leading_closed_form() {
        let t = transform_bundle(CoefficientBundle::trivial(2), 1.0, 0.5).unwrap();
        for s in [1e-6, 1e-4, 1e-2] {
            let mu = mu_field(&t, &ray(s, &[0.0, 1.0])).unwrap();
            let lead = 1.0 / (1.0 + 3.0 * s.sqrt());
            assert!((mu - lead).abs() < 5.0 * s, "{s}: {mu} vs {lead}");
        }
    }

    #[test]
    fn beta_of_identity() {
        let b = CoefficientBundle::trivial(3).with_dim(3);
        let y = ray(0.2, &[0.1, 0.2, 1.0]);
        assert!((beta_field(&b, &y).unwrap() - &y).norm() < 1e-15);
        assert!((div_beta(&b, &y).unwrap() - 3.0).abs() < 1e-8);
    }

    #[test]
    fn htilde_of_lipschitz_potential() {
        let mut b = CoefficientBundle::trivial(3);
        b.v = PotentialSpec::Cosine { c: 0.7 };
        let t = transform_bundle(b, 1.0, 0.5).unwrap();
        for r in logspace(1e-6, 1e-2, 9) {
            let h = t.h(&ray(r, &[0.3, 0.1, 1.0])).unwrap();
            assert!((h * r.powf(1.5)).abs() < 50.0);
        }
    }

    #[test]
    fn drift_order_audit() {
        let mut b = CoefficientBundle::trivial(2);
        b.b = PowerSpec {
            order: -0.5,
            amp: 1.0,
        };
        let t = transform_bundle(b, 1.0, 0.5).unwrap();
        let rep = order_audit(
            |r| Ok(t.b(&ray(r, &[0.4, 1.0]))?.norm()),
            -0.5,
            &logspace(1e-6, 1e-2, 10),
            0.05,
        )
        .unwrap();
        assert!(rep.pass);
        assert!(t.b(&DVector::zeros(2)).is_err());
    }

    #[test]
    fn plane_rejects_potential() {
        let mut b = CoefficientBundle::trivial(2);
        b.v = PotentialSpec::Constant { c: 1.0 };
        assert!(b.validate().is_err());
    }

    #[test]
    fn serde_shape() {
        let j = r#"{"A":{"kind":"linear","eps":0.1},"b":{"order":-0.5,"amp":1},"V":{"kind":"cosine","c":0.5},"f":{"c":1,"p":4}}"#;
        let b: CoefficientBundle = serde_json::from_str(j).unwrap();
        assert_eq!(b.a, MatrixSpec::Linear { eps: 0.1 });
        assert_eq!(b.h, PowerSpec::zero());
    }
}
