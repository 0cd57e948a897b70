use crate::coefficients::{CoefficientBundle, Coefficients, MatrixSpec};
use crate::error::{Error, Result};
use crate::field::{Field, Source};
use crate::geometry::{polar_point, sphere_weight, ConeSection};
use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

/// Individual integrals of the identity for `β(y) = y` on a straight cone.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct PohozaevTerms {
    /// `r∫_{S_r}|∇w|²`
    pub sphere_gradient: f64,
    /// `−2r∫_{S_r}(∂_r w)²`
    pub sphere_normal: f64,
    /// `−∫_{Γ_r}|∇w|²(y·ν̃)`
    pub lateral: f64,
    /// `(N−2)∫|∇w|²`
    pub bulk_gradient: f64,
    /// `−2∫(y·∇w)(b·∇w)`
    pub drift: f64,
    /// `−(N−2)∫V|y|⁻²w² + r∫_{S_r}V|y|⁻²w²`
    pub potential: f64,
    /// `2∫(y·∇w)hw`
    pub zeroth: f64,
    /// `−2∫(∇_yF·y + N F) + 2r∫_{S_r}F`
    pub nonlinear: f64,
    /// `2∫(y·∇w)g` for a manufactured source `g`
    pub source: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PohozaevReport {
    pub r: f64,
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// `residual / max|term|`
    pub relative: f64,
    pub terms: PohozaevTerms,
}

fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    (0..=n)
        .map(|i| if i == 0 || i == n { 0.5 * h } else { h })
        .collect()
}

/// Evaluates both sides of the Pohozaev identity on `Ω_r` of a straight cone
/// with `A = Id`, using the composite trapezoid rule on an `n × n` grid in
/// `(ρ, angle)`.
pub fn pohozaev_residual(
    w: &dyn Field,
    bundle: &CoefficientBundle,
    cone: ConeSection,
    source: Source<'_>,
    r: f64,
    n: usize,
) -> Result<PohozaevReport> {
    if bundle.a != MatrixSpec::Identity {
        return Err(Error::Unsupported(
            "the Pohozaev check needs A = Id on a straight cone".into(),
        ));
    }
    if n < 8 || !(r > 0.0) {
        return Err(Error::Resolution(format!("Pohozaev grid n = {n}, r = {r}")));
    }
    let dim = cone.dim;
    let nf = dim as f64;
    let (hr, ha) = (r / n as f64, cone.width() / n as f64);
    let wr = trapezoid_weights(n, hr);
    let wa = trapezoid_weights(n, ha);
    let angle = |j: usize| cone.lo + j as f64 * ha;

    // Bulk sums: |∇w|², (y·∇w)(b·∇w), V w²/|y|², (y·∇w)h w, ∇_yF·y + N F, (y·∇w) g.
    let rows: Vec<[f64; 6]> = (1..=n)
        .into_par_iter()
        .map(|i| {
            let rho = i as f64 * hr;
            let mut acc = [0.0; 6];
            for j in 0..=n {
                let a = angle(j);
                let y = polar_point(dim, rho, a);
                let (v, g) = w.eval_point(&y)?;
                let yg = y.dot(&g);
                let big_f = bundle.big_f(&y, v)?;
                let eps = 1e-4 * rho;
                let mut grad_f_y = 0.0;
                for k in 0..dim {
                    let mut yp = y.clone();
                    let mut ym = y.clone();
                    yp[k] += eps;
                    ym[k] -= eps;
                    grad_f_y +=
                        y[k] * (bundle.big_f(&yp, v)? - bundle.big_f(&ym, v)?) / (2.0 * eps);
                }
                let src = match source {
                    Some(f) => f(&y)?,
                    None => 0.0,
                };
                let vals = [
                    g.norm_squared(),
                    yg * bundle.b(&y)?.dot(&g),
                    bundle.potential(&y) / (rho * rho) * v * v,
                    yg * bundle.h(&y)? * v,
                    grad_f_y + nf * big_f,
                    yg * src,
                ];
                let wt = wr[i] * wa[j] * rho.powi(dim as i32 - 1) * sphere_weight(dim, a);
                for k in 0..6 {
                    acc[k] += wt * vals[k];
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut bulk = [0.0; 6];
    for row in &rows {
        for k in 0..6 {
            bulk[k] += row[k];
        }
    }

    // Sphere sums: |∇w|², (∂_r w)², V w²/r², F.
    let mut sph = [0.0; 4];
    let ds = r.powi(dim as i32 - 1);
    for j in 0..=n {
        let a = angle(j);
        let y = polar_point(dim, r, a);
        let (v, g) = w.eval_point(&y)?;
        let dr = g.dot(&y) / r;
        let vals = [
            g.norm_squared(),
            dr * dr,
            bundle.potential(&y) / (r * r) * v * v,
            bundle.big_f(&y, v)?,
        ];
        let wt = wa[j] * ds * sphere_weight(dim, a);
        for k in 0..4 {
            sph[k] += wt * vals[k];
        }
    }

    // Lateral boundary: |∇w|² from one-sided differences across the ray,
    // weighted by y·ν̃ (identically zero on a straight cone).
    let mut lateral = 0.0;
    let edges: Vec<(f64, f64)> = if dim == 2 {
        vec![(cone.lo, -1.0), (cone.hi, 1.0)]
    } else {
        vec![(cone.hi, 1.0)]
    };
    for &(edge, side) in &edges {
        for i in 1..=n {
            let rho = i as f64 * hr;
            let at = |k: f64| -> Result<f64> { Ok(w.sample(rho, edge - side * k * ha)?.value) };
            let dn = side * (3.0 * at(0.0)? - 4.0 * at(1.0)? + at(2.0)?) / (2.0 * ha * rho);
            let y = polar_point(dim, rho, edge);
            let nu = if dim == 2 {
                DVector::from_vec(vec![-side * edge.sin(), side * edge.cos()])
            } else {
                DVector::from_vec(vec![edge.cos(), 0.0, -edge.sin()])
            };
            let circ = if dim == 3 {
                2.0 * std::f64::consts::PI * rho * edge.sin()
            } else {
                1.0
            };
            lateral += wr[i] * circ * dn * dn * y.dot(&nu);
        }
    }

    let terms = PohozaevTerms {
        sphere_gradient: r * sph[0],
        sphere_normal: -2.0 * r * sph[1],
        lateral: -lateral,
        bulk_gradient: (nf - 2.0) * bulk[0],
        drift: -2.0 * bulk[1],
        potential: -(nf - 2.0) * bulk[2] + r * sph[2],
        zeroth: 2.0 * bulk[3],
        nonlinear: -2.0 * bulk[4] + 2.0 * r * sph[3],
        source: 2.0 * bulk[5],
    };
    let t = terms;
    let lhs = t.sphere_gradient + t.sphere_normal + t.lateral;
    let rhs = t.bulk_gradient + t.drift + t.potential + t.zeroth + t.nonlinear + t.source;
    let scale = [
        t.sphere_gradient,
        t.sphere_normal,
        t.bulk_gradient,
        t.drift,
        t.potential,
        t.zeroth,
        t.nonlinear,
        t.source,
    ]
    .iter()
    .fold(0.0f64, |m, v| m.max(v.abs()))
    .max(f64::MIN_POSITIVE);
    let residual = lhs - rhs;
    Ok(PohozaevReport {
        r,
        n,
        lhs,
        rhs,
        residual,
        relative: residual.abs() / scale,
        terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{NonlinearitySpec, PotentialSpec};
    use crate::field::{ClosedForm, FieldRef, FieldSpec, ManufacturedProblem};
    use std::sync::Arc;

    #[test]
    fn zonal_mode_with_potential_and_nonlinearity() {
        let c = 0.5f64;
        let sigma = -0.5 + (0.25 + 2.0 - c).sqrt();
        let cap = ConeSection::cap(std::f64::consts::FRAC_PI_2);
        let w: FieldRef =
            Arc::new(ClosedForm::new(FieldSpec::Zonal { sigma, c: 1.0 }, cap).unwrap());
        let mut bundle = CoefficientBundle::trivial(3);
        bundle.v = PotentialSpec::Constant { c };
        bundle.f = NonlinearitySpec { c: 1.0, p: 4.0 };
        let mp = ManufacturedProblem::new(w.clone(), Arc::new(bundle.clone()));
        let src = |y: &DVector<f64>| mp.source(y);
        let a = pohozaev_residual(w.as_ref(), &bundle, cap, Some(&src), 1.0, 128).unwrap();
        let b = pohozaev_residual(w.as_ref(), &bundle, cap, Some(&src), 1.0, 256).unwrap();
        assert!(b.relative < 1e-3, "{b:?}");
        let ratio = a.residual.abs() / b.residual.abs();
        assert!(ratio > 3.5, "ratio {ratio}");
    }
}
