use super::{height, Setup};
use crate::coefficients::mu_field;
use crate::error::{Error, Result};
use crate::field::{domain::ScaledDomain, Field, FieldRef, Quadrature, RescaledField};
use crate::geometry::polar_point;
use serde::Serialize;
use std::sync::Arc;

/// `w^λ(x) = w(λx)/√H(λ)` on `Ω/λ`.
#[derive(Clone)]
pub struct BlowupSnapshot {
    pub lambda: f64,
    pub height: f64,
    pub field: RescaledField,
    pub domain: ScaledDomain<Arc<dyn crate::field::Domain>>,
    /// `∫_{C_λ} μ(λθ)(w^λ)² dσ`.
    pub cap_norm: f64,
}

/// Serializable summary of a snapshot.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BlowupSummary {
    pub lambda: f64,
    pub height: f64,
    pub cap_norm: f64,
}

impl BlowupSnapshot {
    pub fn summary(&self) -> BlowupSummary {
        BlowupSummary {
            lambda: self.lambda,
            height: self.height,
            cap_norm: self.cap_norm,
        }
    }

    /// `w^λ` on the unit sphere at the given meridian angles, zero where the
    /// angle lies outside `Ω/λ`.
    pub fn trace(&self, angles: &[f64]) -> Result<Vec<f64>> {
        use crate::field::Domain;
        let (lo, hi) = self.domain.arc(1.0)?;
        angles
            .iter()
            .map(|&a| {
                if a > lo && a < hi {
                    Ok(self.field.sample(1.0, a)?.value)
                } else {
                    Ok(0.0)
                }
            })
            .collect()
    }
}

/// Rescales at `λ` and measures the cap normalization.
pub fn blowup(s: &Setup, lambda: f64) -> Result<BlowupSnapshot> {
    let h = height(s, lambda)?;
    if !(h > 0.0) {
        return Err(Error::Degenerate(format!(
            "H({lambda:e}) = {h:e} is not positive"
        )));
    }
    let field = RescaledField {
        inner: s.field.clone(),
        lambda,
        scale: h.sqrt(),
    };
    let domain = ScaledDomain {
        inner: s.domain.clone(),
        lambda,
    };
    let q = Quadrature::new(&domain, s.grid)?;
    let n = s.dim();
    let [cap_norm] = q.sphere(1.0, |a| {
        let w = field.sample(1.0, a)?.value;
        Ok([mu_field(s.coeffs.as_ref(), &polar_point(n, lambda, a))? * w * w])
    })?;
    Ok(BlowupSnapshot {
        lambda,
        height: h,
        field,
        domain,
        cap_norm,
    })
}

/// `‖w^λ − target‖_{L²(B₁∖B_{1/2})}` over `Ω/λ`.
pub fn blowup_distance(snap: &BlowupSnapshot, target: &FieldRef, s: &Setup) -> Result<f64> {
    let q = Quadrature::new(&snap.domain, s.grid)?;
    let [d] = q.annulus(0.5, 1.0, |rho, a| {
        let x = snap.field.sample(rho, a)?.value - target.sample(rho, a)?.value;
        Ok([x * x])
    })?;
    Ok(d.sqrt())
}
