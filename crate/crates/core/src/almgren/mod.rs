//! Height, energy and frequency of a field near the vertex, the derivative
//! identity, growth bounds, blow-ups and the Pohozaev identity.

mod blowup;
mod pohozaev;

pub use blowup::{blowup, blowup_distance, BlowupSnapshot, BlowupSummary};
pub use pohozaev::{pohozaev_residual, PohozaevReport, PohozaevTerms};

use crate::coefficients::{mu_field, Coefficients};
use crate::error::{Error, Result};
use crate::field::{Domain, FieldRef, GridSpec, Quadrature};
use crate::geometry::polar_point;
use crate::numerics::fit::{least_squares, linear_fit, loglog_fit, r_squared, LineFit};
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

/// A field together with the coefficients and domain it lives on.
#[derive(Clone)]
pub struct Setup {
    pub field: FieldRef,
    pub coeffs: Arc<dyn Coefficients>,
    pub domain: Arc<dyn Domain>,
    pub grid: GridSpec,
}

impl Setup {
    pub fn new(
        field: FieldRef,
        coeffs: Arc<dyn Coefficients>,
        domain: Arc<dyn Domain>,
        grid: GridSpec,
    ) -> Result<Self> {
        grid.validate()?;
        let n = domain.dim();
        if field.dim() != n || coeffs.dim() != n {
            return Err(Error::Config(format!(
                "dimensions disagree: field {}, coefficients {}, domain {n}",
                field.dim(),
                coeffs.dim()
            )));
        }
        Ok(Setup {
            field,
            coeffs,
            domain,
            grid,
        })
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn quadrature(&self) -> Result<Quadrature<'_>> {
        Quadrature::new(self.domain.as_ref(), self.grid)
    }
}

/// `H(r) = r^{1−N} ∫_{S_r} μ w² dσ`.
pub fn height(s: &Setup, r: f64) -> Result<f64> {
    let q = s.quadrature()?;
    let n = s.dim();
    let [h] = q.sphere(r, |a| {
        let y = polar_point(n, r, a);
        let w = s.field.sample(r, a)?.value;
        Ok([mu_field(s.coeffs.as_ref(), &y)? * w * w])
    })?;
    Ok(h)
}

/// `2 r^{1−N} ∫_{S_r} w Ã∇w·ν dσ`, the flux form of `H′`.
pub fn height_flux(s: &Setup, r: f64) -> Result<f64> {
    let q = s.quadrature()?;
    let n = s.dim();
    let [h] = q.sphere(r, |a| {
        let y = polar_point(n, r, a);
        let (w, g) = s.field.eval_point(&y)?;
        let flux = s.coeffs.a(&y)? * g;
        Ok([2.0 * w * flux.dot(&y) / r])
    })?;
    Ok(h)
}

/// The five integrals making up `D(r)`, each already scaled by `r^{2−N}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct EnergyTerms {
    /// `Ã∇w·∇w`
    pub gradient: f64,
    /// `b̃·∇w w`
    pub drift: f64,
    /// `−V|y|⁻²w²`
    pub potential: f64,
    /// `−h̃w²`
    pub zeroth: f64,
    /// `−f̃(y,w)w`
    pub nonlinear: f64,
}

impl EnergyTerms {
    pub fn total(&self) -> f64 {
        self.gradient + self.drift + self.potential + self.zeroth + self.nonlinear
    }

    fn from_array(v: [f64; 5], scale: f64) -> Self {
        EnergyTerms {
            gradient: v[0] * scale,
            drift: v[1] * scale,
            potential: v[2] * scale,
            zeroth: v[3] * scale,
            nonlinear: v[4] * scale,
        }
    }
}

fn energy_integrand(s: &Setup, rho: f64, a: f64) -> Result<[f64; 5]> {
    let n = s.dim();
    let y = polar_point(n, rho, a);
    let (w, g) = s.field.eval_point(&y)?;
    let c = s.coeffs.as_ref();
    let pot = if n == 2 {
        0.0
    } else {
        -c.potential(&y) / (rho * rho) * w * w
    };
    Ok([
        (c.a(&y)? * &g).dot(&g),
        c.b(&y)?.dot(&g) * w,
        pot,
        -c.h(&y)? * w * w,
        -c.f(&y, w)? * w,
    ])
}

/// `D(r)` term by term at each of the ascending `radii`.
pub fn energy(s: &Setup, radii: &[f64]) -> Result<Vec<EnergyTerms>> {
    let q = s.quadrature()?;
    let n = s.dim() as i32;
    let bulk = q.bulk_cumulative(radii, |rho, a| energy_integrand(s, rho, a))?;
    Ok(radii
        .iter()
        .zip(&bulk.values)
        .map(|(r, v)| EnergyTerms::from_array(*v, r.powi(2 - n)))
        .collect())
}

/// Shape of the correction in `N(r) = γ + correction`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum TailModel {
    Power { exponent: f64 },
    InverseLog,
}

/// Extrapolated `lim N(r)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GammaEstimate {
    pub value: f64,
    pub uncertainty: f64,
    pub model: TailModel,
}

fn fit_tail(r: &[f64], n: &[f64]) -> (f64, TailModel, f64) {
    let ones = vec![1.0; r.len()];
    let mut best = {
        let col: Vec<f64> = r.iter().map(|x| 1.0 / x.ln()).collect();
        let (c, ssr) = least_squares(&[ones.clone(), col], n);
        (c[0], TailModel::InverseLog, ssr)
    };
    for k in 1..=50 {
        let p = 0.05 * k as f64;
        let col: Vec<f64> = r.iter().map(|x| x.powf(p)).collect();
        let (c, ssr) = least_squares(&[ones.clone(), col], n);
        if ssr < best.2 {
            best = (c[0], TailModel::Power { exponent: p }, ssr);
        }
    }
    best
}

/// Fits `γ + c r^p` (p scanned over `(0, 2.5]`) and `γ + c/log r` on the
/// smallest decade of radii, keeping the model with the smaller residual.
/// The uncertainty is the change against the same model on the smallest
/// half-decade.
pub fn estimate_gamma(radii: &[f64], freq: &[f64]) -> Result<GammaEstimate> {
    let lo = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let pick = |span: f64| -> (Vec<f64>, Vec<f64>) {
        radii
            .iter()
            .zip(freq)
            .filter(|(r, _)| **r <= lo * span * (1.0 + 1e-12))
            .map(|(r, n)| (*r, *n))
            .unzip()
    };
    let (r1, n1) = pick(10.0);
    if r1.len() < 4 {
        return Err(Error::Resolution(
            "γ extraction needs four radii in the last decade".into(),
        ));
    }
    if n1
        .iter()
        .all(|v| (v - n1[0]).abs() <= 1e-13 * v.abs().max(1.0))
    {
        return Ok(GammaEstimate {
            value: n1[0],
            uncertainty: 0.0,
            model: TailModel::Power { exponent: 0.0 },
        });
    }
    let (value, model, _) = fit_tail(&r1, &n1);
    let (r2, n2) = pick(10f64.sqrt());
    let half = if r2.len() >= 3 {
        let ones = vec![1.0; r2.len()];
        let col: Vec<f64> = match model {
            TailModel::Power { exponent } => r2.iter().map(|x| x.powf(exponent)).collect(),
            TailModel::InverseLog => r2.iter().map(|x| 1.0 / x.ln()).collect(),
        };
        least_squares(&[ones, col], &n2).0[0]
    } else {
        n1[0]
    };
    Ok(GammaEstimate {
        value,
        uncertainty: (value - half).abs(),
        model,
    })
}

/// Per-radius samples of the frequency function and its diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct FrequencyTrace {
    pub dim: usize,
    pub radii: Vec<f64>,
    pub h: Vec<f64>,
    pub d: Vec<f64>,
    pub n: Vec<f64>,
    pub terms: Vec<EnergyTerms>,
    /// `dH/d log r` by five-point differences.
    pub dh_dlogr: Vec<f64>,
    /// `(rH′ − 2D)/H`.
    pub residual: Vec<f64>,
    /// `(rH′_flux − 2D)/H` with the flux form of `H′`.
    pub flux_residual: Vec<f64>,
    /// `H(2r)/H(r)`, `NaN` where `2r` is off the grid.
    pub doubling: Vec<f64>,
    pub gamma: GammaEstimate,
}

/// Step in `log r` of the `H′` stencil.
pub const LOG_STEP: f64 = 1e-3;

/// Builds the trace on ascending `radii`.
pub fn frequency_trace(s: &Setup, radii: &[f64]) -> Result<FrequencyTrace> {
    if radii.len() < 4 {
        return Err(Error::Resolution(
            "a frequency trace needs at least four radii".into(),
        ));
    }
    let terms = energy(s, radii)?;
    let r_top = s.grid.r_max;
    let per: Vec<(f64, f64, f64, f64)> = radii
        .par_iter()
        .map(|&r| {
            let h = height(s, r)?;
            if !(h > 0.0) {
                return Err(Error::Degenerate(format!(
                    "H({r:e}) = {h:e} is not positive"
                )));
            }
            let hs: Vec<f64> = [-2.0, -1.0, 1.0, 2.0]
                .iter()
                .map(|k| height(s, r * (k * LOG_STEP).exp()))
                .collect::<Result<_>>()?;
            let dh = (hs[0] - 8.0 * hs[1] + 8.0 * hs[2] - hs[3]) / (12.0 * LOG_STEP);
            let flux = r * height_flux(s, r)?;
            let dbl = if 2.0 * r <= r_top * (1.0 + 1e-12) {
                height(s, 2.0 * r)? / h
            } else {
                f64::NAN
            };
            Ok((h, dh, flux, dbl))
        })
        .collect::<Result<_>>()?;
    let h: Vec<f64> = per.iter().map(|p| p.0).collect();
    let d: Vec<f64> = terms.iter().map(EnergyTerms::total).collect();
    let n: Vec<f64> = d.iter().zip(&h).map(|(d, h)| d / h).collect();
    let dh: Vec<f64> = per.iter().map(|p| p.1).collect();
    let residual = (0..radii.len())
        .map(|i| (dh[i] - 2.0 * d[i]) / h[i])
        .collect();
    let flux_residual = (0..radii.len())
        .map(|i| (per[i].2 - 2.0 * d[i]) / h[i])
        .collect();
    let gamma = estimate_gamma(radii, &n)?;
    Ok(FrequencyTrace {
        dim: s.dim(),
        radii: radii.to_vec(),
        h,
        d,
        n,
        terms,
        dh_dlogr: dh,
        residual,
        flux_residual,
        doubling: per.iter().map(|p| p.3).collect(),
        gamma,
    })
}

/// Summary of `H′ − 2D/r` relative to `H/r`.
#[derive(Clone, Debug, Serialize)]
pub struct DerivativeReport {
    pub max_abs: f64,
    /// Slope of `log|residual|` against `log r`; `None` when the residual is
    /// at rounding level everywhere.
    pub fit: Option<LineFit>,
}

pub fn derivative_identity_residual(t: &FrequencyTrace) -> Result<DerivativeReport> {
    if t.radii.len() < 3 {
        return Err(Error::Resolution(
            "the derivative identity needs three radii".into(),
        ));
    }
    let max_abs = t.residual.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let fit = if max_abs > 1e-9 {
        Some(loglog_fit(&t.radii, &t.residual))
    } else {
        None
    };
    Ok(DerivativeReport { max_abs, fit })
}

/// Places where `N` decreases with increasing radius.
#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    /// Number of consecutive radius pairs with `N(r_{i+1}) < N(r_i)`.
    pub violations: usize,
    /// Largest drop `N(r_i) − N(r_{i+1})`, zero if none.
    pub max_drop: f64,
    /// Radius at which the largest drop starts.
    pub worst_radius: Option<f64>,
}

/// Drops smaller than `tol` are ignored. Perturbed problems need not have a
/// monotone frequency, so this is a report rather than a check.
pub fn monotonicity(t: &FrequencyTrace, tol: f64) -> MonotonicityReport {
    let mut rep = MonotonicityReport {
        violations: 0,
        max_drop: 0.0,
        worst_radius: None,
    };
    for i in 1..t.n.len() {
        let drop = t.n[i - 1] - t.n[i];
        if drop > tol {
            rep.violations += 1;
            if drop > rep.max_drop {
                rep.max_drop = drop;
                rep.worst_radius = Some(t.radii[i - 1]);
            }
        }
    }
    rep
}

/// Tail behaviour of `λ^{−2γ}H(λ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthClass {
    PositiveFiniteLimit,
    DivergentLog2,
    DivergentPower,
    Vanishing,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub gamma: f64,
    /// `sup H(r)/r^{2γ}` over the trace.
    pub sup_ratio: f64,
    /// `(max − min)/mean` of `H/r^{2γ}` over the last two decades.
    pub variation: f64,
    /// `sup H(2r)/H(r)`.
    pub doubling_sup: f64,
    /// Largest `|H(2r)/H(r) / 2^{2γ} − 1|` over the last two decades.
    pub doubling_deviation: f64,
    /// `R²` of `λ^{−2γ}H(λ) ≈ c·log²λ` over the last two decades.
    pub log2_r2: f64,
    /// Slope of `log(λ^{−2γ}H)` against `log λ` over the last two decades.
    pub power_slope: f64,
    pub class: GrowthClass,
}

/// Least-squares fit `λ^{−2γ}H(λ) ≈ c·log²λ` through the origin.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LogSquareFit {
    pub c: f64,
    pub r2: f64,
    pub points: usize,
}

/// [`LogSquareFit`] over the trace radii in `[lo, hi]`.
pub fn log_square_fit(t: &FrequencyTrace, gamma: f64, lo: f64, hi: f64) -> Result<LogSquareFit> {
    let (x, y): (Vec<f64>, Vec<f64>) = t
        .radii
        .iter()
        .zip(&t.h)
        .filter(|(r, _)| **r >= lo * (1.0 - 1e-12) && **r <= hi * (1.0 + 1e-12))
        .map(|(r, h)| (r.ln().powi(2), h / r.powf(2.0 * gamma)))
        .unzip();
    if x.len() < 3 {
        return Err(Error::Resolution(format!(
            "fewer than three radii in [{lo:e}, {hi:e}]"
        )));
    }
    let (c, ssr) = least_squares(&[x], &y);
    Ok(LogSquareFit {
        c: c[0],
        r2: r_squared(&y, ssr),
        points: y.len(),
    })
}

pub fn growth_audit(t: &FrequencyTrace, gamma: f64) -> Result<GrowthReport> {
    let lo = t.radii.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = t.radii.iter().copied().fold(0.0, f64::max);
    if hi / lo < 1e3 * (1.0 - 1e-9) {
        return Err(Error::Resolution(
            "a growth audit needs three decades of radii".into(),
        ));
    }
    let ratio: Vec<f64> = t
        .radii
        .iter()
        .zip(&t.h)
        .map(|(r, h)| h / r.powf(2.0 * gamma))
        .collect();
    let sup_ratio = ratio.iter().copied().fold(0.0, f64::max);
    let tail: Vec<usize> = (0..t.radii.len())
        .filter(|&i| t.radii[i] <= lo * 100.0 * (1.0 + 1e-12))
        .collect();
    let q: Vec<f64> = tail.iter().map(|&i| ratio[i]).collect();
    let rr: Vec<f64> = tail.iter().map(|&i| t.radii[i]).collect();
    let (qmin, qmax) = q
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
    let mean = q.iter().sum::<f64>() / q.len() as f64;
    let variation = (qmax - qmin) / mean;
    let target = 2f64.powf(2.0 * gamma);
    let doubling_sup = t
        .doubling
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let doubling_deviation = tail
        .iter()
        .map(|&i| t.doubling[i])
        .filter(|v| v.is_finite())
        .map(|v| (v / target - 1.0).abs())
        .fold(0.0, f64::max);
    let log2_r2 = log_square_fit(t, gamma, lo, lo * 100.0)?.r2;
    let power_slope = {
        let lx: Vec<f64> = rr.iter().map(|r| r.ln()).collect();
        let ly: Vec<f64> = q.iter().map(|v| v.ln()).collect();
        linear_fit(&lx, &ly).slope
    };
    let class = if variation < 0.05 {
        GrowthClass::PositiveFiniteLimit
    } else if log2_r2 > 0.99 {
        GrowthClass::DivergentLog2
    } else if power_slope < 0.0 {
        GrowthClass::DivergentPower
    } else {
        GrowthClass::Vanishing
    };
    Ok(GrowthReport {
        gamma,
        sup_ratio,
        variation,
        doubling_sup,
        doubling_deviation,
        log2_r2,
        power_slope,
        class,
    })
}

/// Scale-invariant Sobolev quotient
/// `‖v‖²_{L^p(Ω_r)} / (r^{2N/p+2−N}(∫_{Ω_r}|∇v|² + r⁻¹∫_{S_r}v²))`.
pub fn sobolev_ratio(s: &Setup, r: f64, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Config(format!("Sobolev exponent {p} below 1")));
    }
    let q = s.quadrature()?;
    let n = s.dim();
    let [lp, grad] = q.bulk(r, |rho, a| {
        let (v, g) = s.field.eval_point(&polar_point(n, rho, a))?;
        Ok([v.abs().powf(p), g.norm_squared()])
    })?;
    let [bd] = q.sphere(r, |a| Ok([s.field.sample(r, a)?.value.powi(2)]))?;
    let boundary = bd * r.powi(n as i32 - 1) / r;
    let nf = n as f64;
    Ok(lp.powf(2.0 / p) / (r.powf(2.0 * nf / p + 2.0 - nf) * (grad + boundary)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::CoefficientBundle;
    use crate::field::{ClosedForm, Field, FieldSpec, ModeTerm};
    use crate::geometry::ConeSection;
    use crate::numerics::radii_per_decade;

    fn setup(spec: FieldSpec, cone: ConeSection) -> Setup {
        let f: FieldRef = Arc::new(ClosedForm::new(spec, cone).unwrap());
        Setup::new(
            f,
            Arc::new(CoefficientBundle::trivial(cone.dim)),
            Arc::new(cone),
            GridSpec::new(1e-6, 1.0, 4, 32),
        )
        .unwrap()
    }

    #[test]
    fn mode_height_and_energy() {
        let alpha = 2.0 / 3.0;
        let s = setup(FieldSpec::Mode { k: 1 }, ConeSection::sector(alpha));
        let h = height(&s, 0.5).unwrap();
        assert!((h - 0.125 * alpha * std::f64::consts::PI / 2.0).abs() < 1e-14);
        let e = energy(&s, &[0.5]).unwrap()[0];
        assert!((e.total() / h - 1.5).abs() < 1e-12);
    }

    #[test]
    fn mixture_frequency_decreases_to_leading_exponent() {
        let alpha = 2.0 / 3.0;
        let terms = vec![ModeTerm { k: 1, c: 1.0 }, ModeTerm { k: 2, c: 0.1 }];
        let s = setup(FieldSpec::ModalSum { terms }, ConeSection::sector(alpha));
        let radii = radii_per_decade(1e-6, 0.5, 4);
        let t = frequency_trace(&s, &radii).unwrap();
        assert!(t.n.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!((t.gamma.value - 1.5).abs() < 1e-6, "{:?}", t.gamma);
        let g = growth_audit(&t, 1.5).unwrap();
        assert_eq!(g.class, GrowthClass::PositiveFiniteLimit);
    }

    #[test]
    fn hemisphere_zonal_mode_has_exact_identity() {
        let s = setup(
            FieldSpec::Zonal { sigma: 1.0, c: 1.0 },
            ConeSection::cap(std::f64::consts::FRAC_PI_2),
        );
        let radii = radii_per_decade(1e-5, 0.5, 4);
        let t = frequency_trace(&s, &radii).unwrap();
        assert!(t.n.iter().all(|n| (n - 1.0).abs() < 1e-10));
        assert!(derivative_identity_residual(&t).unwrap().max_abs < 1e-8);
        assert!(t.flux_residual.iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn harmonic_mixture_is_monotone() {
        let alpha = 2.0 / 3.0;
        let s = setup(
            FieldSpec::ModalSum {
                terms: vec![ModeTerm { k: 1, c: 1.0 }, ModeTerm { k: 2, c: -3.0 }],
            },
            ConeSection::sector(alpha),
        );
        let t = frequency_trace(&s, &radii_per_decade(1e-4, 0.5, 4)).unwrap();
        let m = monotonicity(&t, 1e-9);
        assert_eq!(m.violations, 0);
        assert!(m.worst_radius.is_none());
    }

    #[test]
    fn sobolev_ratio_is_scale_invariant() {
        let cone = ConeSection::sector(1.0);
        let s = setup(FieldSpec::Mode { k: 1 }, cone);
        let a = sobolev_ratio(&s, 0.1, 4.0).unwrap();
        let f = &s.field;
        let scaled: FieldRef = Arc::new(crate::field::RescaledField {
            inner: f.clone(),
            lambda: 10.0,
            scale: 1.0,
        });
        let s2 = Setup {
            field: scaled,
            ..s.clone()
        };
        let b = sobolev_ratio(&s2, 0.01, 4.0).unwrap();
        assert!((a / b - 1.0).abs() < 1e-10, "{a} {b}");
        let _ = f.dim();
    }
}
