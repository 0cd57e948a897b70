//! Ready-made configurations: exact modes on straight sectors, the perturbed
//! manufactured case, the logarithmic corner and the zonal mode in space.

use crate::almgren::Setup;
use crate::coefficients::{
    transform_bundle, CoefficientBundle, Coefficients, MatrixSpec, NonlinearitySpec, PotentialSpec,
    PowerSpec, Pushforward, TransformedBundle,
};
use crate::error::{Error, Result};
use crate::field::{
    ClosedForm, Domain, FieldRef, FieldSpec, GridSpec, ManufacturedProblem, MappedField, ModeTerm,
};
use crate::geometry::{
    min_c0, BoundaryProfile, ConeSection, DiffMap, InverseStraightening, Straightening,
};
use crate::logexample::LogCorner;
use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

/// `r^{k/α} sin(k(θ−θ₋)/α)` (or a modal sum) on the straight sector with
/// trivial coefficients.
pub fn straight_sector(alpha: f64, terms: &[(usize, f64)], grid: GridSpec) -> Result<Setup> {
    let cone = ConeSection::sector(alpha);
    let spec = match terms {
        [(k, c)] if *c == 1.0 => FieldSpec::Mode { k: *k },
        _ => FieldSpec::ModalSum {
            terms: terms.iter().map(|&(k, c)| ModeTerm { k, c }).collect(),
        },
    };
    let field: FieldRef = Arc::new(ClosedForm::new(spec, cone)?);
    Setup::new(
        field,
        Arc::new(CoefficientBundle::trivial(2)),
        Arc::new(cone),
        grid,
    )
}

/// Parameters of the perturbed manufactured case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbedSpec {
    pub alpha: f64,
    #[serde(default = "one")]
    pub k: usize,
    /// Bump amplitude `a` in `φ = φ₀ + a|x₁|^{1+δ}`.
    pub bump: f64,
    pub delta: f64,
    /// Defaults to the smallest admissible value.
    #[serde(default)]
    pub c0: Option<f64>,
    #[serde(default = "one_f")]
    pub radius: f64,
    #[serde(default = "full_bundle")]
    pub bundle: CoefficientBundle,
}

fn one() -> usize {
    1
}

fn one_f() -> f64 {
    1.0
}

/// `A = Id + 0.1(x_i + x_j)`, `|b| = 0.3|x|^{−1/2}`, `h = 0.2|x|^{−3/2}`, `f = |s|²s`.
pub fn full_bundle() -> CoefficientBundle {
    CoefficientBundle {
        a: MatrixSpec::Linear { eps: 0.1 },
        b: PowerSpec {
            order: -0.5,
            amp: 0.3,
        },
        h: PowerSpec {
            order: -1.5,
            amp: 0.2,
        },
        v: PotentialSpec::Zero,
        f: NonlinearitySpec { c: 1.0, p: 4.0 },
        dim: 2,
    }
}

impl Default for PerturbedSpec {
    fn default() -> Self {
        PerturbedSpec {
            alpha: 2.0 / 3.0,
            k: 1,
            bump: 0.5,
            delta: 0.5,
            c0: None,
            radius: 1.0,
            bundle: full_bundle(),
        }
    }
}

/// `w = m∘Ξ` on the pushed domain, where `m` is a mode of the tangent cone;
/// the equation for `w` carries the manufactured source left by the
/// transformed operator.
#[derive(Clone)]
pub struct PerturbedCase {
    pub k: usize,
    pub straightening: Arc<Straightening>,
    pub tilde: Arc<TransformedBundle>,
    pub mode: Arc<ClosedForm>,
    pub problem: ManufacturedProblem,
    pub setup: Setup,
}

impl PerturbedCase {
    pub fn new(spec: PerturbedSpec, grid: GridSpec) -> Result<Self> {
        let profile = BoundaryProfile::power_bump(spec.alpha, spec.bump, spec.delta, spec.radius);
        Self::from_profile(
            profile,
            spec.k,
            spec.c0,
            Some(spec.delta),
            spec.bundle,
            grid,
        )
    }

    /// Any planar profile; `δ` defaults to the profile's decay exponent and
    /// `C₀` to the smallest admissible value.
    pub fn from_profile(
        profile: BoundaryProfile,
        k: usize,
        c0: Option<f64>,
        delta: Option<f64>,
        bundle: CoefficientBundle,
        grid: GridSpec,
    ) -> Result<Self> {
        if profile.dim != 2 {
            return Err(Error::Unsupported("manufactured cases are planar".into()));
        }
        let delta = match delta.or(profile.decay_delta()) {
            Some(d) if d < 1.0 => d,
            _ => 0.5,
        };
        let c0 = match c0 {
            Some(c) => c,
            None => min_c0(&profile, delta)? * (1.0 + 1e-6),
        };
        let cone = profile.cone();
        let straightening = Arc::new(Straightening::new(profile, c0, delta)?);
        if grid.r_max * 2.0 >= straightening.r_hat {
            return Err(Error::Config(format!(
                "grid radius {:e} too large for the straightening radius {:e}",
                grid.r_max, straightening.r_hat
            )));
        }
        let tilde = Arc::new(transform_bundle(bundle.with_dim(2), c0, delta)?);
        let mode = Arc::new(ClosedForm::new(FieldSpec::Mode { k }, cone)?);
        let map: Arc<dyn DiffMap> = straightening.clone();
        let w: FieldRef = Arc::new(MappedField::new(mode.clone(), map));
        let coeffs: Arc<dyn Coefficients> = tilde.clone();
        let problem = ManufacturedProblem::new(w.clone(), coeffs.clone());
        let domain: Arc<dyn Domain> = straightening.clone();
        let setup = Setup::new(w, coeffs, domain, grid)?;
        Ok(PerturbedCase {
            k,
            straightening,
            tilde,
            mode,
            problem,
            setup,
        })
    }

    /// `v = w∘Φ` on the straight sector.
    pub fn straightened(&self) -> MappedField {
        crate::fourier::straightened_field(self.setup.field.clone(), self.straightening.clone())
    }

    /// `Â, b̂, ĥ, f̂` of the equation for `v`.
    pub fn hat(&self) -> HatCoefficients {
        Pushforward {
            map: InverseStraightening(self.straightening.clone()),
            inner: self.tilde.clone(),
        }
    }

    /// Source of the equation for `v`: `|det DΦ| g∘Φ`.
    pub fn hat_source(&self, x: &DVector<f64>) -> Result<f64> {
        let e = InverseStraightening(self.straightening.clone()).eval(x)?;
        Ok(e.det.abs() * self.problem.source(&e.value)?)
    }
}

/// Coefficients of the straightened equation.
pub type HatCoefficients = Pushforward<InverseStraightening, Arc<TransformedBundle>>;

/// The harmonic function with logarithmic leading term on its curved domain.
pub fn log_corner(alpha: f64, sigma: f64, grid: GridSpec) -> Result<(LogCorner, Setup)> {
    let corner = LogCorner::new(alpha, sigma)?;
    if grid.r_max >= corner.r_max() {
        return Err(Error::Config(format!(
            "grid radius {:e} beyond the curve range {:e}",
            grid.r_max,
            corner.r_max()
        )));
    }
    let field: FieldRef = Arc::new(ClosedForm::new(
        FieldSpec::LogExample { alpha },
        ConeSection::sector(alpha),
    )?);
    let setup = Setup::new(
        field,
        Arc::new(CoefficientBundle::trivial(2)),
        Arc::new(corner.clone()),
        grid,
    )?;
    Ok((corner, setup))
}

/// `r^σ cos φ` on the hemisphere with constant potential `c`; it solves the
/// equation with `μ₁ = 2 − c`.
pub fn zonal_hemisphere(c: f64) -> Result<(ClosedForm, f64)> {
    let mu = 2.0 - c;
    let sigma = -0.5 + (0.25 + mu).sqrt();
    let f = ClosedForm::new(
        FieldSpec::Zonal { sigma, c: 1.0 },
        ConeSection::cap(FRAC_PI_2),
    )?;
    Ok((f, sigma))
}
