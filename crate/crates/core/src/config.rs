//! Run configuration for the command-line front end and the scenarios it
//! builds.

use crate::almgren::Setup;
use crate::cases::{HatCoefficients, PerturbedCase};
use crate::coefficients::{CoefficientBundle, Coefficients};
use crate::error::{Error, Result};
use crate::field::{
    solve_linear_dirichlet, ClosedForm, DirichletSolution, Domain, Field, FieldRef, FieldSpec,
    GridSpec, SolverSpec,
};
use crate::geometry::{min_c0, BoundaryProfile, ConeSection, Perturbation, Straightening};
use crate::logexample::LogCorner;
use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;
use std::sync::Arc;

/// Which solution the pipelines analyse.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolutionSpec {
    /// A closed-form field on the profile's domain.
    Closed { field: FieldSpec },
    /// The tangent-cone mode `k` composed with the straightening of a
    /// perturbed planar profile, with its manufactured source.
    Manufactured {
        #[serde(default = "one")]
        k: usize,
        #[serde(default)]
        c0: Option<f64>,
        #[serde(default)]
        delta: Option<f64>,
    },
    /// Numerical solution of the linear Dirichlet problem on the straight
    /// sector, with outer data taken from `data` at `solver.r_max`.
    Dirichlet { data: FieldSpec, solver: SolverSpec },
}

fn one() -> usize {
    1
}

impl Default for SolutionSpec {
    fn default() -> Self {
        SolutionSpec::Closed {
            field: FieldSpec::Mode { k: 1 },
        }
    }
}

/// Geometric sampling of the trace radii.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiiSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub per_decade: usize,
}

impl Default for RadiiSpec {
    fn default() -> Self {
        RadiiSpec {
            r_min: 1e-6,
            r_max: 1e-2,
            per_decade: 4,
        }
    }
}

impl RadiiSpec {
    pub fn radii(&self) -> Vec<f64> {
        crate::numerics::radii_per_decade(self.r_min, self.r_max, self.per_decade)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSpec {
    pub k_max: usize,
    /// Base grid; Richardson uses `n_grid` and `2·n_grid`.
    pub n_grid: usize,
    /// Azimuthal index in space.
    pub m: usize,
    /// Write the eigenfunction sample table.
    pub samples: bool,
}

impl Default for SpectrumSpec {
    fn default() -> Self {
        SpectrumSpec {
            k_max: 4,
            n_grid: 1024,
            m: 0,
            samples: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FourierSpec {
    /// Number of cap eigenfunctions in the basis.
    pub modes: usize,
    /// Grid for the cap eigenfunctions in space.
    pub n_grid: usize,
    /// Outer radius `R` of the coefficient formula.
    pub r: f64,
    /// Blow-up scale compared against the reconstructed profile.
    pub lambda: f64,
    /// One-based indices to tabulate; defaults to the leading block.
    pub indices: Option<Vec<usize>>,
    /// Gauss nodes of the profile samples.
    pub nodes: usize,
    /// Tolerance when matching `γ` to a cap exponent.
    pub block_tol: f64,
}

impl Default for FourierSpec {
    fn default() -> Self {
        FourierSpec {
            modes: 4,
            n_grid: 1024,
            r: 1e-2,
            lambda: 1e-5,
            indices: None,
            nodes: 64,
            block_tol: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CounterexampleSpec {
    /// Abscissae of the defect extrapolation.
    pub x1s: Vec<f64>,
    /// Window of the `c·log²λ` fit.
    pub fit_lo: f64,
    pub fit_hi: f64,
    /// Points per curve in the boundary table.
    pub curve_samples: usize,
}

impl Default for CounterexampleSpec {
    fn default() -> Self {
        CounterexampleSpec {
            x1s: vec![1e-4, 1e-5, 1e-6, 1e-7],
            fit_lo: 1e-6,
            fit_hi: 1e-2,
            curve_samples: 200,
        }
    }
}

/// Deliberate defects used to check that the verification suite bites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// Flip the sign of the weight `μ` in the height.
    HeightWeightSign,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySpec {
    /// Run only this suite.
    pub suite: Option<String>,
    pub fault: Option<Fault>,
    /// Random trials per Hardy check.
    pub hardy_trials: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    /// Significant digits of floats; absent keeps the shortest exact form.
    pub precision: Option<usize>,
    /// Also export the sampled field as `(t, theta, value)`.
    pub field_csv: bool,
}

/// Everything a command needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub profile: BoundaryProfile,
    /// Defaults to the trivial bundle.
    #[serde(default)]
    pub bundle: Option<CoefficientBundle>,
    #[serde(default)]
    pub solution: SolutionSpec,
    /// Defaults to a grid spanning the radii with room for doubling.
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub radii: RadiiSpec,
    #[serde(default)]
    pub spectrum: SpectrumSpec,
    #[serde(default)]
    pub fourier: FourierSpec,
    #[serde(default)]
    pub counterexample: CounterexampleSpec,
    #[serde(default)]
    pub verify: VerifySpec,
    #[serde(default)]
    pub outputs: OutputSpec,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    /// Parses JSON, or TOML when the extension is `.toml`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let is_toml = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("toml"));
        if is_toml {
            Self::from_toml(&text)
        } else {
            Self::from_json(&text)
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid JSON config: {e}")))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("invalid TOML config: {e}")))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::Config(format!("cannot serialize config: {e}")))
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> Result<String> {
        let bytes = serde_json::to_vec(self).map_err(|e| Error::Config(e.to_string()))?;
        Ok(Sha256::digest(&bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect())
    }

    pub fn bundle(&self) -> CoefficientBundle {
        self.bundle
            .clone()
            .unwrap_or_else(|| CoefficientBundle::trivial(self.profile.dim))
            .with_dim(self.profile.dim)
    }

    pub fn cone(&self) -> ConeSection {
        self.profile.cone()
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
            .unwrap_or_else(|| GridSpec::new(self.radii.r_min, 2.0 * self.radii.r_max, 8, 32))
    }

    /// Static range checks; any failure is a configuration error.
    pub fn validate(&self) -> Result<()> {
        let cfg = |e: Error| match e {
            Error::Config(_) | Error::Unsupported(_) => e,
            other => Error::Config(other.to_string()),
        };
        self.profile.validate().map_err(cfg)?;
        self.bundle().validate().map_err(cfg)?;
        self.grid().validate()?;
        let r = self.radii;
        if !(r.r_min > 0.0 && r.r_max > r.r_min && r.per_decade > 0) {
            return Err(Error::Config(
                "radii need 0 < r_min < r_max and per_decade >= 1".into(),
            ));
        }
        let g = self.grid();
        if r.r_min < g.r_min * (1.0 - 1e-12) || r.r_max > g.r_max * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "radii [{:e}, {:e}] leave the grid [{:e}, {:e}]",
                r.r_min, r.r_max, g.r_min, g.r_max
            )));
        }
        if g.r_max > self.profile.radius * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "grid radius {:e} beyond the profile radius {:e}",
                g.r_max, self.profile.radius
            )));
        }
        if self.spectrum.k_max == 0 || self.spectrum.n_grid < 64 {
            return Err(Error::Config(
                "spectrum needs k_max >= 1 and n_grid >= 64".into(),
            ));
        }
        if self.fourier.modes == 0 || !(self.fourier.r > 0.0) || !(self.fourier.lambda > 0.0) {
            return Err(Error::Config(
                "fourier needs modes >= 1, r > 0 and lambda > 0".into(),
            ));
        }
        if let Some(ix) = &self.fourier.indices {
            if ix.iter().any(|&i| i == 0 || i > self.fourier.modes) {
                return Err(Error::Config(format!(
                    "fourier indices must lie in 1..={}",
                    self.fourier.modes
                )));
            }
        }
        if let SolutionSpec::Dirichlet { solver, .. } = &self.solution {
            solver.validate()?;
        }
        if let Perturbation::LogCorner { alpha, sigma } = self.profile.perturbation {
            LogCorner::new(alpha, sigma).map_err(cfg)?;
        }
        Ok(())
    }

    /// Domain of the profile: the tangent cone, the log corner, or the
    /// pushed domain of a perturbed profile.
    pub fn domain(&self) -> Result<Arc<dyn Domain>> {
        let p = &self.profile;
        Ok(match p.perturbation {
            Perturbation::None => Arc::new(p.cone()),
            Perturbation::LogCorner { alpha, sigma } => Arc::new(LogCorner::new(alpha, sigma)?),
            Perturbation::PowerBump { delta, .. } => {
                let c0 = min_c0(p, delta)? * (1.0 + 1e-6);
                Arc::new(Straightening::new(p.clone(), c0, delta)?)
            }
        })
    }

    pub fn scenario(&self) -> Result<Scenario> {
        self.validate()?;
        let bundle = self.bundle();
        let grid = self.grid();
        match &self.solution {
            SolutionSpec::Closed { field } => {
                let cone = match self.profile.perturbation {
                    Perturbation::LogCorner { alpha, .. } => ConeSection::sector(alpha),
                    _ => self.cone(),
                };
                let f = Arc::new(ClosedForm::new(field.clone(), cone)?);
                let setup = Setup::new(f.clone(), Arc::new(bundle.clone()), self.domain()?, grid)?;
                Ok(Scenario::Closed {
                    setup,
                    field: f,
                    bundle,
                })
            }
            SolutionSpec::Manufactured { k, c0, delta } => {
                if !matches!(
                    self.profile.perturbation,
                    Perturbation::PowerBump { .. } | Perturbation::None
                ) {
                    return Err(Error::Config(
                        "manufactured solutions need a power-law profile".into(),
                    ));
                }
                let case = PerturbedCase::from_profile(
                    self.profile.clone(),
                    *k,
                    *c0,
                    *delta,
                    bundle,
                    grid,
                )?;
                Ok(Scenario::Manufactured(Box::new(case)))
            }
            SolutionSpec::Dirichlet { data, solver } => {
                if self.profile.perturbation != Perturbation::None || self.profile.dim != 2 {
                    return Err(Error::Unsupported(
                        "the Dirichlet solver works on straight planar sectors".into(),
                    ));
                }
                if grid.r_min < solver.r_min * (1.0 - 1e-12)
                    || grid.r_max > solver.r_max * (1.0 + 1e-12)
                {
                    return Err(Error::Config(
                        "the analysis grid must lie inside the solver range".into(),
                    ));
                }
                let cone = self.cone();
                let exact = ClosedForm::new(data.clone(), cone)?;
                let r_out = solver.r_max;
                let trace = |a: f64| exact.sample(r_out, a).map(|s| s.value).unwrap_or(0.0);
                let sol = solve_linear_dirichlet(&bundle, cone, &trace, None, solver)?;
                let field: FieldRef = Arc::new(sol.field.clone());
                let setup = Setup::new(field, Arc::new(bundle.clone()), Arc::new(cone), grid)?;
                Ok(Scenario::Solved {
                    setup,
                    solution: Box::new(sol),
                    bundle,
                })
            }
        }
    }
}

/// A built analysis case.
pub enum Scenario {
    Closed {
        setup: Setup,
        field: Arc<ClosedForm>,
        bundle: CoefficientBundle,
    },
    Manufactured(Box<PerturbedCase>),
    Solved {
        setup: Setup,
        solution: Box<DirichletSolution>,
        bundle: CoefficientBundle,
    },
}

type SourceBox = Arc<dyn Fn(&DVector<f64>) -> Result<f64> + Send + Sync>;

/// What the coefficient pipeline needs: the field on the straight cone, its
/// coefficients and source.
pub struct Straightened {
    pub v: FieldRef,
    pub coeffs: Arc<dyn Coefficients>,
    pub source: Option<SourceBox>,
    pub cone: ConeSection,
}

impl Scenario {
    pub fn setup(&self) -> &Setup {
        match self {
            Scenario::Closed { setup, .. } | Scenario::Solved { setup, .. } => setup,
            Scenario::Manufactured(c) => &c.setup,
        }
    }

    pub fn warnings(&self) -> Vec<String> {
        match self {
            Scenario::Solved { solution, .. } => solution.warnings.clone(),
            _ => Vec::new(),
        }
    }

    pub fn straightened(&self) -> Result<Straightened> {
        match self {
            Scenario::Closed {
                setup,
                field,
                bundle,
            } => {
                if field.natural_cone().is_none()
                    || matches!(field.spec, FieldSpec::LogExample { .. })
                {
                    return Err(Error::Unsupported(
                        "coefficients need a field on a straight cone".into(),
                    ));
                }
                Ok(Straightened {
                    v: setup.field.clone(),
                    coeffs: Arc::new(bundle.clone()),
                    source: None,
                    cone: field.cone,
                })
            }
            Scenario::Solved {
                setup,
                bundle,
                solution,
            } => Ok(Straightened {
                v: setup.field.clone(),
                coeffs: Arc::new(bundle.clone()),
                source: None,
                cone: solution.field.cone,
            }),
            Scenario::Manufactured(c) => {
                let hat: HatCoefficients = c.hat();
                let case = c.clone();
                Ok(Straightened {
                    v: Arc::new(c.straightened()),
                    coeffs: Arc::new(hat),
                    source: Some(Arc::new(move |x: &DVector<f64>| case.hat_source(x))),
                    cone: c.straightening.cone(),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "profile": {"dim": 2, "g": [0.5773502691896257, 0.5773502691896257], "radius": 1.0},
        "solution": {"kind": "closed", "field": {"kind": "mode", "k": 1}},
        "radii": {"r_min": 1e-6, "r_max": 1e-2, "per_decade": 4}
    }"#;

    #[test]
    fn json_round_trip_is_lossless() {
        let c = RunConfig::from_json(SAMPLE).unwrap();
        let back = RunConfig::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(c, back);
        assert_eq!(c.hash().unwrap(), back.hash().unwrap());
        assert_eq!(c.hash().unwrap().len(), 64);
    }

    #[test]
    fn toml_matches_json() {
        let c = RunConfig::from_json(SAMPLE).unwrap();
        let t = toml::to_string(&c).unwrap();
        assert_eq!(RunConfig::from_toml(&t).unwrap(), c);
    }

    #[test]
    fn unknown_fields_and_bad_ranges_are_config_errors() {
        let bad = SAMPLE.replace("\"radii\"", "\"radiii\"");
        assert!(matches!(RunConfig::from_json(&bad), Err(Error::Config(_))));
        let mut c = RunConfig::from_json(SAMPLE).unwrap();
        c.radii.r_max = 1.0;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn closed_scenario_builds() {
        let c = RunConfig::from_json(SAMPLE).unwrap();
        let s = c.scenario().unwrap();
        assert_eq!(s.setup().dim(), 2);
        assert!(s.straightened().is_ok());
    }
}
