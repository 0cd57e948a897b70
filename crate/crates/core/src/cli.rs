//! The five commands of the front end: each reads a [`RunConfig`], runs one
//! pipeline and writes CSV tables with JSON summaries.

use crate::almgren::{
    blowup, derivative_identity_residual, frequency_trace, growth_audit, log_square_fit,
    monotonicity, FrequencyTrace, GrowthReport, LOG_STEP,
};
use crate::config::{RunConfig, Scenario};
use crate::error::{Error, Result};
use crate::field::sample_closed_form;
use crate::fourier::{
    beta_table, identify_block, limit_profile, parseval, profile_distance, AngularBasis,
    InterpolatedBasis, SectorModes,
};
use crate::geometry::Perturbation;
use crate::output::{tolerances, Cell, OutputDir, RunMeta};
use crate::spectral::{exponents, lambda_v, solve_cap_eigen, solve_cap_eigen_m};
use crate::verify::{is_suite, run_checks, VerifyContext};
use serde::Serialize;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Frequency,
    Profile,
    Counterexample,
    Verify,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Frequency => "frequency",
            Command::Profile => "profile",
            Command::Counterexample => "counterexample",
            Command::Verify => "verify",
        }
    }
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "spectrum" => Command::Spectrum,
            "frequency" => Command::Frequency,
            "profile" => Command::Profile,
            "counterexample" => Command::Counterexample,
            "verify" => Command::Verify,
            _ => return Err(Error::Config(format!("unknown command {s:?}"))),
        })
    }
}

/// Files written and whether every verification passed.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub passed: bool,
    /// Human-readable lines for the terminal.
    pub report: Vec<String>,
}

/// Loads the config, applies the seed override and runs the command.
pub fn run_path(cmd: Command, config: &Path, out: &Path, seed: Option<u64>) -> Result<Outcome> {
    let mut cfg = RunConfig::load(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    run(cmd, &cfg, out)
}

pub fn run(cmd: Command, cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    cfg.validate()?;
    let meta = RunMeta::new(cmd.name(), cfg.hash()?, cfg.seed);
    let mut dir = OutputDir::create(out, meta, cfg.outputs.precision)?;
    let (passed, report) = match cmd {
        Command::Spectrum => (true, spectrum(cfg, &mut dir)?),
        Command::Frequency => (true, frequency(cfg, &mut dir)?),
        Command::Profile => (true, profile(cfg, &mut dir)?),
        Command::Counterexample => (true, counterexample(cfg, &mut dir)?),
        Command::Verify => verify(cfg, &mut dir)?,
    };
    Ok(Outcome {
        files: dir.written().to_vec(),
        passed,
        report,
    })
}

/// Machine-readable error document.
pub fn error_json(e: &Error) -> serde_json::Value {
    json!({ "error": { "kind": e.kind(), "message": e.to_string(), "exit_code": e.exit_code() } })
}

/// Runs a command end to end and returns the process exit code; errors are
/// printed as JSON on stderr and, when possible, saved as `error.json`.
pub fn main_with(cmd: Command, config: &Path, out: &Path, seed: Option<u64>) -> i32 {
    match run_path(cmd, config, out, seed) {
        Ok(o) => {
            for l in &o.report {
                println!("{l}");
            }
            if o.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let doc = error_json(&e);
            eprintln!("{doc}");
            if std::fs::create_dir_all(out).is_ok() {
                if let Ok(b) = crate::output::to_json(&doc) {
                    let _ = crate::output::atomic_write(&out.join("error.json"), &b);
                }
            }
            e.exit_code()
        }
    }
}

fn spectrum(cfg: &RunConfig, dir: &mut OutputDir) -> Result<Vec<String>> {
    let cap = cfg.cone();
    let sp = cfg.spectrum;
    let v = cfg.bundle().v;
    let sys = solve_cap_eigen_m(cap, v, sp.m, sp.k_max, sp.n_grid)?;
    let lam = lambda_v(cap, v, sp.n_grid)?;
    let tol = tolerances(&[("richardson_ratio", 2.0), ("base_grid", sp.n_grid as f64)]);
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for (i, p) in sys.pairs.iter().enumerate() {
        let e = exponents(p.mu, cap.dim)?;
        rows.push(vec![
            (i + 1).into(),
            p.mu.into(),
            p.error.into(),
            p.mu_raw.into(),
            e.sigma_plus.into(),
            e.sigma_minus.into(),
        ]);
        summary.push(json!({ "k": i + 1, "mu": p.mu, "error": p.error, "sigma_plus": e.sigma_plus, "sigma_minus": e.sigma_minus }));
    }
    dir.csv(
        "eigen.csv",
        &["k", "mu", "error", "mu_raw", "sigma_plus", "sigma_minus"],
        &rows,
        &tol,
    )?;
    if sp.samples {
        let mut header = vec!["angle".to_string()];
        header.extend((1..=sys.len()).map(|k| format!("psi_{k}")));
        let h: Vec<&str> = header.iter().map(String::as_str).collect();
        let rows: Vec<Vec<Cell>> = sys
            .grid
            .iter()
            .enumerate()
            .map(|(j, a)| {
                let mut r = vec![Cell::F(*a)];
                r.extend(sys.pairs.iter().map(|p| Cell::F(p.psi[j])));
                r
            })
            .collect();
        dir.csv("psi.csv", &h, &rows, &tol)?;
    }
    let doc = json!({
        "cap": cap,
        "potential": v,
        "m": sp.m,
        "modes": summary,
        "lambda_v": lam.lambda,
        "lambda_v_raw": lam.lambda_raw,
        "lambda_maximizing_m": lam.maximizing_m,
        "admissible": lam.admissible,
    });
    dir.json("spectrum.json", &doc, &tol)?;
    let mut rep = vec![format!(
        "Lambda(V) = {:.10} admissible = {}",
        lam.lambda, lam.admissible
    )];
    rep.extend(
        sys.pairs
            .iter()
            .enumerate()
            .map(|(i, p)| format!("mu_{} = {:.12} (+/- {:.1e})", i + 1, p.mu, p.error)),
    );
    Ok(rep)
}

fn trace_rows(t: &FrequencyTrace, gamma: f64) -> Vec<Vec<Cell>> {
    (0..t.radii.len())
        .map(|i| {
            let r = t.radii[i];
            vec![
                r.into(),
                t.h[i].into(),
                t.d[i].into(),
                t.n[i].into(),
                t.dh_dlogr[i].into(),
                t.residual[i].into(),
                t.flux_residual[i].into(),
                t.doubling[i].into(),
                (t.h[i] / r.powf(2.0 * gamma)).into(),
            ]
        })
        .collect()
}

const TRACE_HEADER: [&str; 9] = [
    "r",
    "H",
    "D",
    "N",
    "dH_dlogr",
    "residual",
    "flux_residual",
    "doubling",
    "H_over_r2gamma",
];

fn audit_or_note(t: &FrequencyTrace, gamma: f64) -> (Option<GrowthReport>, Option<String>) {
    match growth_audit(t, gamma) {
        Ok(g) => (Some(g), None),
        Err(e) => (None, Some(e.to_string())),
    }
}

fn frequency_tolerances() -> std::collections::BTreeMap<String, f64> {
    tolerances(&[
        ("log_step", LOG_STEP),
        ("growth_variation", 0.05),
        ("doubling_deviation", 0.02),
        ("log2_r2", 0.99),
    ])
}

fn frequency(cfg: &RunConfig, dir: &mut OutputDir) -> Result<Vec<String>> {
    let sc = cfg.scenario()?;
    let t = frequency_trace(sc.setup(), &cfg.radii.radii())?;
    let gamma = t.gamma.value;
    let tol = frequency_tolerances();
    dir.csv("trace.csv", &TRACE_HEADER, &trace_rows(&t, gamma), &tol)?;
    if cfg.outputs.field_csv {
        let gf = match &sc {
            Scenario::Closed { field, .. } => Some(sample_closed_form(
                field.spec.clone(),
                field.cone,
                &cfg.grid(),
            )?),
            Scenario::Solved { solution, .. } => Some(solution.field.clone()),
            Scenario::Manufactured(_) => None,
        };
        if let Some(gf) = gf {
            let mut b = Vec::new();
            gf.write_csv(&mut b)?;
            dir.raw("field.csv", &b, &tol)?;
        }
    }
    let deriv = derivative_identity_residual(&t)?;
    let (growth, note) = audit_or_note(&t, gamma);
    let doc = json!({
        "gamma": t.gamma,
        "derivative_identity": deriv,
        "monotonicity": monotonicity(&t, 1e-9),
        "growth": growth,
        "growth_note": note,
        "warnings": sc.warnings(),
    });
    dir.json("frequency.json", &doc, &tol)?;
    let mut rep = vec![format!(
        "gamma = {:.10} +/- {:.2e}",
        gamma, t.gamma.uncertainty
    )];
    if let Some(g) = growth {
        rep.push(format!(
            "growth class: {}",
            serde_json::to_value(g.class).unwrap_or_default()
        ));
    }
    Ok(rep)
}

#[derive(Serialize)]
struct ProfileSummary {
    gamma: f64,
    block_first: usize,
    block_size: usize,
    profile_norm: f64,
    parseval: (f64, f64),
    blowup: crate::almgren::BlowupSummary,
    trace_distance: f64,
}

fn profile(cfg: &RunConfig, dir: &mut OutputDir) -> Result<Vec<String>> {
    let sc = cfg.scenario()?;
    let st = sc.straightened()?;
    let fs = &cfg.fourier;
    let basis: Box<dyn AngularBasis> = if st.cone.dim == 2 {
        Box::new(SectorModes {
            cone: st.cone,
            count: fs.modes,
        })
    } else {
        Box::new(InterpolatedBasis::new(solve_cap_eigen(
            st.cone,
            cfg.bundle().v,
            fs.modes,
            fs.n_grid,
        )?))
    };
    let t = frequency_trace(sc.setup(), &cfg.radii.radii())?;
    let gamma = t.gamma.value;
    let (j0, m) = identify_block(gamma, basis.as_ref(), fs.block_tol)?;
    let which: Vec<usize> = match &fs.indices {
        Some(ix) => ix.iter().map(|i| i - 1).collect(),
        None => (j0..j0 + m).collect(),
    };
    let grid = cfg.grid();
    let src = st.source.clone();
    let src_ref = src
        .as_ref()
        .map(|f| f.as_ref() as &(dyn Fn(&nalgebra::DVector<f64>) -> Result<f64> + Sync));
    let table = beta_table(
        st.v.as_ref(),
        st.coeffs.as_ref(),
        src_ref,
        basis.as_ref(),
        grid,
        &which,
        fs.r,
    )?;
    let tol = tolerances(&[("block_tol", fs.block_tol), ("r_independence_ratio", 0.5)]);
    let rows: Vec<Vec<Cell>> = table
        .iter()
        .map(|e| {
            vec![
                e.i.into(),
                e.mu.into(),
                e.sigma.into(),
                e.beta.into(),
                e.r.into(),
                e.r_independence.into(),
                e.boundary.into(),
                e.correction.into(),
            ]
        })
        .collect();
    dir.csv(
        "beta.csv",
        &[
            "i",
            "mu",
            "sigma_plus",
            "beta",
            "R",
            "r_independence",
            "boundary",
            "correction",
        ],
        &rows,
        &tol,
    )?;

    let block: Vec<(usize, f64)> = table
        .iter()
        .filter(|e| e.i > j0 && e.i <= j0 + m)
        .map(|e| (e.i - 1, e.beta))
        .collect();
    let used = if block.is_empty() {
        table.iter().map(|e| (e.i - 1, e.beta)).collect()
    } else {
        block
    };
    let prof = limit_profile(&used, basis.as_ref(), fs.nodes);
    let snap = blowup(sc.setup(), fs.lambda)?;
    let trace = snap.trace(&prof.angles)?;
    let distance = profile_distance(&prof, basis.as_ref(), &snap)?;
    let rows: Vec<Vec<Cell>> = (0..prof.angles.len())
        .map(|k| {
            vec![
                prof.angles[k].into(),
                prof.values[k].into(),
                (prof.values[k] / prof.norm).into(),
                trace[k].into(),
            ]
        })
        .collect();
    dir.csv(
        "profile.csv",
        &["angle", "profile", "normalized", "blowup_trace"],
        &rows,
        &tol,
    )?;
    let summary = ProfileSummary {
        gamma,
        block_first: j0 + 1,
        block_size: m,
        profile_norm: prof.norm,
        parseval: parseval(st.v.as_ref(), basis.as_ref(), grid, fs.r)?,
        blowup: snap.summary(),
        trace_distance: distance,
    };
    dir.json("profile.json", &summary, &tol)?;
    let mut rep: Vec<String> = table
        .iter()
        .map(|e| {
            format!(
                "beta_{} = {:.10} (R-independence {:.2e})",
                e.i, e.beta, e.r_independence
            )
        })
        .collect();
    rep.push(format!(
        "profile vs blow-up at lambda = {:e}: L2 distance {:.3e}",
        fs.lambda, distance
    ));
    Ok(rep)
}

fn counterexample(cfg: &RunConfig, dir: &mut OutputDir) -> Result<Vec<String>> {
    let Perturbation::LogCorner { alpha, sigma } = cfg.profile.perturbation else {
        return Err(Error::Config(
            "the counterexample needs a log-corner profile".into(),
        ));
    };
    let ce = &cfg.counterexample;
    let (corner, setup) = crate::cases::log_corner(alpha, sigma, cfg.grid())?;
    let gamma = corner.gamma();
    let tol = tolerances(&[
        ("boundary_vanishing", 1e-10),
        ("log2_r2", 0.99),
        ("defect_relative", 0.05),
        ("fit_lo", ce.fit_lo),
        ("fit_hi", ce.fit_hi),
    ]);

    let curve = corner.curve_samples(ce.curve_samples)?;
    let rows: Vec<Vec<Cell>> = curve
        .iter()
        .map(|c| {
            vec![
                c.theta.into(),
                c.x1.into(),
                c.x2.into(),
                c.r.into(),
                c.u_right.into(),
                c.u_left.into(),
                c.scaled.into(),
            ]
        })
        .collect();
    dir.csv(
        "curve.csv",
        &["theta", "x1", "x2", "r", "u_right", "u_left", "scaled"],
        &rows,
        &tol,
    )?;
    let boundary_max = curve.iter().fold(0.0f64, |m, c| m.max(c.scaled));

    let t = frequency_trace(&setup, &cfg.radii.radii())?;
    dir.csv("trace.csv", &TRACE_HEADER, &trace_rows(&t, gamma), &tol)?;
    let log_bound = t
        .radii
        .iter()
        .zip(&t.n)
        .map(|(r, n)| (n - gamma).abs() * r.ln().abs())
        .fold(0.0, f64::max);
    let fit = log_square_fit(&t, gamma, ce.fit_lo, ce.fit_hi)?;
    let (growth, note) = audit_or_note(&t, gamma);

    let rows: Vec<Vec<Cell>> = ce
        .x1s
        .iter()
        .map(|&x| {
            Ok(vec![
                x.into(),
                corner.normalized_defect(x)?.into(),
                corner.tangent_expansion(x)?.into(),
                corner.tangent_relation_residual(x)?.into(),
            ])
        })
        .collect::<Result<_>>()?;
    dir.csv(
        "defect.csv",
        &[
            "x1",
            "normalized_defect",
            "tangent_expansion",
            "relation_residual",
        ],
        &rows,
        &tol,
    )?;
    let extrapolated = corner.extrapolated_defect(&ce.x1s)?;
    let limit = corner.defect_limit();
    let doc = json!({
        "alpha": alpha,
        "sigma": sigma,
        "gamma": gamma,
        "boundary_max_scaled": boundary_max,
        "frequency_log_bound": log_bound,
        "log_square_fit": fit,
        "growth": growth,
        "growth_note": note,
        "defect_extrapolated": extrapolated,
        "defect_limit": limit,
        "defect_relative_error": (extrapolated - limit).abs() / limit,
    });
    dir.json("counterexample.json", &doc, &tol)?;
    Ok(vec![
        format!("max scaled |u_log| on curves: {boundary_max:.2e}"),
        format!("sup |N - {gamma}| |log r| = {log_bound:.4}"),
        format!("log^2 fit: c = {:.6e}, R^2 = {:.6}", fit.c, fit.r2),
        format!("defect constant: {extrapolated:.6} (limit {limit:.6})"),
    ])
}

fn verify(cfg: &RunConfig, dir: &mut OutputDir) -> Result<(bool, Vec<String>)> {
    let suite = cfg.verify.suite.as_deref();
    if let Some(s) = suite {
        if !is_suite(s) {
            return Err(Error::Config(format!("unknown suite {s:?}")));
        }
    }
    let ctx = VerifyContext {
        seed: cfg.seed,
        fault: cfg.verify.fault,
        hardy_trials: cfg.verify.hardy_trials.unwrap_or(1000),
    };
    let res = run_checks(suite, &ctx);
    let rows: Vec<Vec<Cell>> = res
        .iter()
        .map(|c| {
            vec![
                c.suite.into(),
                c.name.into(),
                c.passed.into(),
                c.value.into(),
                c.tolerance.into(),
                c.detail.clone().into(),
            ]
        })
        .collect();
    let tol = res
        .iter()
        .map(|c| (format!("{}/{}", c.suite, c.name), c.tolerance))
        .collect();
    dir.csv(
        "verify.csv",
        &["suite", "check", "passed", "value", "tolerance", "detail"],
        &rows,
        &tol,
    )?;
    let failed: Vec<String> = res
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{}/{}", c.suite, c.name))
        .collect();
    dir.json(
        "verify.json",
        &json!({ "passed": failed.is_empty(), "failed": failed, "checks": res }),
        &tol,
    )?;
    let mut rep: Vec<String> = res
        .iter()
        .map(|c| {
            format!(
                "{:<5} {:<11} {:<30} {:.3e} (tol {:.0e})",
                if c.passed { "PASS" } else { "FAIL" },
                c.suite,
                c.name,
                c.value,
                c.tolerance
            )
        })
        .collect();
    if !failed.is_empty() {
        rep.push(format!("failing invariants: {}", failed.join(", ")));
    }
    Ok((failed.is_empty(), rep))
}
