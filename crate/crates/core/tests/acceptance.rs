//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use corner_lens::almgren::{
    blowup, blowup_distance, derivative_identity_residual, frequency_trace, growth_audit,
    log_square_fit, pohozaev_residual, GrowthClass,
};
use corner_lens::cases::{
    log_corner, straight_sector, zonal_hemisphere, PerturbedCase, PerturbedSpec,
};
use corner_lens::coefficients::{CoefficientBundle, NonlinearitySpec, PotentialSpec};
use corner_lens::field::{
    ClosedForm, FieldRef, FieldSpec, GridSpec, ManufacturedProblem, ModeTerm,
};
use corner_lens::fourier::{beta_table, limit_profile, profile_distance, SectorModes};
use corner_lens::geometry::ConeSection;
use corner_lens::numerics::{fit::loglog_fit, radii_per_decade};
use corner_lens::spectral::{hardy_certificate, solve_cap_eigen};
use nalgebra::DVector;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_8, PI};
use std::sync::Arc;
use std::time::{Duration, Instant};

type Criterion = fn() -> Outcome;
type Outcome = Result<(bool, String), Box<dyn std::error::Error>>;

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let (ok, msg) = f()?;
    let el = t.elapsed();
    Ok((
        ok && el < limit,
        format!("{msg}; {el:.2?} (limit {limit:?})"),
    ))
}

fn config1() -> corner_lens::Result<corner_lens::almgren::Setup> {
    straight_sector(2.0 / 3.0, &[(1, 1.0)], GridSpec::new(1e-6, 1.0, 4, 32))
}

fn config3() -> corner_lens::Result<PerturbedCase> {
    PerturbedCase::new(PerturbedSpec::default(), GridSpec::new(1e-6, 0.1, 8, 32))
}

fn config3_radii() -> Vec<f64> {
    radii_per_decade(1e-6, 0.05, 4)
}

fn c1() -> Outcome {
    timed(Duration::from_secs(5), || {
        let radii = radii_per_decade(1e-6, 1e-2, 4);
        let mut worst: f64 = 0.0;
        for alpha in [0.5, 2.0 / 3.0, 1.5] {
            for k in [1, 2] {
                let s = straight_sector(alpha, &[(k, 1.0)], GridSpec::new(1e-6, 1.0, 4, 32))?;
                let t = frequency_trace(&s, &radii)?;
                let g = k as f64 / alpha;
                worst = t.n.iter().fold(worst, |m, n| m.max((n - g).abs()));
            }
        }
        Ok((worst < 1e-8, format!("max |N - k/alpha| = {worst:.2e}")))
    })
}

fn c2() -> Outcome {
    timed(Duration::from_secs(5), || {
        let mut worst: f64 = 0.0;
        for alpha in [0.5, 2.0 / 3.0, 1.5] {
            let sys = solve_cap_eigen(ConeSection::sector(alpha), PotentialSpec::Zero, 2, 1024)?;
            for (i, p) in sys.pairs.iter().enumerate() {
                worst = worst.max((p.mu - ((i + 1) as f64 / alpha).powi(2)).abs());
            }
        }
        let hemi = solve_cap_eigen(ConeSection::cap(FRAC_PI_2), PotentialSpec::Zero, 1, 1024)?;
        let e3 = (hemi.pairs[0].mu - 2.0).abs();
        Ok((
            worst < 1e-6 && e3 < 1e-6,
            format!("sector error {worst:.2e}, hemisphere mu_1 error {e3:.2e}"),
        ))
    })
}

fn c3() -> Outcome {
    timed(Duration::from_secs(120), || {
        let case = config3()?;
        let t = frequency_trace(&case.setup, &config3_radii())?;
        let gerr = (t.gamma.value - 1.5).abs();
        let slope = derivative_identity_residual(&t)?
            .fit
            .map(|f| f.slope)
            .unwrap_or(f64::NAN);
        Ok((
            gerr < 1e-2 && slope >= 0.4,
            format!("gamma = {:.6}, residual slope {slope:.3}", t.gamma.value),
        ))
    })
}

fn c4() -> Outcome {
    let t1 = frequency_trace(&config1()?, &radii_per_decade(1e-6, 1e-2, 4))?;
    let r1 = t1.residual.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let spec = PerturbedSpec::default();
    let delta = spec.delta;
    let case = PerturbedCase::new(spec, GridSpec::new(1e-6, 0.1, 8, 32))?;
    let t3 = frequency_trace(&case.setup, &config3_radii())?;
    let slope = derivative_identity_residual(&t3)?
        .fit
        .map(|f| f.slope)
        .unwrap_or(f64::NAN);
    Ok((
        r1 < 1e-7 && slope >= delta - 0.1,
        format!("config 1 residual {r1:.2e}, config 3 slope {slope:.3}"),
    ))
}

fn c5() -> Outcome {
    let t1 = frequency_trace(&config1()?, &radii_per_decade(1e-6, 1e-2, 4))?;
    let t3 = frequency_trace(&config3()?.setup, &config3_radii())?;
    let mut ok = true;
    let mut msg = Vec::new();
    for (name, t, g) in [
        ("config 1", t1, 1.5),
        ("config 3", t3.clone(), t3.gamma.value),
    ] {
        let a = growth_audit(&t, g)?;
        ok &= a.sup_ratio.is_finite()
            && a.variation < 0.05
            && a.doubling_deviation < 0.02
            && a.class == GrowthClass::PositiveFiniteLimit;
        msg.push(format!(
            "{name}: variation {:.2e}, doubling {:.2e}, {:?}",
            a.variation, a.doubling_deviation, a.class
        ));
    }
    Ok((ok, msg.join("; ")))
}

fn c6() -> Outcome {
    timed(Duration::from_secs(30), || {
        let cap = ConeSection::cap(FRAC_PI_2);
        let mut slack = f64::INFINITY;
        let mut trials = 0;
        for v in [PotentialSpec::Zero, PotentialSpec::Constant { c: 0.5 }] {
            let r = hardy_certificate(cap, v, 1.0, 1000, 256, 42)?;
            trials += r.trials;
            slack = slack
                .min(r.min_slack_sharp)
                .min(r.min_slack_half)
                .min(r.min_slack_gradient);
        }
        Ok((
            slack >= -1e-10,
            format!("{trials} trials, min slack {slack:.3e}"),
        ))
    })
}

fn c7() -> Outcome {
    let c = 0.5;
    let (field, _) = zonal_hemisphere(c)?;
    let mut bundle = CoefficientBundle::trivial(3);
    bundle.v = PotentialSpec::Constant { c };
    bundle.f = NonlinearitySpec { c: 1.0, p: 4.0 };
    let problem = ManufacturedProblem::new(Arc::new(field.clone()), Arc::new(bundle.clone()));
    let src = |y: &DVector<f64>| problem.source(y);
    let cap = ConeSection::cap(FRAC_PI_2);
    let fine = pohozaev_residual(&field, &bundle, cap, Some(&src), 0.8, 1024)?.relative;
    let coarse = pohozaev_residual(&field, &bundle, cap, Some(&src), 0.8, 512)?.relative;
    let ratio = coarse / fine;
    Ok((
        fine < 1e-4 && ratio >= 3.5,
        format!("relative residual {fine:.3e} at n = 1024, halving ratio {ratio:.3}"),
    ))
}

fn c8() -> Outcome {
    timed(Duration::from_secs(60), || {
        let (corner, setup) = log_corner(0.5, 0.3, GridSpec::new(1e-12, 0.5, 8, 32))?;
        let gamma = corner.gamma();
        let a = corner
            .curve_samples(400)?
            .iter()
            .fold(0.0f64, |m, s| m.max(s.scaled));
        let t = frequency_trace(&setup, &radii_per_decade(1e-10, 0.1, 4))?;
        let scaled: Vec<f64> = t
            .radii
            .iter()
            .zip(&t.n)
            .map(|(r, n)| (n - gamma).abs() * r.ln().abs())
            .collect();
        let b = scaled.iter().copied().fold(0.0, f64::max);
        // Bounded: no growth toward the vertex beyond the value seen at the largest radius.
        let b_ok = b.is_finite() && scaled[0] <= 1.05 * scaled[scaled.len() - 1].max(1.0);
        let fit = log_square_fit(&t, gamma, 1e-6, 1e-2)?;
        let d = corner.extrapolated_defect(&[1e-4, 1e-5, 1e-6, 1e-7])?;
        let derr = (d / FRAC_PI_8 - 1.0).abs();
        let ok = a < 1e-10 && b_ok && fit.r2 > 0.99 && derr < 0.05;
        Ok((
            ok,
            format!(
                "(a) {a:.1e} (b) sup {b:.3} (c) R^2 {:.6} (d) defect {d:.6} vs pi/8, rel. error {derr:.2e}",
                fit.r2
            ),
        ))
    })
}

fn c9() -> Outcome {
    let alpha = 2.0 / 3.0;
    let basis = SectorModes {
        cone: ConeSection::sector(alpha),
        count: 3,
    };
    let norm = (2.0 / (alpha * PI)).sqrt();
    let trivial = CoefficientBundle::trivial(2);
    let grid = GridSpec::new(1e-6, 1.0, 4, 32);

    let pure = straight_sector(alpha, &[(1, norm)], grid)?;
    let t = beta_table(
        pure.field.as_ref(),
        &trivial,
        None,
        &basis,
        grid,
        &[0, 1, 2],
        0.5,
    )?;
    let pure_err = t
        .iter()
        .map(|e| (e.beta - if e.i == 1 { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);

    let mix = straight_sector(alpha, &[(1, norm), (2, 0.1 * norm)], grid)?;
    let t = beta_table(
        mix.field.as_ref(),
        &trivial,
        None,
        &basis,
        grid,
        &[0, 1],
        0.5,
    )?;
    let mix_err = (t[0].beta - 1.0).abs().max((t[1].beta - 0.1).abs());
    let mix_r = t.iter().map(|e| e.r_independence).fold(0.0, f64::max);

    let grid = GridSpec::new(1e-6, 0.1, 8, 32);
    let case = PerturbedCase::new(PerturbedSpec::default(), grid)?;
    let v = case.straightened();
    let hat = case.hat();
    let src = |x: &DVector<f64>| case.hat_source(x);
    let t = beta_table(&v, &hat, Some(&src), &basis, grid, &[0], 0.05)?;
    let p = limit_profile(&[(0, t[0].beta)], &basis, 64);
    let dist = profile_distance(&p, &basis, &blowup(&case.setup, 1e-5)?)?;

    let ok = pure_err < 1e-10 && mix_err < 1e-3 && mix_r < 1e-3 && dist < 2e-2;
    Ok((
        ok,
        format!("pure {pure_err:.1e}, mixture {mix_err:.1e} (R vs R/2 {mix_r:.1e}), config 3 profile distance {dist:.2e}"),
    ))
}

fn c10() -> Outcome {
    let alpha = 2.0 / 3.0;
    let c = (2.0 / (alpha * PI)).sqrt();
    let setup = straight_sector(
        alpha,
        &[(1, c), (2, 0.1 * c)],
        GridSpec::new(1e-8, 1.0, 8, 32),
    )?;
    let lead: FieldRef = Arc::new(ClosedForm::new(
        FieldSpec::ModalSum {
            terms: vec![ModeTerm { k: 1, c }],
        },
        ConeSection::sector(alpha),
    )?);
    let lambdas = radii_per_decade(1e-6, 1e-1, 2);
    let mut norm_err: f64 = 0.0;
    let mut dist = Vec::new();
    for &l in &lambdas {
        let snap = blowup(&setup, l)?;
        norm_err = norm_err.max((snap.cap_norm - 1.0).abs());
        dist.push(blowup_distance(&snap, &lead, &setup)?);
    }
    let case = config3()?;
    for l in [1e-5, 1e-3] {
        norm_err = norm_err.max((blowup(&case.setup, l)?.cap_norm - 1.0).abs());
    }
    let slope = loglog_fit(&lambdas, &dist).slope;
    let gap = 1.0 / alpha;
    let ok = norm_err < 1e-8 && (slope / gap - 1.0).abs() < 0.1;
    Ok((
        ok,
        format!("cap norm error {norm_err:.1e}, decay slope {slope:.4} vs {gap}"),
    ))
}

fn main() {
    let criteria: [(&str, Criterion); 10] = [
        ("exact-mode frequency", c1),
        ("cap spectrum", c2),
        ("perturbed classification", c3),
        ("derivative identity", c4),
        ("growth bounds", c5),
        ("hardy certification", c6),
        ("pohozaev residual", c7),
        ("log corner", c8),
        ("cauchy coefficients", c9),
        ("blow-up normalization", c10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (ok, msg) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:2} {:26} {}  {msg}",
            i + 1,
            name,
            if ok { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
