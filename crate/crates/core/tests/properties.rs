use approx::assert_relative_eq;
use corner_lens::almgren::{blowup, frequency_trace, Setup};
use corner_lens::cases::straight_sector;
use corner_lens::config::RunConfig;
use corner_lens::field::{FieldRef, GridSpec};
use corner_lens::geometry::{min_c0, polar_point, BoundaryProfile, Straightening};
use corner_lens::numerics::quad::GaussRule;
use corner_lens::numerics::radii_per_decade;
use corner_lens::spectral::exponents;
use proptest::prelude::*;
use std::path::Path;
use std::sync::Arc;

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn exponent_pair_is_root_pair(mu in 0.01f64..100.0, dim in 2usize..5) {
        let e = exponents(mu, dim).unwrap();
        let n = dim as f64;
        assert_relative_eq!(e.sigma_plus + e.sigma_minus, 2.0 - n, epsilon = 1e-10);
        assert_relative_eq!(e.sigma_plus * e.sigma_minus, -mu, max_relative = 1e-10);
    }

    #[test]
    fn gauss_rule_is_linear_and_exact(
        c in prop::collection::vec(-5.0f64..5.0, 1..12),
        a in -2.0f64..0.0,
        b in 0.1f64..3.0,
        s in -3.0f64..3.0,
    ) {
        let q = GaussRule::new(6);
        let p = |x: f64| c.iter().rev().fold(0.0, |acc, k| acc * x + k);
        let exact: f64 = c.iter().enumerate().map(|(k, ck)| ck * (b.powi(k as i32 + 1) - a.powi(k as i32 + 1)) / (k + 1) as f64).sum();
        let scale = c.iter().map(|v| v.abs()).sum::<f64>() * 3f64.powi(c.len() as i32);
        prop_assert!((q.integrate(a, b, p) - exact).abs() <= 1e-12 * scale);
        let lhs = q.integrate(a, b, |x| s * p(x) + x.sin());
        let rhs = s * q.integrate(a, b, p) + q.integrate(a, b, f64::sin);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + scale));
    }

    #[test]
    fn straightening_round_trip(bump in 0.0f64..1.0, r in 1e-7f64..1e-2, t in 0.01f64..0.99) {
        let profile = BoundaryProfile::power_bump(2.0 / 3.0, bump, 0.5, 1.0);
        let c0 = min_c0(&profile, 0.5).unwrap() * (1.0 + 1e-6);
        let s = Straightening::new(profile, c0, 0.5).unwrap();
        let cone = s.cone();
        let x = polar_point(2, r, cone.lo + t * cone.width());
        let back = s.straighten(&s.unstraighten(&x).unwrap()).unwrap();
        prop_assert!((back - &x).norm() <= 1e-12 * r);
    }

    #[test]
    fn harmonic_frequency_is_monotone_and_bracketed(
        c1 in 0.1f64..2.0,
        c2 in -2.0f64..2.0,
        c3 in -2.0f64..2.0,
    ) {
        let alpha = 2.0 / 3.0;
        let s = straight_sector(alpha, &[(1, c1), (2, c2), (3, c3)], GridSpec::new(1e-6, 1.0, 4, 32)).unwrap();
        let t = frequency_trace(&s, &radii_per_decade(1e-4, 0.5, 4)).unwrap();
        for w in t.n.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-9);
        }
        for n in &t.n {
            prop_assert!(*n >= 1.5 - 1e-9 && *n <= 4.5 + 1e-9);
        }
    }

    #[test]
    fn blowups_are_normalized(c2 in -3.0f64..3.0, lambda in 1e-5f64..0.5) {
        let s = straight_sector(0.5, &[(1, 1.0), (2, c2)], GridSpec::new(1e-6, 1.0, 4, 32)).unwrap();
        let snap = blowup(&s, lambda).unwrap();
        prop_assert!((snap.cap_norm - 1.0).abs() < 1e-8);
    }

    #[test]
    fn frequency_commutes_with_scaling(lambda in 0.01f64..1.0, c2 in -2.0f64..2.0) {
        // The frequency of the rescaled field at r equals that of the field at λr.
        let grid = GridSpec::new(1e-8, 1.0, 4, 32);
        let s = straight_sector(1.5, &[(1, 1.0), (2, c2)], grid).unwrap();
        let radii = radii_per_decade(1e-5, 1e-1, 4);
        let scaled: Vec<f64> = radii.iter().map(|r| r * lambda).collect();
        let a = frequency_trace(&s, &scaled).unwrap();
        let snap = blowup(&s, lambda).unwrap();
        let field: FieldRef = Arc::new(snap.field);
        let rescaled = Setup::new(field, s.coeffs.clone(), s.domain.clone(), GridSpec::new(1e-6, 10.0, 4, 32)).unwrap();
        let b = frequency_trace(&rescaled, &radii).unwrap();
        for (x, y) in a.n.iter().zip(&b.n) {
            prop_assert!((x - y).abs() < 1e-8 * x.abs());
        }
    }
}

#[test]
fn shipped_configs_round_trip() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        let cfg = RunConfig::load(&p).unwrap();
        cfg.validate().unwrap();
        let again = RunConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(
            cfg.hash().unwrap(),
            again.hash().unwrap(),
            "{}",
            p.display()
        );
    }
}
