use proptest::prelude::*;

use blform_numerics::experiments::fit_power_law;
use blform_numerics::quad::{Affine, Integrand, Kernel, QuadConfig};
use blform_numerics::spec::FunctionSpec as S;

fn cheap() -> QuadConfig {
    QuadConfig { xy_points: 32, t_panels: 8, ..QuadConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn power_laws_are_fitted_exactly(k in -3.0f64..3.0, c in 0.01f64..100.0, x0 in 0.5f64..5.0) {
        let xs: Vec<f64> = (0..5).map(|i| x0 * 4f64.powi(i)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| c * x.powf(k)).collect();
        let f = fit_power_law(&xs, &ys).unwrap();
        prop_assert!((f.slope - k).abs() < 1e-9);
        prop_assert!((f.intercept - c.ln()).abs() < 1e-8);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&f.r2));
    }

    #[test]
    fn fit_quality_stays_in_unit_interval(ys in prop::collection::vec(0.01f64..100.0, 3..8)) {
        let xs: Vec<f64> = (1..=ys.len()).map(|i| i as f64).collect();
        let f = fit_power_law(&xs, &ys).unwrap();
        prop_assert!(f.r2 >= -1e-12 && f.r2 <= 1.0 + 1e-12);
    }

    #[test]
    fn dilation_keeps_sup_and_values(n in 0.1f64..100.0, x in -200.0f64..200.0, a in 0.2f64..5.0) {
        let g = S::gaussian(a);
        let d = S::dilate(n, g.clone());
        prop_assert_eq!(d.eval(&[x]).unwrap(), g.eval(&[x / n]).unwrap());
        prop_assert_eq!(d.eval(&[0.0]).unwrap().re, 1.0);
    }

    #[test]
    fn specs_evaluate_to_finite_values(lo in -10.0f64..10.0, w in 0.01f64..10.0, m in 0.1f64..50.0, x in -100.0f64..100.0) {
        let specs = [
            S::Box { lo, hi: lo + w },
            S::SignWindow { m },
            S::SignStep,
            S::SmoothBump,
            S::product(vec![S::gaussian(w), S::shift(lo, S::SmoothBump)]),
        ];
        for s in &specs {
            let v = s.eval(&[x]).unwrap();
            prop_assert!(v.re.is_finite() && v.im.is_finite());
            prop_assert!(v.norm() <= 1.0);
        }
    }

    #[test]
    fn config_round_trips_through_json(eps in 1e-6f64..1e-1, t in 2.0f64..1e4, panels in 4usize..100, points in 16usize..512) {
        let c = QuadConfig { t_eps: eps, t_max: t, t_panels: panels, xy_points: points, ..QuadConfig::default() };
        let text = serde_json::to_string(&c).unwrap();
        let back: QuadConfig = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn converged_results_respect_the_tolerance(a in 0.3f64..3.0, shift in -3.0f64..3.0, tol in 1e-12f64..1e-3) {
        let cfg = QuadConfig { tol, xy_points: 128, ..cheap() };
        let r = Integrand::new(1, Kernel::None)
            .with(&S::shift(shift, S::gaussian(a)), &[Affine::var(0)])
            .unwrap()
            .integrate(&cfg)
            .unwrap();
        prop_assert!((r.value.re - a).abs() <= 1e-10 * a);
        prop_assert!((r.value.re - a).abs() <= r.error_estimate);
        if r.converged {
            prop_assert!(r.error_estimate <= tol * r.value.norm() + 1e-10);
        }
    }
}

#[test]
fn invalid_configs_are_rejected() {
    let bad = [
        QuadConfig { t_eps: 0.0, ..cheap() },
        QuadConfig { t_eps: 2.0, t_max: 1.0, ..cheap() },
        QuadConfig { t_panels: 3, ..cheap() },
        QuadConfig { xy_points: 15, ..cheap() },
    ];
    for c in bad {
        assert!(c.validate().is_err());
    }
}
