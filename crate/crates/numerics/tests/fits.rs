use blform_numerics::experiments::*;

#[test]
fn fits_exact_power_laws() {
    let xs = [1.0, 2.0, 4.0, 8.0];
    let f = fit_power_law(&xs, &xs.map(|x| x * x)).unwrap();
    assert!((f.slope - 2.0).abs() < 1e-12 && (f.r2 - 1.0).abs() < 1e-12);
    let f = fit_power_law(&xs, &xs.map(|x| 7.0 / x)).unwrap();
    assert!((f.slope + 1.0).abs() < 1e-12 && (f.intercept - 7f64.ln()).abs() < 1e-12);
    assert_eq!(fit_power_law(&xs, &[1.0, -1.0, 2.0, 3.0]), Err(ExperimentError::NonPositiveData));
    assert_eq!(fit_power_law(&xs[..2], &[1.0, 2.0]), Err(ExperimentError::NonPositiveData));
}

#[test]
fn csv_round_trip() {
    let points: Vec<SweepPoint> = (1..=4)
        .map(|k| {
            let x = k as f64;
            SweepPoint { parameter: x, value: x.sqrt(), error_estimate: 1e-9, lhs: x.sqrt(), rhs: 1.0 / 3.0 }
        })
        .collect();
    let s = SweepResult::new("t", points, FitTarget::Lhs, FitAxes::LogLog, Some(0.5)).unwrap();
    let back = SweepResult::from_csv("t", &s.to_csv(), FitTarget::Lhs, FitAxes::LogLog, Some(0.5)).unwrap();
    assert_eq!(s, back);
    assert!(s.to_svg().starts_with("<svg"));
}

#[test]
fn failing_report_carries_diagnostic() {
    let mut r = VerdictReport::new("x");
    r.check(false, "broken");
    assert!(!r.passed && !r.diagnostics.is_empty());
}
