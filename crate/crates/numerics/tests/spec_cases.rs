use num_complex::Complex64;

use blform_numerics::spec::{FunctionSpec as S, *};

fn at(s: &FunctionSpec, x: f64) -> f64 {
    s.eval(&[x]).unwrap().re
}

#[test]
fn elementary_values() {
    assert_eq!(at(&S::Gaussian { a: 1.0 }, 0.0), 1.0);
    assert_eq!(at(&S::SignStep, -2.0), -1.0);
    assert_eq!(at(&S::SignStep, 0.0), 0.0);
    assert_eq!(at(&S::SignStep, 3.0), 1.0);
    let b = at(&S::SmoothBump, 0.95);
    assert!(b > 0.0 && b < 1.0);
    assert_eq!(at(&S::SmoothBump, 0.5), 1.0);
    assert_eq!(at(&S::SmoothBump, -1.2), 0.0);
    assert_eq!(at(&S::SignWindow { m: 3.0 }, -2.0), -1.0);
    assert_eq!(at(&S::SignWindow { m: 3.0 }, 4.0), 0.0);
}

#[test]
fn bump_is_monotone_on_transition() {
    let mut prev = 1.0;
    for k in 0..=100 {
        let v = smooth_bump(0.9 + 0.001 * k as f64);
        assert!(v <= prev + 1e-15);
        prev = v;
    }
    assert!((smooth_bump(0.95) - 0.5).abs() < 1e-12);
}

#[test]
fn arity_is_checked() {
    let t = FunctionSpec::tensor(FunctionSpec::gaussian(1.0), FunctionSpec::SmoothBump);
    assert_eq!(
        t.eval(&[0.0]),
        Err(SpecError::ArityMismatch { expected: 2, found: 1 })
    );
    assert_eq!(t.eval(&[0.0, 0.5]).unwrap().re, 1.0);
}

#[test]
fn pullback_with_offset() {
    // G(x, y) = g(x + 2y − 1)
    let p = FunctionSpec::pullback(vec![vec![1.0, 2.0, -1.0]], FunctionSpec::Box { lo: 0.0, hi: 1.0 }, 2);
    p.check().unwrap();
    assert_eq!(p.eval(&[0.5, 0.5]).unwrap().re, 1.0);
    assert_eq!(p.eval(&[0.0, 0.0]).unwrap().re, 0.0);
}

#[test]
fn dilation_keeps_sup_norm() {
    let f = FunctionSpec::dilate(8.0, FunctionSpec::SmoothBump);
    assert_eq!(at(&f, 7.0), 1.0);
    assert_eq!(at(&f, 8.5), 0.0);
}

#[test]
fn sqrt_split_recovers_g() {
    let g = FunctionSpec::Sum {
        terms: vec![FunctionSpec::gaussian(1.0), FunctionSpec::scale(-2.0, FunctionSpec::gaussian(0.5))],
    };
    let s = FunctionSpec::sqrt_split(g.clone(), SqrtSign::Signed);
    let a = FunctionSpec::sqrt_split(g.clone(), SqrtSign::Abs);
    for x in [-1.0, -0.2, 0.0, 0.3, 0.8] {
        let prod = at(&s, x) * at(&a, x);
        assert!((prod - at(&g, x)).abs() < 1e-14);
    }
}

#[test]
fn chirp_phase() {
    let c = FunctionSpec::PhaseChirp {
        steps: vec![PhaseStep { lo: None, hi: Some(0.0), freq: 2.0 }],
        sign: 1.0,
    };
    let v = c.eval(&[-1.0, 0.125]).unwrap();
    assert!((v - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    assert!((c.eval(&[1.0, 0.3]).unwrap() - 1.0).norm() < 1e-15);
}

#[test]
fn json_tags() {
    let s: FunctionSpec = serde_json::from_str(r#"{"type":"gaussian","a":1}"#).unwrap();
    assert_eq!(s, FunctionSpec::gaussian(1.0));
    let t: FunctionSpec = serde_json::from_str(
        r#"{"type":"tensor","fx":{"type":"smooth_bump"},"fy":{"type":"box","lo":0,"hi":1}}"#,
    )
    .unwrap();
    assert_eq!(t.arity(), Some(2));
    let p: FunctionSpec = serde_json::from_str(
        r#"{"type":"pullback","matrix":[[1,1]],"of":{"type":"sign_step"}}"#,
    )
    .unwrap();
    assert_eq!(p.arity(), Some(2));
    let text = serde_json::to_string(&FunctionSpec::SmoothBump).unwrap();
    assert_eq!(text, r#"{"type":"smooth_bump"}"#);
}

#[test]
fn gaussian_profile_covers_cutoff() {
    let p = &profiles(&FunctionSpec::gaussian(2.0), 1, CUTOFF)[0];
    let v = at(&FunctionSpec::gaussian(2.0), p.hi);
    assert!(v <= 1.01 * CUTOFF && v >= 0.99 * CUTOFF);
}
