use blform_core::exactla::{ratio, to_f64};
use blform_core::{classify, BlDatum, NormalForm};
use blform_numerics::forms::*;
use blform_numerics::quad::QuadConfig;
use blform_numerics::spec::{FunctionSpec as S, PhaseStep, SqrtSign};

fn g1(shift: f64) -> S {
    S::shift(shift, S::gaussian(1.0))
}

fn g2(sx: f64, sy: f64) -> S {
    S::tensor(g1(sx), g1(sy))
}

fn cfg() -> QuadConfig {
    QuadConfig { xy_points: 128, ..QuadConfig::default() }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

/// Midpoint rule on the paired integrand; even in `s`, so spectrally accurate.
fn naive_bht(f: &S, g: &S, h: &S, alpha: f64) -> f64 {
    let at = |s: &S, x: f64| s.eval(&[x]).unwrap().re;
    let step = 0.02;
    let mut total = 0.0;
    for i in 0..1000 {
        let x = -10.0 + (i as f64 + 0.5) * step;
        let gx = at(g, x);
        for j in 0..500 {
            let s = (j as f64 + 0.5) * step;
            let k = at(f, x + s) * at(h, x + alpha * s) - at(f, x - s) * at(h, x - alpha * s);
            total += gx * k / s;
        }
    }
    total * step * step
}

#[test]
fn bht_matches_naive_grid() {
    let (f, g, h) = (g1(0.3), g1(-0.2), g1(0.7));
    let c = QuadConfig { t_eps: 1e-6, ..cfg() };
    let r = bht_form(&f, &g, &h, 2.0, &c).unwrap();
    let oracle = naive_bht(&f, &g, &h, 2.0);
    assert!(r.converged);
    assert!(close(r.re(), oracle, 1e-5), "{} vs {oracle}", r.re());
}

#[test]
fn bht_at_zero_factorises_through_hilbert() {
    let (f, g, h) = (g1(0.5), g1(0.0), g1(-0.4));
    let c = cfg();
    let r = bht_form(&f, &g, &h, 0.0, &c).unwrap();
    let nodes = blform_numerics::gauss::panel_rule(-8.0, 8.0, 64);
    let oracle: f64 = nodes
        .iter()
        .map(|&(x, w)| {
            let hf = hilbert_pairing(&f, x, &c).unwrap().re();
            w * hf * g.eval(&[x]).unwrap().re * h.eval(&[x]).unwrap().re
        })
        .sum();
    assert!(close(r.re(), oracle, 1e-8), "{} vs {oracle}", r.re());
}

#[test]
fn odd_kernel_annihilates_locally_constant_f() {
    let r = pv_form(
        &NormalForm::L4(ratio(0, 1)),
        &S::Box { lo: -9.0, hi: 9.0 },
        &g2(0.3, 0.0),
        &g2(-0.2, 0.1),
        &QuadConfig { t_max: 2.0, ..cfg() },
    )
    .unwrap();
    assert!(r.value.norm() <= r.error_estimate.max(1e-12), "{r:?}");
}

#[test]
fn tht_rotation_flips_orientation() {
    // F̃(a, y) = F(−a−y, y) and H̃(z, b) = H(z, −b−z).
    let ff = g2(0.4, -0.3);
    let g = g2(0.1, 0.5);
    let h = g2(-0.6, 0.2);
    let ft = S::pullback(vec![vec![-1.0, -1.0], vec![0.0, 1.0]], ff.clone(), 2);
    let ht = S::pullback(vec![vec![1.0, 0.0], vec![-1.0, -1.0]], h.clone(), 2);
    let c = cfg();
    let direct = tht_form(&ff, &g, &h, &c).unwrap();
    let rotated = tht_rotated_form(&ft, &g, &ht, &c).unwrap();
    assert!(direct.re().abs() > 1e-3);
    assert!(close(direct.re(), -rotated.re(), 1e-6), "{} vs {}", direct.re(), rotated.re());
}

#[test]
fn tht_vanishes_for_zero_f_and_is_symmetric() {
    let c = cfg();
    let zero = S::Const { value: 0.0 };
    let g = g2(0.2, -0.1);
    assert_eq!(tht_form(&zero, &g, &g, &c).unwrap().re(), 0.0);
    // With F(x,y)=F(y,x) and H = G∘swap, swapping the roles of G and H is a relabelling.
    let ff = g2(0.3, 0.3);
    let swap = |s: &S| S::pullback(vec![vec![0.0, 1.0], vec![1.0, 0.0]], s.clone(), 2);
    let a = tht_form(&ff, &g, &swap(&g), &c).unwrap();
    let b = tht_form(&ff, &swap(&swap(&g)), &swap(&g), &c).unwrap();
    assert!(close(a.re(), b.re(), 1e-12));
}

#[test]
fn witness_change_of_variables() {
    let d = BlDatum::special_triangular(&ratio(3, 1));
    let res = classify(&d).unwrap();
    assert_eq!(res.normal_form, NormalForm::L4(ratio(-2, 1)));
    let w = &res.witness;
    let inv = |j: usize| w.a(j).inverse().unwrap().to_f64_rows();
    let a4 = to_f64(&w.a(4)[(0, 0)]);
    let det_b = to_f64(&w.b.determinant().unwrap()).abs();

    let (f, g, h) = (g1(0.3), g2(0.2, -0.4), g2(-0.1, 0.6));
    let fp = S::pullback(inv(1), f.clone(), 1);
    let gp = S::pullback(inv(2), g.clone(), 2);
    let hp = S::pullback(inv(3), h.clone(), 2);

    let c = cfg();
    let scaled = QuadConfig { t_eps: c.t_eps / a4.abs(), t_max: c.t_max / a4.abs(), ..c.clone() };
    let lhs = datum_form(&d, &f, &g, &h, &scaled).unwrap();
    let rhs = pv_form(&res.normal_form, &fp, &gp, &hp, &c).unwrap();
    assert!(lhs.re().abs() > 1e-4);
    assert!(close(lhs.re(), det_b * a4 * rhs.re(), 1e-6), "{} vs {}", lhs.re(), det_b * a4 * rhs.re());
}

#[test]
fn special_form_is_the_datum_form_with_bump() {
    let (f, g, h) = (g1(0.3), g2(0.2, -0.4), g2(-0.1, 0.6));
    let c = cfg();
    let direct = trunc_special_form(&f, &g, &h, 2.0, &c).unwrap();
    // Fold φ(y) into G(y, z).
    let gphi = S::product(vec![g.clone(), S::tensor(S::SmoothBump, S::Const { value: 1.0 })]);
    let via = datum_form(&BlDatum::special_triangular(&ratio(2, 1)), &f, &gphi, &h, &c).unwrap();
    assert!(close(direct.re(), via.re(), 1e-9));
    // G supported away from φ.
    let far = S::tensor(S::Box { lo: 3.0, hi: 4.0 }, S::gaussian(1.0));
    assert_eq!(trunc_special_form(&f, &far, &h, 2.0, &c).unwrap().re(), 0.0);
}

#[test]
fn carleson_linear_in_phase_pieces() {
    let (f, g) = (g1(0.2), g1(-0.3));
    let c = cfg();
    let steps = vec![
        PhaseStep { lo: None, hi: Some(0.0), freq: 2.0 },
        PhaseStep { lo: Some(0.0), hi: None, freq: -1.0 },
    ];
    let whole = carleson_form(&f, &g, &steps, &c).unwrap();
    let left = S::product(vec![g.clone(), S::Box { lo: -1e9, hi: 0.0 }]);
    let right = S::product(vec![g.clone(), S::Box { lo: 0.0, hi: 1e9 }]);
    let a = carleson_form(&f, &left, &[PhaseStep { lo: None, hi: None, freq: 2.0 }], &c).unwrap();
    let b = carleson_form(&f, &right, &[PhaseStep { lo: None, hi: None, freq: -1.0 }], &c).unwrap();
    assert!((whole.value - a.value - b.value).norm() < 1e-8 * whole.value.norm());

    let none = carleson_form(&f, &g, &[], &c).unwrap();
    let bht = bht_form(&f, &g, &S::Const { value: 1.0 }, 0.0, &c).unwrap();
    assert!(close(none.re(), bht.re(), 1e-12));
    assert!(none.value.im.abs() < 1e-14);
}

#[test]
fn smoothed_form_is_finite_and_nonzero() {
    let f = S::gaussian(1.0);
    let g = g2(0.0, 0.0);
    let c = QuadConfig { xy_points: 64, ..QuadConfig::default() };
    for beta in [0.0, 1.0, 2.0] {
        let r = smoothed_form_4beta(&f, &g, &g, beta, &c).unwrap();
        assert!(r.value.re.is_finite() && r.value.re > 0.0, "beta {beta}: {r:?}");
    }
}

#[test]
fn norms() {
    let c = cfg();
    let delta: f64 = 7.0;
    for p in [1.0, 2.0, 3.0] {
        let b = S::scale(delta.powf(-1.0 / p), S::Box { lo: 0.0, hi: delta });
        assert!(close(lp_norm(&b, p, 1, &c).unwrap(), 1.0, 1e-12));
    }
    let (a, b) = (S::gaussian(1.0), S::shift(1.0, S::gaussian(0.5)));
    for p in [1.5, 2.0, 3.0] {
        let t = lp_norm(&S::tensor(a.clone(), b.clone()), p, 2, &c).unwrap();
        let prod = lp_norm(&a, p, 1, &c).unwrap() * lp_norm(&b, p, 1, &c).unwrap();
        assert!(close(t, prod, 1e-6));
    }
    let w = S::SignWindow { m: 5.0 };
    assert_eq!(lp_norm(&w, f64::INFINITY, 1, &c).unwrap(), 1.0);
}

#[test]
fn l3_dilation_value_doubles() {
    let g = S::Box { lo: 0.0, hi: 1.0 };
    let c = QuadConfig { xy_points: 64, ..QuadConfig::default() };
    let value = |n: f64| {
        let gg = S::tensor(S::sqrt_split(g.clone(), SqrtSign::Signed), S::dilate(n, S::SmoothBump));
        let hh = S::tensor(S::sqrt_split(g.clone(), SqrtSign::Abs), S::dilate(n, S::SmoothBump));
        pv_form(&NormalForm::L3, &g1(2.0), &gg, &hh, &c).unwrap().re()
    };
    let ratio = value(16.0) / value(8.0);
    assert!((ratio - 2.0).abs() < 0.2, "{ratio}");
    assert!(value(8.0).abs() > 1e-3);
}
