use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use blform_core::{ExponentTriple, NormalForm};

use super::{
    random_gaussian_2d, ExperimentError, FitAxes, FitTarget, SweepPoint, SweepResult, VerdictReport,
};
use crate::forms::{hilbert_pairing, lp_norm, pv_form, smoothed_form_4beta};
use crate::gauss::panel_rule;
use crate::quad::{Affine, Integrand, Kernel, QuadConfig, QuadResult};
use crate::spec::{FunctionSpec as S, SqrtSign};

fn at_least_three(n: usize, what: &str) -> Result<(), ExperimentError> {
    if n < 3 {
        return Err(ExperimentError::InvalidParameter(format!("{what} needs at least 3 points")));
    }
    Ok(())
}

fn anisotropic_gaussian(eps: f64) -> S {
    // exp(−π(x² + εy²))
    S::tensor(S::gaussian(1.0), S::gaussian(eps.powf(-0.5)))
}

/// `|∫ f(x+t)G(x,y)H(x+βt,y)m(t)|` for the Gaussian family, one value per `ε`.
pub fn gaussian_necessity_lhs(
    beta: f64,
    eps_list: &[f64],
    cfg: &QuadConfig,
) -> Result<Vec<QuadResult>, ExperimentError> {
    let f = S::gaussian(1.0);
    eps_list
        .iter()
        .map(|&eps| {
            let g = anisotropic_gaussian(eps);
            Ok(smoothed_form_4beta(&f, &g, &g, beta, cfg)?)
        })
        .collect()
}

/// Combines precomputed left-hand sides with the norm product
/// `‖f‖∞‖G‖_{p₂}‖H‖_{p₃}‖m‖₁`; returns the sweeps fitted on LHS and RHS.
pub fn gaussian_necessity_from(
    lhs: &[QuadResult],
    p2: f64,
    p3: f64,
    eps_list: &[f64],
    cfg: &QuadConfig,
) -> Result<(SweepResult, SweepResult), ExperimentError> {
    let f = S::gaussian(1.0);
    let fixed = lp_norm(&f, f64::INFINITY, 1, cfg)? * lp_norm(&S::BandlimitedM, 1.0, 1, cfg)?;
    let mut points = Vec::new();
    for (r, &eps) in lhs.iter().zip(eps_list) {
        let g = anisotropic_gaussian(eps);
        let rhs = fixed * lp_norm(&g, p2, 2, cfg)? * lp_norm(&g, p3, 2, cfg)?;
        points.push(SweepPoint {
            parameter: eps,
            value: r.value.norm(),
            error_estimate: r.error_estimate,
            lhs: r.value.norm(),
            rhs,
        });
    }
    let name = format!("gaussian-necessity p2={p2} p3={p3}");
    Ok((
        SweepResult::new(&name, points.clone(), FitTarget::Lhs, FitAxes::LogLog, None)?,
        SweepResult::new(&name, points, FitTarget::Rhs, FitAxes::LogLog, None)?,
    ))
}

pub fn exp_gaussian_necessity(
    beta: f64,
    p2: f64,
    p3: f64,
    eps_list: &[f64],
    cfg: &QuadConfig,
) -> Result<(SweepResult, SweepResult), ExperimentError> {
    at_least_three(eps_list.len(), "eps list")?;
    if eps_list.windows(2).any(|w| w[1] >= w[0]) || eps_list.iter().any(|e| !(*e > 0.0)) {
        return Err(ExperimentError::InvalidParameter("eps list must be positive and decreasing".into()));
    }
    let lhs = gaussian_necessity_lhs(beta, eps_list, cfg)?;
    gaussian_necessity_from(&lhs, p2, p3, eps_list, cfg)
}

/// LHS slope `−½`, RHS slope `−½(1/p₂+1/p₃)`; the ratio stays bounded on the
/// endpoint line `1/p₂+1/p₃ = 1` and increases without bound off it.
pub fn gaussian_verdict(lhs: &SweepResult, rhs: &SweepResult, p2: f64, p3: f64) -> VerdictReport {
    let mut r = VerdictReport::new(&lhs.name);
    let s = 1.0 / p2 + 1.0 / p3;
    r.check((lhs.fit.slope + 0.5).abs() <= 0.05, format!("LHS slope {:.4} vs -0.5 ± 0.05", lhs.fit.slope));
    r.check(
        (rhs.fit.slope + 0.5 * s).abs() <= 0.02,
        format!("RHS slope {:.4} vs {:.4} ± 0.02", rhs.fit.slope, -0.5 * s),
    );
    let ratios = lhs.ratios();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0f64), |(a, b), &x| (a.min(x), b.max(x)));
    if (s - 1.0).abs() < 1e-12 {
        r.check(hi / lo < 1.1, format!("endpoint: ratio max/min {:.4} < 1.1", hi / lo));
    } else {
        let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
        let growth = ratios[ratios.len() - 1] / ratios[0];
        r.check(
            increasing && growth >= 1.5,
            format!("off endpoint: ratio increasing as eps decreases ({increasing}), growth {growth:.4} >= 1.5"),
        );
    }
    r
}

/// `2(ln(δ/2) − 1 + 2/δ)`.
pub fn tht_endpoint_oracle(delta: f64) -> f64 {
    2.0 * ((delta / 2.0).ln() - 1.0 + 2.0 / delta)
}

fn normalised_box(delta: f64, p: f64) -> S {
    S::scale(delta.powf(-1.0 / p), S::Box { lo: 0.0, hi: delta })
}

/// `∫∫_{2≤|t|} g_δ(y) h_δ(y+t)/|t| dt dy` against its closed form.
pub fn exp_tht_endpoint(delta_list: &[f64], p2: f64, cfg: &QuadConfig) -> Result<SweepResult, ExperimentError> {
    at_least_three(delta_list.len(), "delta list")?;
    if !(p2 > 1.0 && p2.is_finite()) {
        return Err(ExperimentError::InvalidParameter(format!("need 1 < p2 < inf, got {p2}")));
    }
    let p3 = p2 / (p2 - 1.0);
    let mut points = Vec::new();
    for &delta in delta_list {
        if !(delta > 2.0) {
            return Err(ExperimentError::InvalidParameter(format!("need delta > 2, got {delta}")));
        }
        let (g, h) = (normalised_box(delta, p2), normalised_box(delta, p3));
        let c = QuadConfig { t_eps: 2.0, t_max: delta, ..cfg.clone() };
        let r = Integrand::new(2, Kernel::Even)
            .with(&g, &[Affine::var(0)])?
            .with(&h, &[Affine::linear([1.0, 1.0, 0.0])])?
            .integrate(&c)?;
        let oracle = tht_endpoint_oracle(delta);
        let rel = (r.re() - oracle).abs() / oracle;
        if rel > 0.01 {
            return Err(ExperimentError::Oracle {
                experiment: "tht-endpoint".into(),
                detail: format!("delta {delta}: quadrature {} vs closed form {oracle} (rel {rel:.2e})", r.re()),
            });
        }
        let rhs = lp_norm(&g, p2, 1, cfg)? * lp_norm(&h, p3, 1, cfg)?;
        points.push(SweepPoint { parameter: delta, value: r.re(), error_estimate: r.error_estimate, lhs: r.re(), rhs });
    }
    SweepResult::new("tht-endpoint", points, FitTarget::Lhs, FitAxes::SemiLog, None)
}

pub fn tht_verdict(s: &SweepResult) -> VerdictReport {
    let mut r = VerdictReport::new(&s.name);
    for p in &s.points {
        let oracle = tht_endpoint_oracle(p.parameter);
        let rel = (p.lhs - oracle).abs() / oracle;
        r.check(rel <= 0.01, format!("delta {}: rel error {rel:.2e} vs closed form <= 1%", p.parameter));
        r.check((p.rhs - 1.0).abs() <= 1e-9, format!("delta {}: norm product {:.12}", p.parameter, p.rhs));
    }
    let ratios = s.ratios();
    r.check(ratios.windows(2).all(|w| w[1] > w[0]), "ratio strictly increasing in delta");
    r
}

fn gh_pair() -> (S, S) {
    (
        S::tensor(S::gaussian(1.0), S::gaussian(1.0)),
        S::tensor(S::shift(0.25, S::gaussian(1.0)), S::gaussian(1.0)),
    )
}

fn product_integral(g: &S, h: &S, cfg: &QuadConfig) -> Result<f64, ExperimentError> {
    let args = [Affine::var(0), Affine::var(1)];
    let r = Integrand::new(2, Kernel::None).with(g, &args)?.with(h, &args)?.integrate(cfg)?;
    Ok(r.re())
}

/// `Λ_(4,0)(sgn·1_{|x|≤M}, G, H)` against `ln M`; reference `∫GH`.
pub fn exp_l40_blowup(m_list: &[f64], cfg: &QuadConfig) -> Result<SweepResult, ExperimentError> {
    at_least_three(m_list.len(), "M list")?;
    let (g, h) = gh_pair();
    let gh = product_integral(&g, &h, cfg)?;
    let norms = lp_norm(&g, 2.0, 2, cfg)? * lp_norm(&h, 2.0, 2, cfg)?;
    let nf = NormalForm::L4(num_zero());
    let mut points = Vec::new();
    for &m in m_list {
        let f = S::SignWindow { m };
        let c = QuadConfig { t_max: cfg.t_max.max(4.0 * m), ..cfg.clone() };
        let r = pv_form(&nf, &f, &g, &h, &c)?;
        let rhs = lp_norm(&f, f64::INFINITY, 1, cfg)? * norms;
        points.push(SweepPoint { parameter: m, value: r.re(), error_estimate: r.error_estimate, lhs: r.value.norm(), rhs });
    }
    SweepResult::new("l40-blowup", points, FitTarget::Value, FitAxes::SemiLog, Some(gh))
}

fn num_zero() -> blform_core::Rational {
    blform_core::exactla::rat(0)
}

pub fn l40_verdict(s: &SweepResult) -> VerdictReport {
    let mut r = VerdictReport::new(&s.name);
    let gh = s.reference.unwrap_or(f64::NAN);
    let k = s.fit.slope / gh;
    r.check((1.8..=2.2).contains(&k), format!("slope vs ln M = {:.4} = {k:.4} x integral(GH) in [1.8, 2.2]", s.fit.slope));
    let rhs: Vec<f64> = s.points.iter().map(|p| p.rhs).collect();
    let spread = rhs.iter().copied().fold(0f64, f64::max) / rhs.iter().copied().fold(f64::INFINITY, f64::min);
    r.check(spread < 1.0 + 1e-9, format!("norm product constant in M (spread {spread:.3e})"));
    r
}

/// `Λ_(3)` with `G = sgn(g)|g|^½ ⊗ φ(·/N)`, `H = |g|^½ ⊗ φ(·/N)`.
///
/// Columns: `value = Λ/N`, `rhs = ‖G‖₂‖H‖₂`; the fit is of `rhs` against `N`.
/// Reference: `‖φ‖₂² ∫ g·Hf`, the limit of `Λ/N`.
pub fn exp_l3_dilation(n_list: &[f64], cfg: &QuadConfig) -> Result<SweepResult, ExperimentError> {
    let f = S::SignWindow { m: 50.0 };
    let g = S::Box { lo: 0.0, hi: 1.0 };
    l3_sweep(n_list, &f, &g, cfg)
}

pub fn l3_sweep(n_list: &[f64], f: &S, g: &S, cfg: &QuadConfig) -> Result<SweepResult, ExperimentError> {
    at_least_three(n_list.len(), "N list")?;
    let phi_sq = lp_norm(&S::SmoothBump, 2.0, 1, cfg)?.powi(2);
    let (glo, ghi) = support_1d(g);
    let pairing: f64 = panel_rule(glo, ghi, 16)
        .into_iter()
        .map(|(x, w)| -> Result<f64, ExperimentError> {
            Ok(w * g.eval(&[x]).map_err(crate::quad::QuadError::from)?.re * hilbert_pairing(f, x, cfg)?.re())
        })
        .sum::<Result<f64, _>>()?;
    let mut points = Vec::new();
    for &n in n_list {
        if !(n >= 1.0) {
            return Err(ExperimentError::InvalidParameter(format!("need N >= 1, got {n}")));
        }
        let bump = S::dilate(n, S::SmoothBump);
        let gg = S::tensor(S::sqrt_split(g.clone(), SqrtSign::Signed), bump.clone());
        let hh = S::tensor(S::sqrt_split(g.clone(), SqrtSign::Abs), bump);
        let r = pv_form(&NormalForm::L3, f, &gg, &hh, cfg)?;
        let rhs = lp_norm(&gg, 2.0, 2, cfg)? * lp_norm(&hh, 2.0, 2, cfg)?;
        points.push(SweepPoint {
            parameter: n,
            value: r.re() / n,
            error_estimate: r.error_estimate / n,
            lhs: r.value.norm(),
            rhs,
        });
    }
    SweepResult::new("l3-dilation", points, FitTarget::Rhs, FitAxes::LogLog, Some(phi_sq * pairing))
}

fn support_1d(g: &S) -> (f64, f64) {
    let p = &crate::spec::profiles(g, 1, crate::spec::CUTOFF)[0];
    (p.lo.max(-12.0), p.hi.min(12.0))
}

pub fn l3_verdict(s: &SweepResult) -> VerdictReport {
    let mut r = VerdictReport::new(&s.name);
    let v = s.values();
    let n = v.len();
    let last_step = v[n - 1] / v[n - 2];
    r.check((last_step - 1.0).abs() <= 0.1, format!("successive value/N ratio {last_step:.4} within 10% of 1"));
    if let Some(limit) = s.reference {
        let rel = (v[n - 1] - limit).abs() / limit.abs();
        r.check(rel <= 0.1, format!("value/N {:.6} vs limit {limit:.6} (rel {rel:.3})", v[n - 1]));
    }
    r.check((s.fit.slope - 1.0).abs() <= 0.05, format!("norm-product slope {:.4} vs 1 ± 0.05", s.fit.slope));
    r
}

/// Widths of the sign functions `f_w(x) = sgn(x−c)φ((x−c)/w)`.
pub const WIDTHS: [f64; 3] = [10.0, 100.0, 1000.0];

#[derive(Clone, Debug)]
pub struct SeedValues {
    pub seed: u64,
    pub g: S,
    pub h: S,
    /// `(w, Λ, error estimate)` per width.
    pub lambdas: Vec<(f64, f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct BoundednessValues {
    pub form: NormalForm,
    pub seeds: Vec<SeedValues>,
}

fn sign_bump(c: f64, w: f64) -> S {
    S::shift(c, S::product(vec![S::SignWindow { m: w }, S::dilate(w, S::SmoothBump)]))
}

/// Form values for seeds `base, …, base+count−1`; independent of the exponents.
pub fn boundedness_values(
    form: &NormalForm,
    count: u64,
    base_seed: u64,
    cfg: &QuadConfig,
) -> Result<BoundednessValues, ExperimentError> {
    let mut seeds = Vec::new();
    for seed in base_seed..base_seed + count {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = rng.gen_range(-2.0..=2.0);
        let g = random_gaussian_2d(&mut rng);
        let h = random_gaussian_2d(&mut rng);
        let mut lambdas = Vec::new();
        for w in WIDTHS {
            let cw = QuadConfig { t_max: cfg.t_max.max(2.0 * w + 10.0), ..cfg.clone() };
            let r = pv_form(form, &sign_bump(c, w), &g, &h, &cw)?;
            lambdas.push((w, r.value.norm(), r.error_estimate));
        }
        seeds.push(SeedValues { seed, g, h, lambdas });
    }
    Ok(BoundednessValues { form: form.clone(), seeds })
}

/// One sweep per seed: ratio `|Λ|/(‖f‖∞‖G‖_{p₂}‖H‖_{p₃})` against the width.
pub fn boundedness_sweeps(
    values: &BoundednessValues,
    p: &ExponentTriple,
    cfg: &QuadConfig,
) -> Result<Vec<SweepResult>, ExperimentError> {
    let mut out = Vec::new();
    for s in &values.seeds {
        let norms = lp_norm(&s.g, p.p2, 2, cfg)? * lp_norm(&s.h, p.p3, 2, cfg)?;
        let points = s
            .lambdas
            .iter()
            .map(|&(w, lam, err)| SweepPoint { parameter: w, value: lam, error_estimate: err, lhs: lam, rhs: norms })
            .collect();
        let name = format!("boundedness {} seed {}", values.form, s.seed);
        out.push(SweepResult::new(&name, points, FitTarget::Ratio, FitAxes::LogLog, None)?);
    }
    Ok(out)
}

/// Per seed: ratio max/min `< 5` and `|slope| < 0.1` on log-log against the width.
pub fn boundedness_verdict(name: &str, sweeps: &[SweepResult]) -> VerdictReport {
    let mut r = VerdictReport::new(name);
    r.note("bounded = ratio max/min < 5 and |log-log slope| < 0.1 over widths 10..1000");
    for s in sweeps {
        let ratios = s.ratios();
        let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0f64), |(a, b), &x| (a.min(x), b.max(x)));
        r.check(
            hi / lo < 5.0 && s.fit.slope.abs() < 0.1,
            format!("{}: max/min {:.4}, slope {:.4}", s.name, hi / lo, s.fit.slope),
        );
    }
    r
}

pub fn exp_boundedness_sweep(
    form: &NormalForm,
    p: &ExponentTriple,
    seeds: u64,
    base_seed: u64,
    cfg: &QuadConfig,
) -> Result<VerdictReport, ExperimentError> {
    let values = boundedness_values(form, seeds, base_seed, cfg)?;
    let sweeps = boundedness_sweeps(&values, p, cfg)?;
    let name = format!("boundedness {form} p=({},{},{})", p.p1, p.p2, p.p3);
    Ok(boundedness_verdict(&name, &sweeps))
}
