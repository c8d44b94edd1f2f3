//! Internal consistency checks of the quadrature: convergence under
//! refinement, the logarithmic law of the truncated Hilbert transform of a
//! sign window, and slice-wise evaluation of `Λ_(4,β)`.

use num_complex::Complex64;

use blform_core::exactla::rat;
use blform_core::NormalForm;

use super::{ExperimentError, VerdictReport};
use crate::forms::{bht_form, hilbert_pairing, l4_by_slices, pv_form};
use crate::quad::{QuadConfig, QuadError};
use crate::spec::FunctionSpec as S;

type Evaluator = Box<dyn Fn(&QuadConfig) -> Result<Complex64, QuadError>>;

fn g(shift: f64, a: f64) -> S {
    S::shift(shift, S::gaussian(a))
}

fn battery() -> Vec<(&'static str, Evaluator)> {
    let g2 = |sx, sy| S::tensor(g(sx, 1.0), g(sy, 1.0));
    vec![
        (
            "hilbert pairing",
            Box::new(move |c: &QuadConfig| Ok(hilbert_pairing(&g(0.4, 1.0), 0.1, c)?.value)),
        ),
        (
            "bht alpha=2",
            Box::new(move |c: &QuadConfig| Ok(bht_form(&g(0.3, 1.0), &g(-0.2, 0.8), &g(0.7, 1.2), 2.0, c)?.value)),
        ),
        (
            "L4(2)",
            Box::new(move |c: &QuadConfig| {
                Ok(pv_form(&NormalForm::L4(rat(2)), &g(0.3, 1.0), &g2(0.2, -0.4), &g2(-0.1, 0.6), c)?.value)
            }),
        ),
        (
            "L1",
            Box::new(move |c: &QuadConfig| {
                Ok(pv_form(&NormalForm::L1, &g(0.3, 1.0), &g2(0.2, -0.4), &g2(-0.1, 0.6), c)?.value)
            }),
        ),
    ]
}

/// Doubling the resolution from `base` at least halves the distance to a
/// reference computed at eight times the resolution, unless both
/// distances already sit at the roundoff floor.
pub fn refinement_battery(base: &QuadConfig) -> Result<VerdictReport, ExperimentError> {
    let base = QuadConfig { refine: false, ..base.clone() };
    let fine = base.doubled();
    let reference = fine.doubled().doubled();
    let mut report = VerdictReport::new("refinement");
    for (name, eval) in battery() {
        let r = eval(&reference)?;
        let e0 = (eval(&base)? - r).norm();
        let e1 = (eval(&fine)? - r).norm();
        let floor = 1e-12 * r.norm();
        report.check(
            e1 <= 0.5 * e0 || (e0 <= floor && e1 <= floor),
            format!("{name}: error {e0:.3e} -> {e1:.3e} on doubling (floor {floor:.1e})"),
        );
    }
    Ok(report)
}

/// `∫_{1≤|t|≤T} sgn(t)1_{|t|≤M}/t dt = 2 ln M` within 0.5%.
pub fn hilbert_log_law(ms: &[f64], cfg: &QuadConfig) -> Result<VerdictReport, ExperimentError> {
    let mut report = VerdictReport::new("hilbert log law");
    for &m in ms {
        let c = QuadConfig { t_eps: 1.0, t_max: cfg.t_max.max(2.0 * m), ..cfg.clone() };
        let v = hilbert_pairing(&S::SignWindow { m }, 0.0, &c)?.re();
        let want = 2.0 * m.ln();
        let rel = (v - want).abs() / want;
        report.check(rel <= 5e-3, format!("M = {m}: {v:.10} vs 2 ln M = {want:.10} (rel {rel:.2e})"));
    }
    Ok(report)
}

/// `Λ_(4,β)` against a `y`-quadrature of BHT values on slices.
pub fn slice_consistency(beta: f64, cfg: &QuadConfig) -> Result<VerdictReport, ExperimentError> {
    let f = g(0.3, 1.0);
    let gg = S::tensor(g(0.2, 1.0), g(-0.4, 1.0));
    let hh = S::tensor(g(-0.1, 1.0), g(0.6, 1.0));
    let beta_q = blform_core::Rational::from_float(beta)
        .ok_or_else(|| ExperimentError::InvalidParameter(format!("beta {beta}")))?;
    let full = pv_form(&NormalForm::L4(beta_q), &f, &gg, &hh, cfg)?;
    let sliced = l4_by_slices(&f, &gg, &hh, beta, 7.0, 28, cfg)?;
    let diff = (full.value - sliced.value).norm();
    let band = 4.0 * (full.error_estimate + sliced.error_estimate) + 1e-10 * full.value.norm();
    let mut report = VerdictReport::new("slice consistency");
    report.check(
        diff <= band,
        format!("beta {beta}: full {:.12e} vs slices {:.12e}, diff {diff:.2e} <= band {band:.2e}", full.re(), sliced.re()),
    );
    Ok(report)
}
