//! Reductions of the truncated special triangular form to BHT (`α ≠ 1`)
//! and to the Carleson form (`α = 1`) by the witness change of variables.
//!
//! For `α ≠ 1` the substitution turns `φ(y) G H` into
//! `g(x) h(x+(1−α)t) φ((x+y)/(α−1)) φ(y)²`; the `y`-integral gives the weight
//! `m(x) = ∫ φ((x+y)/(α−1)) φ(y)² dy`, which is compactly supported with
//! `0 ≤ m ≤ min{2, 2|α−1|}`.

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use blform_core::exactla::{to_f64, Rational};
use blform_core::{triangular_unit_witness, triangular_witness, EquivalenceWitness};

use super::{random_gaussian, ExperimentError, VerdictReport};
use crate::forms::{carleson_form, lp_norm, trunc_special_form};
use crate::gauss::push_panel;
use crate::quad::{Affine, Integrand, Kernel, QuadConfig};
use crate::spec::{smooth_bump, ArgProfile, FunctionSpec as S, PhaseStep, SqrtSign};

const BUMP_BREAKS: [f64; 10] = [-1.0, -0.975, -0.95, -0.925, -0.9, 0.9, 0.925, 0.95, 0.975, 1.0];

/// `m(x) = ∫ φ((x+y)/a) φ(y)² dy` with `a = α−1`.
pub fn bht_weight(alpha: f64) -> impl Fn(f64) -> f64 + Send + Sync + Clone {
    let a = alpha - 1.0;
    move |x: f64| {
        let lo = (-1.0f64).max(-x - a.abs());
        let hi = 1.0f64.min(-x + a.abs());
        if !(lo < hi) {
            return 0.0;
        }
        let mut cuts = vec![lo, hi];
        for b in BUMP_BREAKS {
            cuts.extend([b, a * b - x].into_iter().filter(|c| *c > lo && *c < hi));
        }
        cuts.sort_by(f64::total_cmp);
        let mut nodes = Vec::new();
        for w in cuts.windows(2) {
            let pieces = 4;
            let h = (w[1] - w[0]) / pieces as f64;
            for k in 0..pieces {
                push_panel(&mut nodes, w[0] + k as f64 * h, w[0] + (k + 1) as f64 * h);
            }
        }
        nodes
            .into_iter()
            .map(|(y, wt)| wt * smooth_bump((x + y) / a) * smooth_bump(y).powi(2))
            .sum()
    }
}

/// One seeded trial: both sides of a reduction identity.
#[derive(Clone, Debug, PartialEq)]
pub struct ReductionTrial {
    pub seed: u64,
    pub lhs: Complex64,
    pub rhs: Complex64,
}

impl ReductionTrial {
    pub fn rel(&self) -> f64 {
        (self.lhs - self.rhs).norm() / self.rhs.norm()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionOutcome {
    pub report: VerdictReport,
    pub trials: Vec<ReductionTrial>,
}

impl ReductionOutcome {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("seed,lhs_re,lhs_im,rhs_re,rhs_im,rel\n");
        for t in &self.trials {
            writeln!(
                s,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                t.seed, t.lhs.re, t.lhs.im, t.rhs.re, t.rhs.im, t.rel()
            )
            .expect("write to string");
        }
        s
    }
}

fn record(report: &mut VerdictReport, trials: &mut Vec<ReductionTrial>, t: ReductionTrial, what: &str) {
    let rel = t.rel();
    report.check(
        rel <= REL_TOL && t.rhs.norm() > 0.0,
        format!("seed {}: {what} {:.10e} vs {:.10e} (rel {rel:.2e})", t.seed, t.lhs, t.rhs),
    );
    trials.push(t);
}

/// Relative agreement required between the two quadratures.
pub const REL_TOL: f64 = 1e-3;

fn rational(x: f64) -> Result<Rational, ExperimentError> {
    Rational::from_float(x).ok_or_else(|| ExperimentError::InvalidParameter(format!("{x} is not finite")))
}

fn rows(w: &EquivalenceWitness, j: usize) -> Vec<Vec<f64>> {
    w.a(j).to_f64_rows()
}

fn det_b(w: &EquivalenceWitness) -> f64 {
    to_f64(&w.b.determinant().expect("square")).abs()
}

/// `|det B|⁻¹ Λ̃̃_α(f, (g⊗φ)∘A₂, (h⊗φ)∘A₃)` against `∫∫ f(x+t)g(x)m(x)h(x+(1−α)t) dt dx / t`
/// on seeded random Gaussian triples; also checks the envelope of `m`.
pub fn exp_reduction_bht(
    alpha: f64,
    trials: u64,
    base_seed: u64,
    cfg: &QuadConfig,
) -> Result<ReductionOutcome, ExperimentError> {
    let w = triangular_witness(&rational(alpha)?)
        .ok_or_else(|| ExperimentError::InvalidParameter("alpha = 1 has no BHT reduction".into()))?;
    let mut report = VerdictReport::new(&format!("reduce-bht alpha={alpha}"));
    let mut out = Vec::new();
    let weight = bht_weight(alpha);
    let a = (alpha - 1.0).abs();
    let reach = 1.0 + a;
    let weight_fn = weight.clone();
    let custom: crate::quad::CustomFn = Arc::new(move |p: &[f64]| Complex64::new(weight_fn(p[0]), 0.0));
    let profile = ArgProfile::bounded(-reach, reach).with_scale(0.025 * a.min(1.0));

    for seed in base_seed..base_seed + trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, g, h) = (random_gaussian(&mut rng), random_gaussian(&mut rng), random_gaussian(&mut rng));
        let gg = S::pullback(rows(&w, 2), S::tensor(g.clone(), S::SmoothBump), 2);
        let hh = S::pullback(rows(&w, 3), S::tensor(h.clone(), S::SmoothBump), 2);
        let lhs = trunc_special_form(&f, &gg, &hh, alpha, cfg)?.scaled(1.0 / det_b(&w));
        let rhs = Integrand::new(2, Kernel::Odd)
            .with(&f, &[Affine::linear([1.0, 1.0, 0.0])])?
            .with(&g, &[Affine::var(0)])?
            .with(&h, &[Affine::linear([1.0, 1.0 - alpha, 0.0])])?
            .with_custom(custom.clone(), &[Affine::var(0)], vec![profile.clone()])
            .integrate(cfg)?;
        let t = ReductionTrial { seed, lhs: lhs.value, rhs: rhs.value };
        record(&mut report, &mut out, t, "special form vs weighted BHT");
    }

    let cap = 2.0f64.min(2.0 * a);
    let (mut envelope_ok, mut stated_violations, mut total) = (true, 0usize, 0usize);
    let steps = 400;
    for k in 0..=steps {
        let x = -reach - 0.5 + (2.0 * reach + 1.0) * k as f64 / steps as f64;
        let m = weight(x);
        let plateau = (0.9f64.min(-x + 0.9 * a) - (-0.9f64).max(-x - 0.9 * a)).max(0.0);
        envelope_ok &= m >= plateau - 1e-9 && m <= cap + 1e-9;
        total += 1;
        if !(m >= cap && m <= 2.0 * a + 2.0) {
            stated_violations += 1;
        }
    }
    report.check(envelope_ok, format!("weight satisfies plateau lower bound and m <= min(2, 2|alpha-1|) = {cap}"));
    report.note(format!(
        "envelope min(2,2|alpha-1|) <= m <= 2|alpha-1|+2 fails at {stated_violations}/{total} grid points; m(0) = {:.6}, m vanishes for |x| >= {reach}",
        weight(0.0)
    ));
    Ok(ReductionOutcome { report, trials: out })
}

const FREQUENCIES: [f64; 6] = [3.0, -2.0, 1.5, -1.0, 2.5, 0.5];

/// `N(x)` with `pieces` constant pieces split evenly over `[−1, 1]`.
pub fn phase_steps(pieces: usize) -> Vec<PhaseStep> {
    let cut = |k: usize| -1.0 + 2.0 * k as f64 / pieces as f64;
    (0..pieces)
        .map(|k| PhaseStep {
            lo: (k > 0).then(|| cut(k)),
            hi: (k + 1 < pieces).then(|| cut(k + 1)),
            freq: FREQUENCIES[k % FREQUENCIES.len()],
        })
        .collect()
}

/// `Λ̃̃_1(f, G, H)` with `G∘A₂⁻¹ = e^{−2πiN(x)y} sgn(g)|g|^½(x)` and
/// `H∘A₃⁻¹ = e^{2πiN(x)y}|g|^½(x)` against `C(f, g)·‖φ‖₁`.
pub fn exp_reduction_carleson(
    pieces: usize,
    trials: u64,
    base_seed: u64,
    cfg: &QuadConfig,
) -> Result<ReductionOutcome, ExperimentError> {
    if pieces == 0 {
        return Err(ExperimentError::InvalidParameter("need at least one phase piece".into()));
    }
    let steps = phase_steps(pieces);
    let w = triangular_unit_witness();
    let phi_l1 = lp_norm(&S::SmoothBump, 1.0, 1, cfg)?;
    let one = || S::Const { value: 1.0 };
    let mut report = VerdictReport::new(&format!("reduce-carleson pieces={pieces}"));
    let mut out = Vec::new();
    for seed in base_seed..base_seed + trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, g) = (random_gaussian(&mut rng), random_gaussian(&mut rng));
        let gt = S::product(vec![
            S::tensor(S::sqrt_split(g.clone(), SqrtSign::Signed), one()),
            S::PhaseChirp { steps: steps.clone(), sign: -1.0 },
        ]);
        let ht = S::product(vec![
            S::tensor(S::sqrt_split(g.clone(), SqrtSign::Abs), one()),
            S::PhaseChirp { steps: steps.clone(), sign: 1.0 },
        ]);
        let gg = S::pullback(rows(&w, 2), gt, 2);
        let hh = S::pullback(rows(&w, 3), ht, 2);
        let lhs = trunc_special_form(&f, &gg, &hh, 1.0, cfg)?.scaled(1.0 / det_b(&w));
        let rhs = carleson_form(&f, &g, &steps, cfg)?.scaled(phi_l1);
        let t = ReductionTrial { seed, lhs: lhs.value, rhs: rhs.value };
        record(&mut report, &mut out, t, "special form vs Carleson x |phi|_1");
    }
    Ok(ReductionOutcome { report, trials: out })
}
