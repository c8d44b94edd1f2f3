//! Fast deterministic battery: exact round trips and quadrature oracles.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use blform_core::exactla::{rat, ratio};
use blform_core::random::random_witness;
use blform_core::{apply_witness, classify, cross_ratio, BlDatum, CrossRatio, NormalForm};
use blform_numerics::experiments::{hilbert_log_law, tht_endpoint_oracle};
use blform_numerics::forms::{hilbert_pairing, lp_norm};
use blform_numerics::quad::{Affine, Integrand, Kernel, QuadConfig};
use blform_numerics::spec::FunctionSpec as S;

/// Faults the battery must detect.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Fault {
    /// Perturb one entry of the expected normal-form datum.
    Targets,
}

struct Battery {
    lines: Vec<String>,
    failed: bool,
}

impl Battery {
    fn check(&mut self, name: &str, ok: bool, detail: String) {
        let tag = if ok { "ok" } else { "FAIL" };
        self.lines.push(format!("{tag} {name}: {detail}"));
        self.failed |= !ok;
    }
}

fn expected(nf: &NormalForm, fault: Option<Fault>) -> BlDatum {
    let d = BlDatum::of_normal_form(nf);
    if fault != Some(Fault::Targets) {
        return d;
    }
    let mut pi1 = d.pi(1).clone();
    pi1[(0, 0)] = &pi1[(0, 0)] + rat(1);
    BlDatum::new(pi1, d.pi(2).clone(), d.pi(3).clone(), d.pi(4).clone()).expect("shapes kept")
}

fn catalogue() -> Vec<NormalForm> {
    vec![
        NormalForm::Zero,
        NormalForm::L1,
        NormalForm::L2,
        NormalForm::L3,
        NormalForm::L4(rat(-2)),
        NormalForm::L4(rat(0)),
        NormalForm::L4(ratio(1, 3)),
        NormalForm::L4(rat(1)),
        NormalForm::L4(rat(7)),
    ]
}

fn exact(b: &mut Battery, fault: Option<Fault>) {
    for nf in catalogue() {
        let base = BlDatum::of_normal_form(&nf);
        let want = expected(&nf, fault);
        let mut bad = Vec::new();
        for seed in 0..5u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = apply_witness(&base, &random_witness(&mut rng)).expect("invertible witness");
            let ok = classify(&d).is_ok_and(|c| {
                c.normal_form == nf && apply_witness(&d, &c.witness).is_ok_and(|image| image == want)
            });
            if !ok {
                bad.push(seed);
            }
        }
        b.check("round-trip", bad.is_empty(), format!("{nf} over 5 seeds, failing seeds {bad:?}"));
    }
    for beta in [rat(5), rat(-3), ratio(2, 7)] {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let base = BlDatum::of_normal_form(&NormalForm::L4(beta.clone()));
        let d = apply_witness(&base, &random_witness(&mut rng)).expect("invertible witness");
        let got = cross_ratio(&d);
        let shown = got.as_ref().map_or_else(|e| e.to_string(), |c| c.to_string());
        b.check("cross-ratio", got == Ok(CrossRatio::Finite(beta.clone())), format!("L4:{beta} -> {shown}"));
    }
    for alpha in [rat(2), rat(3), rat(-1), rat(1)] {
        let want = if alpha == rat(1) { NormalForm::L3 } else { NormalForm::L4(rat(1) - &alpha) };
        let got = classify(&BlDatum::special_triangular(&alpha)).map(|c| c.normal_form);
        let shown = got.as_ref().map_or_else(|e| e.to_string(), |nf| nf.to_string());
        b.check("triangular", got.as_ref() == Ok(&want), format!("alpha {alpha} -> {shown}"));
    }
}

fn numeric(b: &mut Battery) {
    let cfg = QuadConfig { xy_points: 64, t_panels: 32, ..QuadConfig::default() };
    let box_h = hilbert_pairing(&S::Box { lo: 0.0, hi: 1.0 }, 2.0, &cfg).map(|r| r.re());
    b.check(
        "oracle",
        box_h.as_ref().is_ok_and(|v| (v + 2f64.ln()).abs() < 1e-10),
        format!("hilbert of [0,1) at 2 = -ln 2: {box_h:?}"),
    );
    let l2 = lp_norm(&S::gaussian(1.0), 2.0, 1, &QuadConfig::default());
    b.check(
        "oracle",
        l2.as_ref().is_ok_and(|v| (v - 2f64.powf(-0.25)).abs() < 1e-10),
        format!("gaussian L2 norm = 2^(-1/4): {l2:?}"),
    );
    match hilbert_log_law(&[10.0, 100.0], &cfg) {
        Ok(r) => b.check("oracle", r.passed, format!("hilbert log law: {}", r.diagnostics.join("; "))),
        Err(e) => b.check("oracle", false, format!("hilbert log law: {e}")),
    }
    let delta: f64 = 100.0;
    let g = S::scale(delta.powf(-0.5), S::Box { lo: 0.0, hi: delta });
    let c = QuadConfig { t_eps: 2.0, t_max: delta, ..cfg.clone() };
    let v = Integrand::new(2, Kernel::Even)
        .with(&g, &[Affine::var(0)])
        .and_then(|i| i.with(&g, &[Affine::linear([1.0, 1.0, 0.0])]))
        .map_err(|e| e.to_string())
        .and_then(|i| i.integrate(&c).map_err(|e| e.to_string()))
        .map(|r| r.re());
    let oracle = tht_endpoint_oracle(delta);
    b.check(
        "oracle",
        v.as_ref().is_ok_and(|v| (v - oracle).abs() <= 1e-2 * oracle),
        format!("endpoint integral at delta 100 vs {oracle:.12}: {v:?}"),
    );
}

/// Runs the battery; returns the report lines and whether everything passed.
pub fn run(fault: Option<Fault>) -> (String, bool) {
    let mut b = Battery { lines: Vec::new(), failed: false };
    exact(&mut b, fault);
    numeric(&mut b);
    let summary = if b.failed { "selftest: FAIL" } else { "selftest: ok" };
    b.lines.push(summary.to_string());
    (b.lines.join("\n") + "\n", !b.failed)
}
