//! Truncated singular forms built on the quadrature engine.
//!
//! Every kernel `1/t` is truncated to `t_eps ≤ |t| ≤ t_max` and integrated
//! in paired form. Orientation: `tht_form` uses `1/(x+y+z)` and the rotated
//! parameterization satisfies `tht_form(F, G, H) = −tht_rotated_form(F̃, G, H̃)`
//! with `F̃(a, y) = F(−a−y, y)` and `H̃(z, b) = H(z, −b−z)`.

use blform_core::exactla::{to_f64, Rational, RationalMatrix};
use blform_core::{BlDatum, NormalForm};

use crate::quad::{Affine, Integrand, Kernel, QuadConfig, QuadError, QuadResult};
use crate::spec::{FunctionSpec, PhaseStep};

const X: [f64; 3] = [1.0, 0.0, 0.0];
const Y: [f64; 3] = [0.0, 1.0, 0.0];
const T: [f64; 3] = [0.0, 0.0, 1.0];

fn lin(c: [f64; 3]) -> Affine {
    Affine::linear(c)
}

/// `∫_{ε≤|t|≤T} f(x+t)/t dt`, computed as `∫_ε^T (f(x+t) − f(x−t))/t dt`.
pub fn hilbert_pairing(f: &FunctionSpec, x: f64, cfg: &QuadConfig) -> Result<QuadResult, QuadError> {
    Integrand::new(1, Kernel::Odd)
        .with(f, &[Affine::new(X, x)])?
        .integrate(cfg)
}

/// `p.v.∫ f(Π₁u) G(Π₂u) H(Π₃u) du / Π₄u` for an arbitrary datum.
///
/// Coordinates are changed so that `Π₄u` is the last variable; the
/// truncation applies to `|Π₄u|`.
pub fn datum_form(
    d: &BlDatum,
    f: &FunctionSpec,
    g: &FunctionSpec,
    h: &FunctionSpec,
    cfg: &QuadConfig,
) -> Result<QuadResult, QuadError> {
    let pi4 = d.pi(4);
    if pi4.is_zero() {
        return Err(QuadError::InvalidForm("pi4 vanishes".into()));
    }
    let mut change = None;
    'search: for i in 0..3 {
        for j in i + 1..3 {
            let mut c = RationalMatrix::zeros(3, 3);
            c[(0, i)] = Rational::from_integer(1.into());
            c[(1, j)] = Rational::from_integer(1.into());
            for k in 0..3 {
                c[(2, k)] = pi4[(0, k)].clone();
            }
            if let Ok(inv) = c.inverse() {
                let det = c.determinant().expect("square");
                change = Some((inv, to_f64(&det).abs()));
                break 'search;
            }
        }
    }
    let (cinv, det) = change.expect("some coordinate pair complements a nonzero pi4");
    let rows = |j: usize| -> Vec<Affine> {
        (&*d.pi(j) * &cinv)
            .to_f64_rows()
            .into_iter()
            .map(|r| lin([r[0], r[1], r[2]]))
            .collect()
    };
    Integrand::new(3, Kernel::Odd)
        .with(f, &rows(1))?
        .with(g, &rows(2))?
        .with(h, &rows(3))?
        .times(1.0 / det)
        .integrate(cfg)
}

/// The standard form of a normal form: `f(x+[t]) G(x,y) H(…)/t`.
pub fn pv_form(
    nf: &NormalForm,
    f: &FunctionSpec,
    g: &FunctionSpec,
    h: &FunctionSpec,
    cfg: &QuadConfig,
) -> Result<QuadResult, QuadError> {
    datum_form(&BlDatum::of_normal_form(nf), f, g, h, cfg)
}

/// `∫ f(x+t) G(x,y) H(x+βt, y) m(t) dt dx dy` with the band-limited weight `m`.
pub fn smoothed_form_4beta(
    f: &FunctionSpec,
    g: &FunctionSpec,
    h: &FunctionSpec,
    beta: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult, QuadError> {
    // Variables (t, x, y).
    Integrand::new(3, Kernel::None)
        .with(&FunctionSpec::BandlimitedM, &[lin(X)])?
        .with(f, &[lin([1.0, 1.0, 0.0])])?
        .with(g, &[lin(Y), lin(T)])?
        .with(h, &[lin([beta, 1.0, 0.0]), lin(T)])?
        .integrate(cfg)
}

/// `p.v.∫ F(x,y) G(y,z) H(z,x) dx dy dz / (x+y+z)`.
pub fn tht_form(
    ff: &FunctionSpec,
    g: &FunctionSpec,
    h: &FunctionSpec,
    cfg: &QuadConfig,
) -> Result<QuadResult, QuadError> {
    // Variables (x, y, t) with z = t − x − y.
    let z = lin([-1.0, -1.0, 1.0]);
    Integrand::new(3, Kernel::Odd)
        .with(ff, &[lin(X), lin(Y)])?
        .with(g, &[lin(Y), z])?
        .with(h, &[z, lin(X)])?
        .integrate(cfg)
}

/// `p.v.∫ F̃(z+t, y) G(y,z) H̃(z, y+t) dt dy dz / t`.
pub fn tht_rotated_form(
    ff: &FunctionSpec,
    g: &FunctionSpec,
    h: &FunctionSpec,
    cfg: &QuadConfig,
) -> Result<QuadResult, QuadError> {
    // Variables (y, z, t).
    Integrand::new(3, Kernel::Odd)
        .with(ff, &[lin([0.0, 1.0, 1.0]), lin(X)])?
        .with(g, &[lin(X), lin(Y)])?
        .with(h, &[lin(Y), lin([1.0, 0.0, 1.0])])?
        .integrate(cfg)
}

/// `p.v.∫ f(x+t) g(x) h(x+αt) dt dx / t`.
pub fn bht_form(
    f: &FunctionSpec,
    g: &FunctionSpec,
    h: &FunctionSpec,
    alpha: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult, QuadError> {
    Integrand::new(2, Kernel::Odd)
        .with(f, &[lin([1.0, 1.0, 0.0])])?
        .with(g, &[lin(X)])?
        .with(h, &[lin([1.0, alpha, 0.0])])?
        .integrate(cfg)
}

/// `p.v.∫ f(x+t) e^{2πiN(x)t} g(x) dt dx / t` with piecewise-constant `N`.
pub fn carleson_form(
    f: &FunctionSpec,
    g: &FunctionSpec,
    phase: &[PhaseStep],
    cfg: &QuadConfig,
) -> Result<QuadResult, QuadError> {
    let chirp = FunctionSpec::PhaseChirp { steps: phase.to_vec(), sign: 1.0 };
    Integrand::new(2, Kernel::Odd)
        .with(f, &[lin([1.0, 1.0, 0.0])])?
        .with(g, &[lin(X)])?
        .with(&chirp, &[lin(X), lin(Y)])?
        .integrate(cfg)
}

/// `p.v.∫ f(x+αy) φ(y) G(y,z) H(z,x) dx dy dz / (x+y+z)` with the fixed bump `φ`.
pub fn trunc_special_form(
    f: &FunctionSpec,
    g: &FunctionSpec,
    h: &FunctionSpec,
    alpha: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult, QuadError> {
    // Variables (x, y, t) with z = t − x − y.
    let z = lin([-1.0, -1.0, 1.0]);
    Integrand::new(3, Kernel::Odd)
        .with(f, &[lin([1.0, alpha, 0.0])])?
        .with(&FunctionSpec::SmoothBump, &[lin(Y)])?
        .with(g, &[lin(Y), z])?
        .with(h, &[z, lin(X)])?
        .integrate(cfg)
}

/// `‖s‖_p` over `ℝ^dim` on the quadrature grid; `p = ∞` is the sup over nodes.
pub fn lp_norm(s: &FunctionSpec, p: f64, dim: usize, cfg: &QuadConfig) -> Result<f64, QuadError> {
    if !(p >= 1.0) {
        return Err(QuadError::InvalidForm(format!("need p >= 1, got {p}")));
    }
    let args: Vec<Affine> = (0..dim).map(Affine::var).collect();
    let ig = Integrand::new(dim, Kernel::None).with(s, &args)?;
    let cfg = QuadConfig { refine: false, ..cfg.clone() };
    cfg.validate()?;
    if p.is_infinite() {
        return Ok(ig.sup_on_nodes(&cfg));
    }
    let (v, _) = ig.abs_pow(p).run(&cfg);
    Ok(v.re.powf(1.0 / p))
}

/// `G(·, y)` as a one-variable spec.
pub fn slice_at(g: &FunctionSpec, y: f64) -> FunctionSpec {
    FunctionSpec::pullback(vec![vec![1.0, 0.0], vec![0.0, y]], g.clone(), 1)
}

/// `Λ_(4,β)` evaluated as a `y`-quadrature of BHT values on the slices
/// `G(·,y)`, `H(·,y)`. The `y` nodes are composite Gauss panels on
/// `[−y_half, y_half]`.
pub fn l4_by_slices(
    f: &FunctionSpec,
    g: &FunctionSpec,
    h: &FunctionSpec,
    beta: f64,
    y_half: f64,
    y_panels: usize,
    cfg: &QuadConfig,
) -> Result<QuadResult, QuadError> {
    let nodes = crate::gauss::panel_rule(-y_half, y_half, y_panels);
    let mut out = QuadResult {
        value: Default::default(),
        error_estimate: 0.0,
        converged: true,
    };
    for (y, w) in nodes {
        let r = bht_form(f, &slice_at(g, y), &slice_at(h, y), beta, cfg)?;
        out.value += r.value * w;
        out.error_estimate += r.error_estimate * w;
        out.converged &= r.converged;
    }
    Ok(out)
}
