//! Iterated composite Gauss-Legendre quadrature of products of leaves.
//!
//! An [`Integrand`] over variables `v₀, …, v_{n−1}` is a constant times a
//! product of factors, each a leaf function evaluated at affine combinations
//! of the variables. Variables are integrated outermost first. A factor is
//! evaluated at the level of the deepest variable it involves, so partial
//! products are shared across inner levels and a vanishing partial product
//! prunes the whole subtree.
//!
//! When a kernel is present it sits on the last variable `t` and is
//! integrated over `s ∈ [ε, T]` in paired form: `(K(s) − K(−s))/s` for `1/t`
//! and `(K(s) + K(−s))/s` for `1/|t|`. No unpaired `1/t` is ever sampled.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gauss::{push_panel, ORDER};
use crate::spec::{profiles, ArgProfile, FunctionSpec, SpecError, CUTOFF};

pub const MAX_VARS: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("invalid quadrature config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("invalid form: {0}")]
    InvalidForm(String),
    #[error("not converged: value {value}, error estimate {error_estimate:e}")]
    NotConverged { value: Complex64, error_estimate: f64 },
}

/// Ratio of successive panels graded towards a log singularity.
const GRADING: f64 = 4.0;

fn default_tol() -> f64 {
    1e-4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadConfig {
    /// Inner truncation `ε` of the kernel variable.
    pub t_eps: f64,
    /// Outer truncation `T` of the kernel variable.
    pub t_max: f64,
    /// Log-dyadic panels on `[ε, T]`.
    pub t_panels: usize,
    /// Fallback half-width for variables whose support is not otherwise bounded.
    pub xy_box: f64,
    /// Resolution parameter: panel widths scale like `1/xy_points`.
    pub xy_points: usize,
    /// Also integrate at half resolution and report the difference.
    pub refine: bool,
    /// Relative tolerance for `converged`.
    #[serde(default = "default_tol")]
    pub tol: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            t_eps: 1e-3,
            t_max: 1e3,
            t_panels: 64,
            xy_box: 12.0,
            xy_points: 256,
            refine: true,
            tol: default_tol(),
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<(), QuadError> {
        let bad = |m: &str| Err(QuadError::InvalidConfig(m.to_string()));
        if !(self.t_eps > 0.0 && self.t_eps < self.t_max) {
            return bad("need 0 < t_eps < t_max");
        }
        if self.t_panels < 4 {
            return bad("need t_panels >= 4");
        }
        if self.xy_points < 16 {
            return bad("need xy_points >= 16");
        }
        if !(self.xy_box > 0.0) {
            return bad("need xy_box > 0");
        }
        if !(self.tol > 0.0) {
            return bad("need tol > 0");
        }
        Ok(())
    }

    /// Half the resolution in every direction.
    pub fn halved(&self) -> Self {
        QuadConfig {
            t_panels: self.t_panels / 2,
            xy_points: self.xy_points / 2,
            ..self.clone()
        }
    }

    /// Twice the resolution in every direction.
    pub fn doubled(&self) -> Self {
        QuadConfig {
            t_panels: self.t_panels * 2,
            xy_points: self.xy_points * 2,
            ..self.clone()
        }
    }

    fn panel_cap(&self, scale: f64) -> f64 {
        scale * 128.0 / self.xy_points as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    #[serde(with = "complex_serde")]
    pub value: Complex64,
    pub error_estimate: f64,
    pub converged: bool,
}

impl QuadResult {
    pub fn checked(self) -> Result<Self, QuadError> {
        if self.converged {
            Ok(self)
        } else {
            Err(QuadError::NotConverged {
                value: self.value,
                error_estimate: self.error_estimate,
            })
        }
    }

    pub fn re(&self) -> f64 {
        self.value.re
    }

    pub fn scaled(self, c: f64) -> Self {
        QuadResult {
            value: self.value * c,
            error_estimate: self.error_estimate * c.abs(),
            ..self
        }
    }
}

mod complex_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Parts {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(v: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        Parts { re: v.re, im: v.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let p = Parts::deserialize(d)?;
        Ok(Complex64::new(p.re, p.im))
    }
}

/// `Σ coef_i v_i + off`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Affine {
    pub coef: [f64; MAX_VARS],
    pub off: f64,
}

impl Affine {
    pub fn new(coef: [f64; MAX_VARS], off: f64) -> Self {
        Affine { coef, off }
    }

    pub fn var(i: usize) -> Self {
        let mut coef = [0.0; MAX_VARS];
        coef[i] = 1.0;
        Affine { coef, off: 0.0 }
    }

    pub fn linear(coef: [f64; MAX_VARS]) -> Self {
        Affine { coef, off: 0.0 }
    }

    pub fn eval(&self, v: &[f64; MAX_VARS]) -> f64 {
        self.coef[0] * v[0] + self.coef[1] * v[1] + self.coef[2] * v[2] + self.off
    }

    fn combine(weights: &[f64], args: &[Affine], off: f64) -> Affine {
        let mut out = Affine::new([0.0; MAX_VARS], off);
        for (w, a) in weights.iter().zip(args) {
            for i in 0..MAX_VARS {
                out.coef[i] += w * a.coef[i];
            }
            out.off += w * a.off;
        }
        out
    }

    fn depth(&self) -> Option<usize> {
        (0..MAX_VARS).rev().find(|&i| self.coef[i] != 0.0)
    }
}

pub type CustomFn = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

#[derive(Clone)]
enum Leaf {
    Spec(FunctionSpec),
    Custom(CustomFn),
}

#[derive(Clone)]
struct Factor {
    leaf: Leaf,
    args: Vec<Affine>,
    profiles: Vec<ArgProfile>,
}

impl Factor {
    fn eval(&self, v: &[f64; MAX_VARS], power: Option<f64>) -> Complex64 {
        let mut buf = [0.0; 4];
        let n = self.args.len();
        for (slot, a) in buf.iter_mut().zip(&self.args) {
            *slot = a.eval(v);
        }
        let value = match &self.leaf {
            Leaf::Spec(s) => s.eval_unchecked(&buf[..n]),
            Leaf::Custom(f) => f(&buf[..n]),
        };
        match power {
            Some(p) => Complex64::new(value.norm().powf(p), 0.0),
            None => value,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kernel {
    None,
    /// `1/t` on the last variable, principal value.
    Odd,
    /// `1/|t|` on the last variable.
    Even,
}

#[derive(Clone)]
pub struct Integrand {
    nvars: usize,
    kernel: Kernel,
    factors: Vec<Factor>,
    constant: Complex64,
    power: Option<f64>,
}

fn flatten(
    spec: &FunctionSpec,
    args: &[Affine],
    out: &mut Vec<Factor>,
    constant: &mut Complex64,
) -> Result<(), SpecError> {
    if let Some(k) = spec.arity() {
        if k != args.len() {
            return Err(SpecError::ArityMismatch { expected: k, found: args.len() });
        }
    }
    match spec {
        FunctionSpec::Const { value } => *constant *= value,
        FunctionSpec::Scale { c, of } => {
            *constant *= c;
            flatten(of, args, out, constant)?;
        }
        FunctionSpec::Product { factors } => {
            for f in factors {
                flatten(f, args, out, constant)?;
            }
        }
        FunctionSpec::Tensor { fx, fy } => {
            flatten(fx, &args[..1], out, constant)?;
            flatten(fy, &args[1..2], out, constant)?;
        }
        FunctionSpec::LinfDilate { n, of } => {
            let scaled: Vec<Affine> = args.iter().map(|a| Affine::combine(&[1.0 / n], &[*a], 0.0)).collect();
            flatten(of, &scaled, out, constant)?;
        }
        FunctionSpec::Shift { by, of } => {
            flatten(of, &[Affine::combine(&[1.0], args, -by)], out, constant)?;
        }
        FunctionSpec::Pullback { matrix, of, arity } => {
            let inner: Vec<Affine> = matrix
                .iter()
                .map(|row| Affine::combine(&row[..*arity], args, row.get(*arity).copied().unwrap_or(0.0)))
                .collect();
            flatten(of, &inner, out, constant)?;
        }
        leaf => out.push(Factor {
            leaf: Leaf::Spec(leaf.clone()),
            args: args.to_vec(),
            profiles: profiles(leaf, args.len(), CUTOFF),
        }),
    }
    Ok(())
}

impl Integrand {
    pub fn new(nvars: usize, kernel: Kernel) -> Self {
        assert!((1..=MAX_VARS).contains(&nvars));
        Integrand {
            nvars,
            kernel,
            factors: Vec::new(),
            constant: Complex64::new(1.0, 0.0),
            power: None,
        }
    }

    /// Multiplies by `spec(args)`.
    pub fn with(mut self, spec: &FunctionSpec, args: &[Affine]) -> Result<Self, SpecError> {
        spec.check()?;
        let mut c = Complex64::new(1.0, 0.0);
        flatten(spec, args, &mut self.factors, &mut c)?;
        self.constant *= c;
        Ok(self)
    }

    /// Multiplies by an arbitrary function of `args` with the given profiles.
    pub fn with_custom(mut self, f: CustomFn, args: &[Affine], profiles: Vec<ArgProfile>) -> Self {
        assert_eq!(args.len(), profiles.len());
        assert!(args.len() <= 4);
        self.factors.push(Factor {
            leaf: Leaf::Custom(f),
            args: args.to_vec(),
            profiles,
        });
        self
    }

    pub fn times(mut self, c: f64) -> Self {
        self.constant *= c;
        self
    }

    /// Replaces every factor by `|factor|^p`.
    pub fn abs_pow(mut self, p: f64) -> Self {
        self.power = Some(p);
        self
    }

    /// Integral with refinement estimate per `cfg`.
    pub fn integrate(&self, cfg: &QuadConfig) -> Result<QuadResult, QuadError> {
        cfg.validate()?;
        let (value, mass) = self.run(cfg);
        let floor = 16.0 * f64::EPSILON * mass;
        let (error_estimate, converged) = if cfg.refine {
            let (coarse, _) = self.run(&cfg.halved());
            let err = (value - coarse).norm() + floor;
            (err, err <= cfg.tol * value.norm() + 1e-12 * mass)
        } else {
            (floor, true)
        };
        Ok(QuadResult { value, error_estimate, converged })
    }

    /// Single pass without refinement: `(value, ∫|integrand|)`.
    pub fn run(&self, cfg: &QuadConfig) -> (Complex64, f64) {
        match Plan::new(self, cfg) {
            Some(plan) => {
                let (v, m) = plan.integrate();
                let c = self.scalar();
                (v * c, m * c.norm())
            }
            None => (Complex64::new(0.0, 0.0), 0.0),
        }
    }

    /// Largest `|integrand|` over the quadrature nodes.
    pub fn sup_on_nodes(&self, cfg: &QuadConfig) -> f64 {
        match Plan::new(self, cfg) {
            Some(plan) => plan.sup() * self.scalar().norm(),
            None => 0.0,
        }
    }

    fn scalar(&self) -> Complex64 {
        match self.power {
            Some(p) => Complex64::new(self.constant.norm().powf(p), 0.0),
            None => self.constant,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    fn scaled(self, c: f64) -> Interval {
        if c >= 0.0 {
            Interval { lo: c * self.lo, hi: c * self.hi }
        } else {
            Interval { lo: c * self.hi, hi: c * self.lo }
        }
    }
}

struct Plan<'a> {
    ig: &'a Integrand,
    cfg: &'a QuadConfig,
    bbox: [Interval; MAX_VARS],
    /// Factors evaluated at each level.
    owned: Vec<Vec<usize>>,
    /// `(factor, arg)` pairs with a nonzero coefficient at each level.
    touching: Vec<Vec<(usize, usize)>>,
    /// Product of factors that involve no variable.
    fixed: Complex64,
}

/// Interval of `v_i` for which `arg ∈ [p.lo, p.hi]` is possible.
fn solve_for(arg: &Affine, p: &ArgProfile, i: usize, rest: Interval) -> Interval {
    let c = arg.coef[i];
    let lo = p.lo - arg.off - rest.hi;
    let hi = p.hi - arg.off - rest.lo;
    Interval { lo, hi }.scaled(1.0 / c)
}

impl<'a> Plan<'a> {
    fn new(ig: &'a Integrand, cfg: &'a QuadConfig) -> Option<Self> {
        let n = ig.nvars;
        let mut owned = vec![Vec::new(); n];
        let mut touching = vec![Vec::new(); n];
        let mut fixed = Complex64::new(1.0, 0.0);
        let origin = [0.0; MAX_VARS];
        for (k, f) in ig.factors.iter().enumerate() {
            let depth = f.args.iter().filter_map(Affine::depth).max();
            match depth {
                None => fixed *= f.eval(&origin, ig.power),
                Some(d) => {
                    assert!(d < n, "factor uses a variable beyond the integrand's arity");
                    owned[d].push(k);
                }
            }
            for (a, arg) in f.args.iter().enumerate() {
                for (l, t) in touching.iter_mut().enumerate() {
                    if arg.coef[l] != 0.0 {
                        t.push((k, a));
                    }
                }
            }
        }
        if fixed == Complex64::new(0.0, 0.0) {
            return None;
        }
        let whole = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };
        let mut bbox = [whole; MAX_VARS];
        if ig.kernel != Kernel::None {
            bbox[n - 1] = Interval { lo: -cfg.t_max, hi: cfg.t_max };
        }
        let mut plan = Plan { ig, cfg, bbox, owned, touching, fixed };
        plan.propagate()?;
        for b in plan.bbox.iter_mut().take(n) {
            if b.lo == f64::NEG_INFINITY {
                b.lo = -cfg.xy_box;
            }
            if b.hi == f64::INFINITY {
                b.hi = cfg.xy_box;
            }
        }
        plan.propagate()?;
        Some(plan)
    }

    /// Tightens the bounding box from every factor's support; `None` if empty.
    fn propagate(&mut self) -> Option<()> {
        let n = self.ig.nvars;
        for _ in 0..6 {
            for f in &self.ig.factors {
                for (arg, p) in f.args.iter().zip(&f.profiles) {
                    if p.lo == f64::NEG_INFINITY && p.hi == f64::INFINITY {
                        continue;
                    }
                    for i in 0..n {
                        if arg.coef[i] == 0.0 {
                            continue;
                        }
                        let mut rest = Interval { lo: 0.0, hi: 0.0 };
                        for j in (0..n).filter(|&j| j != i && arg.coef[j] != 0.0) {
                            let s = self.bbox[j].scaled(arg.coef[j]);
                            rest.lo += s.lo;
                            rest.hi += s.hi;
                        }
                        let r = solve_for(arg, p, i, rest);
                        let b = &mut self.bbox[i];
                        b.lo = b.lo.max(r.lo);
                        b.hi = b.hi.min(r.hi);
                        if !(b.lo < b.hi) {
                            return None;
                        }
                    }
                }
            }
        }
        Some(())
    }

    /// Feasible interval, breakpoints and length scale of `v_l` given `vals[..l]`.
    fn slice(&self, l: usize, vals: &[f64; MAX_VARS]) -> Option<(Interval, Vec<f64>, f64)> {
        let n = self.ig.nvars;
        let mut dom = self.bbox[l];
        let mut breaks = Vec::new();
        let mut scale = f64::INFINITY;
        for &(k, a) in &self.touching[l] {
            let f = &self.ig.factors[k];
            let (arg, p) = (&f.args[a], &f.profiles[a]);
            let c = arg.coef[l];
            scale = scale.min(p.scale / c.abs());
            let known: f64 = (0..l).map(|j| arg.coef[j] * vals[j]).sum::<f64>() + arg.off;
            let mut deeper = Interval { lo: 0.0, hi: 0.0 };
            for j in (l + 1..n).filter(|&j| arg.coef[j] != 0.0) {
                let s = self.bbox[j].scaled(arg.coef[j]);
                deeper.lo += s.lo;
                deeper.hi += s.hi;
            }
            if p.lo > f64::NEG_INFINITY || p.hi < f64::INFINITY {
                let r = Interval { lo: p.lo - known - deeper.hi, hi: p.hi - known - deeper.lo }
                    .scaled(1.0 / c);
                dom.lo = dom.lo.max(r.lo);
                dom.hi = dom.hi.min(r.hi);
            }
            let only_kernel_deeper = self.ig.kernel != Kernel::None
                && (l + 1..n - 1).all(|j| arg.coef[j] == 0.0);
            if deeper.lo == 0.0 && deeper.hi == 0.0 {
                breaks.extend(p.breaks.iter().map(|b| (b - known) / c));
            } else if only_kernel_deeper {
                // A jump crossing the kernel variable leaves a log singularity here,
                // flattened within `|coef_t| ε` of the jump; grade geometrically towards it.
                let reach = (arg.coef[n - 1] * self.cfg.t_eps / c).abs();
                let span = dom.hi - dom.lo;
                for b in &p.breaks {
                    let centre = (b - known) / c;
                    breaks.push(centre);
                    let mut d = reach;
                    while d < span {
                        breaks.extend([centre - d, centre + d]);
                        d *= GRADING;
                    }
                }
            }
        }
        (dom.lo < dom.hi).then_some((dom, breaks, scale))
    }

    fn is_kernel_level(&self, l: usize) -> bool {
        self.ig.kernel != Kernel::None && l == self.ig.nvars - 1
    }

    /// Quadrature nodes at level `l`; for the kernel level they are in `s > 0`.
    fn nodes(&self, l: usize, vals: &[f64; MAX_VARS]) -> Vec<(f64, f64)> {
        let Some((dom, breaks, scale)) = self.slice(l, vals) else {
            return Vec::new();
        };
        let cfg = self.cfg;
        let mut cuts;
        if self.is_kernel_level(l) {
            let s_hi = cfg.t_max.min(dom.lo.abs().max(dom.hi.abs()));
            let gap = if dom.lo <= 0.0 && dom.hi >= 0.0 { 0.0 } else { dom.lo.abs().min(dom.hi.abs()) };
            let s_lo = cfg.t_eps.max(gap);
            if !(s_lo < s_hi) {
                return Vec::new();
            }
            cuts = vec![s_lo, s_hi];
            let ratio = (cfg.t_max / cfg.t_eps).powf(1.0 / cfg.t_panels as f64);
            let mut x = cfg.t_eps;
            for _ in 0..cfg.t_panels {
                x *= ratio;
                if x > s_lo && x < s_hi {
                    cuts.push(x);
                }
            }
            cuts.extend(breaks.iter().map(|b| b.abs()).filter(|&b| b > s_lo && b < s_hi));
        } else {
            cuts = vec![dom.lo, dom.hi];
            cuts.extend(breaks.into_iter().filter(|&b| b > dom.lo && b < dom.hi));
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * b.abs().max(1.0));
        let mut cap = cfg.panel_cap(scale);
        if !self.is_kernel_level(l) {
            cap = cap.min((dom.hi - dom.lo) * 16.0 / cfg.xy_points as f64);
        }
        let mut out = Vec::with_capacity(cuts.len() * ORDER);
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let pieces = ((b - a) / cap).ceil().clamp(1.0, 1e6) as usize;
            let h = (b - a) / pieces as f64;
            for k in 0..pieces {
                push_panel(&mut out, a + k as f64 * h, a + (k + 1) as f64 * h);
            }
        }
        out
    }

    fn owned_product(&self, l: usize, vals: &[f64; MAX_VARS], acc: Complex64) -> Complex64 {
        let mut v = acc;
        for &k in &self.owned[l] {
            if v == Complex64::new(0.0, 0.0) {
                break;
            }
            v *= self.ig.factors[k].eval(vals, self.ig.power);
        }
        v
    }

    fn integrate(&self) -> (Complex64, f64) {
        let vals = [0.0; MAX_VARS];
        let nodes = self.nodes(0, &vals);
        let parts: Vec<(Complex64, f64)> = nodes
            .par_iter()
            .map(|&(x, w)| {
                let (v, m) = self.node_contribution(0, vals, self.fixed, x);
                (v * w, m * w)
            })
            .collect();
        parts.iter().fold((Complex64::new(0.0, 0.0), 0.0), |(a, b), (v, m)| (a + v, b + m))
    }

    fn level(&self, l: usize, vals: [f64; MAX_VARS], acc: Complex64) -> (Complex64, f64) {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut mass = 0.0;
        for (x, w) in self.nodes(l, &vals) {
            let (v, m) = self.node_contribution(l, vals, acc, x);
            sum += v * w;
            mass += m * w;
        }
        (sum, mass)
    }

    fn node_contribution(
        &self,
        l: usize,
        mut vals: [f64; MAX_VARS],
        acc: Complex64,
        x: f64,
    ) -> (Complex64, f64) {
        let zero = Complex64::new(0.0, 0.0);
        let last = l + 1 == self.ig.nvars;
        if self.is_kernel_level(l) {
            vals[l] = x;
            let plus = self.owned_product(l, &vals, acc);
            vals[l] = -x;
            let minus = self.owned_product(l, &vals, acc);
            let v = match self.ig.kernel {
                Kernel::Odd => (plus - minus) / x,
                _ => (plus + minus) / x,
            };
            return (v, (plus.norm() + minus.norm()) / x);
        }
        vals[l] = x;
        let v = self.owned_product(l, &vals, acc);
        if v == zero {
            return (zero, 0.0);
        }
        if last {
            (v, v.norm())
        } else {
            self.level(l + 1, vals, v)
        }
    }

    fn sup(&self) -> f64 {
        self.sup_level(0, [0.0; MAX_VARS], self.fixed)
    }

    fn sup_level(&self, l: usize, mut vals: [f64; MAX_VARS], acc: Complex64) -> f64 {
        let mut best: f64 = 0.0;
        let last = l + 1 == self.ig.nvars;
        for (x, _) in self.nodes(l, &vals) {
            vals[l] = x;
            let v = self.owned_product(l, &vals, acc);
            if v.norm() == 0.0 {
                continue;
            }
            best = best.max(if last { v.norm() } else { self.sup_level(l + 1, vals, v) });
        }
        best
    }
}
