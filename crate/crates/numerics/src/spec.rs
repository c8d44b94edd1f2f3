//! Symbolic test functions.
//!
//! A [`FunctionSpec`] is a small expression tree that evaluates pointwise to
//! a complex number. The quadrature engine never samples it blindly: every
//! leaf also reports where it is supported, where it has kinks or jumps and
//! on what length scale it varies, see [`ArgProfile`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

use crate::bandlimited;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("arity mismatch: spec takes {expected} argument(s), got {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("invalid spec: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SqrtSign {
    /// `|g|^{1/2}`
    Abs,
    /// `sgn(g)|g|^{1/2}`
    Signed,
}

/// One piece of a piecewise-constant frequency function `N(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseStep {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<f64>,
    pub freq: f64,
}

impl PhaseStep {
    fn contains(&self, x: f64) -> bool {
        self.lo.is_none_or(|lo| x >= lo) && self.hi.is_none_or(|hi| x < hi)
    }
}

/// `N(x)`: the frequency of the first step containing `x`, zero elsewhere.
pub fn phase_frequency(steps: &[PhaseStep], x: f64) -> f64 {
    steps.iter().find(|s| s.contains(x)).map_or(0.0, |s| s.freq)
}

fn default_arity() -> usize {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FunctionSpec {
    /// `exp(−π x² / a²)`
    Gaussian { a: f64 },
    /// Indicator of `[lo, hi)`.
    Box { lo: f64, hi: f64 },
    /// Fixed C∞ bump: 1 on `[−0.9, 0.9]`, 0 outside `(−1, 1)`.
    SmoothBump,
    /// `sgn(x)·1_{|x| ≤ m}`
    SignWindow { m: f64 },
    /// −1 on `(−∞, −1)`, 0 on `[−1, 2)`, 1 on `[2, ∞)`.
    SignStep,
    Const { value: f64 },
    /// Complex weight whose Fourier transform is a bump on `[1/2, 3/2]`, `m(0) = 1`.
    BandlimitedM,
    /// `of(x / n)`
    LinfDilate { n: f64, of: Box<FunctionSpec> },
    /// `c · of(x)`
    Scale { c: f64, of: Box<FunctionSpec> },
    /// `of(x − by)`
    Shift { by: f64, of: Box<FunctionSpec> },
    /// `exp(2πi·freq·x) · of(x)`
    Modulate { freq: f64, of: Box<FunctionSpec> },
    Sum { terms: Vec<FunctionSpec> },
    Product { factors: Vec<FunctionSpec> },
    /// `fx(x) · fy(y)`
    Tensor { fx: Box<FunctionSpec>, fy: Box<FunctionSpec> },
    /// `of(M·x + b)`; `matrix` is `k × arity` or `k × (arity+1)` with `b` in
    /// the last column, `k` the arity of `of`.
    Pullback {
        matrix: Vec<Vec<f64>>,
        of: Box<FunctionSpec>,
        #[serde(default = "default_arity")]
        arity: usize,
    },
    SqrtSplit { g: Box<FunctionSpec>, sign: SqrtSign },
    /// `exp(2πi·sign·N(x)·y)` for piecewise-constant `N`.
    PhaseChirp { steps: Vec<PhaseStep>, sign: f64 },
}

use FunctionSpec as S;

fn psi(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

pub fn smooth_bump(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= 0.9 {
        1.0
    } else if ax >= 1.0 {
        0.0
    } else {
        let u = (ax - 0.9) / 0.1;
        let (a, b) = (psi(1.0 - u), psi(u));
        a / (a + b)
    }
}

fn signum0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl FunctionSpec {
    pub fn gaussian(a: f64) -> Self {
        S::Gaussian { a }
    }

    pub fn tensor(fx: FunctionSpec, fy: FunctionSpec) -> Self {
        S::Tensor { fx: Box::new(fx), fy: Box::new(fy) }
    }

    pub fn scale(c: f64, of: FunctionSpec) -> Self {
        S::Scale { c, of: Box::new(of) }
    }

    pub fn shift(by: f64, of: FunctionSpec) -> Self {
        S::Shift { by, of: Box::new(of) }
    }

    pub fn dilate(n: f64, of: FunctionSpec) -> Self {
        S::LinfDilate { n, of: Box::new(of) }
    }

    pub fn product(factors: Vec<FunctionSpec>) -> Self {
        S::Product { factors }
    }

    pub fn pullback(matrix: Vec<Vec<f64>>, of: FunctionSpec, arity: usize) -> Self {
        S::Pullback { matrix, of: Box::new(of), arity }
    }

    pub fn sqrt_split(g: FunctionSpec, sign: SqrtSign) -> Self {
        S::SqrtSplit { g: Box::new(g), sign }
    }

    /// Number of arguments; `None` for constants, which accept any arity.
    pub fn arity(&self) -> Option<usize> {
        match self {
            S::Gaussian { .. }
            | S::Box { .. }
            | S::SmoothBump
            | S::SignWindow { .. }
            | S::SignStep
            | S::BandlimitedM
            | S::Modulate { .. }
            | S::Shift { .. }
            | S::SqrtSplit { .. } => Some(1),
            S::Tensor { .. } | S::PhaseChirp { .. } => Some(2),
            S::Const { .. } => None,
            S::Pullback { arity, .. } => Some(*arity),
            S::LinfDilate { of, .. } | S::Scale { of, .. } => of.arity(),
            S::Sum { terms: xs } | S::Product { factors: xs } => xs.iter().find_map(|t| t.arity()),
        }
    }

    /// Structural checks: positive widths, nonempty boxes, consistent arities.
    pub fn check(&self) -> Result<(), SpecError> {
        let bad = |m: String| Err(SpecError::Invalid(m));
        match self {
            S::Gaussian { a } if !(*a > 0.0) => bad(format!("gaussian width {a} must be positive")),
            S::Box { lo, hi } if !(lo < hi) => bad(format!("box needs lo < hi, got [{lo}, {hi}]")),
            S::SignWindow { m } if !(*m > 0.0) => bad(format!("sign window needs m > 0, got {m}")),
            S::LinfDilate { n, .. } if !(*n > 0.0) => bad(format!("dilation needs n > 0, got {n}")),
            S::LinfDilate { of, .. } | S::Scale { of, .. } => of.check(),
            S::Shift { of, .. } | S::Modulate { of, .. } => {
                of.check()?;
                match of.arity() {
                    Some(1) | None => Ok(()),
                    Some(k) => Err(SpecError::ArityMismatch { expected: 1, found: k }),
                }
            }
            S::SqrtSplit { g, .. } => {
                g.check()?;
                match g.arity() {
                    Some(1) | None => Ok(()),
                    Some(k) => Err(SpecError::ArityMismatch { expected: 1, found: k }),
                }
            }
            S::Tensor { fx, fy } => {
                for f in [fx, fy] {
                    f.check()?;
                    if let Some(k) = f.arity().filter(|&k| k != 1) {
                        return Err(SpecError::ArityMismatch { expected: 1, found: k });
                    }
                }
                Ok(())
            }
            S::Sum { terms: xs } | S::Product { factors: xs } => {
                let k = self.arity();
                for t in xs {
                    t.check()?;
                    if let (Some(a), Some(b)) = (k, t.arity()) {
                        if a != b {
                            return Err(SpecError::ArityMismatch { expected: a, found: b });
                        }
                    }
                }
                Ok(())
            }
            S::Pullback { matrix, of, arity } => {
                of.check()?;
                if let Some(k) = of.arity() {
                    if matrix.len() != k {
                        return bad(format!("pullback matrix has {} rows, inner spec takes {k}", matrix.len()));
                    }
                }
                for row in matrix {
                    if row.len() != *arity && row.len() != arity + 1 {
                        return bad(format!("pullback row has {} entries, expected {arity} or {}", row.len(), arity + 1));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Pointwise value; checks the number of coordinates.
    pub fn eval(&self, point: &[f64]) -> Result<Complex64, SpecError> {
        if let Some(k) = self.arity() {
            if k != point.len() {
                return Err(SpecError::ArityMismatch { expected: k, found: point.len() });
            }
        }
        Ok(self.eval_unchecked(point))
    }

    pub(crate) fn eval_unchecked(&self, p: &[f64]) -> Complex64 {
        let real = |v: f64| Complex64::new(v, 0.0);
        match self {
            S::Gaussian { a } => real((-PI * (p[0] / a).powi(2)).exp()),
            S::Box { lo, hi } => real(if p[0] >= *lo && p[0] < *hi { 1.0 } else { 0.0 }),
            S::SmoothBump => real(smooth_bump(p[0])),
            S::SignWindow { m } => real(if p[0].abs() <= *m { signum0(p[0]) } else { 0.0 }),
            S::SignStep => real(if p[0] < -1.0 {
                -1.0
            } else if p[0] < 2.0 {
                0.0
            } else {
                1.0
            }),
            S::Const { value } => real(*value),
            S::BandlimitedM => bandlimited::m(p[0]),
            S::LinfDilate { n, of } => {
                let q: Vec<f64> = p.iter().map(|x| x / n).collect();
                of.eval_unchecked(&q)
            }
            S::Scale { c, of } => of.eval_unchecked(p) * c,
            S::Shift { by, of } => of.eval_unchecked(&[p[0] - by]),
            S::Modulate { freq, of } => {
                of.eval_unchecked(p) * Complex64::from_polar(1.0, 2.0 * PI * freq * p[0])
            }
            S::Sum { terms } => terms.iter().map(|t| t.eval_unchecked(p)).sum(),
            S::Product { factors } => factors.iter().map(|t| t.eval_unchecked(p)).product(),
            S::Tensor { fx, fy } => fx.eval_unchecked(&p[..1]) * fy.eval_unchecked(&p[1..2]),
            S::Pullback { matrix, of, arity } => {
                let q: Vec<f64> = matrix
                    .iter()
                    .map(|row| {
                        let lin: f64 = row[..*arity].iter().zip(p).map(|(a, x)| a * x).sum();
                        lin + row.get(*arity).copied().unwrap_or(0.0)
                    })
                    .collect();
                of.eval_unchecked(&q)
            }
            S::SqrtSplit { g, sign } => {
                let v = g.eval_unchecked(p).re;
                let r = v.abs().sqrt();
                real(match sign {
                    SqrtSign::Abs => r,
                    SqrtSign::Signed => signum0(v) * r,
                })
            }
            S::PhaseChirp { steps, sign } => {
                let n = phase_frequency(steps, p[0]);
                Complex64::from_polar(1.0, 2.0 * PI * sign * n * p[1])
            }
        }
    }
}

/// What the engine knows about one argument of a leaf: outside `[lo, hi]`
/// the leaf is below the cutoff, `breaks` are points of nonsmoothness and
/// `scale` is the length over which the leaf varies appreciably.
#[derive(Clone, Debug, PartialEq)]
pub struct ArgProfile {
    pub lo: f64,
    pub hi: f64,
    pub breaks: Vec<f64>,
    pub scale: f64,
}

impl ArgProfile {
    pub fn unbounded() -> Self {
        ArgProfile {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            breaks: Vec::new(),
            scale: f64::INFINITY,
        }
    }

    pub fn bounded(lo: f64, hi: f64) -> Self {
        ArgProfile { lo, hi, breaks: Vec::new(), scale: f64::INFINITY }
    }

    pub fn with_breaks(mut self, breaks: Vec<f64>) -> Self {
        self.breaks = breaks;
        self
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    fn map(&self, f: impl Fn(f64) -> f64, stretch: f64) -> Self {
        let (a, b) = (f(self.lo), f(self.hi));
        ArgProfile {
            lo: a.min(b),
            hi: a.max(b),
            breaks: self.breaks.iter().map(|&x| f(x)).collect(),
            scale: self.scale * stretch,
        }
    }

    fn meet(&self, other: &ArgProfile) -> Self {
        ArgProfile {
            lo: self.lo.max(other.lo),
            hi: self.hi.min(other.hi),
            breaks: self.breaks.iter().chain(&other.breaks).copied().collect(),
            scale: self.scale.min(other.scale),
        }
    }

    fn join(&self, other: &ArgProfile) -> Self {
        ArgProfile {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
            breaks: self.breaks.iter().chain(&other.breaks).copied().collect(),
            scale: self.scale.min(other.scale),
        }
    }
}

/// Values below `cutoff` times the leaf's maximum are treated as zero.
pub const CUTOFF: f64 = 1e-15;

/// Per-argument profiles of a spec with `k` arguments.
pub fn profiles(spec: &FunctionSpec, k: usize, cutoff: f64) -> Vec<ArgProfile> {
    let one = |p: ArgProfile| vec![p];
    match spec {
        S::Gaussian { a } => {
            let r = a * ((1.0 / cutoff).ln() / PI).sqrt();
            one(ArgProfile::bounded(-r, r).with_scale(*a))
        }
        S::Box { lo, hi } => one(ArgProfile::bounded(*lo, *hi).with_breaks(vec![*lo, *hi])),
        S::SmoothBump => one(
            ArgProfile::bounded(-1.0, 1.0)
                .with_breaks(vec![-1.0, -0.975, -0.95, -0.925, -0.9, 0.9, 0.925, 0.95, 0.975, 1.0]),
        ),
        S::SignWindow { m } => one(ArgProfile::bounded(-m, *m).with_breaks(vec![-m, 0.0, *m])),
        S::SignStep => one(ArgProfile::unbounded().with_breaks(vec![-1.0, 2.0])),
        S::Const { .. } => vec![ArgProfile::unbounded(); k],
        S::BandlimitedM => one(
            ArgProfile::bounded(-bandlimited::T_MAX, bandlimited::T_MAX).with_scale(0.25),
        ),
        S::LinfDilate { n, of } => profiles(of, k, cutoff)
            .iter()
            .map(|p| p.map(|x| x * n, *n))
            .collect(),
        S::Scale { of, .. } => profiles(of, k, cutoff),
        S::Shift { by, of } => profiles(of, 1, cutoff)
            .iter()
            .map(|p| p.map(|x| x + by, 1.0))
            .collect(),
        S::Modulate { freq, of } => profiles(of, 1, cutoff)
            .into_iter()
            .map(|p| {
                let s = if *freq == 0.0 { f64::INFINITY } else { 1.0 / freq.abs() };
                let scale = p.scale.min(s);
                p.with_scale(scale)
            })
            .collect(),
        S::Sum { terms } => terms
            .iter()
            .map(|t| profiles(t, k, cutoff))
            .reduce(|a, b| a.iter().zip(&b).map(|(x, y)| x.join(y)).collect())
            .unwrap_or_else(|| vec![ArgProfile::unbounded(); k]),
        S::Product { factors } => factors
            .iter()
            .map(|t| profiles(t, k, cutoff))
            .reduce(|a, b| a.iter().zip(&b).map(|(x, y)| x.meet(y)).collect())
            .unwrap_or_else(|| vec![ArgProfile::unbounded(); k]),
        S::Tensor { fx, fy } => {
            let mut v = profiles(fx, 1, cutoff);
            v.extend(profiles(fy, 1, cutoff));
            v
        }
        S::Pullback { .. } => vec![ArgProfile::unbounded(); k],
        S::SqrtSplit { g, .. } => {
            // |g|^{1/2} decays like g at half the rate.
            let mut p = profiles(g, 1, cutoff * cutoff);
            p[0].scale *= std::f64::consts::SQRT_2;
            p
        }
        S::PhaseChirp { steps, .. } => {
            let breaks = steps.iter().flat_map(|s| s.lo.into_iter().chain(s.hi)).collect();
            let fmax = steps.iter().map(|s| s.freq.abs()).fold(0.0, f64::max);
            let scale = if fmax == 0.0 { f64::INFINITY } else { 1.0 / fmax };
            vec![
                ArgProfile::unbounded().with_breaks(breaks),
                ArgProfile::unbounded().with_scale(scale),
            ]
        }
    }
}
