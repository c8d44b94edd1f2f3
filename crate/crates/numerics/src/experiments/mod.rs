//! Scripted sweeps with fitted scaling laws and pass/fail verdicts.
//!
//! Every experiment is a pure function of its parameters, seed and
//! [`QuadConfig`]; verdicts are computed from [`SweepResult`] contents only.

mod consistency;
mod reductions;
mod scaling;

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quad::QuadError;
use crate::spec::FunctionSpec;

pub use consistency::{hilbert_log_law, refinement_battery, slice_consistency};
pub use reductions::{
    bht_weight, exp_reduction_bht, exp_reduction_carleson, phase_steps, ReductionOutcome, ReductionTrial,
};
pub use scaling::{
    boundedness_sweeps, boundedness_values, boundedness_verdict, exp_boundedness_sweep,
    exp_gaussian_necessity, exp_l3_dilation, exp_l40_blowup, exp_tht_endpoint,
    gaussian_necessity_from, gaussian_necessity_lhs, gaussian_verdict, l3_sweep, l3_verdict,
    l40_verdict, tht_endpoint_oracle, tht_verdict, BoundednessValues, SeedValues, WIDTHS,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("power-law fit needs at least 3 points with positive coordinates")]
    NonPositiveData,
    #[error("oracle disagreement in {experiment}: {detail}")]
    Oracle { experiment: String, detail: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl From<crate::spec::SpecError> for ExperimentError {
    fn from(e: crate::spec::SpecError) -> Self {
        ExperimentError::Quad(e.into())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Least squares line through `(xs, ys)`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Fit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Fit { slope, intercept: my - slope * mx, r2 }
}

/// Least squares on `(ln x, ln y)`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<Fit, ExperimentError> {
    if xs.len() != ys.len() || xs.len() < 3 || xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(ExperimentError::NonPositiveData);
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    Ok(fit_line(&lx, &ly))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub parameter: f64,
    pub value: f64,
    pub error_estimate: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl SweepPoint {
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }
}

/// Which column the fit is taken over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitTarget {
    Value,
    Lhs,
    Rhs,
    Ratio,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitAxes {
    /// `ln target` against `ln parameter`.
    LogLog,
    /// `target` against `ln parameter`.
    SemiLog,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub name: String,
    pub points: Vec<SweepPoint>,
    pub target: FitTarget,
    pub axes: FitAxes,
    pub fit: Fit,
    /// Oracle value the verdict compares against, if any.
    pub reference: Option<f64>,
}

impl SweepResult {
    pub fn new(
        name: &str,
        points: Vec<SweepPoint>,
        target: FitTarget,
        axes: FitAxes,
        reference: Option<f64>,
    ) -> Result<Self, ExperimentError> {
        let xs: Vec<f64> = points.iter().map(|p| p.parameter).collect();
        let ys: Vec<f64> = points.iter().map(|p| target_of(p, target)).collect();
        let fit = match axes {
            FitAxes::LogLog => fit_power_law(&xs, &ys)?,
            FitAxes::SemiLog => {
                if xs.len() < 3 || xs.iter().any(|x| !(*x > 0.0)) {
                    return Err(ExperimentError::NonPositiveData);
                }
                fit_line(&xs.iter().map(|x| x.ln()).collect::<Vec<_>>(), &ys)
            }
        };
        Ok(SweepResult { name: name.to_string(), points, target, axes, fit, reference })
    }

    pub fn parameters(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.parameter).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.points.iter().map(SweepPoint::ratio).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("parameter,value,error_estimate,lhs,rhs,ratio\n");
        for p in &self.points {
            writeln!(
                s,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                p.parameter,
                p.value,
                p.error_estimate,
                p.lhs,
                p.rhs,
                p.ratio()
            )
            .expect("write to string");
        }
        s
    }

    /// Rebuilds a sweep from [`SweepResult::to_csv`] output.
    pub fn from_csv(
        name: &str,
        csv: &str,
        target: FitTarget,
        axes: FitAxes,
        reference: Option<f64>,
    ) -> Result<Self, ExperimentError> {
        let bad = |m: String| ExperimentError::InvalidParameter(m);
        let mut lines = csv.lines();
        if lines.next() != Some("parameter,value,error_estimate,lhs,rhs,ratio") {
            return Err(bad("unexpected CSV header".into()));
        }
        let mut points = Vec::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let v: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|e| bad(format!("{line}: {e}"))))
                .collect::<Result<_, _>>()?;
            if v.len() != 6 {
                return Err(bad(format!("expected 6 columns: {line}")));
            }
            points.push(SweepPoint { parameter: v[0], value: v[1], error_estimate: v[2], lhs: v[3], rhs: v[4] });
        }
        SweepResult::new(name, points, target, axes, reference)
    }

    /// Single-pane plot of the fitted series with its fitted line.
    pub fn to_svg(&self) -> String {
        let (w, h, pad) = (480.0, 360.0, 48.0);
        let xs: Vec<f64> = self.points.iter().map(|p| p.parameter.ln()).collect();
        let ys: Vec<f64> = self
            .points
            .iter()
            .map(|p| {
                let v = target_of(p, self.target);
                match self.axes {
                    FitAxes::LogLog => v.ln(),
                    FitAxes::SemiLog => v,
                }
            })
            .collect();
        let range = |v: &[f64]| {
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if hi > lo { (lo, hi) } else { (lo - 1.0, hi + 1.0) }
        };
        let (x0, x1) = range(&xs);
        let line_y: Vec<f64> = [x0, x1].iter().map(|x| self.fit.intercept + self.fit.slope * x).collect();
        let (y0, y1) = range(&[ys.clone(), line_y.clone()].concat());
        let px = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
        let py = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);
        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">"#);
        let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<path d="M{pad} {pad} V{} H{}" stroke="black" fill="none"/>"#,
            h - pad,
            w - pad
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="steelblue"/>"#,
            px(x0),
            py(line_y[0]),
            px(x1),
            py(line_y[1])
        );
        for (x, y) in xs.iter().zip(&ys) {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="firebrick"/>"#, px(*x), py(*y));
        }
        let label = match self.axes {
            FitAxes::LogLog => "log-log",
            FitAxes::SemiLog => "semi-log",
        };
        let _ = writeln!(
            s,
            r#"<text x="{pad}" y="{}" font-size="12">{} ({label}) slope {:.4} r2 {:.4}</text>"#,
            pad / 2.0,
            self.name,
            self.fit.slope,
            self.fit.r2
        );
        s.push_str("</svg>\n");
        s
    }
}

fn target_of(p: &SweepPoint, t: FitTarget) -> f64 {
    match t {
        FitTarget::Value => p.value,
        FitTarget::Lhs => p.lhs,
        FitTarget::Rhs => p.rhs,
        FitTarget::Ratio => p.ratio(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub name: String,
    pub passed: bool,
    pub diagnostics: Vec<String>,
}

impl VerdictReport {
    pub fn new(name: &str) -> Self {
        VerdictReport { name: name.to_string(), passed: true, diagnostics: Vec::new() }
    }

    /// Records a named check; a failing check fails the report.
    pub fn check(&mut self, ok: bool, what: impl Into<String>) -> bool {
        let tag = if ok { "pass" } else { "FAIL" };
        self.diagnostics.push(format!("{tag}: {}", what.into()));
        self.passed &= ok;
        ok
    }

    pub fn note(&mut self, what: impl Into<String>) {
        self.diagnostics.push(format!("note: {}", what.into()));
    }

    pub fn merge(&mut self, other: VerdictReport) {
        self.passed &= other.passed;
        self.diagnostics
            .extend(other.diagnostics.into_iter().map(|d| format!("{}: {d}", other.name)));
    }
}

impl std::fmt::Display for VerdictReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{}: {}", self.name, if self.passed { "PASS" } else { "FAIL" })?;
        for d in &self.diagnostics {
            writeln!(f, "  {d}")?;
        }
        Ok(())
    }
}

/// Gaussian `exp(−π((x−s)/a)²)` with `ln a` uniform on `[ln ½, ln 2]` and `s` uniform on `[−2, 2]`.
pub fn random_gaussian<R: Rng>(rng: &mut R) -> FunctionSpec {
    let a = rng.gen_range(0.5f64.ln()..=2f64.ln()).exp();
    let s = rng.gen_range(-2.0..=2.0);
    FunctionSpec::shift(s, FunctionSpec::gaussian(a))
}

pub fn random_gaussian_2d<R: Rng>(rng: &mut R) -> FunctionSpec {
    let fx = random_gaussian(rng);
    let fy = random_gaussian(rng);
    FunctionSpec::tensor(fx, fy)
}
