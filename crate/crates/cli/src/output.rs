//! Byte-stable output: floats always carry 17 significant digits and
//! non-finite values become `null`.

use serde::Serialize;
use serde_json::value::RawValue;

use blform_numerics::experiments::{Fit, SweepResult, VerdictReport};
use blform_numerics::quad::QuadResult;

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn num(x: f64) -> Box<RawValue> {
    let text = if x.is_finite() { float(x) } else { "null".to_string() };
    RawValue::from_string(text).expect("formatted float is valid JSON")
}

#[derive(Serialize)]
pub struct Complex {
    pub re: Box<RawValue>,
    pub im: Box<RawValue>,
}

#[derive(Serialize)]
pub struct Evaluation {
    pub form: String,
    pub value: Complex,
    pub error_estimate: Box<RawValue>,
    pub converged: bool,
}

impl Evaluation {
    pub fn new(form: &str, r: &QuadResult) -> Self {
        Evaluation {
            form: form.to_string(),
            value: Complex { re: num(r.value.re), im: num(r.value.im) },
            error_estimate: num(r.error_estimate),
            converged: r.converged,
        }
    }

    pub fn csv(&self) -> String {
        format!(
            "form,value_re,value_im,error_estimate,converged\n{},{},{},{},{}\n",
            self.form, self.value.re, self.value.im, self.error_estimate, self.converged
        )
    }
}

#[derive(Serialize)]
struct JsonFit {
    slope: Box<RawValue>,
    intercept: Box<RawValue>,
    r2: Box<RawValue>,
}

#[derive(Serialize)]
struct JsonPoint {
    parameter: Box<RawValue>,
    value: Box<RawValue>,
    error_estimate: Box<RawValue>,
    lhs: Box<RawValue>,
    rhs: Box<RawValue>,
    ratio: Box<RawValue>,
}

#[derive(Serialize)]
struct JsonSweep {
    name: String,
    fit: JsonFit,
    reference: Option<Box<RawValue>>,
    points: Vec<JsonPoint>,
}

#[derive(Serialize)]
pub struct JsonExperiment<'a> {
    verdict: &'a VerdictReport,
    sweeps: Vec<JsonSweep>,
}

fn fit(f: &Fit) -> JsonFit {
    JsonFit { slope: num(f.slope), intercept: num(f.intercept), r2: num(f.r2) }
}

fn sweep(s: &SweepResult) -> JsonSweep {
    JsonSweep {
        name: s.name.clone(),
        fit: fit(&s.fit),
        reference: s.reference.map(num),
        points: s
            .points
            .iter()
            .map(|p| JsonPoint {
                parameter: num(p.parameter),
                value: num(p.value),
                error_estimate: num(p.error_estimate),
                lhs: num(p.lhs),
                rhs: num(p.rhs),
                ratio: num(p.ratio()),
            })
            .collect(),
    }
}

pub fn experiment_json(verdict: &VerdictReport, sweeps: &[SweepResult]) -> String {
    let doc = JsonExperiment { verdict, sweeps: sweeps.iter().map(sweep).collect() };
    serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
}

/// Sweeps sharing one parameter axis, prefixed by a `series` column.
pub fn series_csv(sweeps: &[(String, &SweepResult)]) -> String {
    let mut s = String::from("series,parameter,value,error_estimate,lhs,rhs,ratio\n");
    for (label, sw) in sweeps {
        for line in sw.to_csv().lines().skip(1) {
            s.push_str(label);
            s.push(',');
            s.push_str(line);
            s.push('\n');
        }
    }
    s
}
