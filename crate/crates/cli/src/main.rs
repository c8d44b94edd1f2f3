//! `blform`: classify projection data, evaluate truncated singular forms and
//! run the scaling experiments.
//!
//! Exit codes: 0 success, 1 experiment or self-test failure, 2 hypothesis
//! violated, 3 invalid datum, 4 cross ratio undefined, 5 quadrature not
//! converged, 6 oracle failure, 64 usage or I/O error.

mod output;
mod selftest;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use blform_core::datum::json::RawWitness;
use blform_core::exactla::format_rational;
use blform_core::{
    classify, cross_ratio, parse_rational, BlDatum, ClassifyError, CrossRatioError, ExponentTriple,
    NormalForm,
};
use blform_numerics::experiments::{self as exp, ExperimentError, SweepResult, VerdictReport};
use blform_numerics::forms;
use blform_numerics::quad::{QuadConfig, QuadError, QuadResult};
use blform_numerics::spec::{FunctionSpec, PhaseStep};

const EXIT_FAILED: u8 = 1;
const EXIT_HYPOTHESIS: u8 = 2;
const EXIT_INVALID_DATUM: u8 = 3;
const EXIT_UNDEFINED: u8 = 4;
const EXIT_NOT_CONVERGED: u8 = 5;
const EXIT_ORACLE: u8 = 6;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "blform", version, about = "Singular Brascamp-Lieb forms with (1,2,2;1) data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Input file: a datum for classify/invariant, functions for evaluate.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Quadrature configuration file (JSON); flags below override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    t_eps: Option<f64>,
    #[arg(long, global = true)]
    t_max: Option<f64>,
    #[arg(long, global = true)]
    xy_points: Option<usize>,
    /// Base seed for randomized experiments.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Write an SVG plot of the experiment's sweep to this path.
    #[arg(long, global = true)]
    plot: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Normal form, witness and cross ratio of a datum.
    Classify,
    /// Cross ratio of a datum.
    Invariant,
    /// Evaluate a truncated form on the functions in `--input`.
    Evaluate {
        /// L1, L2, L3, L4:β, tht, bht:α, carleson, special:α or smoothed:β.
        form: String,
    },
    /// Run a named experiment and write its CSV.
    Experiment(ExperimentArgs),
    /// Run the fast invariant battery.
    Selftest {
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<selftest::Fault>,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(value_enum)]
    name: ExperimentName,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, default_value_t = 2.0)]
    p2: f64,
    #[arg(long, default_value_t = 2.0)]
    p3: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.25, 0.0625, 0.015625])]
    eps: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [100.0, 1000.0, 10000.0])]
    delta: Vec<f64>,
    #[arg(long = "m", value_delimiter = ',', default_values_t = [10.0, 100.0, 1000.0])]
    m_list: Vec<f64>,
    #[arg(long = "n", value_delimiter = ',', default_values_t = [4.0, 8.0, 16.0, 32.0, 64.0, 128.0])]
    n_list: Vec<f64>,
    /// Normal form for `boundedness`.
    #[arg(long, default_value = "L4:2")]
    form: String,
    /// Exponents `p1,p2,p3` for `boundedness`; `inf` allowed.
    #[arg(long, value_delimiter = ',', default_values_t = [f64::INFINITY, 2.0, 2.0])]
    p: Vec<f64>,
    #[arg(long, default_value_t = 3)]
    seeds: u64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = 5)]
    trials: u64,
    /// Constant pieces of the phase for `reduce-carleson`.
    #[arg(long, default_value_t = 1)]
    pieces: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentName {
    GaussianNecessity,
    ThtEndpoint,
    L40Blowup,
    L3Dilation,
    Boundedness,
    ReduceBht,
    ReduceCarleson,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure::new(EXIT_USAGE, message)
    }
}

impl From<QuadError> for Failure {
    fn from(e: QuadError) -> Self {
        match e {
            QuadError::NotConverged { .. } => Failure::new(EXIT_NOT_CONVERGED, e.to_string()),
            other => Failure::usage(other.to_string()),
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Quad(q) => q.into(),
            ExperimentError::Oracle { .. } => Failure::new(EXIT_ORACLE, e.to_string()),
            other => Failure::usage(other.to_string()),
        }
    }
}

impl From<ClassifyError> for Failure {
    fn from(e: ClassifyError) -> Self {
        let code = match e {
            ClassifyError::InvalidDatum(_) => EXIT_INVALID_DATUM,
            ClassifyError::HypothesisViolated { .. } => EXIT_HYPOTHESIS,
            ClassifyError::InternalDegeneracy(_) => EXIT_FAILED,
        };
        Failure::new(code, e.to_string())
    }
}

/// What a successful command produced: stdout text, and the exit code.
struct Outcome {
    text: String,
    code: u8,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: 0 }
    }
}

fn read(path: &Option<PathBuf>, what: &str) -> Result<String, Failure> {
    let path = path.as_ref().ok_or_else(|| Failure::usage(format!("--input {what} file required")))?;
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn quad_config(c: &Common) -> Result<QuadConfig, Failure> {
    let mut cfg = match &c.config {
        Some(p) => serde_json::from_str(&read(&Some(p.clone()), "config")?)
            .map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?,
        None => QuadConfig::default(),
    };
    if let Some(v) = c.t_eps {
        cfg.t_eps = v;
    }
    if let Some(v) = c.t_max {
        cfg.t_max = v;
    }
    if let Some(v) = c.xy_points {
        cfg.xy_points = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn load_datum(c: &Common) -> Result<BlDatum, Failure> {
    let text = read(&c.input, "datum")?;
    serde_json::from_str(&text).map_err(|e| Failure::new(EXIT_INVALID_DATUM, format!("invalid datum: {e}")))
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn json_only(c: &Common) -> Result<(), Failure> {
    match c.format {
        Some(Format::Csv) => Err(Failure::usage("this command only writes JSON")),
        _ => Ok(()),
    }
}

fn run_classify(c: &Common) -> Result<Outcome, Failure> {
    json_only(c)?;
    let d = load_datum(c)?;
    let result = classify(&d)?;
    let mut doc = json!({
        "normal_form": result.normal_form.tag(),
        "witness": RawWitness::from(result.witness.clone()),
        "verified": blform_core::verify_witness(&d, &result.witness, &result.normal_form),
    });
    if let Some(beta) = result.normal_form.beta() {
        doc["beta"] = json!(format_rational(beta));
    }
    if let Ok(cr) = cross_ratio(&d) {
        doc["cross_ratio"] = json!(cr.to_string());
    }
    Ok(Outcome::ok(pretty(&doc)))
}

fn run_invariant(c: &Common) -> Result<Outcome, Failure> {
    json_only(c)?;
    let d = load_datum(c)?;
    match cross_ratio(&d) {
        Ok(cr) => Ok(Outcome::ok(pretty(&json!({ "cross_ratio": cr.to_string() })))),
        Err(CrossRatioError::Classify(e)) => Err(e.into()),
        Err(e) => Err(Failure::new(EXIT_UNDEFINED, e.to_string())),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Functions {
    f: FunctionSpec,
    g: FunctionSpec,
    h: Option<FunctionSpec>,
    #[serde(default)]
    phase: Vec<PhaseStep>,
}

fn parameter(form: &str, prefix: &str) -> Result<Option<f64>, Failure> {
    match form.strip_prefix(prefix) {
        None => Ok(None),
        Some(v) => v
            .parse::<f64>()
            .ok()
            .or_else(|| parse_rational(v).ok().map(|r| blform_core::exactla::to_f64(&r)))
            .map(Some)
            .ok_or_else(|| Failure::usage(format!("cannot read parameter in {form}"))),
    }
}

fn evaluate(form: &str, fns: &Functions, cfg: &QuadConfig) -> Result<QuadResult, Failure> {
    let h = || fns.h.clone().ok_or_else(|| Failure::usage(format!("{form} needs h")));
    let (f, g) = (&fns.f, &fns.g);
    if let Some(a) = parameter(form, "bht:")? {
        return Ok(forms::bht_form(f, g, &h()?, a, cfg)?);
    }
    if let Some(a) = parameter(form, "special:")? {
        return Ok(forms::trunc_special_form(f, g, &h()?, a, cfg)?);
    }
    if let Some(b) = parameter(form, "smoothed:")? {
        return Ok(forms::smoothed_form_4beta(f, g, &h()?, b, cfg)?);
    }
    match form {
        "tht" => Ok(forms::tht_rotated_form(f, g, &h()?, cfg)?),
        "carleson" => Ok(forms::carleson_form(f, g, &fns.phase, cfg)?),
        other => {
            let nf: NormalForm = other.parse().map_err(|_| Failure::usage(format!("unknown form {other}")))?;
            Ok(forms::pv_form(&nf, f, g, &h()?, cfg)?)
        }
    }
}

fn run_evaluate(form: &str, c: &Common) -> Result<Outcome, Failure> {
    let cfg = quad_config(c)?;
    let text = read(&c.input, "functions")?;
    let fns: Functions = serde_json::from_str(&text).map_err(|e| Failure::usage(format!("functions: {e}")))?;
    let r = evaluate(form, &fns, &cfg)?;
    let e = output::Evaluation::new(form, &r);
    let text = match c.format {
        Some(Format::Csv) => e.csv(),
        _ => serde_json::to_string_pretty(&e).expect("serializable") + "\n",
    };
    let code = if r.converged { 0 } else { EXIT_NOT_CONVERGED };
    Ok(Outcome { text, code })
}

fn exponents(p: &[f64]) -> Result<ExponentTriple, Failure> {
    match p {
        [p1, p2, p3] => ExponentTriple::new(*p1, *p2, *p3).ok_or_else(|| Failure::usage("exponents must lie in [1, inf]")),
        _ => Err(Failure::usage("--p takes three exponents")),
    }
}

fn run_experiment(a: &ExperimentArgs, c: &Common) -> Result<Outcome, Failure> {
    let cfg = quad_config(c)?;
    let (verdict, sweeps, csv): (VerdictReport, Vec<SweepResult>, String) = match a.name {
        ExperimentName::GaussianNecessity => {
            let (lhs, rhs) = exp::exp_gaussian_necessity(a.beta, a.p2, a.p3, &a.eps, &cfg)?;
            let v = exp::gaussian_verdict(&lhs, &rhs, a.p2, a.p3);
            let csv = lhs.to_csv();
            (v, vec![lhs, rhs], csv)
        }
        ExperimentName::ThtEndpoint => {
            let s = exp::exp_tht_endpoint(&a.delta, a.p2, &cfg)?;
            (exp::tht_verdict(&s), vec![s.clone()], s.to_csv())
        }
        ExperimentName::L40Blowup => {
            let s = exp::exp_l40_blowup(&a.m_list, &cfg)?;
            (exp::l40_verdict(&s), vec![s.clone()], s.to_csv())
        }
        ExperimentName::L3Dilation => {
            let s = exp::exp_l3_dilation(&a.n_list, &cfg)?;
            (exp::l3_verdict(&s), vec![s.clone()], s.to_csv())
        }
        ExperimentName::Boundedness => {
            let nf: NormalForm = a.form.parse().map_err(|_| Failure::usage(format!("unknown form {}", a.form)))?;
            let p = exponents(&a.p)?;
            let values = exp::boundedness_values(&nf, a.seeds, c.seed, &cfg)?;
            let sweeps = exp::boundedness_sweeps(&values, &p, &cfg)?;
            let name = format!("boundedness {nf} p=({},{},{})", p.p1, p.p2, p.p3);
            let v = exp::boundedness_verdict(&name, &sweeps);
            let labelled: Vec<(String, &SweepResult)> =
                values.seeds.iter().zip(&sweeps).map(|(s, sw)| (format!("seed{}", s.seed), sw)).collect();
            let csv = output::series_csv(&labelled);
            (v, sweeps, csv)
        }
        ExperimentName::ReduceBht => {
            let out = exp::exp_reduction_bht(a.alpha, a.trials, c.seed, &cfg)?;
            let csv = out.to_csv();
            (out.report, Vec::new(), csv)
        }
        ExperimentName::ReduceCarleson => {
            let out = exp::exp_reduction_carleson(a.pieces, a.trials, c.seed, &cfg)?;
            let csv = out.to_csv();
            (out.report, Vec::new(), csv)
        }
    };
    if let Some(path) = &c.plot {
        let first = sweeps.first().ok_or_else(|| Failure::usage("this experiment has no sweep to plot"))?;
        write_file(path, &first.to_svg())?;
    }
    eprint!("{verdict}");
    let text = match c.format {
        Some(Format::Json) => output::experiment_json(&verdict, &sweeps),
        _ => csv,
    };
    Ok(Outcome { text, code: if verdict.passed { 0 } else { EXIT_FAILED } })
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("BLFORM_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| Failure::usage(format!("BLFORM_THREADS={v} is not a count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::usage(e.to_string()))
}

fn dispatch(cli: &Cli) -> Result<Outcome, Failure> {
    configure_threads()?;
    let c = &cli.common;
    match &cli.command {
        Command::Classify => run_classify(c),
        Command::Invariant => run_invariant(c),
        Command::Evaluate { form } => run_evaluate(form, c),
        Command::Experiment(a) => run_experiment(a, c),
        Command::Selftest { inject_fault } => {
            let (text, ok) = selftest::run(*inject_fault);
            Ok(Outcome { text, code: if ok { 0 } else { EXIT_FAILED } })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match dispatch(&cli) {
        Ok(out) => {
            let written = match &cli.common.out {
                Some(path) => write_file(path, &out.text),
                None => std::io::stdout()
                    .write_all(out.text.as_bytes())
                    .map_err(|e| Failure::usage(e.to_string())),
            };
            match written {
                Ok(()) => ExitCode::from(out.code),
                Err(f) => {
                    eprintln!("error: {}", f.message);
                    ExitCode::from(f.code)
                }
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
