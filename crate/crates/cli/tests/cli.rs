use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tempfile::TempDir;

use blform_core::exactla::rat;
use blform_core::random::random_witness;
use blform_core::{apply_witness, BlDatum, NormalForm};
use blform_numerics::experiments::tht_endpoint_oracle;

fn blform(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blform")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn write_datum(dir: &TempDir, name: &str, d: &BlDatum) -> PathBuf {
    write(dir, name, &serde_json::to_string(d).unwrap())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const THTSP_ALPHA3: &str =
    r#"{"pi1": [[1,3,0]], "pi2": [[0,1,0],[0,0,1]], "pi3": [[0,0,1],[1,0,0]], "pi4": [[1,1,1]]}"#;

#[test]
fn classify_triangular_alpha_three() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "thtsp_alpha3.json", THTSP_ALPHA3);
    let o = blform(&["classify", "--input", s(&input)]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["normal_form"], "L4");
    assert_eq!(v["beta"], "-2");
    assert_eq!(v["cross_ratio"], "-2");
    assert_eq!(v["verified"], true);
    assert_eq!(v["witness"]["b"].as_array().unwrap().len(), 3);
}

#[test]
fn classify_normal_datum_of_l1() {
    let dir = TempDir::new().unwrap();
    let input = write_datum(&dir, "l1.json", &BlDatum::of_normal_form(&NormalForm::L1));
    let o = blform(&["classify", "--input", s(&input)]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["normal_form"], "L1");
    assert!(v.get("beta").is_none());
}

#[test]
fn classify_reports_hypothesis_and_validity_failures() {
    let dir = TempDir::new().unwrap();
    let same = write(
        &dir,
        "same.json",
        r#"{"pi1": [[1,1,1]], "pi2": [[0,1,0],[0,0,1]], "pi3": [[0,0,1],[1,0,0]], "pi4": [[1,1,1]]}"#,
    );
    assert_eq!(code(&blform(&["classify", "--input", s(&same)])), 2);
    let rank = write(
        &dir,
        "rank.json",
        r#"{"pi1": [[1,0,0]], "pi2": [[0,1,0],[0,2,0]], "pi3": [[0,0,1],[1,0,0]], "pi4": [[1,1,1]]}"#,
    );
    let o = blform(&["classify", "--input", s(&rank)]);
    assert_eq!(code(&o), 3);
    assert!(o.stdout.is_empty());
    let garbage = write(&dir, "garbage.json", r#"{"pi1": [[1,"x/0",0]]}"#);
    assert_eq!(code(&blform(&["classify", "--input", s(&garbage)])), 3);
}

#[test]
fn invariant_recovers_beta() {
    let dir = TempDir::new().unwrap();
    for (beta, want) in [(rat(5), "5"), (rat(1), "1")] {
        let input = write_datum(&dir, "d.json", &BlDatum::of_normal_form(&NormalForm::L4(beta)));
        let o = blform(&["invariant", "--input", s(&input)]);
        assert_eq!(code(&o), 0);
        assert_eq!(stdout_json(&o)["cross_ratio"], want);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let moved = apply_witness(&BlDatum::of_normal_form(&NormalForm::L4(rat(-3))), &random_witness(&mut rng)).unwrap();
    let input = write_datum(&dir, "moved.json", &moved);
    let o = blform(&["invariant", "--input", s(&input)]);
    assert_eq!(stdout_json(&o)["cross_ratio"], "-3");
}

#[test]
fn invariant_is_undefined_when_v2_equals_v3() {
    let dir = TempDir::new().unwrap();
    let input = write_datum(&dir, "l40.json", &BlDatum::of_normal_form(&NormalForm::L4(rat(0))));
    let o = blform(&["invariant", "--input", s(&input)]);
    assert_eq!(code(&o), 4);
    assert!(o.stdout.is_empty());
}

const GAUSSIANS: &str = r#"{
  "f": {"type": "shift", "by": 0.3, "of": {"type": "gaussian", "a": 1}},
  "g": {"type": "shift", "by": -0.2, "of": {"type": "gaussian", "a": 0.8}},
  "h": {"type": "shift", "by": 0.7, "of": {"type": "gaussian", "a": 1.2}}
}"#;

fn value_re(v: &Value) -> f64 {
    v["value"]["re"].as_f64().unwrap()
}

#[test]
fn evaluate_l40_with_locally_constant_f_vanishes() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "fns.json",
        r#"{
  "f": {"type": "box", "lo": -50, "hi": 50},
  "g": {"type": "tensor", "fx": {"type": "gaussian", "a": 1}, "fy": {"type": "gaussian", "a": 1}},
  "h": {"type": "tensor", "fx": {"type": "gaussian", "a": 1}, "fy": {"type": "gaussian", "a": 1}}
}"#,
    );
    let o = blform(&["evaluate", "L4:0", "--input", s(&input), "--t-max", "2", "--xy-points", "64"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(value_re(&stdout_json(&o)).abs() < 1e-12);
}

#[test]
fn evaluate_bht_zero_factorises_through_hilbert() {
    use blform_numerics::forms::hilbert_pairing;
    use blform_numerics::gauss::panel_rule;
    use blform_numerics::quad::QuadConfig;
    use blform_numerics::spec::FunctionSpec as S;

    let dir = TempDir::new().unwrap();
    let input = write(&dir, "fns.json", GAUSSIANS);
    let o = blform(&["evaluate", "bht:0", "--input", s(&input), "--xy-points", "128"]);
    let got = value_re(&stdout_json(&o));

    let cfg = QuadConfig { xy_points: 128, ..QuadConfig::default() };
    let f = S::shift(0.3, S::gaussian(1.0));
    let g = S::shift(-0.2, S::gaussian(0.8));
    let h = S::shift(0.7, S::gaussian(1.2));
    let want: f64 = panel_rule(-8.0, 8.0, 64)
        .into_iter()
        .map(|(x, w)| {
            let gh = g.eval(&[x]).unwrap().re * h.eval(&[x]).unwrap().re;
            w * gh * hilbert_pairing(&f, x, &cfg).unwrap().re()
        })
        .sum();
    assert!((got - want).abs() <= 1e-6 * want.abs(), "{got} vs {want}");
}

#[test]
fn evaluate_tht_on_the_endpoint_construction() {
    let dir = TempDir::new().unwrap();
    let delta: f64 = 100.0;
    let c = delta.powf(-0.5);
    let fns = format!(
        r#"{{
  "f": {{"type": "tensor", "fx": {{"type": "sign_step"}}, "fy": {{"type": "const", "value": 1}}}},
  "g": {{"type": "tensor", "fx": {{"type": "scale", "c": {c}, "of": {{"type": "box", "lo": 0, "hi": {delta}}}}},
                         "fy": {{"type": "box", "lo": 0, "hi": 1}}}},
  "h": {{"type": "tensor", "fx": {{"type": "box", "lo": 0, "hi": 1}},
                         "fy": {{"type": "scale", "c": {c}, "of": {{"type": "box", "lo": 0, "hi": {delta}}}}}}}
}}"#
    );
    let input = write(&dir, "tht.json", &fns);
    let o = blform(&["evaluate", "tht", "--input", s(&input), "--t-max", "200", "--xy-points", "128"]);
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    let re = text.split("\"re\":").nth(1).unwrap().split(',').next().unwrap().trim();
    let mantissa = re.trim_start_matches('-').split('e').next().unwrap();
    assert_eq!(mantissa.len(), 18, "floats carry 17 significant digits: {re}");
    let v = value_re(&stdout_json(&o));
    let oracle = tht_endpoint_oracle(delta);
    assert!(v >= 0.99 * oracle, "{v} vs {oracle}");
}

#[test]
fn evaluate_flags_non_convergence_but_still_emits() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "fns.json", GAUSSIANS);
    let cfg = write(
        &dir,
        "quad.json",
        r#"{"t_eps": 1e-3, "t_max": 1e3, "t_panels": 8, "xy_box": 12, "xy_points": 16, "refine": true, "tol": 1e-15}"#,
    );
    let o = blform(&["evaluate", "bht:2", "--input", s(&input), "--config", s(&cfg), "--format", "csv"]);
    assert_eq!(code(&o), 5);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("form,value_re,value_im,error_estimate,converged\nbht:2,"));
    assert!(text.trim_end().ends_with("false"));
}

#[test]
fn evaluate_rejects_unknown_forms() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "fns.json", GAUSSIANS);
    assert_eq!(code(&blform(&["evaluate", "L9", "--input", s(&input)])), 64);
}

#[test]
fn experiment_tht_endpoint_writes_csv_and_plot() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("tht.csv");
    let plot = dir.path().join("tht.svg");
    let o = blform(&[
        "experiment", "tht-endpoint", "--delta", "100,1000,10000", "--xy-points", "64",
        "--out", s(&out), "--plot", s(&plot),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("PASS"));
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("parameter,value,error_estimate,lhs,rhs,ratio"));
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let oracle = tht_endpoint_oracle(cols[0]);
        assert!((cols[1] - oracle).abs() <= 0.01 * oracle);
    }
    assert!(std::fs::read_to_string(&plot).unwrap().starts_with("<svg"));
}

#[test]
fn experiment_output_is_byte_identical_across_runs() {
    let args = ["experiment", "l40-blowup", "--m", "10,100,1000", "--xy-points", "64", "--format", "json"];
    let a = blform(&args);
    let b = blform(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    assert_eq!(v["verdict"]["passed"], true);
    assert_eq!(v["sweeps"][0]["points"].as_array().unwrap().len(), 3);
}

#[test]
fn boundedness_passes_for_l42_and_fails_for_l40() {
    let base = ["experiment", "boundedness", "--p", "inf,2,2", "--seeds", "1", "--xy-points", "64"];
    let pass = blform(&[&base[..], &["--form", "L4:2"]].concat());
    assert_eq!(code(&pass), 0, "{}", String::from_utf8_lossy(&pass.stderr));
    let fail = blform(&[&base[..], &["--form", "L4:0"]].concat());
    assert_eq!(code(&fail), 1);
    let csv = String::from_utf8(fail.stdout).unwrap();
    assert!(csv.starts_with("series,parameter,"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn reduction_experiment_writes_trials() {
    let o = blform(&["experiment", "reduce-bht", "--alpha", "-1", "--trials", "2", "--xy-points", "128"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = String::from_utf8(o.stdout).unwrap();
    assert!(csv.starts_with("seed,lhs_re,lhs_im,rhs_re,rhs_im,rel\n1,"));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn selftest_is_clean_deterministic_and_catches_faults() {
    let a = blform(&["selftest"]);
    let b = blform(&["selftest"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    let bad = blform(&["selftest", "--inject-fault", "targets"]);
    assert_eq!(code(&bad), 1);
    assert!(String::from_utf8_lossy(&bad.stdout).contains("FAIL round-trip"));
}

#[test]
fn thread_cap_does_not_change_results() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_blform"))
            .args(["experiment", "tht-endpoint", "--delta", "10,100,1000", "--xy-points", "64"])
            .env("BLFORM_THREADS", threads)
            .output()
            .unwrap()
    };
    let (one, two) = (run("1"), run("2"));
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, two.stdout);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&blform(&["classify"])), 64);
    assert_eq!(code(&blform(&["frobnicate"])), 64);
    assert_eq!(code(&blform(&["experiment", "boundedness", "--p", "inf,2"])), 64);
}
