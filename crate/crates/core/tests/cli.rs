mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::{config_path, schema_errors};
use serde_json::Value;
use sympext::csvio::read_sequence;
use sympext::report::Report;

fn sympext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sympext")).args(args).output().unwrap()
}

fn run(cmd: &str, config: &Path, extra: &[&str]) -> (i32, Report) {
    let mut args = vec![cmd, "--config", config.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = sympext(&args);
    let value: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(schema_errors(&value).is_empty(), "{:?}", schema_errors(&value));
    let report: Report = serde_json::from_value(value).unwrap();
    (out.status.code().unwrap(), report)
}

#[test]
fn exit_code_matches_report() {
    let (code, r) = run("validate", &config_path("e1.json"), &[]);
    assert_eq!(code, 0);
    assert_eq!(r.exit_code, 0);
    assert!(r.verdicts.iter().all(|v| v.passed && v.tolerance > 0.0));
}

#[test]
fn usage_errors_are_config_errors() {
    assert_eq!(sympext(&["plot", "--config", "x.json"]).status.code(), Some(3));
    assert_eq!(sympext(&["validate"]).status.code(), Some(3));
    assert_eq!(sympext(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_config_and_bad_keys() {
    let (code, r) = run("validate", Path::new("/nonexistent/sympext.json"), &[]);
    assert_eq!(code, 3);
    assert_eq!(r.error.unwrap().kind, "Config");

    let (code, r) = run("validate", &config_path("e1.json"), &["--override", "coefficients.W=null"]);
    assert_eq!(code, 3);
    assert_eq!(r.error.unwrap().path.as_deref(), Some("coefficients.W"));

    let (code, r) = run("validate", &config_path("e1.json"), &["--override", "bogus=1"]);
    assert_eq!(code, 3);
    assert_eq!(r.error.unwrap().path.as_deref(), Some("bogus"));
}

#[test]
fn failed_hypothesis_is_a_verdict() {
    let (code, r) = run("validate", &config_path("e1.json"), &["--override", "coefficients.W=[[-1]]"]);
    assert_eq!(code, 1);
    assert!(!r.verdict("coefficients").unwrap().passed);
}

#[test]
fn seed_controls_random_inputs() {
    let cfg = config_path("e1.json");
    let no_init = ["--override", "initial=null"];
    let (_, a) = run("solve", &cfg, &[&no_init[..], &["--seed", "7"]].concat());
    let (_, b) = run("solve", &cfg, &[&no_init[..], &["--seed", "7"]].concat());
    let (_, c) = run("solve", &cfg, &[&no_init[..], &["--seed", "8"]].concat());
    assert_eq!(a.seed, 7);
    assert_eq!(a.without_timing(), b.without_timing());
    assert_ne!(a.data["z0"], c.data["z0"]);
}

#[test]
fn csv_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, r) = run("solve", &config_path("e1.json"), &["--csv", d]);
    assert_eq!(code, 0);
    assert_eq!(r.csv_files, vec!["solution.csv"]);
    let z = read_sequence(&dir.path().join("solution.csv"), 2).unwrap();
    assert_eq!(z.len(), 202);
    // (1, 0) is a solution of E1 at lambda = -1 only at k = 0; x_1 = x_0 - u_1.
    assert_eq!(z[0][0].re, 1.0);

    let (code, r) = run("friedrichs", &config_path("e2.json"), &["--csv", d]);
    assert_eq!(code, 0);
    assert_eq!(r.csv_files, vec!["theta_c0.csv", "theta_c1.csv"]);
}

#[test]
fn membership_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let z = read_sequence(&config_path("e1_member_z.csv"), 2).unwrap();
    let mut moved = z.clone();
    moved[0][0] += sympext::linalg::c(0.5, 0.0);
    let zp = dir.path().join("z.csv");
    sympext::csvio::write_sequence(&zp, &moved).unwrap();
    let f = config_path("e1_member_f.csv");
    let zo = format!("membership.z=\"{}\"", zp.display());
    let fo = format!("membership.f=\"{}\"", f.display());
    let (code, r) = run("membership", &config_path("e1.json"), &["--override", &zo, "--override", &fo]);
    assert_eq!(code, 1);
    assert!(!r.verdict("membership.x0").unwrap().passed);

    let (code, r) = run("membership", &config_path("e1.json"), &["--override", "horizon=300"]);
    assert_eq!(code, 3);
    assert_eq!(r.error.unwrap().kind, "DimensionMismatch");
}

#[test]
fn tolerance_overrides_rejudge_verdicts() {
    let cfg = config_path("e1.json");
    let (code, r) = run("recessive", &cfg, &["--override", "tolerances.lambda_big=1e6"]);
    assert_eq!(code, 1);
    let v = r.verdict("recessive_certificate").unwrap();
    assert!(!v.passed);
    assert_eq!(v.tolerance, 1e6);
    let (code, _) = run("recessive", &cfg, &["--override", "tolerances.lambda_big=-1"]);
    assert_eq!(code, 3);
}
