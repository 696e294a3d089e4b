use std::path::PathBuf;
use std::process::{Command, Output};

use flucmo::parallel::{par_estimate_covariance, par_estimate_poly_covariance};
use flucmo_core::matrix_layer::ChainSpec;
use flucmo_core::montecarlo::{estimate_covariance, estimate_poly_covariance, TolerancePolicy, WignerEnsemble};
use flucmo_core::{Caps, ComplexMatrix, C64};
use serde_json::Value;

fn flucmo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flucmo"))
        .args(args)
        .env_remove("FLUCMO_CAPS")
        .env("RUST_LOG", "off")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("flucmo-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn annular_enumeration_lists_eighteen() {
    let v = json(&flucmo(&["enumerate", "anc", "--k", "2", "--l", "2"]));
    assert_eq!(v.as_array().unwrap().len(), 18);
}

#[test]
fn disk_enumeration_is_catalan() {
    let v = json(&flucmo(&["enumerate", "ncp", "--n", "5"]));
    assert_eq!(v.as_array().unwrap().len(), 42);
}

#[test]
fn good_graph_multiplicities_sum_to_eight() {
    let v = json(&flucmo(&["enumerate", "good-graphs", "--k", "1", "--l", "1"]));
    let total: u64 = v.as_array().unwrap().iter().map(|g| g["multiplicity"].as_u64().unwrap()).sum();
    assert_eq!(total, 8);
}

#[test]
fn m2_at_two_i() {
    let v = json(&flucmo(&["eval", "m2", "--left", "0+2i", "--right", "0+2i"]));
    assert_eq!(v["value"]["re"].as_f64(), Some(0.015625));
    assert_eq!(v["value"]["im"].as_f64(), Some(0.0));
}

#[test]
fn negative_points_parse() {
    let v = json(&flucmo(&["eval", "m", "--z", "-1-2i"]));
    assert!(v["value"]["im"].as_f64().unwrap() < 0.0);
    assert!(v["value"]["re"].as_f64().unwrap() > 0.0);
}

#[test]
fn eval_output_is_byte_identical() {
    let args = ["eval", "frakm2", "--left", "0+2i,1+1i", "--right", "-1+2i", "--kappa4", "1", "--sigma", "0.5"];
    let (a, b) = (flucmo(&args), flucmo(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(flucmo(&["eval", "nonsense"]).status.code(), Some(2));
    assert_eq!(flucmo(&["eval", "m", "--z", "abc"]).status.code(), Some(2));
    assert_eq!(flucmo(&["eval", "m", "--z", "1"]).status.code(), Some(2));
    assert_eq!(flucmo(&["mc", "covariance", "--config", "/nonexistent/flucmo.json"]).status.code(), Some(2));
}

#[test]
fn schema_and_cap_errors_exit_two() {
    let bad = temp_file("bad.json", r#"{"n": 8}"#);
    let out = flucmo(&["mc", "covariance", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema"));
    let out = flucmo(&["--caps", "m2=1", "eval", "m2", "--left", "1i,2i", "--right", "1i,2i"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn validate_identities_passes() {
    let v = json(&flucmo(&["validate", "identities"]));
    assert_eq!(v["pass"], Value::Bool(true), "{v:#}");
}

#[test]
fn validate_oracle_passes() {
    let v = json(&flucmo(&["validate", "oracle", "--draws", "2", "--seed", "4"]));
    assert_eq!(v["pass"], Value::Bool(true), "{v:#}");
}

#[test]
fn covariance_experiment_reports_pass() {
    let cfg = temp_file(
        "cov.json",
        r#"{"ensemble": "GUE", "n": 32, "samples": 200, "seed": 11,
            "left": [{"z": "0+2i"}], "right": [{"z": "0+2i"}]}"#,
    );
    let csv = std::env::temp_dir().join(format!("flucmo-cli-{}-cov.csv", std::process::id()));
    let out = flucmo(&["mc", "covariance", "--config", cfg.to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
    let v = json(&out);
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["predicted"]["re"].as_f64(), Some(0.015625));
    let table = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(table.lines().count(), 2);
    assert!(table.lines().nth(1).unwrap().ends_with(",pass"));
}

#[test]
fn failed_verdict_exits_one() {
    // At N = 4 the GOE finite-size bias is far above 3 standard errors.
    let cfg = temp_file(
        "strict.json",
        r#"{"ensemble": "GOE", "n": 4, "samples": 4000, "seed": 2,
            "left": [{"z": "0+1i"}], "right": [{"z": "0+1i"}],
            "tolerance": {"c_bias": 0.0, "abs_floor": 0.0}}"#,
    );
    let out = flucmo(&["mc", "covariance", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn parallel_driver_matches_sequential() {
    let caps = Caps::default();
    let policy = TolerancePolicy::default();
    let ens = WignerEnsemble::named("GOE".parse().unwrap(), 24).unwrap();
    let z = C64::new(0.5, 1.5);
    let left = ChainSpec::identities(&[z], 24).unwrap();
    let right = ChainSpec::identities(&[z.conj(), z], 24).unwrap();
    let seq = estimate_covariance(&ens, &left, &right, 120, 17, &policy, &caps).unwrap();
    let par = par_estimate_covariance(&ens, &left, &right, 120, 17, &policy, &caps).unwrap();
    assert_eq!(seq, par);

    let gue = WignerEnsemble::gue(24).unwrap();
    let id = [ComplexMatrix::identity(24), ComplexMatrix::identity(24)];
    let seq = estimate_poly_covariance(&gue, &id, &id, 120, 5, &policy, &caps).unwrap();
    let par = par_estimate_poly_covariance(&gue, &id, &id, 120, 5, &policy, &caps).unwrap();
    assert_eq!(seq, par);
}
