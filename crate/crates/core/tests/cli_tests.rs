use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qutritlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn witness(report: &Value, name: &str) -> f64 {
    report["witnesses"]
        .as_array()
        .unwrap()
        .iter()
        .find(|w| w["name"] == name)
        .unwrap()["value"]
        .as_f64()
        .unwrap()
}

#[test]
fn verify_algebra_passes() {
    let out = run(&["verify-algebra"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], "qutritlab/1");
    assert_eq!(v["command"], "verify-algebra");
    assert_eq!(v["pass"], true);
}

#[test]
fn isotropic_reports() {
    let out = run(&["isotropic", "--epsilon", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["results"]["verdict"], "NONSEPARABLE");
    assert!((witness(&v["results"], "ppt_min_eig") + 1.0 / 9.0).abs() < 1e-12);
    assert!((witness(&v["results"], "necessity_bound") - 2.0).abs() < 1e-12);

    let sep = json(&run(&["isotropic", "--epsilon", "0.2"]));
    assert_eq!(sep["results"]["verdict"], "SEPARABLE");
    assert!(sep["results"]["decomposition"].as_array().unwrap().len() == 13);

    let edge = json(&run(&["isotropic", "--epsilon", "0.25"]));
    assert_eq!(edge["results"]["verdict"], "BOUNDARY");
}

#[test]
fn bounds_thresholds() {
    let two = json(&run(&["bounds", "--n-qutrits", "2"]));
    assert_eq!(two["results"]["lower_threshold"]["exact"], "1/28");
    assert_eq!(two["results"]["upper_threshold"]["value"], 0.25);

    let three = json(&run(&["bounds", "--n-qutrits", "3"]));
    assert_eq!(three["results"]["lower_threshold"]["exact"], "1/244");
    assert_eq!(three["results"]["upper_threshold"], "n/a (odd N)");

    let four = run(&["bounds", "--n-qutrits", "4", "--epsilon", "0.11"]);
    assert_eq!(four.status.code(), Some(0));
    let four = json(&four);
    assert_eq!(four["results"]["lower_threshold"]["exact"], "1/2188");
    assert_eq!(four["results"]["upper_threshold"]["exact"], "1/10");
    assert_eq!(four["results"]["rho_phi"]["verdict"], "NONSEPARABLE");
}

#[test]
fn ensemble_check_passes() {
    let out = run(&["ensemble-check"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["member_count"], 12);
}

#[test]
fn montecarlo_is_reproducible() {
    let args = ["montecarlo", "--samples", "20000", "--seed", "42"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["montecarlo", "--samples", "20000", "--seed", "43"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn writes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&["ensemble-check", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "ensemble-check");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["isotropic"][..],
        &["isotropic", "--epsilon", "1.5"],
        &["bounds"],
        &["bounds", "--n-qutrits", "0"],
        &["montecarlo", "--samples", "10"],
        &["verify-algebra", "--tol", "-1"],
        &["no-such-command"],
        &[],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
    }
}
