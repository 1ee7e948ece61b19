use std::path::PathBuf;
use std::process::{Command, Output};

fn wfts(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wfts"))
        .args(args)
        .env("WFTS_COLOR", "0")
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn without_timing(json: &str) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(json).unwrap();
    v.as_object_mut().unwrap().remove("timing");
    v
}

#[test]
fn analyze_taxi_with_both_strategies() {
    let o = wfts(&["analyze", "--generate", "taxi:1", "--mode", "max", "--strategy", "both"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for value in ["12.17", "12.88", "14.00", "13.30", "14.33", "14.60"] {
        assert!(out.contains(value), "{value} missing from\n{out}");
    }
    assert!(!out.contains("\x1b["));
}

#[test]
fn grant_request_is_zero_everywhere() {
    let o = wfts(&["analyze", "--generate", "grantrequest", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = without_timing(&stdout(&o));
    let products = v["products"].as_array().unwrap();
    assert_eq!(products.len(), 4);
    assert!(products.iter().all(|p| p["value"] == "0"));
}

#[test]
fn json_is_stable_apart_from_timing() {
    let args = ["analyze", "--generate", "taxi:2", "--format", "json"];
    let (a, b) = (wfts(&args), wfts(&args));
    assert_eq!(without_timing(&stdout(&a)), without_timing(&stdout(&b)));
    let text = stdout(&a);
    let at = |key: &str| text.find(&format!("\n  \"{key}\"")).unwrap();
    assert!(at("mode") < at("products") && at("products") < at("families") && at("families") < at("timing"));
}

#[test]
fn missing_file_is_a_model_error() {
    let o = wfts(&["analyze", "missing.wfts"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.wfts"));
}

#[test]
fn malformed_file_is_a_model_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.wfts");
    std::fs::write(&path, "features { A }\nstates { s }\ninit { t }\n").unwrap();
    let o = wfts(&["analyze", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(wfts(&["analyze"]).status.code(), Some(1));
    assert_eq!(wfts(&["analyze", "--generate", "taxi:x"]).status.code(), Some(1));
    assert_eq!(wfts(&["bench", "--generate", "taxi:1", "--reps", "0"]).status.code(), Some(1));
    assert_eq!(wfts(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn model_file_matches_generator() {
    let o = wfts(&["analyze", &data("grantrequest.wfts"), "--mode", "min", "--format", "csv"]);
    let g = wfts(&["analyze", "--generate", "grantrequest", "--mode", "min", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), stdout(&g));
    assert!(stdout(&o).starts_with("features,value,decimal,witness\n"));
}

#[test]
fn export_round_trips() {
    let text = stdout(&wfts(&["export", "--generate", "taxi:2"]));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("taxi2.wfts");
    std::fs::write(&path, &text).unwrap();
    assert_eq!(stdout(&wfts(&["export", path.to_str().unwrap()])), text);
}

#[test]
fn golden_file_passes() {
    let o = wfts(&["validate", "--generate", "taxi:1", "--golden", &data("taxi1_max.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn perturbed_golden_file_fails_with_product_diff() {
    let golden = std::fs::read_to_string(data("taxi1_max.json")).unwrap();
    let perturbed = golden.replacen("\"73/5\"", "\"74/5\"", 1);
    assert_ne!(golden, perturbed);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("golden.json");
    std::fs::write(&path, perturbed).unwrap();
    let o = wfts(&["validate", "--generate", "taxi:1", "--golden", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let out = stdout(&o);
    assert!(out.contains("{L1, S, T}"), "{out}");
    assert!(out.contains("expected 74/5, got 73/5"), "{out}");
}

#[test]
fn random_validation_is_deterministic() {
    let args = ["validate", "--seed", "7", "--count", "40"];
    let (a, b) = (wfts(&args), wfts(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn single_rep_bench_has_zero_stddev() {
    let o = wfts(&["bench", "--generate", "grantrequest", "--reps", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rows[0]["family"]["stddev_pct"], 0.0);
    assert_eq!(rows[0]["product"]["stddev_pct"], 0.0);
}
