use std::process::Command;

use macmahon::cli::run_with;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("macmahon").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn compute_m_value() {
    let (code, out, _) = run(&["compute", "M", "--vec", "1,1", "--n", "4"]);
    assert_eq!(code, 0);
    assert_eq!(out, "3\n");
    let (_, json, _) = run(&["compute", "M", "--vec", "(2,0,1)", "--n", "6", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["vector"], serde_json::json!([2, 0, 1]));
}

#[test]
fn compute_h6_json() {
    let (code, out, _) = run(&["compute", "H", "--k", "6", "--trunc", "6", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["truncation"], 6);
    assert_eq!(v["coeffs"][4], "3");
    assert_eq!(v["coeffs"][6], "20");
    let s: macmahon::QSeries = serde_json::from_str(&out).unwrap();
    assert_eq!(s, macmahon::quasimodular::h_series(6, 6).unwrap());
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["compute", "G", "--k", "3"][..],
        &["compute", "sym", "--vec", "2,1"],
        &["compute", "M", "--vec", "1,x", "--n", "3"],
        &["compute", "U", "--vec", "1", "--trunc", "0"],
        &["verify", "psi", "--which", "4"],
        &["search", "const", "--d", "2"],
        &["frobnicate"],
    ] {
        let (code, _, err) = run(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(!err.is_empty());
    }
    let (_, _, err) = run(&["compute", "G", "--k", "3"]);
    assert!(err.contains("even"), "{err}");
}

#[test]
fn verification_failure_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m1.json");
    std::fs::write(&path, r#"{"kind":"poly","polys":[[1]]}"#).unwrap();
    let (code, _, err) = run(&["verify", "detect", "--expr", path.to_str().unwrap(), "--trunc", "40"]);
    assert_eq!(code, 1);
    assert!(err.contains("n = 1"), "{err}");
}

#[test]
fn verify_detector_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("row1.json");
    std::fs::write(&path, r#"{"kind":"poly","polys":[[2,-3,1],[-8]]}"#).unwrap();
    let (code, out, _) = run(&["verify", "detect", "--expr", path.to_str().unwrap(), "--trunc", "60", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v[0]["range"], 60);
    assert_eq!(v[0]["composite_values"][0], serde_json::json!([4, "18"]));
}

#[test]
fn verify_commands_pass() {
    assert_eq!(run(&["verify", "table1", "--trunc", "60"]).0, 0);
    assert_eq!(run(&["verify", "ramanujan", "--trunc", "40"]).0, 0);
    for which in ["1", "2", "3"] {
        assert_eq!(run(&["verify", "psi", "--which", which, "--trunc", "60"]).0, 0, "psi {which}");
    }
}

#[test]
fn reduce_outputs() {
    let (code, out, _) = run(&["reduce", "conv", "--a", "1", "--b", "1,1", "--format", "json"]);
    assert_eq!(code, 0);
    assert_eq!(
        out.trim(),
        r#"[{"vector":[1,1],"coeff":"-1/3"},{"vector":[1,3],"coeff":"1/6"},{"vector":[3,1],"coeff":"1/6"},{"vector":[1,1,1],"coeff":"3"}]"#
    );
    let (code, out, _) = run(&["reduce", "timesn", "--vec", "1,1", "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("vector,coefficient\n"));
    assert!(out.contains("\"(2,2)\",36/11"));
}

#[test]
fn search_outputs() {
    let (code, out, _) = run(&["search", "poly", "--max-a", "2", "--max-deg", "2", "--trunc", "60", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["detectors"][0]["polys"], serde_json::json!([["2", "-3", "1"], ["-8"]]));
    let (code, out, _) = run(&["search", "const", "--d", "4", "--trunc", "60"]);
    assert_eq!(code, 0);
    assert!(out.contains("# count: 3"));
}

#[test]
fn output_is_deterministic_and_written_to_file() {
    let args = ["compute", "U", "--vec", "1,3", "--trunc", "30", "--format", "csv"];
    assert_eq!(run(&args).1, run(&args).1);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let (code, out, _) = run(&["verify", "psi", "--which", "1", "--trunc", "40", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v[0]["range"], 40);
}

#[test]
fn binary_exit_codes_and_env_truncation() {
    let bin = env!("CARGO_BIN_EXE_macmahon");
    let out = Command::new(bin)
        .args(["compute", "G", "--k", "4"])
        .env("MACMAHON_TRUNC", "5")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 6);
    let bad = Command::new(bin).args(["compute", "H", "--k", "5"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let jobs = Command::new(bin).args(["--jobs", "2", "verify", "ramanujan", "--trunc", "20"]).output().unwrap();
    assert!(jobs.status.success());
}
