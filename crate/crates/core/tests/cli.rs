use std::process::{Command, Output};

use serde_json::Value;

fn tdpoly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdpoly")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn whitney_csv_rows() {
    let out = tdpoly(&["table", "whitney2", "--m", "2", "--a", "1", "--nmax", "2", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,k,value");
    for row in ["2,0,1", "2,1,0", "2,2,1"] {
        assert!(lines.contains(&row), "missing {row} in {text}");
    }
}

#[test]
fn bernoulli_csv_rows() {
    let out = tdpoly(&["table", "bernoulli_numbers", "--nmax", "2", "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "n,value\n0,1\n1,-1/2\n2,1/6\n");
}

#[test]
fn single_row_table() {
    let out = tdpoly(&["table", "stirling2", "--nmax", "0"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["rows"], serde_json::json!([["1"]]));
}

#[test]
fn polynomial_table_records() {
    let out = tdpoly(&["table", "tanny_dowling", "--m", "2", "--a", "1", "--nmax", "2"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v[2], serde_json::json!({"n": 2, "family": "tanny_dowling", "m": 2, "a": "1", "coeffs": ["1", "0", "2"]}));
}

#[test]
fn verify_grid_passes_and_reports() {
    let out = tdpoly(&["verify", "all", "--mmax", "3", "--amin", "-2", "--amax", "2", "--astep", "1/2", "--nmax", "20"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["fail"], 0);
    assert_eq!(v["grid"]["m"], serde_json::json!([1, 2, 3]));
    assert_eq!(v["grid"]["a"].as_array().unwrap().len(), 9);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(v["pass"].as_u64().unwrap() as usize, checks.len());
    for c in checks {
        for key in ["id", "m", "a", "n", "lhs", "rhs", "holds"] {
            assert!(c.get(key).is_some(), "{key} missing in {c}");
        }
    }
}

#[test]
fn verify_single_point() {
    let out = tdpoly(&["verify", "theorem1", "--m", "1", "--a", "0", "--nmax", "25"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["checks"].as_array().unwrap().iter().any(|c| c["id"] == "THEOREM1" && c["n"] == 25));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["verify", "theorem1", "--m", "0"][..],
        &["verify", "theorem1", "--a", "1/0"],
        &["table", "nonsense"],
        &["quadcheck", "theorem3", "--nmax", "16"],
    ] {
        let out = tdpoly(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn quadcheck_laguerre_transform() {
    let out = tdpoly(&["quadcheck", "theorem3", "--m", "2", "--a", "1", "--nmax", "10", "--x", "1/2", "--order", "64"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["fail"], 0);
    assert_eq!(v["rows"].as_array().unwrap().len(), 11);
}

#[test]
fn quadcheck_divergent_point_is_reported_not_failed() {
    let out = tdpoly(&["quadcheck", "theorem4", "--m", "1", "--a", "0", "--x", "1", "--z", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["rows"][0]["status"], "divergent");
}

#[test]
fn quadcheck_convergent_egf_point() {
    let out = tdpoly(&["quadcheck", "theorem4", "--m", "2", "--a", "1/2", "--x", "1/2", "--z", "1/10", "--N", "40"]);
    assert_eq!(out.status.code(), Some(0));
    let row = &json(&out)["rows"][0];
    assert_eq!(row["status"], "ok");
    assert!(row["residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn quadcheck_degenerate_integral() {
    let out = tdpoly(&["quadcheck", "theorem1", "--m", "1", "--a", "0", "--nmax", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["rows"][0]["target"].as_f64(), Some(1.0));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = ["verify", "all", "--mmax", "2", "--amin", "-1", "--amax", "1", "--nmax", "12"];
    let first = tdpoly(&args);
    for _ in 0..3 {
        assert_eq!(tdpoly(&args).stdout, first.stdout);
    }
    let q = ["quadcheck", "theorem3", "--m", "3", "--a", "-1/2", "--x", "-2", "--nmax", "12"];
    assert_eq!(tdpoly(&q).stdout, tdpoly(&q).stdout);
}

#[test]
fn output_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("tdpoly-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("table.csv");
    let args = ["table", "dowling", "--m", "3", "--a", "2", "--nmax", "5", "--format", "csv"];
    let direct = tdpoly(&args);
    let mut with_file = args.to_vec();
    with_file.extend(["--output", path.to_str().unwrap()]);
    assert!(tdpoly(&with_file).status.success());
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}
