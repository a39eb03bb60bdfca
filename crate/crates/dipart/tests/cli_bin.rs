//! End-to-end tests of the `dipart` binary: exit codes, JSON shapes, and
//! the stability of the stdout/stderr contract.

use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn dipart(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dipart"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn dipart_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_dipart"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().expect("binary exits")
}

fn write_problem(name: &str, content: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("dipart-test-{}-{name}", std::process::id()));
    std::fs::write(&path, content).unwrap();
    path
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "expected success, stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const REFERENCE: &str = r#"{"matrix": [[0,1,1,3],[4,2,3,1]], "target": [10,10]}"#;

#[test]
fn count_reference_target() {
    let path = write_problem("ref.json", REFERENCE);
    let out = dipart(&["count", path.to_str().unwrap()]);
    let v = stdout_json(&out);
    assert_eq!(v["count"], "2");
    assert_eq!(v["method"], "auto");
    assert!(v["terms_evaluated"].as_u64().unwrap() > 0);
}

#[test]
fn count_empty_matrix() {
    let path = write_problem("empty.json", r#"{"matrix": [[],[]], "target": [0,0]}"#);
    let out = dipart(&["count", path.to_str().unwrap()]);
    assert_eq!(stdout_json(&out)["count"], "1");
}

#[test]
fn count_rejects_negative_target() {
    let path = write_problem("neg.json", r#"{"matrix": [[1],[1]], "target": [-1,0]}"#);
    let out = dipart(&["count", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("negative target entry"), "{stderr}");
}

#[test]
fn count_rejects_zero_column() {
    let path = write_problem(
        "zerocol.json",
        r#"{"matrix": [[1,0],[1,0]], "target": [2,2]}"#,
    );
    let out = dipart(&["count", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("zero column"));
}

#[test]
fn count_reads_text_format_from_stdin() {
    let out = dipart_stdin(&["count", "-"], "0 1 1 3\n4 2 3 1\ntarget: 10 10\n");
    assert_eq!(stdout_json(&out)["count"], "2");
}

#[test]
fn count_oracle_strategy_respects_budget() {
    let path = write_problem(
        "budget.json",
        r#"{"matrix": [[1,1,2,1],[1,2,1,3]], "target": [900,900], "strategy": {"mode": "oracle"}}"#,
    );
    let out = dipart(&["count", path.to_str().unwrap(), "--budget", "100"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn reduce_reference_matrix() {
    let path = write_problem("reduce.json", REFERENCE);
    let out = dipart(&["reduce", path.to_str().unwrap()]);
    let v = stdout_json(&out);
    let terms = v["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 4);
    let classic: Vec<&Value> = terms.iter().filter(|t| t["method"] == "classic").collect();
    assert_eq!(classic.len(), 3);
    assert_eq!(classic[0]["form"], "2*s1-s2-5");
    assert_eq!(classic[0]["weight"], 1);
    assert_eq!(classic[1]["form"], "3*s1-s2-4");
    assert_eq!(classic[1]["weight"], -1);
    assert_eq!(classic[2]["form"], "s1-3*s2-25");
    assert_eq!(classic[2]["weight"], -1);

    let bar = terms.iter().find(|t| t["method"] == "bar").unwrap();
    assert_eq!(bar["source_column"], 1);
    assert_eq!(bar["modulus"], 4);
    assert_eq!(bar["scale"], 4);
    assert_eq!(bar["generators"], serde_json::json!([1, 1, 3]));
    // 4 residue rows of 16 coefficients each
    let rows = bar["coefficients"].as_object().unwrap();
    assert_eq!(rows.len(), 4);
    let mass: u64 = rows
        .values()
        .flat_map(|row| row.as_array().unwrap())
        .map(|a| a.as_u64().unwrap())
        .sum();
    assert_eq!(mass, 64);
    assert_eq!(bar["selected_row"], 10 % 4);
}

#[test]
fn reduce_human_wedge() {
    let path = write_problem("wedge.json", r#"{"matrix": [[1,2],[1,1]]}"#);
    let out = dipart(&["reduce", path.to_str().unwrap(), "--human"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("+W(s1-s2, {1})"), "{text}");
    assert!(text.contains("-W(s1-2*s2-1, {1})"), "{text}");
}

#[test]
fn coeffs_reference_table() {
    let path = write_problem("coeffs.json", REFERENCE);
    let out = dipart(&["coeffs", path.to_str().unwrap(), "--column", "1"]);
    let v = stdout_json(&out);
    assert_eq!(v["modulus"], 4);
    assert_eq!(v["n_minus"], 0);
    assert_eq!(v["n_plus"], 15);
    assert_eq!(v["total"], "64");
    assert_eq!(
        v["rows"]["0"],
        serde_json::json!([1, 0, 1, 1, 1, 1, 1, 2, 1, 2, 1, 1, 1, 1, 1, 0])
    );
    assert_eq!(
        v["rows"]["3"],
        serde_json::json!([0, 1, 0, 1, 2, 1, 2, 1, 1, 2, 1, 2, 1, 0, 1, 0])
    );
}

#[test]
fn coeffs_both_methods_agree() {
    let path = write_problem("coeffs-both.json", REFERENCE);
    let out = dipart(&[
        "coeffs",
        path.to_str().unwrap(),
        "--column",
        "1",
        "--method",
        "both",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["agree"], true);

    let out = dipart(&[
        "coeffs",
        path.to_str().unwrap(),
        "--column",
        "1",
        "--method",
        "recursive",
        "--inner",
        "classic",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["total"], "64");
}

#[test]
fn coeffs_unit_modulus_column() {
    let path = write_problem("coeffs-unit.json", r#"{"matrix": [[2,1],[1,3]]}"#);
    let out = dipart(&["coeffs", path.to_str().unwrap(), "--column", "1"]);
    let v = stdout_json(&out);
    assert_eq!(v["rows"], serde_json::json!({"0": [1]}));
}

#[test]
fn coeffs_rejects_bad_column() {
    let path = write_problem("coeffs-bad.json", REFERENCE);
    for bad in ["0", "5"] {
        let out = dipart(&["coeffs", path.to_str().unwrap(), "--column", bad]);
        assert_eq!(out.status.code(), Some(2), "column {bad}");
    }
    let path = write_problem("coeffs-betazero.json", r#"{"matrix": [[1,2],[1,0]]}"#);
    let out = dipart(&["coeffs", path.to_str().unwrap(), "--column", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_reference_grid() {
    let path = write_problem("verify.json", REFERENCE);
    let out = dipart(&[
        "verify",
        path.to_str().unwrap(),
        "--rmax",
        "30",
        "--rhomax",
        "30",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["checked"], 961);
    assert_eq!(v["mismatch_count"], 0);
}

#[test]
fn verify_empty_matrix_grid() {
    let path = write_problem("verify-empty.json", r#"{"matrix": [[],[]]}"#);
    let out = dipart(&[
        "verify",
        path.to_str().unwrap(),
        "--rmax",
        "2",
        "--rhomax",
        "2",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["checked"], 9);
    assert_eq!(v["mismatch_count"], 0);
}

#[test]
fn verify_random_corpus() {
    let out = dipart(&[
        "verify", "--random", "6", "--seed", "3", "--rmax", "8", "--rhomax", "8",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["matrices"], 6);
    assert_eq!(v["mismatched_matrices"].as_array().unwrap().len(), 0);
}

#[test]
fn chambers_reference_lines() {
    let path = write_problem("chambers.json", REFERENCE);
    let out = dipart(&["chambers", path.to_str().unwrap()]);
    let v = stdout_json(&out);
    let lines: Vec<Vec<i64>> = v["chambers"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| {
            c["line"]
                .as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_i64().unwrap())
                .collect()
        })
        .collect();
    assert_eq!(
        lines,
        vec![vec![4, 0], vec![2, -1], vec![3, -1], vec![1, -3]]
    );
}

#[test]
fn chambers_reject_collinear_columns() {
    let path = write_problem("chambers-col.json", r#"{"matrix": [[1,2],[2,4]]}"#);
    let out = dipart(&["chambers", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_agrees_on_small_grid() {
    let path = write_problem("bench.json", REFERENCE);
    let out = dipart(&[
        "bench",
        path.to_str().unwrap(),
        "--rmax",
        "6",
        "--rhomax",
        "6",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["targets"], 49);
    assert_eq!(v["agree"], true);
}

#[test]
fn unknown_command_is_usage_error() {
    let out = dipart(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = dipart(&[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn large_counts_survive_as_decimal_strings() {
    // six directions at a large target: the count exceeds 2^53, where JSON
    // numbers lose integers; two independent strategies must agree exactly
    let doc = r#"{"matrix": [[1,0,1,1,2,1],[0,1,1,2,1,3]], "target": [120000,120000]}"#;
    let auto_path = write_problem("big-auto.json", doc);
    let out_auto = dipart(&["count", auto_path.to_str().unwrap()]);
    let v_auto = stdout_json(&out_auto);

    let doc_general = r#"{"matrix": [[1,0,1,1,2,1],[0,1,1,2,1,3]], "target": [120000,120000],
                          "strategy": {"mode": "general"}}"#;
    let general_path = write_problem("big-general.json", doc_general);
    let out_general = dipart(&["count", general_path.to_str().unwrap()]);
    let v_general = stdout_json(&out_general);

    let count = v_auto["count"].as_str().unwrap();
    assert_eq!(count, v_general["count"].as_str().unwrap());
    assert!(count.chars().all(|c| c.is_ascii_digit()));
    let value: u128 = count.parse().unwrap();
    assert!(value > 1 << 53, "expected > 2^53, got {count}");
}
