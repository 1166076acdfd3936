use std::path::PathBuf;
use std::process::{Command, Output};

use enriques::{IntMatrix, OrderedDiagram, ProximityMatrix};
use serde_json::{json, Value};

fn write_input(name: &str, v: &Value) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("cli-{name}.json"));
    std::fs::write(&path, v.to_string()).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_enriques"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn cusp_file() -> PathBuf {
    write_input(
        "cusp",
        &json!({"r": 3, "pred": [null, 1, 2], "second": [null, null, 1]}),
    )
}

#[test]
fn count_only() {
    let out = run(&["enumerate", "-r", "3", "--count-only"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "7\n");
}

#[test]
fn enumerate_streams_one_diagram_per_line() {
    let out = run(&["enumerate", "-r", "3"]);
    let lines: Vec<OrderedDiagram> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[6], OrderedDiagram::cusp());
    let unordered = run(&["enumerate", "-r", "3", "--unordered"]);
    assert_eq!(
        String::from_utf8(unordered.stdout).unwrap().lines().count(),
        5
    );
}

#[test]
fn cusp_is_prime_by_one_satellite() {
    let out = run(&["prime", cusp_file().to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        r#"{"status":"Prime","witness":"at-most-one-satellite"}"#
    );
}

#[test]
fn exhaustive_primality_reports_a_witness() {
    let f = write_input(
        "interleaved",
        &json!({"r": 6, "pred": [null, null, 1, 2, 3, 4], "second": [null, null, null, null, 1, 2]}),
    );
    let quick = stdout_json(&run(&["prime", f.to_str().unwrap()]));
    assert_eq!(quick["status"], "Unknown");
    let out = run(&["prime", f.to_str().unwrap(), "--exhaustive"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["status"], "NotPrime");
    let w: OrderedDiagram = serde_json::from_value(v["witness"].clone()).unwrap();
    assert_eq!(w.dim(), 6);

    let starved = run(&[
        "prime",
        f.to_str().unwrap(),
        "--exhaustive",
        "--budget",
        "3",
    ]);
    assert_eq!(starved.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&starved.stderr).unwrap();
    assert_eq!(err["error"], "budget_exceeded");
}

#[test]
fn validate_reports_axiom_violation() {
    let f = write_input(
        "second-is-pred",
        &json!({"r": 3, "pred": [null, 1, 2], "second": [null, null, 2]}),
    );
    let out = run(&["validate", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    assert_eq!(report["valid"], false);
    assert_eq!(report["violations"][0]["kind"], "axiom_violation");
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "invalid_diagram");

    let ok = run(&["validate", cusp_file().to_str().unwrap()]);
    assert!(ok.status.success());
    assert_eq!(stdout_json(&ok)["valid"], true);
}

#[test]
fn malformed_input_exits_1() {
    let f = write_input("garbage", &json!({"r": "three"}));
    let out = run(&["info", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "parse");
    let missing = run(&["info", "/nonexistent/diagram.json"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn budget_exhaustion_exits_2() {
    let out = run(&["enumerate", "-r", "5", "--max-r", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["enumerate", "-r", "5", "--budget", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn info_matrix_reproduces_the_diagram() {
    let out = run(&["info", cusp_file().to_str().unwrap()]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(
        (v["r"].clone(), v["dim"].clone(), v["satellites"].clone()),
        (json!(3), json!(3), json!(1))
    );
    assert_eq!(v["classes"], json!(["Root", "Free", "Satellite"]));
    assert_eq!(v["inverse"], json!([[1, 0, 0], [1, 1, 0], [2, 1, 1]]));
    let m: IntMatrix = serde_json::from_value(v["proximity_matrix"].clone()).unwrap();
    let d = ProximityMatrix::try_from_matrix(m)
        .unwrap()
        .to_diagram()
        .unwrap();
    assert_eq!(d, OrderedDiagram::cusp());
}

#[test]
fn specializes_refutes_and_proves() {
    let chain = write_input(
        "chain3",
        &json!({"r": 3, "pred": [null, 1, 2], "second": [null, null, null]}),
    );
    let siblings = write_input(
        "siblings3",
        &json!({"r": 3, "pred": [null, 1, 1], "second": [null, null, null]}),
    );
    let refuted = stdout_json(&run(&[
        "specializes",
        chain.to_str().unwrap(),
        siblings.to_str().unwrap(),
    ]));
    assert_eq!(
        refuted,
        json!({"status": "Refuted", "entry": [3, 2], "value": -1})
    );
    let proven = stdout_json(&run(&[
        "specializes",
        chain.to_str().unwrap(),
        cusp_file().to_str().unwrap(),
    ]));
    assert_eq!(proven["status"], "Proven");
    assert_eq!(proven["derivation"]["rule"], "prime-source");
    let mismatch = run(&[
        "specializes",
        chain.to_str().unwrap(),
        write_input("root1", &json!({"r": 1, "pred": [null], "second": [null]}))
            .to_str()
            .unwrap(),
    ]);
    assert_eq!(mismatch.status.code(), Some(1));
}

#[test]
fn extend_prints_both_diagrams() {
    let chain = write_input(
        "chain3-extend",
        &json!({"r": 3, "pred": [null, 1, 2], "second": [null, null, null]}),
    );
    let v = stdout_json(&run(&["extend", chain.to_str().unwrap(), "--at", "3"]));
    let ext: OrderedDiagram = serde_json::from_value(v["extended"].clone()).unwrap();
    let bullet: OrderedDiagram = serde_json::from_value(v["bullet"].clone()).unwrap();
    assert_eq!(ext, OrderedDiagram::free_chain(4));
    assert_eq!(bullet.roots(), 2);
    assert_eq!(v["bullet_appended"]["pred"], json!([null, 1, 2, null]));
    let root = run(&["extend", chain.to_str().unwrap(), "--at", "1"]);
    assert_eq!(root.status.code(), Some(1));
}

#[test]
fn dot_outputs() {
    let out = run(&["render", cusp_file().to_str().unwrap(), "--format", "dot"]);
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("digraph enriques {"));
    assert!(dot.contains("kind=satellite"));
    let poset = String::from_utf8(run(&["poset", "-r", "3", "--format", "dot"]).stdout).unwrap();
    assert_eq!(poset.matches(" -> ").count(), 10);
    let json = stdout_json(&run(&["poset", "-r", "3", "--format", "json"]));
    assert_eq!(json["nodes"].as_array().unwrap().len(), 7);
    assert_eq!(json["edges"][0], json!([0, 1]));
}
