use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qform")).args(args).env_remove("QFORM_BUDGET").output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).expect("utf-8 output"))
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let (code, out) = run(args);
    (code, serde_json::from_str(&out).unwrap_or_else(|e| panic!("{args:?} printed non-JSON ({e}): {out}")))
}

fn assert_schema(name: &str, doc: &Value) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).unwrap();
    let msgs: Vec<String> = match compiled.validate(doc) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("{name} output violates its schema: {msgs:?}\n{doc}");
}

const HEX: &str = "[[2,1],[1,2]]";
const X2Y2_7Z2: &str = "[[2,0,0],[0,2,0],[0,0,14]]";

#[test]
fn theta_of_four_squares() {
    let i4 = data("I4.json");
    let (code, out) = run_json(&["theta", "--form", &i4, "--max", "10"]);
    assert_eq!(code, 0);
    let expected: Vec<u64> = vec![1, 8, 24, 32, 24, 48, 96, 64, 24, 104, 144];
    assert_eq!(out["coefficients"], serde_json::json!(expected));
    assert_schema("theta", &out);
}

#[test]
fn theta_csv_has_vanishing_cusp_part() {
    let (code, out) = run(&["theta", "--form", &data("I4.json"), "--max", "12", "--format", "csv"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("m,r_Q(m),a_E(m),a_C(m)"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 13);
    for r in rows {
        assert_eq!(r[1], r[2]);
        assert_eq!(r[3], "0");
    }
}

#[test]
fn density_at_three() {
    let (code, out) = run_json(&["density", "--form", &data("I4.json"), "--p", "3", "--m", "1"]);
    assert_eq!(code, 0);
    assert_eq!((out["value"]["num"].as_i64(), out["value"]["den"].as_i64()), (Some(8), Some(9)));
    assert_eq!(out["value"]["pi_exp"], 0);
    assert_schema("density", &out);
    let (_, out) = run_json(&["density", "--form", &data("I4.json"), "--p", "inf", "--m", "5"]);
    assert_eq!((out["value"]["num"].as_i64(), out["value"]["pi_exp"].as_i64()), (Some(5), Some(2)));
    assert_schema("density", &out);
}

#[test]
fn selftest_passes() {
    let (code, out) = run_json(&["selftest", "--seed", "7"]);
    assert_eq!(code, 0);
    assert_eq!(out["status"], "PASS");
    assert_eq!(out["max_residual"]["num"], 0);
    assert!(out["results"].as_array().unwrap().len() >= 100);
    assert_schema("selftest", &out);
    assert_eq!(run(&["selftest", "--seed", "7"]).1, run(&["selftest", "--seed", "7"]).1);
}

#[test]
fn every_report_matches_its_schema() {
    let i4 = data("I4.json");
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("invariants", vec!["invariants", "--form", &i4, "--place", "2"]),
        ("invariants", vec!["invariants", "--form", HEX, "--place", "inf"]),
        ("eisenstein", vec!["eisenstein", "--form", &i4, "--m", "12"]),
        ("eisenstein", vec!["eisenstein", "--form", X2Y2_7Z2, "--m", "5"]),
        ("neighbors", vec!["neighbors", "--form", &i4, "--p", "3"]),
        ("genus", vec!["genus", "--form", X2Y2_7Z2, "--primes", "3,5"]),
        ("mass", vec!["mass", "--form", &i4]),
        ("spinor-norm", vec!["spinor-norm", "--form", HEX, "--matrix", "[[0,1],[1,0]]"]),
    ];
    for (schema, args) in cases {
        let (code, out) = run_json(&args);
        assert_eq!(code, 0, "{args:?}: {out}");
        assert_schema(schema, &out);
    }
    let form: Value = serde_json::from_str(&std::fs::read_to_string(&i4).unwrap()).unwrap();
    assert_schema("form", &form);
}

#[test]
fn reported_values() {
    let i4 = data("I4.json");
    assert_eq!(run_json(&["invariants", "--form", HEX, "--p", "3"]).1["hasse"], 1);
    assert_eq!(run_json(&["neighbors", "--form", &i4, "--p", "3"]).1["count"], 16);
    let mass = run_json(&["mass", "--form", &i4]).1;
    assert_eq!((mass["mass"]["num"].as_i64(), mass["mass"]["den"].as_i64()), (Some(1), Some(384)));
    let genus = run_json(&["genus", "--form", X2Y2_7Z2, "--primes", "3,5"]).1;
    assert_eq!(genus["class_number"], 2);
    assert_eq!(genus["completeness"], "verified");
    assert!(genus["graphs"].as_array().unwrap().iter().all(|g| g["regular"] == true));
    let e = run_json(&["eisenstein", "--form", &i4, "--m", "12"]).1;
    assert_eq!(e["value"]["num"], 96);
    // a reflection has determinant -1 and spinor norm Q(v)
    let sn = run_json(&["spinor-norm", "--form", "[[2,0],[0,6]]", "--matrix", "[[-1,0],[0,1]]"]).1;
    assert_eq!((sn["det"].as_i64(), sn["spinor_norm"].as_i64()), (Some(-1), Some(1)));
    let sn = run_json(&["spinor-norm", "--form", "[[2,0],[0,6]]", "--matrix", "[[-1,0],[0,-1]]"]).1;
    assert_eq!((sn["det"].as_i64(), sn["spinor_norm"].as_i64()), (Some(1), Some(3)));
}

#[test]
fn exit_codes() {
    let i4 = data("I4.json");
    let (code, out) = run_json(&["density", "--form", &i4, "--p", "3", "--m", "0"]);
    assert_eq!(code, 2);
    assert_schema("error", &out);
    let (code, out) = run_json(&["theta", "--form", "{\"n\": 2, \"hessian\": [[1,0],[0,2]]}", "--max", "3"]);
    assert_eq!((code, out["error"]["kind"].as_str()), (2, Some("invalid_hessian")));
    assert_eq!(run_json(&["theta", "--form", "{oops", "--max", "3"]).0, 2);
    assert_eq!(run_json(&["genus", "--form", &i4, "--primes", "2"]).0, 2);
    assert_eq!(run_json(&["spinor-norm", "--form", HEX, "--matrix", "[[1,1],[0,1]]"]).1["error"]["kind"], "not_isometry");
    assert_eq!(run(&["theta", "--form", &i4, "--max", "3", "--bogus"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    let (code, out) = run_json(&["theta", "--form", &i4, "--max", "1000", "--budget", "10"]);
    assert_eq!(code, 3);
    assert_schema("error", &out);
    let out = Command::new(env!("CARGO_BIN_EXE_qform")).args(["theta", "--form", &i4, "--max", "1000"]).env("QFORM_BUDGET", "10").output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}
