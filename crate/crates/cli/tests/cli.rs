use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn arr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arr")).args(args).output().unwrap()
}

fn arr_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_arr"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn schema() -> jsonschema::JSONSchema {
    let s: Value = serde_json::from_str(include_str!("../schema/report.schema.json")).unwrap();
    jsonschema::JSONSchema::compile(&s).unwrap()
}

fn assert_valid(doc: &Value) {
    let schema = schema();
    let msgs: Vec<String> = match schema.validate(doc) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("schema violations: {msgs:?}");
}

fn report(args: &[&str]) -> (Output, Value, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let mut full: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_owned();
    full.extend(["--json", &p]);
    let out = arr(&full);
    let doc = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    (out, doc, dir)
}

#[test]
fn chi_of_boolean() {
    let o = arr(&["chi", "examples:boolean4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("(t - 1)^4"), "{}", stdout(&o));
}

#[test]
fn dump_round_trips_through_stdin() {
    let dump = arr(&["examples", "dump", "braid"]);
    assert!(dump.status.success());
    let direct = arr(&["chi", "examples:braid"]);
    let piped = arr_stdin(&["chi", "-"], &stdout(&dump));
    assert!(piped.status.success(), "{}", stderr(&piped));
    assert_eq!(stdout(&direct), stdout(&piped));
}

#[test]
fn examples_list_names_the_catalog() {
    let o = arr(&["examples", "list"]);
    assert!(o.status.success());
    for name in ["braid", "er", "xyzw-sum", "braid-plus"] {
        assert!(stdout(&o).lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}

#[test]
fn b2_ledger_along_pivot() {
    let (o, doc, _d) = report(&["b2", "examples:b9", "--pivot", "0 0 0 1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_valid(&doc);
    let text = stdout(&o);
    assert!(text.contains("30") && text.contains("22"), "{text}");
}

#[test]
fn parse_errors_have_line_numbers() {
    let o = arr_stdin(&["chi", "-"], "dim 3\n1 0 0\n0 x 1\n");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn unknown_pivot_is_an_error() {
    let o = arr(&["b2", "examples:braid", "--pivot", "1 1 1 1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn undecided_freeness_exits_two() {
    let (o, doc, _d) = report(&["free", "examples:er", "--degree-bound", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(doc["inconclusive"], Value::Bool(true));
    assert_valid(&doc);
}

#[test]
fn pd_both_agree_and_verify() {
    let (o, doc, dir) = report(&["pd", "examples:xyzw-sum", "--both"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("certificates agree: true"));
    assert_valid(&doc);
    let path = dir.path().join("report.json");
    let v = arr(&["verify", path.to_str().unwrap()]);
    assert!(v.status.success(), "{}", stderr(&v));
    assert!(stdout(&v).contains("ok"));
}

#[test]
fn tampered_report_fails_verify() {
    let (_, mut doc, dir) = report(&["pd", "examples:xyzw-sum", "--infer"]);
    let certs = doc.pointer_mut("/result/certificates").unwrap().as_object_mut().unwrap();
    let (_, cert) = certs.iter_mut().next().unwrap();
    cert["conclusion"]["lo"] = Value::from(1);
    cert["conclusion"]["hi"] = Value::from(1);
    let path = dir.path().join("tampered.json");
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let v = arr(&["verify", path.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(1));
    assert!(stderr(&v).contains("failed replay"), "{}", stderr(&v));
}

#[test]
fn wrong_format_version_is_rejected() {
    let (_, mut doc, dir) = report(&["pd", "examples:braid", "--infer"]);
    doc["format_version"] = Value::from(99);
    let path = dir.path().join("v99.json");
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let v = arr(&["verify", path.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(1));
}

#[test]
fn classify_finds_ipd_level() {
    let (o, doc, _d) = report(&["classify", "examples:braid-plus"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_valid(&doc);
    assert!(stdout(&o).contains("IPD"), "{}", stdout(&o));
}

#[test]
fn reports_match_schema() {
    let cases: &[&[&str]] = &[
        &["chi", "examples:braid"],
        &["lattice", "examples:braid"],
        &["ziegler", "examples:braid", "--pivot", "1 -1 0 0"],
        &["restrict", "examples:braid", "--pivot", "1 -1 0 0"],
        &["localize", "examples:boolean4", "--flat", "1 0 0 0; 0 1 0 0"],
        &["resolve", "examples:xyzw-sum"],
        &["surject", "examples:xyzw-sum", "--pivot", "0 0 0 1", "--map", "ziegler"],
        &["pd", "examples:braid", "--exact"],
        &["examples", "list"],
    ];
    for args in cases {
        let (o, doc, _d) = report(args);
        assert!(o.status.success(), "{args:?}: {}", stderr(&o));
        assert_valid(&doc);
    }
}

#[test]
fn resolution_of_xyzw_sum() {
    let o = arr(&["resolve", "examples:xyzw-sum"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("S[-4]"), "{}", stdout(&o));
}
