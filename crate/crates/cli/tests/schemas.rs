use std::process::Command;

use jsonschema::JSONSchema;
use serde_json::Value;

fn schema(name: &str) -> JSONSchema {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../schemas/").to_string() + name;
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    JSONSchema::compile(&v).expect("schema compiles")
}

fn run(args: &[&str]) -> Value {
    let o = Command::new(env!("CARGO_BIN_EXE_tmlab")).args(args).output().unwrap();
    serde_json::from_slice(&o.stdout).unwrap()
}

fn assert_valid(s: &JSONSchema, v: &Value) {
    if let Err(errs) = s.validate(v) {
        let msgs: Vec<String> = errs.map(|e| format!("{e} at {}", e.instance_path)).collect();
        panic!("{}", msgs.join("\n"));
    }
}

#[test]
fn verify_report_matches_schema() {
    let s = schema("report.schema.json");
    assert_valid(&s, &run(&["verify", "--suite", "spectrum"]));
    assert!(!s.is_valid(&serde_json::json!({"checks": [], "passed": true})));
}

#[test]
fn descriptors_match_schema() {
    let s = schema("descriptor.schema.json");
    assert_valid(&s, &run(&["construct", "--kind", "joint", "--alpha", "0.25", "--beta", "0.5", "--lambda", "64"]));
    assert_valid(
        &s,
        &run(&["construct", "--kind", "intermediate", "--gamma", "1.5", "--alpha", "1", "--lambda", "16", "--prefix-len", "32"]),
    );
    assert_valid(&s, &run(&["construct", "--kind", "bounded", "--lambda", "5", "--seed", "2"]));
    for text in [
        r#"{"format":"tmlab-point","version":1,"kind":"explicit","blocks":[2,2,1,1]}"#,
        r#"{"format":"tmlab-point","version":1,"kind":"geometric","base":2,"count":30}"#,
    ] {
        assert_valid(&s, &serde_json::from_str(text).unwrap());
    }
    let bad: Value = serde_json::from_str(r#"{"format":"tmlab-point","version":1,"kind":"explicit","blocks":[]}"#).unwrap();
    assert!(!s.is_valid(&bad));
}

#[test]
fn tables_match_schema() {
    let s = schema("table.schema.json");
    assert_valid(&s, &run(&["spectrum", "--q", "5", "--format", "json"]));
    assert_valid(&s, &run(&["measure", "0110", "--format", "json"]));
}
