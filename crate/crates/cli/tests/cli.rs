use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyadic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    let code = out.status.code().expect("exit code");
    let doc = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, doc)
}

fn fx(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, doc: &Value) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_string_pretty(doc).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn solve_cube_equation() {
    let (code, doc) = run_json(&["solve", "--system", &fx("solve_cube.sys")]);
    assert_eq!(code, 0);
    assert_eq!(doc["points"], serde_json::json!([["c2"]]));
    assert_eq!(doc["count"], 1);
}

#[test]
fn presentation_to_cosets() {
    let (code, doc) = run_json(&["present2group", "--presentation", &fx("singleton.json"), "--n", "3"]);
    assert_eq!(code, 0);
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(&dir, "group_pres.json", &doc);
    let (code, doc) = run_json(&["cosets", "--presentation", &path]);
    assert_eq!(code, 0);
    assert_eq!(doc["order"], 2);
}

#[test]
fn corrupted_table_is_rejected() {
    let (code, doc) = run_json(&["validate", "--polyadic", &fx("corrupted_table.json")]);
    assert_eq!(code, 1);
    assert_eq!(doc["valid"], false);
    let tuple = doc["axioms"]["associativity"]["tuple"].as_array().expect("witness tuple");
    assert_eq!(tuple.len(), 5);
}

#[test]
fn valid_table_is_accepted() {
    let (code, doc) = run_json(&["validate", "--polyadic", &fx("z3_shifted_table.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["valid"], true);
}

#[test]
fn inner_s3_ternary_fails_conditions() {
    let (code, doc) = run_json(&["validate", "--polyadic", &fx("s3_inner_n3.json")]);
    assert_eq!(code, 1);
    assert_eq!(doc["valid"], false);
    let (code, _) = run_json(&["validate", "--polyadic", &fx("s3_inner_n4.json")]);
    assert_eq!(code, 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let out = run(&["validate", "--polyadic", "/nonexistent/file.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not found"));
    assert_eq!(run(&["solve"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["coordgroup", "--system", "cube.sys"],
        vec!["homs", "--polyadic", "z3_identity.json"],
        vec!["postcover", "--polyadic", "z3_negation.json"],
    ] {
        let args: Vec<String> = args
            .iter()
            .map(|a| if a.ends_with(".json") || a.ends_with(".sys") { fx(a) } else { a.to_string() })
            .collect();
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = run(&args);
        let b = run(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn derived_outputs_round_trip() {
    let dir = tempfile::tempdir().unwrap();

    let (code, doc) = run_json(&["derive", "--polyadic", &fx("z3_negation.json")]);
    assert_eq!(code, 0);
    let path = write_temp(&dir, "derived.json", &doc["polyadic"]);
    let (code, doc) = run_json(&["validate", "--polyadic", &path]);
    assert_eq!(code, 0);
    assert_eq!(doc["kind"], "table");

    let (code, doc) = run_json(&["hg", "--polyadic", &fx("z3_shifted_table.json"), "--anchor", "c2"]);
    assert_eq!(code, 0);
    assert_eq!(doc["recovered"], true);
    let path = write_temp(&dir, "hg.json", &doc["polyadic"]);
    let (code, doc) = run_json(&["validate", "--polyadic", &path]);
    assert_eq!(code, 0);
    assert_eq!(doc["kind"], "derived");

    let (code, doc) = run_json(&["retract", "--polyadic", &fx("z3_negation.json"), "--anchor", "c1"]);
    assert_eq!(code, 0);
    assert_eq!(doc["identity"], "c1");
    let path = write_temp(&dir, "retract.json", &doc["group"]);
    let (code, doc) = run_json(&["validate", "--group", &path]);
    assert_eq!(code, 0);
    assert_eq!(doc["order"], 3);
}

#[test]
fn cover_quotient_exit_codes() {
    let (code, doc) = run_json(&["thm63", "--system", &fx("cube.sys")]);
    assert_eq!(code, 0);
    assert_eq!(doc["epimorphism"], true);
    let (code, doc) = run_json(&["thm63", "--system", &fx("trivial.sys")]);
    assert_eq!(code, 1);
    assert!(doc["failure"].is_string());
}

#[test]
fn minimal_subsystem_drops_redundant_equations() {
    let (code, doc) = run_json(&["minsys", "--system", &fx("pair.sys")]);
    assert_eq!(code, 0);
    assert_eq!(doc["removed"], 2);
    assert_eq!(doc["input_equations"], 3);
}

#[test]
fn homomorphisms_of_ternary_z3() {
    let (code, doc) = run_json(&["homs", "--polyadic", &fx("z3_identity.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["count"], 3);
}

#[test]
fn table_format_renders() {
    let out = run(&["identity", "--polyadic", &fx("z3_identity.json"), "--format", "table"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "identity: c0\n");
}

#[test]
fn structural_verbs() {
    let (code, doc) = run_json(&["skew", "--polyadic", &fx("z3_negation.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["skew"].as_array().unwrap().len(), 3);

    let (code, doc) = run_json(&["subgroups", "--polyadic", &fx("z3_identity.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["count"], 2);

    let (code, doc) = run_json(&["postcover", "--polyadic", &fx("z3_negation.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["order"], 6);
    assert_eq!(doc["kernel"].as_array().unwrap().len(), 3);

    let (code, doc) = run_json(&["identity", "--polyadic", &fx("s3_inner_n4.json")]);
    assert_eq!(code, 0);
    assert!(doc["identity"].is_null() || doc["identity"].is_string());
}

#[test]
fn free_word_reduction() {
    let (code, doc) = run_json(&["freereduce", "xyy^-1x^-1", "x^2y^-1xy^2", "--n", "4"]);
    assert_eq!(code, 0);
    let words = doc["words"].as_array().unwrap();
    assert_eq!(words[0]["reduced"], "1");
    assert_eq!(words[0]["in_free_polyadic"], false);
    assert_eq!(words[1]["height"], 4);
    assert_eq!(words[1]["in_free_polyadic"], true);
}

#[test]
fn translation_both_directions() {
    let (code, doc) = run_json(&[
        "translate", "g2p", "x1*x2^-1=1", "--polyadic", &fx("z3_negation.json"), "--anchor", "c1",
    ]);
    assert_eq!(code, 0);
    assert!(doc["output"].as_str().unwrap().contains("f("));

    let (code, doc) = run_json(&["translate", "p2g", "f(x1,c1,~x2)=x1", "--polyadic", &fx("z3_negation.json")]);
    assert_eq!(code, 0);
    assert!(doc["output"].as_str().unwrap().contains('*'));
}

#[test]
fn geometry_verbs() {
    let (code, doc) = run_json(&["closure", "c0,c1", "c1,c2", "--polyadic", &fx("z3_negation.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["algebraic"], false);
    assert_eq!(doc["closure"].as_array().unwrap().len(), 3);

    let (code, doc) = run_json(&["irreducible", "--system", &fx("pair.sys")]);
    assert_eq!(code, 0);
    assert_eq!(doc["irreducible"], true);

    let (code, doc) = run_json(&["coordgroup", "--system", &fx("cube.sys")]);
    assert_eq!(code, 0);
    assert_eq!(doc["order"], 9);
}
