use std::path::{Path, PathBuf};
use std::process::Command;

use apo_core::translator::{all_models, parse_dimacs, CnfFormula};
use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn tiger() -> String {
    root().join("fixtures/tiger.apo").to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_apo")).args(args).env_remove("APO_FORMAT").output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn run_json(args: &[&str], schema: &str) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let (code, stdout, stderr) = run(&all);
    let value: Value = serde_json::from_str(&stdout).unwrap_or_else(|e| panic!("{e}: {stdout}{stderr}"));
    assert_valid(&value, schema);
    (code, value)
}

fn assert_valid(value: &Value, schema: &str) {
    let path = root().join(format!("schemas/{schema}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).unwrap();
    if let Err(errors) = compiled.validate(value) {
        let msgs: Vec<String> = errors.map(|e| format!("{e} at {}", e.instance_path)).collect();
        panic!("schema violations: {msgs:?}");
    };
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn policy_names_listen_at_one_step() {
    let (code, v) = run_json(&["policy", &tiger(), "--horizon", "1", "--discount", "0.9"], "policy");
    assert_eq!(code, 0);
    assert_eq!(v["best"]["policy"]["steps"], serde_json::json!(["listen"]));
    assert_eq!(v["best"]["value_exact"], "-1");
    assert_eq!(v["discount_exact"], "0.9");
}

#[test]
fn check_passes_at_horizon_two() {
    let (code, v) = run_json(&["check", &tiger(), "--horizon", "2"], "check");
    assert_eq!(code, 0);
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 4);
}

#[test]
fn sat_model_count_equals_normal_answer_sets() {
    let (_, sat) = run_json(&["sat", &tiger(), "--horizon", "1"], "sat");
    let (vars, clauses) = parse_dimacs(sat["dimacs"].as_str().unwrap()).unwrap();
    let models = all_models(vars, &clauses, None).unwrap();
    let (_, solved) = run_json(&["solve", &tiger(), "--horizon", "1", "--normal"], "solve");
    assert_eq!(models.len(), 16);
    assert_eq!(solved["count"], 16);
}

#[test]
fn sat_writes_dimacs_and_atom_map() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tiger.cnf");
    let (code, stdout, _) = run(&["sat", &tiger(), "--out", out.to_str().unwrap()]);
    assert_eq!((code, stdout.as_str()), (0, ""));
    let dimacs = std::fs::read_to_string(&out).unwrap();
    let map: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("tiger.cnf.map.json")).unwrap()).unwrap();
    let cnf = CnfFormula::from_dimacs(&dimacs, &map).unwrap();
    let models = all_models(cnf.variable_count, &cnf.clauses, None).unwrap();
    let occ: usize = models
        .iter()
        .map(|m| cnf.decode_model(m).unwrap().iter().filter(|a| a.pred == "occ").count())
        .sum();
    assert_eq!(occ, models.len());
}

#[test]
fn every_json_output_matches_its_schema() {
    let t = tiger();
    for (cmd, schema) in [
        ("validate", "validate"),
        ("ground", "ground"),
        ("compile", "program"),
        ("normalize", "program"),
        ("solve", "solve"),
        ("oracle", "oracle"),
    ] {
        let (code, _) = run_json(&[cmd, &t], schema);
        assert_eq!(code, 0, "{cmd}");
    }
    run_json(&["policy", &t, "--class", "stationary"], "policy");
    run_json(&["oracle", &t, "--class", "stationary", "-n", "2"], "oracle");
    let (code, v) = run_json(&["fuzz", "--seed", "5", "--count", "4"], "fuzz");
    assert_eq!((code, &v["passed"]), (0, &Value::Bool(true)));
}

#[test]
fn discount_override_is_applied_and_echoed() {
    let (_, v) = run_json(&["oracle", &tiger(), "-n", "2", "--discount", "0.5"], "oracle");
    assert_eq!(v["discount_exact"], "0.5");
    assert_eq!(v["policy"]["steps"], serde_json::json!(["listen", "listen"]));
    assert_eq!(v["value_exact"], "-2.5");
    assert_eq!(v["recursive_value_exact"], "-1.5");
    let (code, _, err) = run(&["oracle", &tiger(), "--discount", "1"]);
    assert_eq!(code, 1, "{err}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad_syntax = write(&dir, "bad.apo", "fluent f\n");
    let invalid = write(&dir, "invalid.apo", "fluent f.\ninitially {f} : 0.5.\naction a causes {f} : 1 : 0 if {}.\ndiscount 0.9.\n");
    assert_eq!(run(&["compile", "/nonexistent.apo"]).0, 1);
    assert_eq!(run(&["compile", &bad_syntax]).0, 1);
    assert_eq!(run(&["compile", &tiger(), "--horizon", "0"]).0, 1);
    assert_eq!(run(&["compile", &tiger(), "--strategy", "min"]).0, 1);
    assert_eq!(run(&["compile", &invalid]).0, 2);

    let (code, v) = run_json(&["validate", &invalid], "validate");
    assert_eq!(code, 2);
    assert_eq!(v["valid"], false);
    let (code, v) = run_json(&["validate", &bad_syntax], "validate");
    assert_eq!(code, 1);
    assert_eq!(v["violations"][0]["rule"], "syntax");
}

#[test]
fn outputs_are_deterministic() {
    let t = tiger();
    for cmd in ["compile", "sat", "solve", "check"] {
        assert_eq!(run(&[cmd, &t, "-n", "2"]), run(&[cmd, &t, "-n", "2"]), "{cmd}");
    }
}

#[test]
fn format_defaults_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_apo")).args(["validate", &tiger()]).env("APO_FORMAT", "json").output().unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["valid"], true);
}

#[test]
fn solve_accepts_program_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "even.np", "a <- not b.\nb <- not a.\n");
    let (code, v) = run_json(&["solve", &p], "solve");
    assert_eq!(code, 0);
    assert_eq!(v["answer_sets"], serde_json::json!([{"a": 1.0}, {"b": 1.0}]));
    let (_, text, _) = run(&["solve", &p]);
    assert_eq!(text, "{a}\n{b}\n% 2 answer sets\n");
}

#[test]
fn compiled_text_parses_back() {
    let (_, text, _) = run(&["compile", &tiger()]);
    let p = apo_core::nhplp::parse_program(&text).unwrap();
    assert!(p.rules.len() > 100);
}

#[test]
fn schemas_reject_malformed_output() {
    let (_, mut v) = run_json(&["policy", &tiger()], "policy");
    v["best"]["policy"]["class"] = Value::from("tree");
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(root().join("schemas/policy.schema.json")).unwrap()).unwrap();
    assert!(!jsonschema::JSONSchema::compile(&schema).unwrap().is_valid(&v));
}
