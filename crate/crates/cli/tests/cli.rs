use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_supergrade"));
    c.env("SUPERGRADE_COLOR", "never");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn tmp(name: &str, content: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, content).unwrap();
    p
}

/// Writes `catalog show` output for an entry to a file.
fn shown(name: &str, args: &[&str]) -> PathBuf {
    let mut full = vec!["catalog", "show"];
    full.extend_from_slice(args);
    let o = run(&full);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    tmp(name, &stdout(&o))
}

fn json_report(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let o = run(&full);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap_or_else(|e| panic!("{e}: {}", stdout(&o)));
    (code(&o), v)
}

fn schema() -> jsonschema::Validator {
    let text = include_str!("../schema/report.schema.json");
    jsonschema::validator_for(&serde_json::from_str(text).unwrap()).unwrap()
}

fn assert_valid(v: &Value) {
    let s = schema();
    let errors: Vec<String> = s.iter_errors(v).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "{errors:?}\n{v:#}");
}

#[test]
fn ng33_checks_clean() {
    let p = shown("ng33.json", &["NG", "--n", "3", "--m", "3"]);
    let o = run(&["check", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("super Leibniz violations: none"));
    assert!(stdout(&o).ends_with("verdict: PASS\n"));
}

#[test]
fn parity_mismatch_is_rejected_at_parse() {
    let text = r#"{"name": "bad", "kind": "lie", "even_basis": ["X0", "X1", "X2", "X3"],
        "odd_basis": ["Y1", "Y2"], "products": [
        {"left": "X1", "right": "Y2", "result": [{"basis": "X3", "coeff": "1"}]}]}"#;
    let o = run(&["check", tmp("parity.json", text).to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("parity"), "{}", stderr(&o));
}

#[test]
fn unknown_basis_name_is_an_input_error() {
    let text = r#"{"name": "bad", "kind": "leibniz", "even_basis": ["X1"], "odd_basis": ["Y1"],
        "products": [{"left": "Y1", "right": "Y1", "result": [{"basis": "X9", "coeff": "1"}]}]}"#;
    let o = run(&["check", tmp("unknown.json", text).to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("X9"));
}

#[test]
fn malformed_json_reports_position() {
    let o = run(&["check", tmp("broken.json", "{\n  \"name\": \"x\",\n  oops\n}").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("line 3") && err.contains("column"), "{err}");
}

#[test]
fn missing_file_is_an_input_error() {
    let o = run(&["check", "/nonexistent/algebra.json"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn nongraded_algebra_is_lie() {
    let p = shown("nongraded.json", &["nongraded", "--n", "4"]);
    let o = run(&["check", "--require-lie", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("required lie superalgebra: yes"));
}

#[test]
fn nongraded_algebra_fails_natgrade() {
    let p = shown("nongraded2.json", &["nongraded", "--n", "4"]);
    let o = run(&["natgrade", p.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("gr not graded: (Y1,Y1) lands in layer 3"), "{}", stdout(&o));
    let (c, v) = json_report(&["natgrade", p.to_str().unwrap()]);
    assert_eq!(c, 1);
    assert_eq!(v["verdict"], "fail");
    assert_eq!(v["details"]["stage"], "gradedness");
    assert_valid(&v);
}

#[test]
fn require_lie_fails_on_a_non_skew_law() {
    let p = shown("ng44.json", &["NG", "--n", "4", "--m", "4"]);
    let o = run(&["check", "--require-lie", p.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("required lie superalgebra: no"));
}

#[test]
fn classify_phibar36_yields_one_law() {
    let (c, v) = json_report(&["classify", "run", "4.8"]);
    assert_eq!(c, 0);
    assert_valid(&v);
    let runs = v["details"]["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 1);
    assert_eq!(runs[0]["laws"], serde_json::json!(["L+phibar36"]));
    let o = run(&["classify", "run", "4.8"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("L+phibar36"));
}

#[test]
fn classify_unknown_scenario() {
    let o = run(&["classify", "run", "9.9"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("unknown scenario"));
}

#[test]
fn classify_is_seed_deterministic() {
    let strip = |mut v: Value| {
        v["timing"] = Value::Null;
        v
    };
    let (_, a) = json_report(&["--seed", "7", "classify", "run", "4.6"]);
    let (_, b) = json_report(&["--seed", "7", "classify", "run", "4.6"]);
    assert_eq!(strip(a.clone()), strip(b));
    assert_eq!(a["details"]["seed"], 7);
}

#[test]
fn catalog_show_ng43_contains_odd_square() {
    let o = run(&["catalog", "show", "NG", "--n", "4", "--m", "3"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let products = v["products"].as_array().unwrap();
    let hit = products.iter().find(|p| p["left"] == "Y3" && p["right"] == "Y1").expect("[Y3,Y1] stored");
    assert_eq!(hit["result"], serde_json::json!([{"basis": "X4", "coeff": "1"}]));
}

#[test]
fn catalog_show_with_values() {
    let o = run(&["catalog", "show", "L+phi12+tphi24", "--n", "4", "--m", "3", "--set", "t=2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["parameters"].as_array().unwrap().is_empty());
    let bad = run(&["catalog", "show", "L", "--n", "3", "--set", "t"]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn catalog_list_filters() {
    let (c, v) = json_report(&["catalog", "list", "--kind", "leibniz", "--role", "law"]);
    assert_eq!(c, 0);
    assert_valid(&v);
    let entries = v["details"]["entries"].as_array().unwrap();
    assert!(!entries.is_empty());
    assert!(entries.iter().all(|e| e["kind"] == "leibniz" && e["role"] == "law"));
}

#[test]
fn cochain_file_check() {
    let p = shown("phi12.json", &["phi", "--n", "4", "--m", "3", "--k", "1"]);
    let (c, v) = json_report(&["check", p.to_str().unwrap()]);
    assert_eq!(c, 0);
    assert_eq!(v["details"]["input"], "cochain");
    assert_eq!(v["details"]["weight"], 0);
    assert_valid(&v);
    // the Psi^2_{1,1} square is nonzero once m >= 2
    let p = shown("psi211.json", &["psi", "--n", "3", "--m", "4", "--s", "2", "--k", "1"]);
    let (_, v) = json_report(&["check", p.to_str().unwrap()]);
    assert_eq!(v["details"]["cocycle"]["holds"], true);
}

#[test]
fn gr_report_shape() {
    let p = shown("l43.json", &["L", "--n", "4", "--m", "3"]);
    let (c, v) = json_report(&["gr", p.to_str().unwrap()]);
    assert_eq!(c, 0);
    assert_valid(&v);
    assert_eq!(v["details"]["graded"], true);
    assert_eq!(v["details"]["naturally_graded"], true);
    assert!(v["details"]["witness"].is_object());
}

#[test]
fn max_dim_caps_inputs() {
    let p = shown("ng77.json", &["NG", "--n", "7", "--m", "7"]);
    let o = run(&["--max-dim", "10", "check", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("--max-dim"));
    let o = run(&["catalog", "show", "NG", "--n", "20", "--m", "20"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn error_reports_validate() {
    let (c, v) = json_report(&["check", "/nonexistent.json"]);
    assert_eq!(c, 2);
    assert_eq!(v["verdict"], "error");
    assert_valid(&v);
}

#[test]
fn human_output_carries_every_json_verdict() {
    let p = shown("ng34.json", &["NG", "--n", "3", "--m", "4"]);
    let path = p.to_str().unwrap();
    for cmd in ["check", "gr", "natgrade"] {
        let (c, v) = json_report(&[cmd, path]);
        assert_valid(&v);
        let o = run(&[cmd, path]);
        assert_eq!(code(&o), c);
        let word = v["verdict"].as_str().unwrap().to_uppercase();
        assert!(stdout(&o).contains(&format!("verdict: {word}")), "{cmd}");
    }
}

#[test]
fn color_env_is_validated() {
    let o = bin().env("SUPERGRADE_COLOR", "sometimes").args(["classify", "list"]).output().unwrap();
    assert_eq!(code(&o), 2);
    let o = run(&["classify", "list"]);
    assert!(!stdout(&o).contains('\x1b'));
    assert!(stdout(&o).contains("4.3"));
}

#[test]
fn catalog_round_trips_through_files() {
    let (_, v) = json_report(&["catalog", "list", "--role", "law"]);
    for e in v["details"]["entries"].as_array().unwrap() {
        let id = e["id"].as_str().unwrap();
        let n = e["n"]["min"].as_u64().unwrap().to_string();
        let m = e["m"]["min"].as_u64().unwrap().to_string();
        let p = shown(&format!("rt-{id}-{n}-{m}.json"), &[id, "--n", &n, "--m", &m]);
        let o = run(&["--json", "check", p.to_str().unwrap()]);
        assert_ne!(code(&o), 2, "{id} ({n},{m}) did not parse back: {}", stdout(&o));
    }
}
