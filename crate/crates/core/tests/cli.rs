mod common;

use common::{repo_path as path, run_cli as run, schema_errors};
use serde_json::Value;

fn run_json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let (code, out, err) = run(&full);
    let v: Value = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out}\n{err}"));
    let errors = schema_errors(&v);
    assert!(errors.is_empty(), "schema violations for {args:?}: {errors:?}\n{out}");
    (code, v)
}

fn tmp_file(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("aol-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn flu_check_is_true() {
    let flu = path("models/flu.model");
    let (code, out, _) = run(&["check", "-m", &flu, "-w", "w1", "A flu"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("true"));
}

#[test]
fn false_check_exits_one() {
    let flu = path("models/flu.model");
    let (code, out, _) = run(&["check", "-m", &flu, "-w", "w1", "K flu"]);
    assert_eq!((code, out.lines().next()), (1, Some("false")));
}

#[test]
fn clinic_priorization_lists_delta_one() {
    let (code, v) = run_json(&[
        "explain",
        "-m",
        &path("models/clinic.model"),
        "-p",
        &path("models/clinic.problem"),
        "--strategy",
        "priorization",
    ]);
    assert_eq!(code, 0);
    let selected = v["selected"].as_array().unwrap();
    assert_eq!(selected.len(), 1);
    assert_eq!(selected[0]["explanation"], serde_json::json!(["strep_throat", "allergies"]));
    assert_eq!(v["family"].as_array().unwrap().len(), 2);
}

#[test]
fn dangling_edge_exits_three_naming_the_edge() {
    let bad = tmp_file("bad.model", "worlds: w1 w2\nrel: w1 -> w2, w2 -> w9\nval w1: p\n");
    let (code, _, err) = run(&["check", "-m", &bad, "-w", "w1", "p"]);
    assert_eq!(code, 3);
    assert!(err.contains("w2 -> w9"), "{err}");
    assert!(err.contains(":2:"), "{err}");
}

#[test]
fn broken_order_exits_three() {
    let bad = tmp_file("cyclic.model", "worlds: w1 w2\nrel: * -> w1\norder: w1 < w2, w2 < w1\nactual: w1\n");
    let (code, _, err) = run(&["check", "-m", &bad, "p > p"]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let flu = path("models/flu.model");
    assert_eq!(run(&["check", "-m", &flu, "A (flu"]).0, 2);
    assert_eq!(run(&["check", "-m", &flu, "unknown_atom"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["audit", "no_such_property"]).0, 2);
    let syntax = tmp_file("syntax.model", "worlds: w1\nbogus line\n");
    let (code, _, err) = run(&["check", "-m", &syntax, "true"]);
    assert_eq!(code, 2);
    assert!(err.contains(":2:"), "{err}");
}

#[test]
fn already_explained_exits_three() {
    let m = tmp_file(
        "explained.model",
        "worlds: w1\nrel: w1 -> w1\norder:\nval w1: fever flu\ntheory: fever\nhypotheses: flu\n",
    );
    let p = tmp_file("explained.problem", "observe: fever\n");
    assert_eq!(run(&["explain", "-m", &m, "-p", &p]).0, 3);
}

#[test]
fn unrestricted_collapse_is_flagged() {
    let (code, v) = run_json(&[
        "check",
        "-m",
        &path("models/fever2.model"),
        "-w",
        "w1",
        "--witness-mode",
        "unrestricted",
        "A fever",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["flags"], serde_json::json!(["unrestricted-collapse"]));
}

#[test]
fn entail_reports_countermodel() {
    let (code, v) = run_json(&["entail", "-m", &path("models/flu.model"), "--kind", "local", "cold"]);
    assert_eq!(code, 1);
    assert!(v["countermodel"].is_string());
    let (code, _) =
        run_json(&["entail", "-m", &path("models/flu.model"), "--kind", "preferential", "--theory", "fever"]);
    assert_eq!(code, 0);
}

#[test]
fn every_command_matches_the_schema() {
    let clinic = path("models/clinic.model");
    let problem = path("models/clinic.problem");
    let flu = path("models/flu.model");
    run_json(&["check", "-m", &flu, "A flu"]);
    run_json(&["entail", "-m", &clinic, "-p", &problem, "--kind", "p", "-g", "strep_throat", "fever"]);
    run_json(&["entail", "-m", &clinic, "-p", &problem, "--kind", "s", "-g", "strep_throat", "fever"]);
    for s in ["subset", "cardinality", "priorization"] {
        run_json(&["explain", "-m", &clinic, "-p", &problem, "--strategy", s]);
    }
    run_json(&["minimize", "-m", &clinic]);
    run_json(&["restrict", "-m", &flu, "flu"]);
    run_json(&["restrict", "-m", &flu, "cold & ~cough"]);
    run_json(&["audit", "--list"]);
    run_json(&["audit", "prop3_nonvacuity", "--trials", "20"]);
    run_json(&["audit", "theorem3_nonvacuity_after_restriction", "--trials", "20"]);
    run_json(&["audit", "cautious_monotony", "--trials", "10"]);
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    let args = ["--json", "audit", "lemma2_submodel_modal", "--seed", "7", "--trials", "60"];
    let (_, a, _) = run(&args);
    let (_, b, _) = run(&args);
    assert_eq!(a, b);
    let clinic = path("models/clinic.model");
    let problem = path("models/clinic.problem");
    let args = ["--json", "explain", "-m", &clinic, "-p", &problem];
    assert_eq!(run(&args).1, run(&args).1);
}
