use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn data(name: &str) -> String {
    root().join("data").join(name).display().to_string()
}

/// Runs in-process and returns the exit code and parsed report.
fn run(args: &[&str]) -> (i32, Value) {
    let argv = std::iter::once("nagata").chain(args.iter().copied());
    let outcome = nagata_cli::run(argv);
    let report = outcome.report.expect("arguments parse");
    (outcome.code, serde_json::from_str(&report.to_json()).unwrap())
}

fn validate_schema(report: &Value) {
    let command = report["command"].as_str().unwrap();
    let path = root().join("schemas").join(format!("{command}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(report).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{command} report does not match its schema: {errors:#?}");
}

#[test]
fn validate_reports_the_triangle_witness() {
    let (code, report) = run(&["validate", "--space", &data("triangle_violation.json")]);
    assert_eq!(code, 1);
    assert_eq!(report["passed"], false);
    let witness = report["checks"][0]["witness"].as_str().unwrap();
    assert!(witness.contains("(a, b, c)"), "{witness}");
    assert_eq!(report["result"]["violations"][0]["axiom"], "triangle");
}

#[test]
fn dim0_certifies_two_far_clusters() {
    let (code, report) = run(&["dim0", "--space", &data("two_clusters.json"), "--C", "2"]);
    assert_eq!(code, 0, "{report:#}");
    assert_eq!(report["result"]["dimension_zero"], true);
}

#[test]
fn dim0_rejects_a_long_path_at_its_step() {
    let (code, report) = run(&["dim0", "--space", &data("path20.json"), "--C", "2", "--scales", "1.5"]);
    assert_eq!(code, 1);
    assert!(report["checks"][0]["witness"].as_str().unwrap().contains("20 points"));
}

#[test]
fn hyperbolize_path_reports_delta() {
    let (code, report) = run(&["hyperbolize", "--space", &data("path5.json")]);
    assert_eq!(code, 0, "{report:#}");
    let delta = report["result"]["delta_measured"].as_f64().unwrap();
    assert!(delta <= 4.0);
}

#[test]
fn every_subcommand_matches_its_schema() {
    let space = data("path5.json");
    let cover = data("path5_cover.json");
    let invocations: Vec<Vec<String>> = vec![
        vec!["validate", "--space", &space],
        vec!["validate", "--space", &data("triangle_violation.json")],
        vec!["--exact", "transform", "--space", &space, "--kind", "min", "--epsilon", "5/2"],
        vec!["lebesgue", "--space", &space, "--cover", &cover],
        vec!["lebesgue", "--space", &data("path20.json"), "--cover", &data("path20_decomposition.json")],
        vec!["nerve", "--space", &space, "--cover", &cover],
        vec!["--exact", "extend-mcshane", "--space", &space, "--map", &data("path5_map.json")],
        vec!["extend-mcshane", "--whitney", "--space", &space, "--map", &data("path5_map.json")],
        vec!["extend-simplex", "--space", &space, "--map", &data("path5_simplex_map.json")],
        vec!["extend-sphere", "--space", &space, "--map", &data("path5_sphere_map.json")],
        vec!["refine", "--space", &space, "--cover", &cover],
        vec!["lift", "--space", &space, "--cover", &data("path5_cover3.json")],
        vec!["surgery", "--space", &data("path20.json"), "--cover", &data("path20_decomposition.json"), "--shrink", "1/4"],
        vec!["dim", "--space", &data("grid.csv"), "--C", "2", "--micro", "3"],
        vec!["--exact", "dim", "--space", &space, "--C", "2", "--macro", "2", "--search", "exact"],
        vec!["dim0", "--space", &space, "--C", "3/2", "--rule", "at-most"],
        vec!["hyperbolize", "--space", &space, "--all-basepoints"],
        vec!["corpus", "--criterion", "3"],
        vec!["--exact", "nerve", "--space", &space, "--cover", &cover],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect();
    for args in invocations {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let (code, report) = run(&refs);
        assert!(code <= 2, "{args:?}");
        validate_schema(&report);
    }
}

#[test]
fn exact_mode_emits_rational_strings() {
    let (code, report) = run(&["--exact", "extend-mcshane", "--space", &data("path5.json"), "--map", &data("path5_map.json")]);
    assert_eq!(code, 0, "{report:#}");
    assert_eq!(report["result"]["lambda_effective"], "1/2");
    assert_eq!(report["result"]["values"]["1"], "1/2");
    assert_eq!(report["result"]["values"]["2"], "1");
}

#[test]
fn input_and_usage_errors_exit_two() {
    let (code, report) = run(&["validate", "--space", &data("missing.json")]);
    assert_eq!(code, 2);
    assert_eq!(report["error"]["kind"], "input");
    let (code, report) = run(&["--exact", "hyperbolize", "--space", &data("path5.json")]);
    assert_eq!(code, 2);
    assert_eq!(report["error"]["kind"], "usage");
    let (code, _) = run(&["dim", "--space", &data("triangle_violation.json"), "--C", "2"]);
    assert_eq!(code, 2);
    let (code, _) = run(&["--exact", "dim", "--space", &data("grid.csv"), "--C", "2"]);
    assert_eq!(code, 2);
    let (code, _) = run(&["dim0", "--space", &data("path5.json"), "--C", "1"]);
    assert_eq!(code, 2);
    let parse = nagata_cli::run(["nagata", "dim", "--space", "x.json"]);
    assert_eq!(parse.code, 2);
    assert!(parse.report.is_none());
    let parse = nagata_cli::run(["nagata", "frobnicate"]);
    assert_eq!(parse.code, 2);
}

#[test]
fn reports_are_deterministic() {
    for args in [
        vec!["hyperbolize", "--space", &data("path20.json")],
        vec!["surgery", "--space", &data("path20.json"), "--cover", &data("path20_decomposition.json"), "--shrink", "1/4"],
        vec!["corpus", "--criterion", "1,3,6", "--seed", "11"],
    ] {
        let a = nagata_cli::run(std::iter::once("nagata").chain(args.iter().copied()));
        let b = nagata_cli::run(std::iter::once("nagata").chain(args.iter().copied()));
        assert_eq!(a.report.unwrap().to_json(), b.report.unwrap().to_json(), "{args:?}");
    }
}

#[test]
fn binary_prints_json_and_writes_json_out() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let run = Command::new(env!("CARGO_BIN_EXE_nagata"))
        .args(["dim0", "--space", &data("two_clusters.json"), "--C", "2", "--json-out"])
        .arg(&out)
        .env("NAGATA_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(0));
    let stdout = String::from_utf8(run.stdout).unwrap();
    let written = std::fs::read_to_string(&out).unwrap();
    assert_eq!(stdout, written);
    let stderr = String::from_utf8(run.stderr).unwrap();
    assert!(stderr.contains("dim0: PASS"), "{stderr}");
    assert!(stderr.contains("wall time"));
    assert!(!stdout.contains("wall"));
}

#[test]
fn seed_comes_from_the_environment() {
    let run = Command::new(env!("CARGO_BIN_EXE_nagata"))
        .args(["validate", "--space", &data("path5.json")])
        .env("NAGATA_SEED", "42")
        .output()
        .unwrap();
    let report: Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(report["seed"], 42);
}
