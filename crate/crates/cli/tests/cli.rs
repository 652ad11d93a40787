use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn wignerkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wignerkit"))
        .args(args)
        .env_remove("WIGNERKIT_SEED")
        .output()
        .expect("binary runs")
}

fn generate(dir: &Path, name: &str, spec: &str) -> String {
    let path = dir.join(name);
    let path = path.to_str().unwrap().to_string();
    let out = wignerkit(&["generate", "--spec", spec, "--out", &path]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    path
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn analyze_wigner_map() {
    let dir = tempfile::tempdir().unwrap();
    let file = generate(
        dir.path(),
        "w.json",
        r#"{"family":"wigner","n":4,"params":{"variant":"direct"},"seed":3}"#,
    );
    let out = wignerkit(&["analyze", &file, "--k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["verdict"], "wigner");
    assert_eq!(report["variant"], "direct");
    assert_eq!(report["unitary"]["n"], 4);
}

#[test]
fn analyze_transpose_map() {
    let dir = tempfile::tempdir().unwrap();
    let file = generate(
        dir.path(),
        "t.json",
        r#"{"family":"wigner","n":3,"params":{"variant":"transpose"},"seed":7}"#,
    );
    let out = wignerkit(&["analyze", &file, "--k", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["variant"], "transpose");
}

#[test]
fn analyze_depolarizing_map() {
    let dir = tempfile::tempdir().unwrap();
    let file = generate(
        dir.path(),
        "d.json",
        r#"{"family":"depolarizing","n":4,"params":{"lambda":0.5}}"#,
    );
    let report_path = dir.path().join("report.json");
    let out = wignerkit(&[
        "analyze",
        &file,
        "--k",
        "2",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(report_path).unwrap()).unwrap();
    assert_eq!(report["verdict"], "not_wigner");
    assert_eq!(report["reasons"], serde_json::json!(["rank_k_violation"]));
}

#[test]
fn pseudo_depolarizing_is_flagged_non_positive() {
    let dir = tempfile::tempdir().unwrap();
    let file = generate(
        dir.path(),
        "p.json",
        r#"{"family":"pseudo_depolarizing","n":3,"params":{"mu":1.0}}"#,
    );
    let out = wignerkit(&["analyze", &file, "--k", "1", "--samples", "10"]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    let min = report["hypotheses"]["positivity"]["min_value"]
        .as_f64()
        .unwrap();
    assert!((min + 1.0 / 3.0).abs() < 1e-6);
    assert!(report["reasons"]
        .as_array()
        .unwrap()
        .contains(&Value::from("positivity_violation")));
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let file = generate(
        dir.path(),
        "w.json",
        r#"{"family":"wigner","n":3,"seed":1}"#,
    );
    let text = std::fs::read_to_string(&file).unwrap();

    let truncated = dir.path().join("truncated.json");
    std::fs::write(&truncated, &text[..text.len() / 2]).unwrap();
    let out = wignerkit(&["analyze", truncated.to_str().unwrap(), "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    let wrong = dir.path().join("row.json");
    std::fs::write(&wrong, text.replace("column-stacking", "row-stacking")).unwrap();
    assert_eq!(
        wignerkit(&["analyze", wrong.to_str().unwrap(), "--k", "1"])
            .status
            .code(),
        Some(2)
    );

    assert_eq!(
        wignerkit(&["analyze", &file, "--k", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        wignerkit(&["analyze", "/nonexistent/map.json", "--k", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(wignerkit(&["analyze", &file]).status.code(), Some(2));

    let out = dir.path().join("x.json");
    let bad = wignerkit(&[
        "generate",
        "--spec",
        r#"{"family":"kraus","n":2}"#,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(bad.status.code(), Some(2));
    let bad = wignerkit(&[
        "generate",
        "--spec",
        r#"{"family":"depolarizing","n":2,"params":{"lambda":2}}"#,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn generate_is_deterministic_and_accepts_spec_files() {
    let dir = tempfile::tempdir().unwrap();
    let spec = r#"{"family":"perturbed_wigner","n":3,"params":{"variant":"transpose","epsilon":0.01},"seed":5}"#;
    let a = generate(dir.path(), "a.json", spec);
    let spec_file = dir.path().join("spec.json");
    std::fs::write(&spec_file, spec).unwrap();
    let b = generate(dir.path(), "b.json", spec_file.to_str().unwrap());
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn seed_env_changes_default_seed() {
    let dir = tempfile::tempdir().unwrap();
    let spec = r#"{"family":"wigner","n":3}"#;
    let a = generate(dir.path(), "a.json", spec);
    let b_path = dir.path().join("b.json");
    let out = Command::new(env!("CARGO_BIN_EXE_wignerkit"))
        .args([
            "generate",
            "--spec",
            spec,
            "--out",
            b_path.to_str().unwrap(),
        ])
        .env("WIGNERKIT_SEED", "9")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_ne!(std::fs::read(a).unwrap(), std::fs::read(b_path).unwrap());
}

#[test]
fn decompose_outputs_form() {
    let dir = tempfile::tempdir().unwrap();
    let file = generate(
        dir.path(),
        "w.json",
        r#"{"family":"wigner","n":4,"params":{"variant":"transpose"},"seed":2}"#,
    );
    let out = wignerkit(&["decompose", &file]);
    assert_eq!(out.status.code(), Some(0));
    let form = stdout_json(&out);
    assert_eq!(form["variant"], "transpose");
    assert!(form["residual"].as_f64().unwrap() < 1e-12);

    let depol = generate(
        dir.path(),
        "d.json",
        r#"{"family":"depolarizing","n":3,"params":{"lambda":0.5}}"#,
    );
    assert_eq!(wignerkit(&["decompose", &depol]).status.code(), Some(1));
}

#[test]
fn lemma_standard_basis() {
    let out = wignerkit(&["lemma", "--n", "3", "--k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let d = stdout_json(&out);
    assert_eq!(d["residual"].as_f64().unwrap(), 0.0);
    let ps = d["projections"].as_array().unwrap();
    assert_eq!(ps.len(), 3);
    // P_1 = diag(0, 1, 1)
    assert_eq!(ps[0]["data"][0][0], serde_json::json!([0.0, 0.0]));
    assert_eq!(ps[0]["data"][1][1], serde_json::json!([1.0, 0.0]));

    let d = stdout_json(&wignerkit(&["lemma", "--n", "2", "--k", "1"]));
    assert_eq!(d["projections"].as_array().unwrap().len(), 2);

    let d = stdout_json(&wignerkit(&[
        "lemma", "--n", "8", "--k", "4", "--seed", "11",
    ]));
    assert!(d["residual"].as_f64().unwrap() <= 1e-12);

    assert_eq!(
        wignerkit(&["lemma", "--n", "3", "--k", "3"]).status.code(),
        Some(2)
    );
}

#[test]
fn selftest_quick() {
    let out = wignerkit(&["selftest", "--quick"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.contains("PASS")).count(), 3);
}
