//! End-to-end tests for the `resw` binary: exit codes, file formats, and
//! report determinism.

use std::path::Path;
use std::process::{Command, Output};

fn resw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resw")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

const MODEL: &str = r#"{
    "frame": "dual-godel-3",
    "domain": ["g", "h"],
    "atomic": {
        "a": [1, 2],
        "g in g": [2], "g in h": [1, 2], "h in g": [2], "h in h": [0, 1, 2]
    }
}"#;

#[test]
fn check_algebra_passes_on_chain_shorthand() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "g3.json", r#"{"chain": {"kind": "godel", "size": 3}}"#);
    let out = resw(&["check-algebra", &path]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("check-algebra: pass"));
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "bad.json", r#"{"chain": {"kind": "sugar", "size": 3}}"#);
    let out = resw(&["check-algebra", &path]);
    assert_eq!(out.status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    let out = resw(&["check-algebra", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn enumerate_nuclei_counts_boolean_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "b2.json", r#"{"chain": {"kind": "godel", "size": 2}}"#);
    let out = resw(&["--format", "json", "enumerate-nuclei", &path]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["output"]["count"], 2);
}

#[test]
fn quotient_by_double_negation_collapses_godel_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "g3.json", r#"{"chain": {"kind": "godel", "size": 3}}"#);
    let out = resw(&["--format", "json", "quotient", &path, "--nucleus", "double-negation"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["output"]["quotient"]["names"].as_array().unwrap().len(), 2);
    assert_eq!(report["status"], "pass");
}

#[test]
fn force_prints_sets_and_booleans() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "model.json", MODEL);
    let out = resw(&["--format", "json", "force", &model, "bot"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["output"][0]["forcing_set"], serde_json::json!(["oo"]));

    let out = resw(&["--format", "json", "force", &model, "a -> bot", "--at", "1"]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["output"][0]["forced_at"]["forces"], false);

    // The possibility of an atom is the induced nucleus of its set; with
    // the identity conucleus the set is unchanged.
    let plain = resw(&["--format", "json", "force", &model, "a"]);
    let diamond = resw(&["--format", "json", "force", &model, "<> a"]);
    let a: serde_json::Value = serde_json::from_str(&stdout(&plain)).unwrap();
    let d: serde_json::Value = serde_json::from_str(&stdout(&diamond)).unwrap();
    assert_eq!(a["output"][0]["forcing_set"], d["output"][0]["forcing_set"]);
}

#[test]
fn formulas_from_files_one_per_line() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "model.json", MODEL);
    let formulas = write(dir.path(), "formulas.txt", "# comment\nbot\n\n<> a & ~a\ng = h\n");
    let out = resw(&["--format", "json", "force", &model, &format!("@{formulas}")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["output"].as_array().unwrap().len(), 3);
}

#[test]
fn crosscheck_passes_at_depth_two() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "model.json", MODEL);
    let out = resw(&["crosscheck", &model, "--depth", "2"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("crosscheck: pass"));
}

#[test]
fn oversized_crosscheck_refused_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(
        dir.path(),
        "model.json",
        r#"{"frame": "2-chain", "domain": ["d"],
            "atomic": {"a": [1], "b": [0, 1], "d in d": [1]}}"#,
    );
    let out = resw(&["crosscheck", &model, "--depth", "3"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn hierarchy_reports_level_sizes() {
    let out = resw(&["--format", "json", "hierarchy", "dual-godel-3", "--levels", "2"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["output"]["level_sizes"], serde_json::json!([0, 1, 3]));
    assert_eq!(report["output"]["heyting_level_sizes"], serde_json::json!([0, 1, 3]));
}

#[test]
fn hierarchy_budget_refusal_exits_3() {
    let out = resw(&["hierarchy", "dual-godel-3", "--levels", "2", "--budget", "1"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--budget 2"), "{err}");
}

#[test]
fn non_standard_conucleus_reports_hypothesis_unmet() {
    let out = resw(&["hierarchy", "dual-lukasiewicz-3", "--levels", "2"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("hypothesis-unmet"));
}

#[test]
fn verify_translation_and_corollary_pass_on_baselines() {
    for cmd in ["verify-translation", "verify-corollary"] {
        for frame in ["2-chain", "dual-godel-3"] {
            let out = resw(&[cmd, frame, "--levels", "2", "--depth", "1"]);
            assert!(out.status.success(), "{cmd} {frame}: {}", stdout(&out));
        }
    }
}

#[test]
fn structured_reports_are_byte_identical() {
    let run = || {
        let out = resw(&[
            "--format",
            "json",
            "--seed",
            "42",
            "verify-corollary",
            "dual-godel-3",
            "--levels",
            "2",
            "--depth",
            "1",
        ]);
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn pstar_output_is_a_loadable_algebra() {
    let out = resw(&["pstar", "dual-godel-3"]);
    assert!(out.status.success());
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "pstar.json", &stdout(&out));
    let check = resw(&["check-algebra", &path]);
    assert!(check.status.success(), "{}", stdout(&check));
}

#[test]
fn hierarchy_cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let args = [
        "--format",
        "json",
        "hierarchy",
        "dual-godel-3",
        "--levels",
        "2",
        "--cache-dir",
        cache.to_str().unwrap(),
    ];
    let first = resw(&args);
    assert!(first.status.success());
    assert!(cache.read_dir().unwrap().next().is_some(), "cache file written");
    let second = resw(&args);
    assert!(second.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn replay_reruns_embedded_commands() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "model.json", MODEL);
    let report = serde_json::json!({
        "command": "crosscheck",
        "checks": [
            {"name": "x", "status": "fail", "replay": ["force", model, "<> a", "--oracle"]}
        ]
    });
    let path = write(dir.path(), "report.json", &report.to_string());
    for invocation in [vec!["replay", &path], vec!["--replay", &path]] {
        let out = resw(&invocation);
        assert!(out.status.success(), "{}", stdout(&out));
        assert!(stdout(&out).contains("replay `force"), "{}", stdout(&out));
    }
}
