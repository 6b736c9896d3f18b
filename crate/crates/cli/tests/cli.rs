use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lambda_sync::builtins::{builtin_document, CORPUS};

fn lsync(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lsync")).args(args).output().expect("run lsync")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn updating() -> bool {
    std::env::var_os("UPDATE_GOLDEN").is_some()
}

fn check_golden(path: &Path, actual: &str) {
    if updating() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(path, actual).unwrap();
        return;
    }
    let expected = fs::read_to_string(path).unwrap_or_else(|_| panic!("missing golden {}", path.display()));
    assert!(expected == actual, "{} drifted; rerun with UPDATE_GOLDEN=1 if intended", path.display());
}

#[test]
fn golden_reports_for_the_corpus() {
    for name in CORPUS {
        let (args, expected_code) = match name {
            // No synchronizing words at level 4, so only the check report exists.
            "coded-example" => (["check", "--builtin", name, "--format", "json"], 3),
            "markov-dyck" | "fibonacci" | "thue-morse" => (["invariants", "--builtin", name, "--format", "json"], 3),
            _ => (["invariants", "--builtin", name, "--format", "json"], 0),
        };
        let out = lsync(&args);
        assert_eq!(code(&out), expected_code, "{name}: {}", String::from_utf8_lossy(&out.stderr));
        check_golden(&manifest_dir().join(format!("tests/golden/{name}.json")), &stdout(&out));
    }
}

#[test]
fn shipped_presentations_match_builtins() {
    for name in CORPUS {
        let Some(doc) = builtin_document(name) else { continue };
        let path = manifest_dir().join(format!("presentations/{name}.json"));
        check_golden(&path, &(serde_json::to_string_pretty(&doc).unwrap() + "\n"));
        if name.starts_with("dyck") || name.starts_with("motzkin") || name == "coded-example" {
            continue;
        }
        let from_file = lsync(&["check", "--file", path.to_str().unwrap(), "--format", "json"]);
        let from_builtin = lsync(&["check", "--builtin", name, "--format", "json"]);
        assert_eq!(code(&from_file), code(&from_builtin), "{name}");
        assert_eq!(json(&from_file)["certificates"], json(&from_builtin)["certificates"], "{name}");
    }
}

#[test]
fn check_examples() {
    let out = lsync(&["check", "--builtin", "full-2"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).lines().skip(1).all(|l| !l.contains(": ") || l.contains("VERIFIED") || l.starts_with("  ")));

    let out = lsync(&["check", "--builtin", "fibonacci", "--format", "json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["certificates"][1]["status"], "VERIFIED");

    let out = lsync(&["check", "--builtin", "coded-example", "--format", "json"]);
    assert_eq!(code(&out), 3);
    let v = json(&out);
    assert_eq!(v["certificates"][0]["property"], "property_d");
    assert_eq!(v["certificates"][0]["status"], "VERIFIED");
    assert_eq!(v["certificates"][1]["status"], "INCONCLUSIVE");
    assert_eq!(v["certificates"][1]["failures"][0]["subject"], "β");
}

#[test]
fn build_examples() {
    let out = lsync(&["build", "--builtin", "golden-mean", "-L", "4", "--format", "dot"]);
    assert_eq!(code(&out), 0);
    let dot = stdout(&out);
    assert!(dot.starts_with("digraph"));
    for l in 1..=4 {
        assert!(dot.contains(&format!("v{l}_1 [")) && !dot.contains(&format!("v{l}_2 [")), "level {l}");
    }

    let out = lsync(&["build", "--builtin", "full-2", "--format", "json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["vertex_counts"], serde_json::json!([1, 1, 1, 1, 1]));

    let out = lsync(&["build", "--builtin", "dyck-2", "-L", "3", "--stability-recheck"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("vertex counts: [1, 2, 4, 8]"), "{text}");
    assert!(text.contains("stability: STABLE"));

    let out = lsync(&["build", "--builtin", "coded-example"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn build_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = lsync(&["build", "--builtin", "even-shift", "--format", "json", "--out", d]);
    assert_eq!(code(&out), 0);
    let system: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("system.json")).unwrap()).unwrap();
    assert_eq!(system["vertex_counts"], serde_json::json!([1, 2, 2, 2, 2]));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["status"], "VERIFIED");
    assert_eq!(report["axioms"]["failures"], serde_json::json!([]));
    assert_eq!(report["provenance"]["max_word_len"], 8);

    let out = lsync(&["build", "--builtin", "even-shift", "--format", "dot", "--out", d]);
    assert_eq!(code(&out), 0);
    assert!(dir.path().join("system.dot").exists());
}

#[test]
fn invariants_examples() {
    let out = lsync(&["invariants", "--builtin", "full-3", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let r = &json(&out)["report"];
    assert_eq!(r["groups"]["k0"]["stages"][0]["rendered"], "Z/2");
    assert_eq!(r["groups"]["k0"]["stabilized"], true);

    let golden = json(&lsync(&["invariants", "--builtin", "golden-mean", "--format", "json"]));
    let h = golden["report"]["volume_entropy"]["limit"].as_f64().unwrap();
    assert!((h - ((1.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-9);
    assert!((h - 0.4812).abs() < 1e-4);

    let full = json(&lsync(&["invariants", "--builtin", "full-2", "--format", "json"]));
    assert!((full["report"]["volume_entropy"]["limit"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-9);
}

#[test]
fn compare_examples() {
    let out = lsync(&["compare", "--builtin", "golden-mean", "--builtin", "block-2-golden-mean", "--format", "json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["verdict"], "MATCH");

    let out = lsync(&["compare", "--builtin", "full-2", "--builtin", "full-3", "--format", "json"]);
    assert_eq!(code(&out), 2);
    let v = json(&out);
    let k0 = v["comparison"]["rows"].as_array().unwrap().iter().find(|r| r["invariant"] == "K0").unwrap();
    assert_eq!(k0["verdict"], "MISMATCH");

    let out = lsync(&["compare", "--builtin", "even-shift", "--builtin", "even-shift"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).lines().skip(1).all(|l| l.contains("MATCH") && !l.contains("MISMATCH")));
}

#[test]
fn malformed_input_exits_one() {
    assert_eq!(code(&lsync(&["check", "--builtin", "nope"])), 1);
    assert_eq!(code(&lsync(&["check", "-L", "0", "--builtin", "full-2"])), 1);
    assert_eq!(code(&lsync(&["check"])), 1);
    assert_eq!(code(&lsync(&["check", "--builtin", "full-2", "--format", "dot"])), 1);
    assert_eq!(code(&lsync(&["compare", "--builtin", "full-2"])), 1);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"kind": "sft", "alphabet": 3}"#).unwrap();
    assert_eq!(code(&lsync(&["check", "--file", bad.to_str().unwrap()])), 1);
    assert_eq!(code(&lsync(&["check", "--file", "/nonexistent.json"])), 1);
    // Level count above the tail length.
    assert_eq!(code(&lsync(&["build", "--builtin", "full-2", "-L", "5", "--tail-len", "4"])), 1);
}

#[test]
fn json_output_is_deterministic() {
    let args = ["invariants", "--builtin", "even-shift", "--format", "json"];
    assert_eq!(lsync(&args).stdout, lsync(&args).stdout);
    let args = ["build", "--builtin", "markov-dyck", "--format", "json"];
    assert_eq!(lsync(&args).stdout, lsync(&args).stdout);
}
