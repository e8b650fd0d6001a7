use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn colfin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_colfin")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const TRANSVECTION: &str = r#"{"field":"Q","kind":"finitary","delta":[[0,1,"1"]]}"#;
const TWO: &str = r#"{"field":"Q","kind":"scaled","scalar":"2","delta":[]}"#;

#[test]
fn classify_examples() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (TRANSVECTION, "SLfr (1,1)"),
        (r#"{"field":"Q","kind":"scaled","scalar":"3","delta":[[0,1,"1"]]}"#, "DscSLfr (3,1)"),
        (r#"{"field":"Q","kind":"string","blocks":[],"tail":{"kind":"periodic","block":[["0","1"],["1","0"]]}}"#, "GLcf"),
        (r#"{"field":"Fp","p":5,"kind":"finitary","delta":[[0,0,1]]}"#, "GLfr (1,2)"),
    ];
    for (k, (doc, want)) in cases.iter().enumerate() {
        let path = write(&dir, &format!("e{k}.json"), doc);
        let out = colfin(&["classify", &path]);
        assert!(out.status.success(), "{doc}");
        assert_eq!(stdout(&out).trim(), *want);
    }
}

#[test]
fn closure_examples() {
    let dir = TempDir::new().unwrap();
    let t = write(&dir, "t.json", TRANSVECTION);
    let two = write(&dir, "two.json", TWO);
    let json = |args: &[&str]| -> serde_json::Value {
        let out = colfin(args);
        assert!(out.status.success());
        serde_json::from_str(&stdout(&out)).unwrap()
    };
    let central = json(&["closure", &two]);
    assert_eq!(central["variant"], "central");
    assert_eq!(central["gens"], serde_json::json!(["2"]));
    let sl = json(&["closure", &t]);
    assert_eq!(sl["variant"], "sandwich");
    assert_eq!(sl["gens"], serde_json::json!([]));
    assert_eq!(sl["full"], serde_json::json!([false, false]));
    let joined = json(&["closure", &t, &two]);
    assert_eq!(joined["gens"], serde_json::json!([["2", "1"]]));
}

#[test]
fn witness_replays_and_tampering_is_caught() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.json", r#"{"field":"Q","kind":"scaled","scalar":"-2","delta":[[0,0,"2"],[1,0,"1"],[1,2,"3"]]}"#);
    let w = dir.path().join("w.json");
    let out = colfin(&["closure", &g, "--witness", w.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(w.exists());
    assert_eq!(colfin(&["verify-witness", w.to_str().unwrap()]).status.code(), Some(0));

    let mut doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&w).unwrap()).unwrap();
    doc["target"] = serde_json::json!([[0, 1, "5"]]);
    let tampered = write(&dir, "tampered.json", &doc.to_string());
    let out = colfin(&["verify-witness", &tampered]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("(0,1)"), "{err}");
}

#[test]
fn lattice_dot_matches_golden_files() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let default = colfin(&["lattice-dot", "--check"]);
    assert!(default.status.success());
    assert_eq!(stdout(&default), fs::read_to_string(golden.join("lattice.dot")).unwrap());
    for style in ["math", "paper"] {
        let out = colfin(&["lattice-dot", &format!("--labels={style}")]);
        assert_eq!(stdout(&out), fs::read_to_string(golden.join("lattice_math_labels.dot")).unwrap());
    }
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("l.dot");
    assert!(colfin(&["lattice-dot", "--out", file.to_str().unwrap()]).status.success());
    assert_eq!(fs::read_to_string(file).unwrap(), stdout(&default));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(colfin(&[]).status.code(), Some(2));
    assert_eq!(colfin(&["classify", "/nonexistent.json"]).status.code(), Some(2));
    let bad = write(&dir, "bad.json", "{\"field\":\"Q\",\n \"kind\": }");
    let out = colfin(&["classify", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 2"));
    assert_eq!(colfin(&["verify", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(colfin(&["verify", "closure-oracle", "--field", "Q"]).status.code(), Some(2));
    assert_eq!(colfin(&["lattice-dot", "--labels", "fancy"]).status.code(), Some(2));
    let t = write(&dir, "t.json", TRANSVECTION);
    let f5 = write(&dir, "f5.json", r#"{"field":"Fp","p":5,"kind":"finitary","delta":[[0,1,1]]}"#);
    assert_eq!(colfin(&["closure", &t, &f5]).status.code(), Some(2));
}

#[test]
fn verify_reports() {
    let out = colfin(&["verify", "normality", "--trials", "5", "--seed", "42"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("PASS suite=normality field=Q seed=42"));
    let out = colfin(&["verify", "lattice", "--json"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["suite"], "lattice");
    assert_eq!(report["failures"], serde_json::json!([]));
}

#[test]
fn gen_output_classifies_to_its_node() {
    let dir = TempDir::new().unwrap();
    for (node, field) in [("SLfr", "Q"), ("DscGLfr", "GF(5)"), ("GLcf", "Q"), ("Dsc", "GF(7)")] {
        let path = dir.path().join(format!("{node}.json"));
        let p = path.to_str().unwrap();
        assert!(colfin(&["gen", node, "--field", field, "--seed", "3", "--out", p]).status.success());
        let out = colfin(&["classify", p]);
        assert_eq!(stdout(&out).split_whitespace().next(), Some(node));
    }
    assert_eq!(colfin(&["gen", "Dsc", "--field", "GF(2)"]).status.code(), Some(2));
}
