use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_clusteraut"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("CLUSTERAUT_THREADS").output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn example(dir: &TempDir, name: &str) -> PathBuf {
    let out = run(&["example", name]);
    assert!(out.status.success());
    let path = dir.path().join(format!("{name}.json"));
    std::fs::write(&path, &out.stdout).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn x7_class_is_closed() {
    let dir = TempDir::new().unwrap();
    let m = example(&dir, "x7");
    let v = json(&["class", s(&m)]);
    assert_eq!(v["classes"], 2);
    assert_eq!(v["finite"], true);
}

#[test]
fn rank3_generators() {
    let dir = TempDir::new().unwrap();
    let m = example(&dir, "rank3-weighted");
    let v = json(&["generators", s(&m), "--mode", "acyclic-ss"]);
    assert_eq!(v["G0_order"], 1);
    assert_eq!(v["H1_count"], 2);
    let kinds: Vec<&str> = v["generators"].as_array().unwrap().iter().map(|g| g["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["G0", "H1", "H1"]);
}

#[test]
fn non_reduced_path_is_rejected() {
    let dir = TempDir::new().unwrap();
    let m = example(&dir, "a2");
    let out = run(&["mutate", s(&m), "1,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not reduced"));
    let out = run(&["mutate", s(&m), "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn a2_pentagon_swaps_variables() {
    let dir = TempDir::new().unwrap();
    let m = example(&dir, "a2");
    let v = json(&["mutate", s(&m), "1,2,1,2,1", "--seed"]);
    assert_eq!(v["cluster"], serde_json::json!(["x2", "x1"]));
    assert_eq!(v["subscript"], "12121");
}

#[test]
fn bad_matrix_exit_codes() {
    let dir = TempDir::new().unwrap();
    let not_sym = dir.path().join("bad.json");
    std::fs::write(&not_sym, r#"{"n":3,"B":[[0,1,1],[-1,0,1],[-2,-1,0]]}"#).unwrap();
    assert_eq!(run(&["class", s(&not_sym)]).status.code(), Some(3));
    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "not json").unwrap();
    assert_eq!(run(&["class", s(&garbage)]).status.code(), Some(2));
    let x7 = example(&dir, "x7");
    assert_eq!(run(&["generators", s(&x7), "--mode", "acyclic-ss"]).status.code(), Some(5));
}

#[test]
fn chain_relations_and_verify() {
    let dir = TempDir::new().unwrap();
    let m = example(&dir, "chain4-distinct");
    let gens = dir.path().join("gens.json");
    std::fs::write(
        &gens,
        r#"[{"name":"x","path":[4,3,2,1],"sigma":[1,2,3,4],"sign":"+"},
            {"name":"y","path":[4,1,3,4],"sigma":[1,2,3,4],"sign":"-"}]"#,
    )
    .unwrap();
    let v = json(&["relations", s(&m), "--gens", s(&gens), "--max-len", "8"]);
    let rels: Vec<&str> = v["relations"].as_array().unwrap().iter().map(|r| r["relator"].as_str().unwrap()).collect();
    assert_eq!(rels, ["y^2", "(x y)^2"]);
    assert_eq!(v["ball_sizes"], serde_json::json!([1, 4, 8, 12, 16]));

    let words = dir.path().join("words.txt");
    std::fs::write(&words, "# dihedral\nx y x y^-1\nx y x^-1 y\n").unwrap();
    let v = json(&["verify", s(&m), "--gens", s(&gens), "--words", s(&words)]);
    let holds: Vec<bool> = v["results"].as_array().unwrap().iter().map(|r| r["holds"].as_bool().unwrap()).collect();
    assert_eq!(holds, [true, false]);
}

#[test]
fn generator_file_feeds_relations() {
    let dir = TempDir::new().unwrap();
    let m = example(&dir, "chain4-distinct");
    let out = dir.path().join("gens.json");
    let report = json(&["generators", s(&m), "--mode", "acyclic-ss", "-o", s(&out)]);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(written.as_array().unwrap().len(), report["generators"].as_array().unwrap().len());
    // a saved report is accepted as well as the plain list
    let report_file = dir.path().join("report.json");
    std::fs::write(&report_file, report.to_string()).unwrap();
    let a = json(&["relations", s(&m), "--gens", s(&out), "--max-len", "4"]);
    let b = json(&["relations", s(&m), "--gens", s(&report_file), "--max-len", "4"]);
    assert_eq!(a, b);
}

#[test]
fn output_is_thread_independent() {
    let dir = TempDir::new().unwrap();
    let m = example(&dir, "x7");
    let go = |t: &str| {
        let out = bin().args(["--threads", t, "generators", s(&m)]).output().unwrap();
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(go("1"), go("4"));
    let env = bin().env("CLUSTERAUT_THREADS", "2").args(["generators", s(&m)]).output().unwrap();
    assert_eq!(env.stdout, go("1"));
}

#[test]
fn cfilter_toggle_agrees() {
    let dir = TempDir::new().unwrap();
    let m = example(&dir, "x7");
    let on = json(&["generators", s(&m)]);
    let off = json(&["--cfilter", "off", "generators", s(&m)]);
    assert_eq!(on, off);
}

#[test]
fn dot_and_text() {
    let dir = TempDir::new().unwrap();
    let m = example(&dir, "a2");
    let out = run(&["dot", s(&m)]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("digraph") && text.contains("1 -> 2"));
    let out = run(&["--text", "class", s(&m)]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("closed"));
}
