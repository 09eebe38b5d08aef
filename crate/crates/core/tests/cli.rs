//! End-to-end tests of the `logicwb` binary: outputs, files and exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use logicwb::structures::{is_tree, isomorphic, PointedStructure, Structure};
use logicwb::syntax::parse_fo;
use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn logicwb(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_logicwb"))
        .args(args)
        .env_remove("LOGICWB_COLOR")
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

struct Fixtures {
    dir: TempDir,
}

impl Fixtures {
    fn new() -> Self {
        let f = Fixtures { dir: TempDir::new().unwrap() };
        f.write("chain.json", r#"{"domain":["w0","w1"],"unary":{"p":["w1"]},"binary":{"R":[["w0","w1"]]}}"#);
        f.write("loop.json", r#"{"domain":["a"],"unary":{},"binary":{"R":[["a","a"]]}}"#);
        f.write("cycle2.json", r#"{"domain":["x","y"],"unary":{},"binary":{"R":[["x","y"],["y","x"]]}}"#);
        f.write("lin3.json", &linear_order(3));
        f.write("lin4.json", &linear_order(4));
        f.write("nonk.json", r#"{"domain":["a","b"],"unary":{"p":["b"]},"binary":{"R":[],"Rb":[["a","b"]]}}"#);
        f
    }

    fn write(&self, name: &str, text: &str) -> String {
        let path = self.dir.path().join(name);
        fs::write(&path, text).unwrap();
        path.to_str().unwrap().to_string()
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).to_str().unwrap().to_string()
    }
}

fn linear_order(n: usize) -> String {
    let ids: Vec<String> = (0..n).map(|i| format!("\"e{i}\"")).collect();
    let pairs: Vec<String> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| format!("[\"e{i}\",\"e{j}\"]")))
        .collect();
    format!(r#"{{"domain":[{}],"unary":{{}},"binary":{{"R":[{}]}}}}"#, ids.join(","), pairs.join(","))
}

fn read_pointed(path: impl AsRef<Path>) -> PointedStructure {
    PointedStructure::from_json_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn eval_diamond_on_chain() {
    let f = Fixtures::new();
    let r = logicwb(&["eval", "--logic", "ml", "--model", &f.path("chain.json"), "--point", "w0", "--formula", "<>p"]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "true\n"));
    let r = logicwb(&["eval", "--logic", "ml", "--model", &f.path("chain.json"), "--point", "w1", "--formula", "<>p"]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "false\n"));
}

#[test]
fn eval_explain_lists_subformulas() {
    let f = Fixtures::new();
    let r = logicwb(&[
        "eval", "--logic", "ml", "--model", &f.path("chain.json"), "--point", "w0", "--formula", "<>p & ~p", "--explain",
    ]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("true\n"));
    assert!(r.stdout.lines().any(|l| l.trim_start().starts_with("false\tp")));
}

#[test]
fn eval_ra_prints_relation() {
    let f = Fixtures::new();
    let r = logicwb(&["eval", "--logic", "ra", "--model", &f.path("chain.json"), "--formula", "R;R~", "--relation"]);
    assert_eq!(r.code, 0);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v, serde_json::json!([["w0", "w0"]]));
}

#[test]
fn eval_fo_with_points() {
    let f = Fixtures::new();
    let r = logicwb(&[
        "eval", "--logic", "fo", "--model", &f.path("chain.json"), "--points", "w0,w1", "--formula", "R(x,y) & P(y) | p(y)",
    ]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "true\n"));
}

#[test]
fn quasi_mode_needs_k_frames() {
    let f = Fixtures::new();
    let r = logicwb(&[
        "eval", "--logic", "mlb", "--mode", "quasi", "--model", &f.path("nonk.json"), "--point", "a", "--formula", "*p",
    ]);
    assert_eq!(r.code, 70, "{}", r.stderr);
}

#[test]
fn intended_mode_folds_bullet() {
    let f = Fixtures::new();
    let r = logicwb(&["eval", "--logic", "mlb", "--model", &f.path("loop.json"), "--point", "a", "--formula", "*true"]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "false\n"));
}

#[test]
fn sat_verdicts_and_witness() {
    let f = Fixtures::new();
    let r = logicwb(&["sat", "--logic", "mlb", "--formula", "*p & ~<>p"]);
    assert_eq!((r.code, r.stdout.as_str()), (1, "unsat\n"));
    let r = logicwb(&["sat", "--logic", "ml", "--formula", "p & ~p"]);
    assert_eq!((r.code, r.stdout.as_str()), (1, "unsat\n"));

    let out = f.path("witness.json");
    let r = logicwb(&["sat", "--logic", "ml", "--formula", "p", "--witness", &out]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "sat\n"));
    let w = read_pointed(&out);
    assert_eq!(w.structure.len(), 1);
    assert!(w.structure.holds("p", w.point()));
}

#[test]
fn sat_bounded_witness_is_written() {
    let f = Fixtures::new();
    let out = f.path("w.json");
    let r = logicwb(&["sat", "--logic", "mlb", "--mode", "quasi", "--bounded", "3", "--formula", "*p & ~p", "--witness", &out]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "sat\n"));
    let w = read_pointed(&out);
    assert!(w.structure.len() >= 2);
    let r = logicwb(&["sat", "--logic", "ml", "--bounded", "9", "--formula", "p"]);
    assert_eq!(r.code, 70);
}

#[test]
fn equiv_examples() {
    let f = Fixtures::new();
    let r = logicwb(&["equiv", "--kind", "bisim", "--left", &format!("{}:a", f.path("loop.json")), "--right", &format!("{}:x", f.path("cycle2.json"))]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "equivalent\n"));
    let r = logicwb(&["equiv", "--kind", "counting", "--left", &format!("{}:a", f.path("loop.json")), "--right", &format!("{}:x", f.path("cycle2.json"))]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "equivalent\n"));
    let r = logicwb(&["equiv", "--kind", "pebble", "--k", "3", "--left", &f.path("lin3.json"), "--right", &f.path("lin4.json")]);
    assert_eq!((r.code, r.stdout.as_str()), (1, "distinguishable\n"));
    let chain = format!("{}:w0", f.path("chain.json"));
    let r = logicwb(&["equiv", "--kind", "bisim", "--left", &chain, "--right", &chain]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "equivalent\n"));
}

#[test]
fn equiv_witness_is_json() {
    let f = Fixtures::new();
    let r = logicwb(&[
        "equiv", "--kind", "bisim", "--witness", "--left", &format!("{}:w0", f.path("chain.json")), "--right", &format!("{}:w1", f.path("chain.json")),
    ]);
    assert_eq!(r.code, 1);
    let mut lines = r.stdout.lines();
    assert_eq!(lines.next(), Some("distinguishable"));
    let _: Value = serde_json::from_str(lines.next().unwrap()).unwrap();
}

#[test]
fn equiv_needs_k_for_pebble() {
    let f = Fixtures::new();
    let r = logicwb(&["equiv", "--kind", "pebble", "--left", &f.path("lin3.json"), "--right", &f.path("lin4.json")]);
    assert_eq!(r.code, 64);
}

#[test]
fn unravel_loop_to_chain() {
    let f = Fixtures::new();
    let out = f.path("u.json");
    let r = logicwb(&["transform", "--op", "unravel", "--depth", "2", "--model", &format!("{}:a", f.path("loop.json")), "--out", &out]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let u = read_pointed(&out);
    assert!(is_tree(&u));
    let chain = Structure::from_json_str(
        r#"{"domain":["0","1","2"],"unary":{},"binary":{"R":[["0","1"],["1","2"]]}}"#,
    )
    .unwrap();
    assert!(isomorphic(&u.structure, &chain));
}

#[test]
fn cut_at_zero_keeps_the_point() {
    let f = Fixtures::new();
    let r = logicwb(&["transform", "--op", "cut", "--depth", "0", "--model", &format!("{}:w0", f.path("chain.json"))]);
    assert_eq!(r.code, 0);
    let c = PointedStructure::from_json_str(&r.stdout).unwrap();
    assert_eq!(c.structure.ids(), ["w0"]);
}

#[test]
fn ra2fo_output_parses_back() {
    let r = logicwb(&["transform", "--op", "ra2fo", "--formula", "R;S"]);
    assert_eq!(r.code, 0);
    let f = parse_fo(r.stdout.trim()).unwrap();
    assert_eq!(f.to_string(), r.stdout.trim());
    assert!(r.stdout.starts_with("E z"));
}

#[test]
fn char_formula_needs_a_tree() {
    let f = Fixtures::new();
    let r = logicwb(&["transform", "--op", "char-formula", "--vocab", "p", "--model", &format!("{}:a", f.path("loop.json"))]);
    assert_eq!(r.code, 70);
    let r = logicwb(&["transform", "--op", "char-formula", "--vocab", "p", "--model", &format!("{}:w0", f.path("chain.json"))]);
    assert_eq!(r.code, 0);
}

#[test]
fn check_axioms_and_reports() {
    let r = logicwb(&["check", "--suite", "axioms-K"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["suite"], "axioms-K");
    assert_eq!(v["failures"], serde_json::json!([]));
    assert!(r.stderr.starts_with("PASS"));
}

#[test]
fn check_uses_a_corpus_directory() {
    let f = Fixtures::new();
    let corpus = f.dir.path().join("corpus");
    fs::create_dir(&corpus).unwrap();
    fs::copy(f.path("chain.json"), corpus.join("chain.json")).unwrap();
    fs::copy(f.path("cycle2.json"), corpus.join("cycle2.json")).unwrap();
    let r = logicwb(&["check", "--suite", "unravel-invariance", "--cases", "20", "--corpus", corpus.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["cases"], 20);
}

#[test]
fn empty_corpus_is_missing_input() {
    let f = Fixtures::new();
    let empty = f.dir.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let r = logicwb(&["check", "--suite", "unravel-invariance", "--corpus", empty.to_str().unwrap()]);
    assert_eq!(r.code, 66);
}

#[test]
fn exit_code_contract() {
    let f = Fixtures::new();
    assert_eq!(logicwb(&["--help"]).code, 0);
    assert_eq!(logicwb(&[]).code, 64);
    assert_eq!(logicwb(&["eval", "--logic", "klingon"]).code, 64);
    assert_eq!(logicwb(&["check", "--suite", "no-such-suite"]).code, 64);
    let chain = f.path("chain.json");
    assert_eq!(logicwb(&["eval", "--logic", "ml", "--model", &chain, "--point", "w0", "--formula", "<>("]).code, 65);
    assert_eq!(logicwb(&["eval", "--logic", "ml", "--model", &chain, "--point", "w0", "--formula", "<2>p"]).code, 65);
    assert_eq!(logicwb(&["eval", "--logic", "ml", "--model", &chain, "--point", "nowhere", "--formula", "p"]).code, 65);
    let bad = f.write("bad.json", r#"{"domain":["a"],"unary":{"p":["b"]},"binary":{}}"#);
    assert_eq!(logicwb(&["eval", "--logic", "ml", "--model", &bad, "--point", "a", "--formula", "p"]).code, 65);
    let missing: PathBuf = f.dir.path().join("missing.json");
    assert_eq!(logicwb(&["eval", "--logic", "ml", "--model", missing.to_str().unwrap(), "--point", "a", "--formula", "p"]).code, 66);
}

#[test]
fn color_setting_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_logicwb"))
        .args(["check", "--suite", "axioms-K"])
        .env("LOGICWB_COLOR", "sometimes")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(64));
    let out = Command::new(env!("CARGO_BIN_EXE_logicwb"))
        .args(["check", "--suite", "axioms-K"])
        .env("LOGICWB_COLOR", "always")
        .output()
        .unwrap();
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("\x1b["));
}

fn without_elapsed(stdout: &str) -> Value {
    let mut v: Value = serde_json::from_str(stdout).unwrap();
    v.as_object_mut().unwrap().remove("elapsed_ms");
    v
}

#[test]
fn runs_are_deterministic() {
    let f = Fixtures::new();
    let model = format!("{}:a", f.path("loop.json"));
    let (a, b) = (f.path("a.json"), f.path("b.json"));
    for out in [&a, &b] {
        assert_eq!(logicwb(&["transform", "--op", "gf-unravel", "--depth", "2", "--model", &model, "--out", out]).code, 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let sat = |out: &str| logicwb(&["sat", "--logic", "mlb", "--formula", "*p & <>q", "--witness", out]);
    assert_eq!(sat(&a).stdout, sat(&b).stdout);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let check = || logicwb(&["check", "--suite", "bisim-invariance", "--seed", "7", "--cases", "30"]);
    let (x, y) = (check(), check());
    assert_eq!(x.code, y.code);
    assert_eq!(without_elapsed(&x.stdout), without_elapsed(&y.stdout));
}
