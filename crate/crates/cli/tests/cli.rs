use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const P3: &str = "3\n# labels: p0 p1 p2\n0 1 2\n1 0 1\n2 1 0\n";
const P3_RELABELED: &str = "3\n# labels: b a c\n0 1 1\n1 0 2\n1 2 0\n";
const EQUILATERAL: &str = "3\n0 1 1\n1 0 1\n1 1 0\n";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scottrank"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn machine(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--machine"];
    all.extend_from_slice(args);
    let o = run(&all);
    (o.status.code().unwrap(), serde_json::from_slice(&o.stdout).expect("one JSON document"))
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn rank_examples() {
    let d = TempDir::new().unwrap();
    let p3 = file(&d, "p3.space", P3);
    let eq = file(&d, "eq.space", EQUILATERAL);
    let (code, r) = machine(&["rank", s(&p3)]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["rank"], 1);
    assert_eq!(r["result"]["classes"][0], serde_json::json!([1, 1, 2, 3]));
    assert_eq!(machine(&["rank", s(&eq)]).1["result"]["rank"], 0);
    assert!(stdout(&run(&["rank", s(&p3)])).starts_with("rank 1\n"));
}

#[test]
fn emitted_homogeneous_tree_has_rank_zero() {
    let d = TempDir::new().unwrap();
    let o = run(&["tree", "2", "--alpha", "0", "--emit", "space"]);
    assert!(o.status.success());
    let t = file(&d, "t20.space", &stdout(&o));
    assert_eq!(machine(&["rank", s(&t)]).1["result"]["rank"], 0);
    assert_eq!(machine(&["homogeneous", s(&t)]).0, 0);
}

#[test]
fn tree_outputs() {
    assert_eq!(stdout(&run(&["tree", "2", "--alpha", "0", "--emit", "nodes"])), "[]\n[0]\n[1]\n");
    assert_eq!(stdout(&run(&["tree", "0", "--alpha", "1", "--cap", "2"])), "[]\n[0]\n[2]\n[2,0]\n");
    let space = stdout(&run(&["tree", "1", "--alpha", "1", "--cap", "1", "--emit", "space"]));
    let header = space.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "4");
    let function = stdout(&run(&["tree", "0", "--alpha", "1", "--cap", "2", "--emit", "function"]));
    assert_eq!(function, "[] []\n[0] []\n[2] []\n[2,0] [2]\n");
    let (_, r) = machine(&["tree", "0", "--alpha", "1", "--cap", "2"]);
    assert_eq!(r["result"]["claimed_rank_untruncated"], "w");
}

#[test]
fn tree_files_read_in_both_views() {
    let d = TempDir::new().unwrap();
    let nodes = file(&d, "t.nodes", &stdout(&run(&["tree", "0", "--alpha", "1", "--cap", "3"])));
    let space = file(&d, "t.space", &stdout(&run(&["tree", "0", "--alpha", "1", "--cap", "3", "--emit", "space"])));
    for f in [&nodes, &space] {
        for view in ["metric", "function"] {
            let (code, r) = machine(&["rank", s(f), "--view", view]);
            assert_eq!(code, 0);
            assert_eq!(r["result"]["rank"], 2, "{view}");
        }
    }
    let (code, r) = machine(&["equiv", s(&nodes), "[]", "[0]", "--view", "function", "--alpha", "0"]);
    assert_eq!((code, &r["result"]["equivalent"]), (1, &Value::Bool(false)));
}

#[test]
fn equivalence_verdicts() {
    let d = TempDir::new().unwrap();
    let p3 = file(&d, "p3.space", P3);
    assert_eq!(machine(&["equiv", s(&p3), "p0", "p2"]).0, 0);
    assert_eq!(machine(&["equiv", s(&p3), "0", "1", "--alpha", "1"]).0, 1);
    let (code, r) = machine(&["equiv", s(&p3), "p0,p1", "p2,p1", "--alpha", "w+1"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["level_used"], r["result"]["stabilization"]);
}

#[test]
fn compare_examples() {
    let d = TempDir::new().unwrap();
    let p3 = file(&d, "p3.space", P3);
    let p3r = file(&d, "p3r.space", P3_RELABELED);
    let eq = file(&d, "eq.space", EQUILATERAL);

    let (code, r) = machine(&["isometric", s(&p3), s(&p3r)]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["mapping"], serde_json::json!([["p0", "a"], ["p1", "b"], ["p2", "c"]]));
    assert_eq!(machine(&["isometric", s(&p3), s(&eq)]).0, 1);

    let (code, r) = machine(&["compare-dn", s(&p3), s(&eq), "--max-n", "2"]);
    assert_eq!(code, 1);
    assert_eq!(r["result"]["first_difference"]["n"], 2);
    assert_eq!(machine(&["compare-dn", s(&p3), s(&p3), "--max-n", "3"]).0, 0);

    let (code, _) = machine(&["compare-dn", s(&p3), s(&p3r), "--eps", "1/2", "--anchor-x", "p0", "--anchor-y", "a"]);
    assert_eq!(code, 0);
    let (code, _) = machine(&["compare-dn", s(&p3), s(&p3r), "--eps", "1/2", "--anchor-x", "p1", "--anchor-y", "a"]);
    assert_eq!(code, 1);
}

#[test]
fn homogeneity_witness() {
    let d = TempDir::new().unwrap();
    let p3 = file(&d, "p3.space", P3);
    let (code, r) = machine(&["homogeneous", s(&p3)]);
    assert_eq!(code, 1);
    assert_eq!(r["result"]["witness"], serde_json::json!([["p0", "p1"]]));
}

#[test]
fn dnset_and_epsnet() {
    let d = TempDir::new().unwrap();
    let eq = file(&d, "eq.space", EQUILATERAL);
    let p3 = file(&d, "p3.space", P3);
    assert_eq!(stdout(&run(&["dnset", s(&eq), "--max-n", "2"])), "0 0\n0 0\n\n0 1\n1 0\n");
    assert_eq!(machine(&["dnset", s(&p3), "--max-n", "3"]).1["result"]["count"], 10);
    assert_eq!(stdout(&run(&["epsnet", s(&p3), "--eps", "3/2"])), "p0\np2\n");
}

#[test]
fn exit_codes_for_bad_input_and_ceilings() {
    let d = TempDir::new().unwrap();
    let bad = file(&d, "bad.space", "2\n0 1\n2 0\n");
    let (code, r) = machine(&["rank", s(&bad)]);
    assert_eq!(code, 2);
    assert_eq!(r["status"], "input_error");
    assert_eq!(r["inputs"].as_array().unwrap().len(), 1);
    assert_eq!(run(&["rank", "/nonexistent/x.space"]).status.code(), Some(2));
    assert_eq!(run(&["tree", "1", "--alpha", "x"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    let eq = file(&d, "eq.space", EQUILATERAL);
    assert_eq!(run(&["rank", s(&eq), "--view", "function"]).status.code(), Some(2));
    let (code, r) = machine(&["tree", "w", "--alpha", "w", "--cap", "8", "--max-nodes", "100"]);
    assert_eq!(code, 3);
    assert_eq!(r["status"], "resource_ceiling");
    let p3 = file(&d, "p3.space", P3);
    assert_eq!(run(&["rank", s(&p3), "--max-tuples", "5"]).status.code(), Some(3));
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let d = TempDir::new().unwrap();
    let t = file(&d, "t.space", &stdout(&run(&["tree", "1", "--alpha", "2", "--cap", "2", "--emit", "space"])));
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("elapsed_ms");
        v
    };
    for args in [vec!["rank", s(&t)], vec!["homogeneous", s(&t)], vec!["dnset", s(&t), "--max-n", "2"]] {
        let a = strip(machine(&args).1);
        let b = strip(machine(&args).1);
        assert_eq!(a, b);
        assert_eq!(stdout(&run(&args)), stdout(&run(&args)));
    }
}
