use std::path::{Path, PathBuf};
use std::process::Command;

use oimso_core::{parse_edge_list, validate_decomposition, DecompositionJson, Graph, Structure};
use oimso_decomp::treewidth_exact;
use oimso_logic::{evaluate, parse_formula, Assignment};
use oimso_otxx::OtxxJson;
use serde_json::Value;

const TWO: &str = "ex x. ex y. (x <= y & ~(x = y))";
const BIP: &str = "EX X. ~(ex x. ex y. (x in X & y in X & E(x,y))) & ~(ex x. ex y. (~(x in X) & ~(y in X) & E(x,y)))";

struct Dir(PathBuf);

impl Dir {
    fn new(name: &str) -> Dir {
        let p = std::env::temp_dir().join(format!("oimso-cli-{}-{name}", std::process::id()));
        let _ = std::fs::remove_dir_all(&p);
        std::fs::create_dir_all(&p).unwrap();
        Dir(p)
    }

    fn file(&self, name: &str, text: &str) -> String {
        let p = self.0.join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    }

    fn path(&self, name: &str) -> String {
        self.0.join(name).to_str().unwrap().to_string()
    }
}

impl Drop for Dir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("oimso").chain(args.iter().copied());
    let code = oimso_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ok_json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    serde_json::from_str(&out).unwrap()
}

fn edge_list(g: &Graph) -> String {
    let edges: Vec<_> = g.edges().collect();
    let mut s = format!("{} {}\n", g.vertex_count(), edges.len());
    for (u, v) in edges {
        s.push_str(&format!("{u} {v}\n"));
    }
    s
}

fn two_triangles() -> Graph {
    Graph::from_edges(0..6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
}

fn load(path: &str) -> Structure {
    oimso_cli::load(Path::new(path)).unwrap()
}

#[test]
fn decomposition_round_trips() {
    let d = Dir::new("decompose");
    let g = Graph::from_edges(0..6, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (3, 4), (4, 5)]);
    let input = d.file("g.txt", &edge_list(&g));
    let v = ok_json(&["decompose", "--atoms", "-k", "2", &input]);
    assert_eq!(v["validation"]["ok"], true);
    let dj: DecompositionJson = serde_json::from_value(v["decomposition"].clone()).unwrap();
    let td = dj.to_tree().unwrap();
    assert!(validate_decomposition(&load(&input), &td).ok);
    // segmenting the emitted decomposition
    let dec = d.file("d.json", &serde_json::to_string(&v["decomposition"]).unwrap());
    let s = ok_json(&["segment", "--from", &dec, &input]);
    assert_eq!(s["violations"].as_array().unwrap().len(), 0);
    assert_eq!(s["validation"]["ok"], true);
    assert_eq!(s, ok_json(&["segment", "-k", "2", &input]));
    let sj: DecompositionJson = serde_json::from_value(s["decomposition"].clone()).unwrap();
    assert!(sj.to_segmented().unwrap().is_segmented());
}

#[test]
fn three_connected_labels() {
    let d = Dir::new("tri");
    let input = d.file("g.txt", &edge_list(&Graph::cycle(5)));
    let v = ok_json(&["decompose", "--three-connected", &input]);
    let labels = v["decomposition"]["labels"].as_object().unwrap();
    assert!(labels.values().all(|l| l == "cycle"));
    let dot = run(&["decompose", "--three-connected", "--dot", &input]).1;
    assert!(dot.starts_with("digraph"));
    assert_eq!(ok_json(&["oracle", "classify", &input])["class"], "cycle");
}

#[test]
fn improvement_only_adds_edges() {
    let d = Dir::new("improve");
    let g = Graph::from_edges(0..5, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 2)]);
    let input = d.file("g.txt", &edge_list(&g));
    let v = ok_json(&["improve", "-k", "2", &input]);
    let edges: Vec<(u32, u32)> = serde_json::from_value(v["edges"].clone()).unwrap();
    for e in g.edges() {
        assert!(edges.contains(&e));
    }
    let h = Graph::from_edges(0..5, edges);
    assert_eq!(treewidth_exact(&h).unwrap(), 2);
    assert_eq!(ok_json(&["oracle", "treewidth", &input])["treewidth"], 2);
}

#[test]
fn otxx_output_rechecks_its_derived_part() {
    let d = Dir::new("otxx");
    let star = Graph::from_edges(0..4, [(0, 1), (0, 2), (0, 3)]);
    let input = d.file("g.txt", &edge_list(&star));
    for p in ["input-id", "bfs", "coloring"] {
        let v = ok_json(&["otxx", "-k", "2", "--provider", p, "--orders", "100", &input]);
        let orders = v["orders"].as_array().unwrap().len();
        assert!(orders >= 2);
        let j: OtxxJson = serde_json::from_value(v).unwrap();
        assert!(j.derived.is_some());
        j.to_otxx().unwrap();
    }
    // too many orders to list
    let (code, _, err) = run(&["otxx", "-k", "2", "--orders", "1", &input]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn modelcheck_matches_direct_evaluation() {
    let d = Dir::new("mc");
    let f = d.file("bip.mso", BIP);
    let phi = parse_formula(BIP, &oimso_core::Vocabulary::graph()).unwrap();
    for g in [two_triangles(), Graph::cycle(4), Graph::cycle(5), Graph::path(4)] {
        let input = d.file("g.txt", &edge_list(&g));
        let (code, out, err) = run(&["modelcheck", "-k", "2", "-q", "3", "--formula", &f, &input]);
        assert_eq!(code, 0, "{err}");
        let expected = evaluate(&g.to_structure(), &Assignment::new(), &phi, None).unwrap();
        assert_eq!(out, format!("{expected}\n"));
        let (_, direct, _) = run(&["oracle", "evaluate", "--formula", &f, &input]);
        assert_eq!(direct, out);
    }
}

#[test]
fn traces_do_not_depend_on_jobs() {
    let d = Dir::new("trace");
    let f = d.file("bip.mso", BIP);
    let g = Graph::from_edges(0..6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)]);
    let input = d.file("g.txt", &edge_list(&g));
    let (t1, t4) = (d.path("t1.json"), d.path("t4.json"));
    let a = run(&["modelcheck", "-k", "2", "--formula", &f, "--trace", &t1, "--jobs", "1", &input]);
    let b = run(&["modelcheck", "-k", "2", "--formula", &f, "--trace", &t4, "--jobs", "4", &input]);
    assert_eq!(a, b);
    let (s1, s4) = (std::fs::read_to_string(&t1).unwrap(), std::fs::read_to_string(&t4).unwrap());
    assert_eq!(s1, s4);
    let trace: Value = serde_json::from_str(&s1).unwrap();
    assert!(!trace["nodes"].as_array().unwrap().is_empty());
}

#[test]
fn invariance_reports_witness_orders() {
    let d = Dir::new("inv");
    let text = "ex x. ((all y. x <= y) & ex y. ex z. (E(x,y) & E(x,z) & ~(y = z)))";
    let f = d.file("min.mso", text);
    let g = Graph::path(3);
    let input = d.file("g.txt", &edge_list(&g));
    let v = ok_json(&["invariance", "--cap", "6", "--formula", &f, &input]);
    assert_eq!(v["invariant"], false);
    let phi = parse_formula(text, &oimso_core::Vocabulary::graph()).unwrap();
    let a = g.to_structure();
    let o1: Vec<u32> = serde_json::from_value(v["witness"]["first"].clone()).unwrap();
    let o2: Vec<u32> = serde_json::from_value(v["witness"]["second"].clone()).unwrap();
    assert_ne!(
        evaluate(&a, &Assignment::new(), &phi, Some(&o1)).unwrap(),
        evaluate(&a, &Assignment::new(), &phi, Some(&o2)).unwrap()
    );
    let bip = d.file("bip.mso", BIP);
    let v = ok_json(&["invariance", "--formula", &bip, &input]);
    assert_eq!(v["invariant"], true);
    assert!(v["witness"].is_null());
    // the formula is rejected by the model checker
    let (code, _, _) = run(&["modelcheck", "-k", "2", "--formula", &f, &input]);
    assert_eq!(code, 1);
}

#[test]
fn types_and_separating_sentences() {
    let d = Dir::new("types");
    let c3 = d.file("c3.txt", &edge_list(&Graph::cycle(3)));
    let c4 = d.file("c4.txt", &edge_list(&Graph::cycle(4)));
    let c3b = d.file("c3b.json", &serde_json::to_string(&Graph::cycle(3).to_structure()).unwrap());
    let v = ok_json(&["equiv", "-q", "2", &c3, &c4]);
    assert_eq!(v["equivalent"], false);
    let phi = parse_formula(v["separating"].as_str().unwrap(), &oimso_core::Vocabulary::graph()).unwrap();
    assert!(evaluate(&load(&c3), &Assignment::new(), &phi, None).unwrap());
    assert!(!evaluate(&load(&c4), &Assignment::new(), &phi, None).unwrap());
    let same = ok_json(&["equiv", "-q", "2", "--ordered", &c3, &c3b]);
    assert_eq!(same["equivalent"], true);
    assert!(same["separating"].is_null());
    let reg = d.path("reg.json");
    let t = ok_json(&["typecheck", "-q", "2", "--modulus", "2", "--registry", &reg, &c4]);
    assert_eq!(t["rank"], 2);
    let dump: Value = serde_json::from_str(&std::fs::read_to_string(&reg).unwrap()).unwrap();
    oimso_types::TypeRegistry::from_json(&dump).unwrap();
}

#[test]
fn exit_codes() {
    let d = Dir::new("codes");
    let big = d.file("p9.txt", &edge_list(&Graph::path(9)));
    let f = d.file("bip.mso", BIP);
    let bad = d.file("bad.mso", "ex x. (E(x)");
    let k4 = d.file("k4.txt", &edge_list(&Graph::complete(4)));
    // capacity
    let two = d.file("two.mso", TWO);
    assert_eq!(run(&["invariance", "--cap", "3", "--formula", &two, &big]).0, 2);
    assert_eq!(run(&["typecheck", "-q", "3", &big]).0, 2);
    assert_eq!(run(&["modelcheck", "-k", "2", "--formula", &two, &big]).0, 2);
    // contract and input failures
    assert_eq!(run(&["modelcheck", "-k", "2", "--formula", &bad, &k4]).0, 1);
    assert_eq!(run(&["modelcheck", "-k", "2", "--formula", &f, &k4]).0, 1);
    assert_eq!(run(&["decompose", &k4]).0, 1);
    assert_eq!(run(&["typecheck", "-q", "1", "--dot", &k4]).0, 1);
    assert_eq!(run(&["typecheck", "-q", "1", &d.path("missing.txt")]).0, 1);
    assert_eq!(run(&["decompose", "--atoms", "--three-connected", &k4]).0, 1);
    assert_eq!(run(&["frobnicate"]).0, 1);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("modelcheck"));
    // with the trust flag the large path is decided
    assert_eq!(run(&["modelcheck", "-k", "2", "--trust", "--formula", &two, &big]).1, "true\n");
}

#[test]
fn binary_is_deterministic() {
    let d = Dir::new("bin");
    let input = d.file("g.txt", &edge_list(&two_triangles()));
    let go = || {
        Command::new(env!("CARGO_BIN_EXE_oimso"))
            .args(["otxx", "-k", "2", "--provider", "bfs", &input])
            .output()
            .unwrap()
    };
    let (a, b) = (go(), go());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_oimso"))
        .args(["invariance", "--cap", "2", "--formula", &d.file("f.mso", TWO), &input])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).starts_with("error:"));
    assert!(parse_edge_list(&std::fs::read_to_string(&input).unwrap()).is_ok());
}
