use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn sbmconn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbmconn"))
        .args(args)
        .args(["--log-level", "warn"])
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = sbmconn(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

struct Dir(TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, contents: &str) -> String {
        let path = self.0.path().join(name);
        fs::write(&path, contents).unwrap();
        path.to_str().unwrap().to_owned()
    }

    fn path(&self, name: &str) -> String {
        self.0.path().join(name).to_str().unwrap().to_owned()
    }
}

fn read_json(path: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn clusters_in(path: impl AsRef<Path>) -> usize {
    let text = fs::read_to_string(path).unwrap();
    let mut ids: Vec<&str> = text.lines().map(|l| l.split('\t').nth(1).unwrap()).collect();
    ids.sort_unstable();
    ids.dedup();
    ids.len()
}

fn gen_cliques(dir: &Dir, m: usize, c: usize, bridges: usize) -> (String, String) {
    let (edges, truth) = (dir.path("g.tsv"), dir.path("truth.tsv"));
    ok(&[
        "gen", "cliques",
        "--num-cliques", &m.to_string(),
        "--clique-size", &c.to_string(),
        "--bridges", &bridges.to_string(),
        "--seed", "3",
        "--output-edgelist", &edges,
        "--output-clustering", &truth,
    ]);
    (edges, truth)
}

/// Relabels a clustering file with `f(cluster id)`.
fn remap(dir: &Dir, name: &str, src: &str, f: impl Fn(usize) -> String) -> String {
    let text: String = fs::read_to_string(src)
        .unwrap()
        .lines()
        .map(|l| {
            let (node, c) = l.split_once('\t').unwrap();
            format!("{node}\t{}\n", f(c.parse().unwrap()))
        })
        .collect();
    dir.file(name, &text)
}

#[test]
fn wcc_splits_the_bridged_cliques() {
    let dir = Dir::new();
    let (edges, truth) = gen_cliques(&dir, 2, 5, 1);
    let one = remap(&dir, "one.tsv", &truth, |_| "0".into());
    let out = dir.path("out.tsv");
    ok(&["treat", "--edgelist", &edges, "--existing-clustering", &one, "--connectedness-criterion", "wcc", "--output-file", &out]);
    assert_eq!(clusters_in(&out), 2);
    assert_eq!(fs::read_to_string(&out).unwrap(), fs::read_to_string(&truth).unwrap());
}

#[test]
fn cc_on_connected_clusters_is_the_identity() {
    let dir = Dir::new();
    let (edges, truth) = gen_cliques(&dir, 6, 4, 5);
    let out = dir.path("out.tsv");
    ok(&["treat", "--edgelist", &edges, "--clustering", &truth, "--connectedness-criterion", "cc", "--output-file", &out]);
    assert_eq!(fs::read(&out).unwrap(), fs::read(&truth).unwrap());
    assert!(!Path::new(&format!("{out}.clusters.tsv")).exists());
}

#[test]
fn missing_input_fails_without_output() {
    let dir = Dir::new();
    let clustering = dir.file("c.tsv", "a\t0\n");
    let out = dir.path("out.tsv");
    let res = sbmconn(&["treat", "--edgelist", &dir.path("absent.tsv"), "--clustering", &clustering, "--connectedness-criterion", "cc", "--output-file", &out]);
    assert_eq!(res.status.code(), Some(2));
    assert!(!Path::new(&out).exists());
}

#[test]
fn duplicate_node_lines_are_rejected() {
    let dir = Dir::new();
    let edges = dir.file("g.tsv", "a\tb\n");
    let clustering = dir.file("c.tsv", "a\t0\nb\t0\na\t1\n");
    let res = sbmconn(&["profile", "--edgelist", &edges, "--clustering", &clustering]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("line 3"));
}

#[test]
fn string_cluster_labels_get_a_sidecar_and_missing_nodes_become_singletons() {
    let dir = Dir::new();
    let edges = dir.file("g.tsv", "a\tb\nc\td\nd\te\n");
    let clustering = dir.file("c.tsv", "a\tred\nb\tred\nc\tblue\nd\tblue\nz\tblue\n");
    let out = dir.path("out.tsv");
    ok(&["treat", "--edgelist", &edges, "--clustering", &clustering, "--connectedness-criterion", "cc", "--output-file", &out]);
    assert_eq!(fs::read_to_string(&out).unwrap(), "a\t0\nb\t0\nc\t1\nd\t1\nz\t2\ne\t3\n");
    assert_eq!(
        fs::read_to_string(format!("{out}.clusters.tsv")).unwrap(),
        "0\tred\n1\tblue\n2\tblue\n3\t-\n"
    );
}

fn triangle(dir: &Dir) -> (String, String) {
    (dir.file("tri.tsv", "0\t1\n1\t2\n0\t2\n"), dir.file("one.tsv", "0\tA\n1\tA\n2\tA\n"))
}

#[test]
fn dl_reports_for_the_triangle() {
    let dir = Dir::new();
    let (edges, one) = triangle(&dir);
    let report = dir.path("dl.json");
    ok(&["dl", "--edgelist", &edges, "--clustering", &one, "--model", "dc", "--output-file", &report]);
    let dc = read_json(&report);
    assert!((dc["total"].as_f64().unwrap() - 5.059426).abs() < 1e-6);
    assert_eq!(dc["model"], "dc");

    ok(&["dl", "--edgelist", &edges, "--clustering", &one, "--model", "ndc", "--output-file", &report]);
    assert!((read_json(&report)["total"].as_f64().unwrap() - 1.098612).abs() < 1e-6);

    ok(&["dl", "--edgelist", &edges, "--clustering", &one, "--beta", "0", "--output-file", &report]);
    let zero = read_json(&report);
    assert_eq!(zero["total"], zero["likelihood"]);

    let res = sbmconn(&["dl", "--edgelist", &edges, "--clustering", &one, "--beta", "1.5"]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn infer_is_reproducible() {
    let dir = Dir::new();
    let k4 = dir.file("k4.tsv", "0\t1\n0\t2\n0\t3\n1\t2\n1\t3\n2\t3\n");
    let run = |tag: &str| {
        let (c, r) = (dir.path(&format!("c{tag}.tsv")), dir.path(&format!("r{tag}.json")));
        ok(&["infer", "--edgelist", &k4, "--model", "ndc", "--restarts", "5", "--seed", "9", "--output-clustering", &c, "--output-report", &r]);
        (fs::read(c).unwrap(), fs::read(r).unwrap())
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn chosen_model_names_the_winner() {
    let dir = Dir::new();
    let (edges, _) = gen_cliques(&dir, 3, 5, 0);
    let report = dir.path("r.json");
    ok(&["infer", "--edgelist", &edges, "--model", "chosen", "--output-report", &report, "--output-clustering", &dir.path("c.tsv")]);
    let r = read_json(&report);
    let selected = r["model_selected"].as_str().unwrap();
    let candidates = r["candidates"].as_array().unwrap();
    assert_eq!(candidates.len(), 2);
    let best = candidates
        .iter()
        .min_by(|a, b| a["total"].as_f64().unwrap().total_cmp(&b["total"].as_f64().unwrap()))
        .unwrap();
    assert_eq!(best["model"], selected);
    assert_eq!(best["total"], r["total"]);
    assert_eq!(r["candidate_models"], serde_json::json!(["dc", "ndc"]));
}

#[test]
fn zero_restarts_is_a_usage_error() {
    let dir = Dir::new();
    let (edges, _) = triangle(&dir);
    assert_eq!(sbmconn(&["infer", "--edgelist", &edges, "--restarts", "0"]).status.code(), Some(1));
}

#[test]
fn profile_percentages() {
    let dir = Dir::new();
    let (edges, truth) = gen_cliques(&dir, 64, 8, 0);
    let pairs = remap(&dir, "pairs.tsv", &truth, |c| (c / 2).to_string());
    let report = dir.path("p.json");
    ok(&["profile", "--edgelist", &edges, "--clustering", &pairs, "--output-file", &report]);
    let p = read_json(&report);
    assert_eq!(p["percentages"]["disconnected"].as_f64(), Some(100.0));

    let treated = dir.path("wcc.tsv");
    ok(&["treat", "--edgelist", &edges, "--clustering", &pairs, "--connectedness-criterion", "wcc", "--output-file", &treated]);
    ok(&["profile", "--edgelist", &edges, "--clustering", &treated, "--output-file", &report]);
    let p = read_json(&report);
    assert_eq!(p["percentages"]["disconnected"].as_f64(), Some(0.0));
    assert_eq!(p["percentages"]["poorly_connected"].as_f64(), Some(0.0));

    let own: String = fs::read_to_string(&truth)
        .unwrap()
        .lines()
        .map(|l| {
            let node = l.split('\t').next().unwrap();
            format!("{node}\t{node}\n")
        })
        .collect();
    let singletons = dir.file("single.tsv", &own);
    ok(&["profile", "--edgelist", &edges, "--clustering", &singletons, "--output-file", &report]);
    let p = read_json(&report);
    assert!(p.get("percentages").is_none_or(Value::is_null));
    assert_eq!(p["num_singletons"], 512);
}

#[test]
fn eval_scores() {
    let dir = Dir::new();
    let (edges, truth) = gen_cliques(&dir, 16, 6, 0);
    let csv = dir.path("e.csv");
    let json = dir.path("e.json");
    ok(&["eval", "--edgelist", &edges, "--gt-clustering", &truth, "--est-clustering", &truth, "--thresholds", "0.0,0.5,1.0", "--output-csv", &csv, "--output-json", &json]);
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), "threshold,retained_nodes,retained_clusters,ari,nmi,ami,precision,recall");
    for row in read_json(&json).as_array().unwrap() {
        if row["retained_clusters"].as_u64().unwrap() > 0 {
            for key in ["ari", "nmi", "ami", "precision", "recall"] {
                assert_eq!(row[key].as_f64(), Some(1.0), "{key} at {}", row["threshold"]);
            }
        }
    }

    // CC of merged pairs recovers the cliques exactly
    let pairs = remap(&dir, "pairs.tsv", &truth, |c| (c / 2).to_string());
    let cc = dir.path("cc.tsv");
    ok(&["treat", "--edgelist", &edges, "--clustering", &pairs, "--connectedness-criterion", "cc", "--output-file", &cc]);
    ok(&["eval", "--edgelist", &edges, "--gt-clustering", &truth, "--est-clustering", &cc, "--output-json", &json]);
    assert_eq!(read_json(&json)[0]["ari"].as_f64(), Some(1.0));

    // a single 0.0 threshold matches unfiltered scores
    ok(&["eval", "--edgelist", &edges, "--gt-clustering", &truth, "--est-clustering", &pairs, "--thresholds", "0.0", "--output-json", &json]);
    let row = &read_json(&json)[0];
    assert_eq!(row["retained_nodes"], 96);
    assert!(row["ari"].as_f64().unwrap() < 1.0);
    assert_eq!(row["recall"].as_f64(), Some(1.0));

    let res = sbmconn(&["eval", "--edgelist", &edges, "--gt-clustering", &truth, "--est-clustering", &truth, "--thresholds", "0.5,0.1"]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn gen_reports_counts_and_validates() {
    let dir = Dir::new();
    let stdout = ok(&["gen", "cliques", "--num-cliques", "64", "--clique-size", "8", "--output-edgelist", &dir.path("g"), "--output-clustering", &dir.path("c")]);
    assert!(stdout.contains("nodes: 512"));
    assert!(stdout.contains("edges: 1792"));

    let (g, c) = (dir.path("p.tsv"), dir.path("pc.tsv"));
    let stdout = ok(&["gen", "planted", "--blocks", "3,3", "--p-in", "1", "--p-out", "0", "--output-edgelist", &g, "--output-clustering", &c]);
    assert!(stdout.contains("nodes: 6") && stdout.contains("edges: 6"));
    assert_eq!(clusters_in(&c), 2);

    let bad = sbmconn(&["gen", "cliques", "--num-cliques", "2", "--clique-size", "-3", "--output-edgelist", &dir.path("x"), "--output-clustering", &dir.path("y")]);
    assert_eq!(bad.status.code(), Some(1));
    let infeasible = sbmconn(&["gen", "cliques", "--num-cliques", "2", "--clique-size", "2", "--bridges", "9", "--output-edgelist", &dir.path("x"), "--output-clustering", &dir.path("y")]);
    assert_eq!(infeasible.status.code(), Some(3));
    assert!(!PathBuf::from(dir.path("x")).exists());
}
