use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ogdmis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ogdmis"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_k33_plus(dir: &Path) -> String {
    let mut edges = vec![[0, 1], [0, 2], [0, 3], [4, 5], [4, 6], [5, 6]];
    for u in 1..=3 {
        for v in 4..=6 {
            edges.push([u, v]);
        }
    }
    let path = dir.join("k33_plus.json");
    fs::write(
        &path,
        serde_json::json!({ "n": 7, "edges": edges }).to_string(),
    )
    .unwrap();
    path.to_str().unwrap().to_owned()
}

fn stdout_json(o: &Output) -> Value {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn solve_k33_plus_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_k33_plus(dir.path());
    let r = stdout_json(&ogdmis(&["solve", &graph, "--method", "exact"]));
    assert_eq!(r["size"], 3);
    assert_eq!(r["members"], serde_json::json!([1, 2, 3]));
    let r = stdout_json(&ogdmis(&["solve", &graph, "--method", "greedy-min-degree"]));
    assert_eq!(r["size"], 2);
}

#[test]
fn embed_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("path.json");
    fs::write(&graph, r#"{"n": 3, "edges": [[0, 1], [1, 2]]}"#).unwrap();
    let emb = dir.path().join("emb.json");
    let o = ogdmis(&[
        "embed",
        graph.to_str().unwrap(),
        "--seed",
        "3",
        "--out",
        emb.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = stdout_json(&ogdmis(&["verify", emb.to_str().unwrap()]));
    assert_eq!(r["ok"], true);
    assert_eq!(r["mis_size"], 2);
    assert_eq!(r["expected_size"], 2);
}

#[test]
fn failed_verification_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("edge.json");
    fs::write(&graph, r#"{"n": 2, "edges": [[0, 1]]}"#).unwrap();
    let emb = dir.path().join("emb.json");
    assert!(ogdmis(&[
        "embed",
        graph.to_str().unwrap(),
        "--out",
        emb.to_str().unwrap()
    ])
    .status
    .success());
    let o = ogdmis(&["verify", emb.to_str().unwrap(), "--delta=-0.2"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "verification_failed");
}

#[test]
fn errors_are_json_on_stderr() {
    let o = ogdmis(&["solve", "/nonexistent/graph.json"]);
    assert!(!o.status.success());
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "cli");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"n\": 3, \"edges\": [[0, 5]]}").unwrap();
    let o = ogdmis(&["embed", bad.to_str().unwrap()]);
    assert!(!o.status.success());
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "parse");

    let star = dir.path().join("star.json");
    let edges: Vec<[usize; 2]> = (1..8).map(|v| [0, v]).collect();
    fs::write(
        &star,
        serde_json::json!({ "n": 8, "edges": edges }).to_string(),
    )
    .unwrap();
    let err: Value =
        serde_json::from_slice(&ogdmis(&["embed", star.to_str().unwrap()]).stderr).unwrap();
    assert_eq!(err["error"], "unsupported_degree");
}

#[test]
fn anneal_k33_plus_reports_p_mis() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("dist.csv");
    let o = ogdmis(&[
        "anneal",
        "--k33-plus",
        "--duration",
        "2",
        "--spam",
        "0.15,0.05",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: Value = serde_json::from_slice(&o.stderr).unwrap();
    let p = summary["p_mis"].as_f64().unwrap();
    assert!(p > 0.25 && p <= 1.0, "P_MIS {p}");
    assert!(summary["p_mis_corrected"].as_f64().unwrap() > summary["p_mis_spam"].as_f64().unwrap());
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("bitstring,probability\n"));
    let total: f64 = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn anneal_rejects_coarse_step() {
    let o = ogdmis(&["anneal", "--k33-plus", "--duration", "1", "--dt", "0.1"]);
    assert!(!o.status.success());
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "step_too_coarse");
}

#[test]
fn scaling_is_reproducible() {
    let args = [
        "scaling",
        "--sizes",
        "5,6,7",
        "--samples",
        "2",
        "--seed",
        "4",
        "--reproducible",
    ];
    let a = ogdmis(&args);
    let b = ogdmis(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("n,seed,n_plus,total_edge_length,retries,elapsed_ms,valid")
    );
    assert_eq!(lines.filter(|l| l.ends_with(",true")).count(), 6);
    let summary: Value = serde_json::from_slice(&a.stderr).unwrap();
    assert_eq!(summary["all_valid"], true);
    assert!(summary["fit_overhead"]["alpha"].is_number());
}
