use std::path::Path;
use std::process::{Command, Output};

fn engagenet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_engagenet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = engagenet(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn stepwise_commands_compose() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let data = d.join("data");
    ok(&[
        "simulate",
        "--preset",
        "planted",
        "--students",
        "30",
        "--seed",
        "4",
        "--out",
        s(&data),
    ]);
    let (events, students, scores) = (
        data.join("events.csv"),
        data.join("students.csv"),
        data.join("scores.csv"),
    );
    for f in [&events, &students, &scores, &data.join("planted.csv")] {
        assert!(f.exists(), "{}", f.display());
    }

    let summary = ok(&[
        "ingest",
        "--events",
        s(&events),
        "--students",
        s(&students),
        "--scores",
        s(&scores),
    ]);
    let summary: serde_json::Value = serde_json::from_slice(&summary.stdout).unwrap();
    assert_eq!(summary["students"], 30);
    assert_eq!(summary["findings"].as_array().unwrap().len(), 0);

    let net = d.join("net.graphml");
    ok(&["build", "--events", s(&events), "--format", "graphml", "--out", s(&net)]);
    let partition = d.join("partition.json");
    ok(&[
        "cluster",
        "--graph",
        s(&net),
        "--seed",
        "4",
        "--restarts",
        "3",
        "--out",
        s(&partition),
    ]);
    let tables = d.join("tables");
    ok(&[
        "filter",
        "--graph",
        s(&net),
        "--partition",
        s(&partition),
        "--alpha",
        "0.05",
        "--out",
        s(&tables),
    ]);
    assert!(tables.join("significant_edges_cluster_0.csv").exists());
    let stats = d.join("stats.json");
    ok(&[
        "stats",
        "--events",
        s(&events),
        "--students",
        s(&students),
        "--scores",
        s(&scores),
        "--partition",
        s(&partition),
        "--out",
        s(&stats),
    ]);
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&stats).unwrap()).unwrap();
    assert!(report["mwu"].is_object(), "{report}");

    let json = d.join("net.json");
    ok(&["export", "--input", s(&net), "--format", "json", "--out", s(&json)]);
    let back = d.join("back.graphml");
    ok(&["export", "--input", s(&json), "--format", "graphml", "--out", s(&back)]);
    assert_eq!(std::fs::read(&net).unwrap(), std::fs::read(&back).unwrap());
}

#[test]
fn run_replays_from_its_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&[
        "run",
        "--synthetic",
        "planted",
        "--seed",
        "2",
        "--restarts",
        "4",
        "--alpha",
        "0.01",
        "--phases",
        "1,2,3,4",
        "--format",
        "json,csv",
        "--out",
        s(&a),
    ]);
    let manifest = a.join("manifest.json");
    ok(&["run", "--config", s(&manifest), "--out", s(&b)]);
    for name in ["partition.json", "significance.json", "stats.json", "network.json"] {
        assert_eq!(
            std::fs::read(a.join(name)).unwrap(),
            std::fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
    assert!(!a.join("network.graphml").exists());
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(&manifest).unwrap()).unwrap();
    assert_eq!(m["config"]["filter"]["alpha"], 0.01);
    assert_eq!(m["config"]["sbm"]["restarts"], 4);
}

#[test]
fn failures_name_the_stage_and_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = engagenet(&[
        "run",
        "--events",
        s(&dir.path().join("missing.csv")),
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("ingest stage failed"), "{stderr}");

    let out = engagenet(&["export", "--input", "x.json", "--format", "gexf", "--out", "y"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("gexf"));
}
