//! Drives the installed binary end to end through temp files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bramble"))
}

fn run(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut c = bin();
    c.args(args).env_remove("BRAMBLE_SEED");
    for (k, v) in envs {
        c.env(k, v);
    }
    c.output().expect("binary runs")
}

fn path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

fn s(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn grid_system_extract_verify_order_chain() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "g.txt");
    let ps = path(dir.path(), "ps.json");
    let br = path(dir.path(), "bramble.json");
    let rep = path(dir.path(), "run.json");

    let out = run(
        &["gen-ps", "--g", "8", "--a", "4", "--b", "4", "--out", s(&ps), "--graph-out", s(&g)],
        &[],
    );
    assert!(out.status.success(), "gen-ps: {out:?}");
    let header = std::fs::read_to_string(&g).unwrap();
    assert!(header.starts_with("64 "), "graph header: {header:.20?}");

    let out = run(
        &[
            "extract", "--graph", s(&g), "--ps", s(&ps), "--k", "2", "--sigma", "0.25",
            "--seed", "2026", "--b", "4", "--d1", "8", "--d2", "8", "--d3", "1",
            "--out", s(&br), "--report", s(&rep), "--json",
        ],
        &[],
    );
    assert!(out.status.success(), "extract: {out:?}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    assert!(report["congestion"].as_u64().unwrap() <= 8);
    assert_eq!(report["seed"].as_u64().unwrap(), 2026);

    let out = run(&["verify", "--graph", s(&g), "--bramble", s(&br), "--json"], &[]);
    assert!(out.status.success(), "verify: {out:?}");
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["violations"].as_array().unwrap().len(), 0);

    let out = run(&["order", "--graph", s(&g), "--bramble", s(&br), "--cap", "64"], &[]);
    assert!(out.status.success(), "order: {out:?}");
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("order "));
}

#[test]
fn verify_rejects_a_tampered_bramble() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "g.txt");
    let ps = path(dir.path(), "ps.json");
    let br = path(dir.path(), "bramble.json");
    run(
        &["gen-ps", "--g", "8", "--a", "4", "--b", "4", "--out", s(&ps), "--graph-out", s(&g)],
        &[],
    );
    let out = run(
        &[
            "extract", "--graph", s(&g), "--ps", s(&ps), "--k", "2", "--sigma", "0.25",
            "--b", "4", "--d1", "8", "--d2", "8", "--d3", "1", "--out", s(&br),
        ],
        &[],
    );
    assert!(out.status.success(), "extract: {out:?}");

    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&br).unwrap()).unwrap();
    doc["congestion"] = serde_json::json!(99);
    std::fs::write(&br, doc.to_string()).unwrap();
    let out = run(&["verify", "--graph", s(&g), "--bramble", s(&br)], &[]);
    assert_eq!(out.status.code(), Some(1), "tampered verify: {out:?}");
}

#[test]
fn env_seed_fills_the_default_and_the_flag_wins() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "g.txt");
    let ps = path(dir.path(), "ps.json");
    let br = path(dir.path(), "bramble.json");
    run(
        &["gen-ps", "--g", "8", "--a", "4", "--b", "4", "--out", s(&ps), "--graph-out", s(&g)],
        &[],
    );
    let base: Vec<&str> = vec![
        "extract", "--graph", s(&g), "--ps", s(&ps), "--k", "2", "--sigma", "0.25", "--b",
        "4", "--d1", "8", "--d2", "8", "--d3", "1", "--out", s(&br), "--json",
    ];
    let out = run(&base, &[("BRAMBLE_SEED", "7")]);
    assert!(out.status.success(), "{out:?}");
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["seed"].as_u64().unwrap(), 7);

    let mut with_flag = base.clone();
    with_flag.extend(["--seed", "9"]);
    let out = run(&with_flag, &[("BRAMBLE_SEED", "7")]);
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["seed"].as_u64().unwrap(), 9);
}

#[test]
fn bad_usage_and_bad_hypotheses_have_distinct_codes() {
    let out = run(&["gen-grid", "--g", "4", "--no-such-flag"], &[]);
    assert_eq!(out.status.code(), Some(2), "unknown flag: {out:?}");

    let dir = tempfile::tempdir().unwrap();
    let ps = path(dir.path(), "ps.json");
    // 2b exceeds g: hypothesis failure, not usage.
    let out = run(&["gen-ps", "--g", "4", "--a", "2", "--b", "3", "--out", s(&ps)], &[]);
    assert_eq!(out.status.code(), Some(1), "oversized marks: {out:?}");
}
