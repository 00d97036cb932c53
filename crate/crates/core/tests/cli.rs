//! The `chartcorpus` binary end to end on a small corpus.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chartcorpus"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn lines(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count()
}

#[test]
fn full_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("mini");
    let config = dir.path().join("config.json");
    fs::write(&config, r#"{"seed": 11, "charts": 12, "workers": 2}"#).unwrap();
    let c = config.to_str().unwrap();
    let out = corpus.to_str().unwrap();

    let s = run(&["synthesize", "--config", c, "--out", out]);
    assert!(s.status.success(), "{s:?}");
    assert!(stdout(&s).contains("12 generated"));
    assert_eq!(lines(&corpus.join("manifest.jsonl")), 12);

    let again = run(&["synthesize", "--config", c, "--out", out]);
    assert!(stdout(&again).contains("0 generated, 12 already present"));

    let d = run(&["distill", "--config", c, "--out", out]);
    assert!(d.status.success(), "{d:?}");
    assert_eq!(lines(&corpus.join("summaries.jsonl")), 12);

    let g = run(&["gen-tasks", "--config", c, "--out", out]);
    assert!(g.status.success(), "{g:?}");
    let table = stdout(&g);
    assert!(table.contains("mini") && table.contains("Chart Summarization") && table.contains("Total"));
    assert_eq!(lines(&corpus.join("tasks/summary.jsonl")), 12);
    assert_eq!(lines(&corpus.join("tasks/table.jsonl")), 12);

    let st = run(&["stats", "--out", out, "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&st.stdout).unwrap();
    assert_eq!(v["charts"], 12);

    let tables = dir.path().join("tables");
    let e = run(&[
        "extract",
        corpus.join("charts").to_str().unwrap(),
        "--out",
        tables.to_str().unwrap(),
        "--strict",
    ]);
    assert!(e.status.success(), "{e:?}");
    assert!(stdout(&e).starts_with("12 processed"));
    assert_eq!(fs::read_dir(&tables).unwrap().count(), 12);
}

#[test]
fn extract_strict_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("broken.svg"), "<svg").unwrap();
    let p = dir.path().to_str().unwrap();
    let lenient = run(&["extract", p]);
    assert!(lenient.status.success());
    assert!(stdout(&lenient).contains("1 failed"));
    assert_eq!(run(&["extract", p, "--strict"]).status.code(), Some(2));
}

#[test]
fn eval_scores_and_rejects_mismatches() {
    let dir = tempfile::tempdir().unwrap();
    let pred = dir.path().join("pred.jsonl");
    let gold = dir.path().join("gold.jsonl");
    fs::write(
        &pred,
        "{\"id\":\"a\",\"output\":\"42\"}\n{\"id\":\"b\",\"output\":\"7\"}\n",
    )
    .unwrap();
    fs::write(
        &gold,
        "{\"id\":\"a\",\"target\":\"41\"}\n{\"id\":\"b\",\"target\":\"10\"}\n",
    )
    .unwrap();
    let o = run(&[
        "eval",
        "--pred",
        pred.to_str().unwrap(),
        "--gold",
        gold.to_str().unwrap(),
        "--metric",
        "ra",
    ]);
    assert!(o.status.success(), "{o:?}");
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["ra"], 0.5);

    fs::write(&gold, "{\"id\":\"a\",\"target\":\"41\"}\n").unwrap();
    let bad = run(&[
        "eval",
        "--pred",
        pred.to_str().unwrap(),
        "--gold",
        gold.to_str().unwrap(),
    ]);
    assert_eq!(bad.status.code(), Some(1));

    let unknown = run(&["eval", "--pred", "x", "--gold", "y", "--metric", "rouge"]);
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("unknown metric"));
}

#[test]
fn extract_with_shipped_profile() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("bars.svg"),
        r##"<svg>
          <g class="tick y" transform="translate(0,200)"><text>0</text></g>
          <g class="tick y" transform="translate(0,100)"><text>10</text></g>
          <g class="tick x" transform="translate(30,0)"><text>a</text></g>
          <rect class="bar" x="20" y="150" width="20" height="50"/>
        </svg>"##,
    )
    .unwrap();
    let profile = concat!(env!("CARGO_MANIFEST_DIR"), "/profiles/d3-style.json");
    let out = dir.path().join("out");
    let o = run(&[
        "extract",
        dir.path().to_str().unwrap(),
        "--profile",
        profile,
        "--out",
        out.to_str().unwrap(),
        "--strict",
    ]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("1 recovered"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("bars.table.json")).unwrap()).unwrap();
    assert_eq!(v["rows"][0][1], 5.0);
}
