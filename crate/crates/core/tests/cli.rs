use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn xct(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xct"))
        .args(args)
        .output()
        .expect("run xct")
}

fn ok(args: &[&str]) -> String {
    let out = xct(args);
    assert!(
        out.status.success(),
        "xct {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn corpus(dir: &Path) -> String {
    let c = dir.join("corpus");
    ok(&["generate", "--seed", "7", "--days", "2021-08-01:2021-08-31", "--out", &s(&c)]);
    s(&c)
}

#[test]
fn month_corpus_commands() {
    let tmp = tempfile::tempdir().unwrap();
    let c = corpus(tmp.path());
    let logs: Vec<_> = fs::read_dir(&c).unwrap().collect();
    assert_eq!(logs.len(), 31);

    let curve = tmp.path().join("curve.csv");
    ok(&["simulate", "hit-rate", "--logs", &c, "--capacities", "40TB:60TB:2TB", "--out", &s(&curve)]);
    let text = fs::read_to_string(&curve).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "capacity_bytes,hit_rate");
    assert_eq!(lines.len(), 12);
    assert_eq!(lines[1].split(',').next(), Some("40000000000000"));
    assert!(!text.contains('\r'));
    assert!(tmp.path().join("curve.detail.csv").exists());

    let lt = tmp.path().join("lt.json");
    ok(&["analyze", "lifetimes", "--logs", &c, "--tau", "1.2d", "--out", &s(&lt)]);
    let doc: Value = serde_json::from_str(&fs::read_to_string(&lt).unwrap()).unwrap();
    assert_eq!(doc["meta"]["command"], "analyze lifetimes");
    assert_eq!(doc["meta"]["version"], env!("CARGO_PKG_VERSION"));
    assert!(doc["data"]["summary"]["mean_hours"].as_f64().unwrap() > 0.0);
    assert_eq!(doc["data"]["histogram"].as_array().unwrap().len(), 240);
    let thresholds: Vec<f64> = doc["data"]["quantiles"]
        .as_array()
        .unwrap()
        .iter()
        .map(|q| q["threshold_hours"].as_f64().unwrap())
        .collect();
    assert_eq!(thresholds, [1.0, 5.0, 10.0]);

    let fill = tmp.path().join("fill.csv");
    ok(&["simulate", "fill-time", "--logs", &c, "--capacities", "1GB,10GB,1000TB", "--out", &s(&fill)]);
    let rows: Vec<Vec<String>> = fs::read_to_string(&fill)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    let d1: i64 = rows[0][1].parse().unwrap();
    let d2: i64 = rows[1][1].parse().unwrap();
    assert!(d1 <= d2);
    assert_eq!(rows[2][1], "");

    let sweep = ok(&["analyze", "sweep-tau", "--logs", &c, "--taus", "1d:10d:1d"]);
    assert_eq!(sweep.lines().count(), 11);

    let oracle = tmp.path().join("oracle.csv");
    ok(&["oracle", "lru", "--logs", &c, "--capacities", "40GB,45GB", "--out", &s(&oracle)]);
    let detail = fs::read_to_string(tmp.path().join("curve.detail.csv")).unwrap();
    assert!(fs::read_to_string(&oracle).unwrap().starts_with(detail.lines().next().unwrap()));
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    let tmp = tempfile::tempdir().unwrap();
    let c = tmp.path().join("c");
    ok(&["generate", "--seed", "3", "--days", "2021-05-01:2021-05-03", "--out", &s(&c)]);
    let csv = tmp.path().join("r.csv");
    let json = tmp.path().join("r.json");
    ok(&["analyze", "reads", "--logs", &s(&c), "--out", &s(&csv)]);
    ok(&["analyze", "reads", "--logs", &s(&c), "--out", &s(&json)]);
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let values: Vec<&str> = lines.next().unwrap().split(',').collect();
    let doc: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    let summary = &doc["data"]["summary"];
    for (h, v) in header.iter().zip(values) {
        let j = &summary[*h];
        if let Some(i) = j.as_u64() {
            assert_eq!(v, i.to_string(), "{h}");
        } else {
            let (a, b): (f64, f64) = (v.parse().unwrap(), j.as_f64().unwrap());
            assert!((a - b).abs() <= 1e-11 * b.abs(), "{h}: {a} vs {b}");
        }
    }
    let per_file = fs::read_to_string(tmp.path().join("r.per_file.csv")).unwrap();
    assert_eq!(
        per_file.lines().count() - 1,
        doc["data"]["per_file"].as_array().unwrap().len()
    );
}

#[test]
fn fit_points_file() {
    let tmp = tempfile::tempdir().unwrap();
    let pts = tmp.path().join("pts.csv");
    let mut text = String::from("x,y\n");
    for i in 1..=50 {
        let x = i as f64 * 0.25;
        text.push_str(&format!("{x},{}\n", 2.0 / x));
    }
    fs::write(&pts, text).unwrap();
    let out = ok(&["fit-powerlaw", "--points", &s(&pts), "--format", "json"]);
    let doc: Value = serde_json::from_str(&out).unwrap();
    let fit = &doc["data"]["fit"];
    assert!((fit["a"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    assert!((fit["b"].as_f64().unwrap() + 1.0).abs() < 1e-6);
    assert_eq!(fit["converged"], true);
}

#[test]
fn content_model_over_a_month() {
    let out = ok(&["simulate", "content-model", "--days", "2021-08-01:2021-08-31", "--capacity", "40TB"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 31);
    assert!(lines[0].starts_with("step,"));
    let out = ok(&[
        "simulate", "content-model", "--size-params", "-2,2", "--rate-params", "1", "--steps", "5",
        "--clamp-negative",
    ]);
    for row in out.lines().skip(1) {
        let inc: i64 = row.split(',').nth(4).unwrap().parse().unwrap();
        assert!(inc >= 0);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(xct(&[]).status.code(), Some(1));
    assert_eq!(xct(&["--help"]).status.code(), Some(0));
    assert_eq!(xct(&["generate", "--days", "2021-08-01"]).status.code(), Some(1));
    assert_eq!(xct(&["simulate", "hit-rate", "--logs", ".", "--capacities", "40XB"]).status.code(), Some(1));
    assert_eq!(xct(&["simulate", "content-model", "--size-params", "3"]).status.code(), Some(1));

    let tmp = tempfile::tempdir().unwrap();
    let empty = s(tmp.path());
    let out = xct(&["analyze", "reads", "--logs", &empty]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert_eq!(xct(&["analyze", "transfers", "--logs", "/nonexistent/dir"]).status.code(), Some(2));
}

#[test]
fn malformed_lines_are_warnings() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("xrootd-20210801.log"),
        "210801 00:00:01 cache successfuly read size from info file = 1000 /a\n\
         210801 00:00:02 tid=1 uid=2 req=read garbage fn=/a\n\
         just noise\n\
         210801 00:00:03 tid=1 uid=2 req=read 10@0 fn=/a\n",
    )
    .unwrap();
    let out = ok(&["analyze", "transfers", "--logs", &s(tmp.path())]);
    assert_eq!(out.lines().nth(1), Some("1,1000"));
    let out = ok(&["analyze", "reads", "--logs", &s(tmp.path())]);
    assert!(out.lines().nth(1).unwrap().starts_with("1,0,1,1,1,10,10,0"));
}

#[test]
fn schema_lists_every_command() {
    let out = ok(&["--schema"]);
    for cmd in [
        "generate",
        "analyze reads",
        "analyze lifetimes",
        "analyze transfers",
        "analyze sweep-tau",
        "fit-powerlaw",
        "simulate hit-rate",
        "simulate content-model",
        "simulate fill-time",
    ] {
        assert!(out.lines().any(|l| l.starts_with(&format!("{cmd},"))), "{cmd}");
    }
}
