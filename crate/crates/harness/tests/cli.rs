use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn detcount(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_detcount"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn detcount")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn count_of(o: &Output) -> i64 {
    let v: Value = serde_json::from_str(stdout(o).trim()).expect("count prints a JSON record");
    v["count"].as_i64().unwrap()
}

const SMALL: &str = r#"{"regimes": [
  {"regime": "thm1", "ns": [20, 40, 80, 160], "rules": [{"kind": "constant", "value": 1}, {"kind": "constant", "value": 12}]},
  {"regime": "t_zero", "ns": {"start": 10, "end": 80, "factor": 2}}
 ],
 "cache": "run/cache.jsonl", "reports": "run/reports"}"#;

fn small_run() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("small.json"), SMALL).unwrap();
    dir
}

#[test]
fn count_matches_known_cells() {
    let dir = tempfile::tempdir().unwrap();
    for (h, n, method, want) in [
        ("1", "1", "auto", 20),
        ("7", "2", "naive", 0),
        ("8", "2", "hyperbola", 4),
        ("8", "2", "linear", 4),
        ("0", "3", "auto", 289),
    ] {
        let o = detcount(dir.path(), &["count", "--h", h, "--N", n, "--method", method]);
        assert!(o.status.success(), "{h} {n} {method}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(count_of(&o), want, "T({h}, {n}) by {method}");
    }
}

#[test]
fn count_is_symmetric_in_the_sign_of_h() {
    let dir = tempfile::tempdir().unwrap();
    let pos = detcount(dir.path(), &["count", "--h", "5", "--N", "6"]);
    let neg = detcount(dir.path(), &["count", "--h", "-5", "--N", "6"]);
    assert!(pos.status.success() && neg.status.success());
    assert_eq!(count_of(&pos), count_of(&neg));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 5] = [
        &["count", "--h", "1", "--N", "2", "--method", "guess"],
        &["count", "--h", "1"],
        &["frobnicate"],
        &["sweep", "--config", "missing.json"],
        &["export", "missing.jsonl"],
    ];
    for args in cases {
        let o = detcount(dir.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn count_appends_to_cache_with_schema_version() {
    let dir = tempfile::tempdir().unwrap();
    for h in ["3", "4"] {
        let o = detcount(dir.path(), &["count", "--h", h, "--N", "5", "--out", "c.jsonl"]);
        assert!(o.status.success());
    }
    let text = fs::read_to_string(dir.path().join("c.jsonl")).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    for (v, h) in lines.iter().zip([3, 4]) {
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["h"], h);
        assert_eq!(v["N"], 5);
    }
}

#[test]
fn sweep_resumes_from_cache() {
    let dir = small_run();
    let first = detcount(dir.path(), &["sweep", "--config", "small.json"]);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    assert!(stdout(&first).contains("counted 12 cells, reused 0"));
    let cache = dir.path().join("run/cache.jsonl");
    let before = fs::read_to_string(&cache).unwrap();

    let second = detcount(dir.path(), &["sweep", "--config", "small.json"]);
    assert!(second.status.success());
    assert!(stdout(&second).contains("counted 0 cells, reused 12"));
    assert_eq!(fs::read_to_string(&cache).unwrap(), before);

    for regime in ["thm1", "t_zero"] {
        let report: Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join(format!("run/reports/{regime}.json"))).unwrap())
                .unwrap();
        assert_eq!(report["regime"], regime);
        assert!(report["rows"].as_array().map_or(false, |p| !p.is_empty()));
    }
}

#[test]
fn corrupted_cache_line_is_reported() {
    let dir = small_run();
    assert!(detcount(dir.path(), &["sweep", "--config", "small.json"]).status.success());
    let cache = dir.path().join("run/cache.jsonl");
    let mut text = fs::read_to_string(&cache).unwrap();
    text.push_str("{\"schema_version\":1,\"h\":3\n");
    fs::write(&cache, text).unwrap();

    let o = detcount(dir.path(), &["sweep", "--config", "small.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cache.jsonl:13"));
}

#[test]
fn export_writes_one_csv_per_regime() {
    let dir = small_run();
    assert!(detcount(dir.path(), &["sweep", "--config", "small.json"]).status.success());
    let o = detcount(dir.path(), &["export", "run/cache.jsonl", "--out", "csv"]);
    assert!(o.status.success());

    let header = "N,h,T,MT,E,normalizer,ratio,sigma";
    for (regime, rows) in [("thm1", 8), ("thm2", 8), ("prop13", 8), ("t_zero", 4)] {
        let text = fs::read_to_string(dir.path().join(format!("csv/{regime}.csv"))).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(header));
        let body: Vec<&str> = lines.collect();
        assert_eq!(body.len(), rows, "{regime}");
        for line in body {
            assert_eq!(line.split(',').count(), 8, "{line}");
        }
    }
    let thm2 = fs::read_to_string(dir.path().join("csv/thm2.csv")).unwrap();
    let row: Vec<&str> = thm2.lines().nth(1).unwrap().split(',').collect();
    let (n, h): (f64, f64) = (row[0].parse().unwrap(), row[1].parse().unwrap());
    let normalizer: f64 = row[5].parse().unwrap();
    assert_eq!(normalizer, n + (h - n * n).abs() + 1.0);
}

#[test]
fn fit_rebuilds_reports_from_cache() {
    let dir = small_run();
    assert!(detcount(dir.path(), &["sweep", "--config", "small.json"]).status.success());
    let o = detcount(dir.path(), &["fit", "--suite", "thm1", "--config", "small.json", "--out", "fit.json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("thm1: alpha="));
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("fit.json")).unwrap()).unwrap();
    assert!(v.is_object());
}

#[test]
fn verify_lemmas_passes_and_writes_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let o = detcount(dir.path(), &["verify", "--suite", "lemmas", "--out", "v.json", "--seed", "3"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("v.json")).unwrap()).unwrap();
    let outcomes = v.as_array().expect("outcome list");
    assert!(!outcomes.is_empty());
    assert!(outcomes.iter().all(|o| o["failed"] == 0));
}
