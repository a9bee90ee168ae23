use std::fs;

use detcount::counting::Method;
use detcount::decomposition;
use detcount_harness::cache;
use detcount_harness::record::ResultRecord;
use detcount_harness::HarnessError;

fn records() -> Vec<ResultRecord> {
    [(1, 20, 4084), (-7, 5, 96), (0, 3, 289), (25, 5, 28)]
        .into_iter()
        .map(|(h, n, t)| ResultRecord::new(h, n, Method::Hyperbola, t, 100).unwrap())
        .collect()
}

#[test]
fn append_then_read_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/cache.jsonl");
    let recs = records();
    cache::append(&path, &recs[..2]).unwrap();
    cache::append(&path, &recs[2..]).unwrap();
    let back = cache::read(&path).unwrap();
    assert_eq!(back.records, recs);
    assert_eq!(back.foreign, 0);
}

#[test]
fn sigma_round_trips_as_exact_fraction() {
    for r in records() {
        let parsed = detcount::parse_fraction(&r.sigma).unwrap();
        assert_eq!(parsed, decomposition::sigma(r.h, r.n), "{}", r.sigma);
    }
}

#[test]
fn other_schema_versions_are_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.jsonl");
    cache::append(&path, &records()[..1]).unwrap();
    let mut text = fs::read_to_string(&path).unwrap();
    text.push_str("{\"schema_version\":99,\"anything\":true}\n\n");
    fs::write(&path, text).unwrap();
    let back = cache::read(&path).unwrap();
    assert_eq!(back.records.len(), 1);
    assert_eq!(back.foreign, 1);
}

#[test]
fn malformed_lines_name_their_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.jsonl");
    cache::append(&path, &records()).unwrap();
    let mut text = fs::read_to_string(&path).unwrap();
    text.push_str("{\"schema_version\":1,\"h\":2}\n");
    fs::write(&path, text).unwrap();
    match cache::read(&path) {
        Err(HarnessError::Cache { line, .. }) => assert_eq!(line, 5),
        other => panic!("expected a cache error, got {other:?}"),
    }
}

#[test]
fn missing_cache_reads_as_empty() {
    let dir = tempfile::tempdir().unwrap();
    let back = cache::read_or_empty(&dir.path().join("absent.jsonl")).unwrap();
    assert!(back.records.is_empty());
}
