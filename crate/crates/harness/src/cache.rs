//! Append-only JSON-lines result cache.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{HarnessError, Result};
use crate::record::{ResultRecord, SCHEMA_VERSION};

/// Records read back from a cache file.
#[derive(Debug, Default)]
pub struct CacheContents {
    pub records: Vec<ResultRecord>,
    /// Lines written under a different schema version, left untouched.
    pub foreign: usize,
}

/// Read every record, failing on the first malformed line.
pub fn read(path: &Path) -> Result<CacheContents> {
    let file = File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let mut out = CacheContents::default();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| HarnessError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| HarnessError::Cache {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let value: serde_json::Value = serde_json::from_str(&line).map_err(|e| bad(format!("not JSON: {e}")))?;
        let version = value
            .get("schema_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| bad("missing schema_version".into()))?;
        if version != u64::from(SCHEMA_VERSION) {
            out.foreign += 1;
            continue;
        }
        let record: ResultRecord = serde_json::from_value(value).map_err(|e| bad(format!("invalid record: {e}")))?;
        out.records.push(record);
    }
    if out.foreign > 0 {
        log::warn!("{}: skipped {} records with another schema_version", path.display(), out.foreign);
    }
    Ok(out)
}

/// [`read`], treating a missing file as an empty cache.
pub fn read_or_empty(path: &Path) -> Result<CacheContents> {
    if path.exists() {
        read(path)
    } else {
        Ok(CacheContents::default())
    }
}

/// Append records, one JSON object per line, under an exclusive lock.
pub fn append(path: &Path, records: &[ResultRecord]) -> Result<()> {
    if records.is_empty() {
        return Ok(());
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    let mut buf = Vec::new();
    for r in records {
        serde_json::to_writer(&mut buf, r)?;
        buf.push(b'\n');
    }
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| HarnessError::io(path, e))?;
    file.lock().map_err(|e| HarnessError::io(path, e))?;
    let written = file.write_all(&buf).and_then(|_| file.flush());
    let _ = file.unlock();
    written.map_err(|e| HarnessError::io(path, e))
}
