//! Plot-ready CSV files, one per regime.

use std::path::{Path, PathBuf};

use detcount::asymptotics::Regime;
use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::record::ResultRecord;

#[derive(Debug, Serialize)]
pub struct ExportRow {
    #[serde(rename = "N")]
    pub n: i64,
    pub h: i64,
    #[serde(rename = "T")]
    pub t: i64,
    #[serde(rename = "MT")]
    pub mt: f64,
    #[serde(rename = "E")]
    pub e: f64,
    pub normalizer: f64,
    pub ratio: f64,
    pub sigma: String,
}

/// The regimes a record belongs to: `t_zero` for `h = 0`, the three
/// nonzero-`h` regimes otherwise.
pub fn regimes_for(record: &ResultRecord) -> &'static [Regime] {
    if record.h == 0 {
        &[Regime::TZero]
    } else {
        &[Regime::Thm1, Regime::Thm2, Regime::Prop13]
    }
}

pub fn row(regime: Regime, record: &ResultRecord) -> Result<ExportRow> {
    let p = record.point()?;
    let normalizer = regime.normalizer(&p);
    let e = regime.error(&p);
    Ok(ExportRow {
        n: record.n,
        h: record.h,
        t: record.count,
        mt: regime.main_term(&p),
        e,
        normalizer,
        ratio: e.abs() / normalizer,
        sigma: record.sigma.clone(),
    })
}

/// Write `<dir>/<regime>.csv` for every regime with at least one exact
/// record; returns the files written with their row counts.
pub fn write_all(records: &[ResultRecord], dir: &Path) -> Result<Vec<(PathBuf, usize)>> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut written = Vec::new();
    for regime in [Regime::Thm1, Regime::Thm2, Regime::Prop13, Regime::TZero] {
        let mut members: Vec<&ResultRecord> = records
            .iter()
            .filter(|r| r.is_exact() && regimes_for(r).contains(&regime))
            .collect();
        if members.is_empty() {
            continue;
        }
        members.sort_by_key(|r| (r.n, r.h));
        let path = dir.join(format!("{}.csv", regime.as_str()));
        let mut w = csv::Writer::from_path(&path)?;
        for r in &members {
            w.serialize(row(regime, r)?)?;
        }
        w.flush().map_err(|e| HarnessError::io(&path, e))?;
        written.push((path, members.len()));
    }
    Ok(written)
}
