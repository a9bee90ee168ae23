//! The five subcommands. Each returns whether its checks passed; errors
//! are usage or input problems.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use detcount::asymptotics::{self, LabelledPoint, Regime, RegimeReport, SkippedCell};
use detcount::counting::{self, CounterCaps, Method};
use detcount::suites::{self, Suite};
use serde::Serialize;

use crate::cache;
use crate::compute;
use crate::config::{MethodChoice, RegimeSpec, SweepConfig};
use crate::error::{HarnessError, Result};
use crate::export;
use crate::record::ResultRecord;

/// Count one cell, print its record, and append it to `cache` if given.
pub fn count(h: i64, n: i64, method: MethodChoice, caps: &CounterCaps, cache_path: Option<&Path>) -> Result<ResultRecord> {
    let result = match method {
        MethodChoice::Auto => counting::count_auto(h, n, caps)?,
        MethodChoice::Fixed(m) => counting::count_with(m, h, n, caps)?,
    };
    let record = ResultRecord::new(h, n, result.method, result.count, result.elapsed_ns)?;
    if let Some(path) = cache_path {
        cache::append(path, std::slice::from_ref(&record))?;
    }
    Ok(record)
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub computed: usize,
    pub reused: usize,
    pub reports: Vec<(PathBuf, RegimeReport)>,
}

impl SweepOutcome {
    pub fn pass(&self) -> bool {
        self.reports.iter().all(|(_, r)| r.pass)
    }
}

/// Count every configured cell missing from the cache, append the new
/// records in `(N, h)` order, then write one report per regime.
pub fn sweep(cfg: &SweepConfig) -> Result<SweepOutcome> {
    cfg.validate()?;
    let existing = cache::read_or_empty(&cfg.cache)?;
    let exact = cfg.method.is_exact();
    let mut known: BTreeMap<(i64, i64), ResultRecord> = BTreeMap::new();
    for r in existing.records {
        if r.is_exact() == exact {
            known.entry((r.h, r.n)).or_insert(r);
        }
    }
    let wanted: BTreeSet<(i64, i64)> = cfg
        .regimes
        .iter()
        .flat_map(|s| s.cells().into_iter().map(|(_, h, n)| (h, n)))
        .collect();
    let missing: Vec<(i64, i64)> = wanted.iter().copied().filter(|c| !known.contains_key(c)).collect();
    let reused = wanted.len() - missing.len();
    log::info!("sweep: {} cells, {} cached, {} to count", wanted.len(), reused, missing.len());

    let outcomes = in_pool(cfg.workers, || compute::count_cells(&missing, cfg.method, &cfg.caps))?;
    let mut fresh = Vec::new();
    let mut failures: BTreeMap<(i64, i64), String> = BTreeMap::new();
    for (h, n, res) in outcomes {
        match res.and_then(|(m, c, ns)| ResultRecord::new(h, n, m, c, ns)) {
            Ok(r) => fresh.push(r),
            Err(e) => {
                failures.insert((h, n), e.to_string());
            }
        }
    }
    cache::append(&cfg.cache, &fresh)?;
    let computed = fresh.len();
    for r in fresh {
        known.insert((r.h, r.n), r);
    }

    std::fs::create_dir_all(&cfg.reports).map_err(|e| HarnessError::io(&cfg.reports, e))?;
    let mut reports = Vec::new();
    for spec in &cfg.regimes {
        let report = regime_report(spec, &known, &failures, cfg)?;
        let path = cfg.reports.join(format!("{}.json", spec.regime.as_str()));
        write_json(&path, &report)?;
        reports.push((path, report));
    }
    Ok(SweepOutcome {
        computed,
        reused,
        reports,
    })
}

fn regime_report(
    spec: &RegimeSpec,
    known: &BTreeMap<(i64, i64), ResultRecord>,
    failures: &BTreeMap<(i64, i64), String>,
    cfg: &SweepConfig,
) -> Result<RegimeReport> {
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for (rule, h, n) in spec.cells() {
        match known.get(&(h, n)) {
            Some(r) => points.push(LabelledPoint {
                rule,
                point: r.point()?,
            }),
            None => skipped.push(SkippedCell {
                h,
                n,
                reason: failures.get(&(h, n)).cloned().unwrap_or_else(|| "not in cache".into()),
            }),
        }
    }
    Ok(asymptotics::report_from_points(
        spec.regime,
        spec.describe(),
        &points,
        skipped,
        &cfg.thresholds,
    )?)
}

fn in_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(job))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(|e| HarnessError::io(path, e))
}

/// Run a suite group on `workers` threads.
pub fn verify(suite: Suite, seed: u64, workers: usize) -> Result<Vec<suites::SuiteOutcome>> {
    Ok(in_pool(workers, || suites::run(suite, seed))??)
}

/// Export every regime of the cache at `cache_path` into `dir`.
pub fn export(cache_path: &Path, dir: &Path) -> Result<Vec<(PathBuf, usize)>> {
    if !cache_path.exists() {
        return Err(HarnessError::Usage(format!("cache {} does not exist", cache_path.display())));
    }
    let contents = cache::read(cache_path)?;
    export::write_all(&contents.records, dir)
}

/// What `fit` can produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitTarget {
    /// One configured regime, rebuilt from the cache without counting.
    Regime(Regime),
    /// Every configured regime, from the cache.
    Regimes,
    /// `|T~ - T|` against `N^0.1 (h + N)`.
    Gap,
    /// The coprime main-term sum against its closed form.
    Mainterm,
    /// The boundary saw-tooth and integrality sums at `h = N^2`.
    Sawtooth,
    All,
}

impl std::str::FromStr for FitTarget {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "regimes" => FitTarget::Regimes,
            "gap" => FitTarget::Gap,
            "mainterm" => FitTarget::Mainterm,
            "sawtooth" => FitTarget::Sawtooth,
            "all" => FitTarget::All,
            other => FitTarget::Regime(other.parse().map_err(|_| {
                HarnessError::Usage(format!(
                    "unknown fit target {other:?}; expected thm1, thm2, prop13, t_zero, regimes, gap, mainterm, sawtooth or all"
                ))
            })?),
        })
    }
}

#[derive(Debug, Default, Serialize)]
pub struct FitOutput {
    pub regimes: Vec<RegimeReport>,
    pub constants: Vec<suites::ConstantFit>,
}

pub fn fit(target: FitTarget, cfg: &SweepConfig) -> Result<FitOutput> {
    let mut out = FitOutput::default();
    let regimes: Vec<&RegimeSpec> = match target {
        FitTarget::Regime(r) => cfg.regimes.iter().filter(|s| s.regime == r).collect(),
        FitTarget::Regimes | FitTarget::All => cfg.regimes.iter().collect(),
        _ => Vec::new(),
    };
    if let FitTarget::Regime(r) = target {
        if regimes.is_empty() {
            return Err(HarnessError::Config(format!("regime {} is not configured", r.as_str())));
        }
    }
    if !regimes.is_empty() {
        if !cfg.cache.exists() {
            return Err(HarnessError::Usage(format!(
                "cache {} does not exist; run `sweep` first",
                cfg.cache.display()
            )));
        }
        let mut known = BTreeMap::new();
        for r in cache::read(&cfg.cache)?.records.into_iter().filter(ResultRecord::is_exact) {
            known.entry((r.h, r.n)).or_insert(r);
        }
        for spec in regimes {
            out.regimes.push(regime_report(spec, &known, &BTreeMap::new(), cfg)?);
        }
    }
    let job = || -> Result<Vec<suites::ConstantFit>> {
        let mut fits = Vec::new();
        if matches!(target, FitTarget::Gap | FitTarget::All) {
            fits.push(suites::progression_gap_fit(&suites::progression_gap_grid(), &cfg.caps)?);
        }
        if matches!(target, FitTarget::Mainterm | FitTarget::All) {
            let ns = asymptotics::Grid::geometric(200, 3200, 2);
            fits.push(suites::mainterm_fit(&ns, &suites::mainterm_rules())?);
        }
        if matches!(target, FitTarget::Sawtooth | FitTarget::All) {
            fits.extend(suites::sawtooth_fits(&asymptotics::Grid::geometric(100, 1600, 2))?);
        }
        Ok(fits)
    };
    out.constants = in_pool(cfg.workers, job)??;
    Ok(out)
}

/// `count` accepts `t_tilde`, which needs `1 <= h <= 2N^2`; report that as
/// a usage problem rather than a numeric one.
pub fn check_count_args(h: i64, n: i64, method: MethodChoice) -> Result<()> {
    if n < 1 {
        return Err(HarnessError::Usage(format!("--N must be positive, got {n}")));
    }
    if method == MethodChoice::Fixed(Method::TTilde) {
        if h < 1 || h > 2 * n * n {
            return Err(HarnessError::Usage(format!("t_tilde needs 1 <= h <= 2N^2 (h={h}, N={n})")));
        }
    }
    Ok(())
}
