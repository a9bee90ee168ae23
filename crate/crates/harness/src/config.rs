//! Sweep configuration: a single JSON document, with command-line flags
//! taking precedence over file values.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use detcount::asymptotics::{Grid, HRule, Regime, Thresholds};
use detcount::counting::{CounterCaps, Method};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// `auto` or one fixed counting method.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum MethodChoice {
    Auto,
    Fixed(Method),
}

impl MethodChoice {
    /// Whether counts produced under this choice are exact `T(h, N)`.
    pub fn is_exact(self) -> bool {
        match self {
            MethodChoice::Auto => true,
            MethodChoice::Fixed(m) => m.is_exact(),
        }
    }
}

impl FromStr for MethodChoice {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(MethodChoice::Auto);
        }
        s.parse::<Method>()
            .map(MethodChoice::Fixed)
            .map_err(|_| HarnessError::Usage(format!("unknown method {s:?}; expected naive, hyperbola, linear, t_tilde or auto")))
    }
}

impl TryFrom<String> for MethodChoice {
    type Error = HarnessError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<MethodChoice> for String {
    fn from(m: MethodChoice) -> String {
        m.to_string()
    }
}

impl fmt::Display for MethodChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodChoice::Auto => f.write_str("auto"),
            MethodChoice::Fixed(m) => f.write_str(m.as_str()),
        }
    }
}

/// `N` values: an explicit list or `start, start*factor, ... <= end`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NsSpec {
    List(Vec<i64>),
    Geometric { start: i64, end: i64, factor: i64 },
}

impl NsSpec {
    pub fn values(&self) -> Vec<i64> {
        match self {
            NsSpec::List(v) => v.clone(),
            NsSpec::Geometric { start, end, factor } => Grid::geometric(*start, *end, *factor),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeSpec {
    pub regime: Regime,
    pub ns: NsSpec,
    /// Ignored for `t_zero`, whose cells all have `h = 0`.
    #[serde(default)]
    pub rules: Vec<HRule>,
}

impl RegimeSpec {
    /// `(rule label, h, N)` for every cell, sorted by `(N, h)`.
    pub fn cells(&self) -> Vec<(String, i64, i64)> {
        if self.regime == Regime::TZero {
            let mut ns = self.ns.values();
            ns.sort_unstable();
            ns.dedup();
            return ns.into_iter().map(|n| ("h=0".to_string(), 0, n)).collect();
        }
        let grid = self.grid();
        grid.cells()
            .into_iter()
            .map(|(i, h, n)| (grid.rules[i].label(), h, n))
            .collect()
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.ns.values(), self.rules.clone())
    }

    pub fn describe(&self) -> String {
        if self.regime == Regime::TZero {
            format!("N in {:?}; h=0", self.ns.values())
        } else {
            self.grid().describe()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub method: MethodChoice,
    pub regimes: Vec<RegimeSpec>,
    pub caps: CounterCaps,
    pub thresholds: Thresholds,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
    pub seed: u64,
    pub cache: PathBuf,
    /// Directory receiving one report per regime.
    pub reports: PathBuf,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let geometric = |start, end| NsSpec::Geometric { start, end, factor: 2 };
        Self {
            method: MethodChoice::Auto,
            regimes: vec![
                RegimeSpec {
                    regime: Regime::Thm1,
                    ns: geometric(250, 4000),
                    rules: vec![
                        HRule::Constant { value: 1 },
                        HRule::Constant { value: 12 },
                        HRule::Proportional { num: 1, den: 2 },
                    ],
                },
                RegimeSpec {
                    regime: Regime::Thm2,
                    ns: geometric(250, 4000),
                    rules: vec![
                        HRule::SquarePlus { num: 0, den: 1 },
                        HRule::SquarePlus { num: 1, den: 2 },
                        HRule::SquarePlus { num: -1, den: 2 },
                    ],
                },
                RegimeSpec {
                    regime: Regime::Prop13,
                    ns: NsSpec::List(vec![100, 200, 400, 800]),
                    rules: vec![HRule::Power { delta: 0.5 }],
                },
                RegimeSpec {
                    regime: Regime::TZero,
                    ns: geometric(100, 3200),
                    rules: Vec::new(),
                },
            ],
            caps: CounterCaps::default(),
            thresholds: Thresholds::default(),
            workers: 0,
            seed: 0,
            cache: PathBuf::from("detcount-cache.jsonl"),
            reports: PathBuf::from("reports"),
        }
    }
}

impl SweepConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
    }

    /// The file at `path`, or the defaults when no path is given.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn validate(&self) -> Result<()> {
        if self.regimes.is_empty() {
            return Err(HarnessError::Config("no regimes configured".into()));
        }
        for spec in &self.regimes {
            let ns = spec.ns.values();
            let name = spec.regime.as_str();
            if ns.is_empty() {
                return Err(HarnessError::Config(format!("{name}: empty N grid")));
            }
            if ns.iter().any(|&n| n < 1) {
                return Err(HarnessError::Config(format!("{name}: N values must be positive")));
            }
            let mut distinct = ns.clone();
            distinct.sort_unstable();
            distinct.dedup();
            if distinct.len() < 4 {
                return Err(HarnessError::Config(format!(
                    "{name}: a fit needs at least 4 distinct N values, got {}",
                    distinct.len()
                )));
            }
            if spec.regime != Regime::TZero && spec.rules.is_empty() {
                return Err(HarnessError::Config(format!("{name}: no h rules")));
            }
            let smallest = *ns.iter().min().expect("non-empty");
            let fits = match self.method {
                MethodChoice::Auto => self.caps.auto_method(smallest).is_ok(),
                MethodChoice::Fixed(Method::Naive) => smallest <= self.caps.naive,
                MethodChoice::Fixed(Method::Hyperbola) => smallest <= self.caps.hyperbola,
                MethodChoice::Fixed(Method::Linear) => smallest <= self.caps.linear,
                MethodChoice::Fixed(Method::TTilde) => true,
            };
            if !fits {
                return Err(HarnessError::Config(format!(
                    "{name}: counter caps are below the smallest grid value N={smallest}"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = SweepConfig::default();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back: SweepConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
        cfg.validate().unwrap();
    }

    #[test]
    fn partial_documents_fill_defaults() {
        let cfg: SweepConfig = serde_json::from_str(r#"{"seed": 7, "method": "linear"}"#).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.method, MethodChoice::Fixed(Method::Linear));
        assert_eq!(cfg.regimes.len(), 4);
    }

    #[test]
    fn explicit_and_geometric_grids() {
        let spec: RegimeSpec = serde_json::from_str(
            r#"{"regime": "thm1", "ns": {"start": 10, "end": 40, "factor": 2}, "rules": [{"kind": "constant", "value": 3}]}"#,
        )
        .unwrap();
        assert_eq!(spec.ns.values(), vec![10, 20, 40]);
        let spec: RegimeSpec = serde_json::from_str(r#"{"regime": "t_zero", "ns": [5, 3, 5]}"#).unwrap();
        assert_eq!(spec.cells(), vec![("h=0".into(), 0, 3), ("h=0".into(), 0, 5)]);
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = SweepConfig::default();
        cfg.regimes[0].ns = NsSpec::List(vec![]);
        assert!(cfg.validate().is_err());
        let mut cfg = SweepConfig::default();
        cfg.regimes[1].ns = NsSpec::List(vec![10, 20, 20, 40]);
        assert!(cfg.validate().is_err());
        let mut cfg = SweepConfig::default();
        cfg.caps.hyperbola = 10;
        cfg.caps.linear = 10;
        assert!(cfg.validate().is_err());
        assert!(serde_json::from_str::<SweepConfig>(r#"{"bogus": 1}"#).is_err());
        assert!("fastest".parse::<MethodChoice>().is_err());
    }
}
