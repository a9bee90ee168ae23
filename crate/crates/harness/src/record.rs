use detcount::asymptotics::{self, AsymptoticPoint};
use detcount::counting::Method;
use detcount::format_fraction;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// One completed cell, as stored in the cache and printed by `count`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema_version: u32,
    pub h: i64,
    #[serde(rename = "N")]
    pub n: i64,
    pub method: Method,
    pub count: i64,
    pub mt1: f64,
    pub mt2: f64,
    pub e1: f64,
    pub e2: f64,
    /// `(h - N^2)/N` as `p/q`.
    pub sigma: String,
    pub elapsed_ns: u64,
    pub timestamp: String,
}

impl ResultRecord {
    pub fn new(h: i64, n: i64, method: Method, count: i64, elapsed_ns: u64) -> detcount::Result<Self> {
        let p = point_for(h, n, count)?;
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            h,
            n,
            method,
            count,
            mt1: p.mt1,
            mt2: p.mt2,
            e1: p.e1,
            e2: p.e2,
            sigma: format_fraction(&p.sigma),
            elapsed_ns,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
        })
    }

    pub fn point(&self) -> detcount::Result<AsymptoticPoint> {
        point_for(self.h, self.n, self.count)
    }

    /// Whether the count is `T(h, N)` itself rather than the progression
    /// approximation.
    pub fn is_exact(&self) -> bool {
        self.method.is_exact()
    }
}

/// Main terms and errors for a count. `h = 0` uses the `N^2 log N` term;
/// negative `h` uses the main terms of `|h|`.
pub fn point_for(h: i64, n: i64, count: i64) -> detcount::Result<AsymptoticPoint> {
    if h == 0 {
        return Ok(asymptotics::zero_point(n, count).point);
    }
    let mut p = AsymptoticPoint::new(h.abs(), n, count)?;
    p.h = h;
    p.sigma = detcount::decomposition::sigma(h, n);
    Ok(p)
}
