//! Exhaustive and sampled identity checks, plus the fitted-constant
//! campaigns for the decomposition bounds.
//!
//! Every suite returns a [`SuiteOutcome`] with the number of cases checked
//! and the first few violating tuples.

use std::collections::BTreeMap;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{self, DivisorTables};
use crate::asymptotics::{fit_exponent, zeta2, Grid, HRule};
use crate::counting::{self, CounterCaps, HyperbolaProfile};
use crate::decomposition::{self, B0Mapping, ProgressionCell};
use crate::{Error, Rational, Result};

const KEPT_FAILURES: usize = 10;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub checked: u64,
    pub failed: u64,
    /// The first violations, rendered with their inputs.
    pub failures: Vec<String>,
    /// Monitored quantities, such as the largest ratio seen.
    pub metrics: BTreeMap<String, f64>,
}

impl SuiteOutcome {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            ..Self::default()
        }
    }

    pub fn pass(&self) -> bool {
        self.failed == 0 && self.checked > 0
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < KEPT_FAILURES {
                self.failures.push(describe());
            }
        }
    }

    fn raise(&mut self, key: &str, value: f64) {
        let slot = self.metrics.entry(key.into()).or_insert(f64::NEG_INFINITY);
        if value > *slot {
            *slot = value;
        }
    }

    fn absorb(&mut self, other: SuiteOutcome) {
        self.checked += other.checked;
        self.failed += other.failed;
        for f in other.failures {
            if self.failures.len() < KEPT_FAILURES {
                self.failures.push(f);
            }
        }
        for (k, v) in other.metrics {
            self.raise(&k, v);
        }
    }

    pub fn summary(&self) -> String {
        let status = if self.pass() { "PASS" } else { "FAIL" };
        let mut line = format!("{status} {}: {}/{} ok", self.name, self.checked - self.failed, self.checked);
        for (k, v) in &self.metrics {
            line.push_str(&format!(", {k}={v:.6}"));
        }
        line
    }
}

/// Which group of suites to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Lemmas,
    Identities,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lemmas" => Ok(Suite::Lemmas),
            "identities" => Ok(Suite::Identities),
            "all" => Ok(Suite::All),
            other => Err(Error::Domain(format!("unknown suite {other:?}; expected lemmas, identities or all"))),
        }
    }
}

/// Run a suite group at its standard sizes.
pub fn run(suite: Suite, seed: u64) -> Result<Vec<SuiteOutcome>> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Lemmas | Suite::All) {
        out.push(unit_classes(2000, 20, seed)?);
        out.push(congruence_bound(1000, 20, seed)?);
        out.push(ramanujan_identity(500, 500)?);
        out.push(gcd_sum_monitor(400, seed)?);
        out.push(coprime_ranges(10_000, seed)?);
        out.push(fourier_truncation(100_000, 2.0, seed)?);
        out.push(table_identities(1 << 20)?);
    }
    if matches!(suite, Suite::Identities | Suite::All) {
        out.push(counter_agreement(6, 300, seed)?);
        out.push(progression_regimes(50, 10, 10_000, seed)?);
        out.push(solution_line_identity(400, 20, decomposition::b0_in_one_to_y)?);
        out.push(upper_branch_observation(400, 20)?);
        out.push(s_function_checks(10_000)?);
        out.push(aggregated_identity(12)?);
    }
    Ok(out)
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Units modulo `u` are equidistributed over the unit classes modulo each
/// `q | u`: every class holds exactly `phi(u) / phi(q)` of them.
pub fn unit_classes(max_u: i64, per_class: usize, seed: u64) -> Result<SuiteOutcome> {
    let tables = DivisorTables::build(max_u as usize)?;
    let results: Vec<SuiteOutcome> = (1..=max_u)
        .into_par_iter()
        .map(|u| {
            let mut out = SuiteOutcome::new("unit classes");
            let mut r = rng(seed, u as u64);
            let units: Vec<i64> = if u == 1 {
                vec![0]
            } else {
                (1..u).filter(|v| v.gcd(&u) == 1).collect()
            };
            for q in tables.divisors(u as u64).unwrap_or_default() {
                let q = q as i64;
                let mut hist = vec![0u64; q as usize];
                for v in &units {
                    hist[(v % q) as usize] += 1;
                }
                let expect = tables.phi(u as usize) / tables.phi(q as usize);
                for i in 0..per_class {
                    let class = loop {
                        let c = r.gen_range(0..q.max(1));
                        if c.gcd(&q) == 1 {
                            break c;
                        }
                    };
                    let shift = r.gen_range(-5..=5i64) * q;
                    let rep = class + shift;
                    let got = if i == 0 {
                        match arith::coprime_residue_count(u, q, rep) {
                            Ok(c) => c,
                            Err(_) => u64::MAX,
                        }
                    } else {
                        hist[class as usize]
                    };
                    out.record(got == expect, || format!("u={u} q={q} r={rep}: count {got}, expected {expect}"));
                }
            }
            out
        })
        .collect();
    Ok(merge("unit classes", results))
}

/// `#{t unit mod y : t m = z (mod y)} <= gcd(y, m)`.
pub fn congruence_bound(max_y: i64, per_y: usize, seed: u64) -> Result<SuiteOutcome> {
    let results: Vec<SuiteOutcome> = (1..=max_y)
        .into_par_iter()
        .map(|y| {
            let mut out = SuiteOutcome::new("congruence bound");
            let mut r = rng(seed, y as u64);
            let units: Vec<i64> = (1..=y).filter(|t| t.gcd(&y) == 1).collect();
            for i in 0..per_y {
                let m = r.gen_range(1..=10_000i64);
                let g = y.gcd(&m);
                // Half the targets are multiples of gcd(y, m), the only
                // ones that can have solutions.
                let z = if i % 2 == 0 {
                    g * r.gen_range(1..=y / g)
                } else {
                    r.gen_range(1..=y)
                };
                let hits = units.iter().filter(|&&t| (t * m - z).rem_euclid(y) == 0).count() as i64;
                out.record(hits <= g, || format!("y={y} m={m} z={z}: {hits} solutions > gcd {g}"));
                out.raise("max solutions / gcd", hits as f64 / g as f64);
            }
            out
        })
        .collect();
    Ok(merge("congruence bound", results))
}

/// The divisor form of `c_y(n)` matches the exponential sum, and obeys
/// `|c_y(n)| <= sum_{d | (n, y)} d`.
pub fn ramanujan_identity(max_y: i64, max_n: i64) -> Result<SuiteOutcome> {
    let results: Vec<Result<SuiteOutcome>> = (1..=max_y)
        .into_par_iter()
        .map(|y| {
            let mut out = SuiteOutcome::new("ramanujan sums");
            // The exponential sum depends on n only modulo y.
            let mut direct = Vec::with_capacity(y as usize);
            for n in 0..y {
                direct.push(arith::ramanujan_sum_direct(y, n)?);
            }
            for n in -max_n..=max_n {
                let exact = arith::ramanujan_sum(y, n)?;
                let float = direct[n.rem_euclid(y) as usize];
                let residual = (float - exact as f64).abs();
                out.raise("max float residual", residual);
                let bound = arith::ramanujan_bound(y, n)?;
                out.record(float.round() as i64 == exact && residual < 1e-6 && exact.abs() <= bound, || {
                    format!("y={y} n={n}: divisor form {exact}, direct {float}, bound {bound}")
                });
            }
            Ok(out)
        })
        .collect();
    let results: Result<Vec<_>> = results.into_iter().collect();
    Ok(merge("ramanujan sums", results?))
}

/// Monitors `sum_{y <= M} gcd(y, m) / (M m^0.1)` for `m <= 10^6` and
/// `M <= 10^4`; the constant is reported, never asserted.
pub fn gcd_sum_monitor(samples: usize, seed: u64) -> Result<SuiteOutcome> {
    let mut r = rng(seed, 0x6cd);
    let cells: Vec<(i64, i64)> = (0..samples)
        .map(|_| (r.gen_range(1..=1_000_000i64), r.gen_range(1..=10_000i64)))
        .collect();
    let ratios: Vec<(i64, i64, i64, f64)> = cells
        .par_iter()
        .map(|&(m, big_m)| {
            let s = arith::gcd_sum(m, big_m);
            (m, big_m, s, s as f64 / (big_m as f64 * (m as f64).powf(0.1)))
        })
        .collect();
    let mut out = SuiteOutcome::new("gcd sums");
    for (m, big_m, s, ratio) in ratios {
        // The sum is at least M (every gcd is at least 1) and at most the
        // divisor-sum bound from grouping by gcd.
        let upper: i64 = arith::divisors(m as u64)?
            .iter()
            .map(|&k| k as i64)
            .filter(|&k| k <= big_m)
            .map(|k| k * (big_m / k))
            .sum();
        out.record(s >= big_m && s <= upper, || format!("m={m} M={big_m}: sum {s} outside [{big_m}, {upper}]"));
        out.raise("C at eps=0.1", ratio);
    }
    Ok(out)
}

/// `|#{n in [Y, Y + X) : (n, q) = 1} - phi(q) X / q| <= tau'(q)`, with the
/// count also compared against direct enumeration.
pub fn coprime_ranges(samples: usize, seed: u64) -> Result<SuiteOutcome> {
    let mut r = rng(seed, 0x24);
    let cells: Vec<(i64, i64, i64)> = (0..samples)
        .map(|_| {
            (
                r.gen_range(-1_000_000..=1_000_000i64),
                r.gen_range(1..=10_000i64),
                r.gen_range(1..=1_000_000i64),
            )
        })
        .collect();
    let results: Vec<Result<SuiteOutcome>> = cells
        .par_iter()
        .map(|&(start, len, q)| {
            let mut out = SuiteOutcome::new("coprime ranges");
            let primes: Vec<i64> = arith::factorize(q as u64)?.iter().map(|&(p, _)| p as i64).collect();
            let direct = (start..start + len)
                .filter(|n| primes.iter().all(|p| n.rem_euclid(*p) != 0))
                .count() as i64;
            let count = arith::coprime_range_count(start, len, q)?;
            let phi = arith::totient(q as u64)? as f64;
            let tau_prime = (1u64 << primes.len()) as f64;
            let err = (count as f64 - phi * len as f64 / q as f64).abs();
            out.raise("max error / tau'(q)", err / tau_prime);
            out.record(count == direct && err <= tau_prime, || {
                format!("Y={start} X={len} q={q}: count {count}, direct {direct}, error {err} vs tau' {tau_prime}")
            });
            Ok(out)
        })
        .collect();
    let results: Result<Vec<_>> = results.into_iter().collect();
    Ok(merge("coprime ranges", results?))
}

/// `|psi(theta) - truncated series| <= constant * min{1, 1/(Q ||theta||)}`
/// over random `(theta, Q)`.
pub fn fourier_truncation(samples: usize, constant: f64, seed: u64) -> Result<SuiteOutcome> {
    let mut r = rng(seed, 0xf0);
    let mut out = SuiteOutcome::new("saw-tooth series");
    for i in 0..samples {
        // A share of the sample sits on or next to the jumps.
        let theta = match i % 10 {
            0 => r.gen_range(-50..=50i64) as f64,
            1 => r.gen_range(-50..=50i64) as f64 + r.gen_range(-1e-3..1e-3),
            _ => r.gen_range(-50.0..50.0),
        };
        let q = r.gen_range(1.0..300.0);
        let fa = arith::sawtooth_fourier(theta, q)?;
        let err = (arith::sawtooth(theta) - fa.approx).abs();
        out.raise("max error / bound", err / fa.bound);
        out.record(err <= constant * fa.bound, || {
            format!("theta={theta} Q={q}: error {err} > {constant} * {}", fa.bound)
        });
    }
    Ok(out)
}

/// `sum_{d | n} phi(d) = n` and `sum_{d | n} mu(d) = [n = 1]`, plus the
/// square-free divisor count, for every `n <= limit`.
pub fn table_identities(limit: usize) -> Result<SuiteOutcome> {
    let t = DivisorTables::build(limit)?;
    let mut phi_sum = vec![0u64; limit + 1];
    let mut mu_sum = vec![0i64; limit + 1];
    let mut sqfree = vec![0u64; limit + 1];
    for d in 1..=limit {
        let (p, m) = (t.phi(d), t.mu(d));
        for k in (d..=limit).step_by(d) {
            phi_sum[k] += p;
            mu_sum[k] += m;
            sqfree[k] += m.unsigned_abs();
        }
    }
    let mut out = SuiteOutcome::new("divisor tables");
    for n in 1..=limit {
        let ok = phi_sum[n] == n as u64 && mu_sum[n] == (n == 1) as i64 && sqfree[n] == t.tau_prime(n);
        out.record(ok, || {
            format!(
                "n={n}: sum phi {} sum mu {} tau' {} vs {}",
                phi_sum[n],
                mu_sum[n],
                t.tau_prime(n),
                sqfree[n]
            )
        });
    }
    Ok(out)
}

/// Naive, hyperbola and linear counts agree on every `h` in `[1, 2N^2]`
/// for `N <= max_small_n`; hyperbola and linear agree on random cells with
/// `10 <= N <= 300`.
pub fn counter_agreement(max_small_n: i64, random_cells: usize, seed: u64) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("counter agreement");
    for n in 1..=max_small_n {
        let profile = HyperbolaProfile::build(n)?;
        for h in 1..=2 * n * n {
            let a = counting::count_naive(h, n)?.count;
            let b = counting::count_hyperbola(h, n, &profile)?.count;
            let c = counting::count_linear(h, n)?.count;
            out.record(a == b && b == c, || format!("h={h} N={n}: naive {a}, hyperbola {b}, linear {c}"));
        }
    }
    let mut r = rng(seed, 0xa9);
    let mut by_n: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    for _ in 0..random_cells {
        let n = r.gen_range(10..=300i64);
        let h = r.gen_range(1..=2 * n * n);
        by_n.entry(n).or_default().push(h);
    }
    let results: Vec<Result<SuiteOutcome>> = by_n
        .into_par_iter()
        .map(|(n, hs)| {
            let mut out = SuiteOutcome::new("counter agreement");
            let profile = HyperbolaProfile::build(n)?;
            for h in hs {
                let b = counting::count_hyperbola(h, n, &profile)?.count;
                let c = counting::count_linear(h, n)?.count;
                out.record(b == c, || format!("h={h} N={n}: hyperbola {b}, linear {c}"));
            }
            Ok(out)
        })
        .collect();
    for res in results {
        out.absorb(res?);
    }
    Ok(out)
}

/// Progression-count regimes: `r~ >= r`, equality below `N(u - v)`, the
/// tail recount in between, and `r = 0`, `|r~ - 2N/u| <= 5` above
/// `N(u + v)`. Exhaustive for small cells, then random larger ones.
pub fn progression_regimes(max_h: i64, max_n: i64, random_cells: usize, seed: u64) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("progression regimes");
    for big_n in 1..=max_n {
        for h in 1..=max_h.min(2 * big_n * big_n) {
            for d in arith::divisors(h as u64)? {
                let d = d as i64;
                if d > big_n {
                    continue;
                }
                for u in 2..=big_n / d {
                    for v in 1..u {
                        if u.gcd(&v) != 1 {
                            continue;
                        }
                        let cell = ProgressionCell::new(d, u, v, h / d, big_n)?;
                        let verdict = cell.check();
                        out.record(verdict.is_ok(), || format!("{cell:?}: {}", verdict.unwrap_err()));
                    }
                }
            }
        }
    }
    let mut r = rng(seed, 0x3c);
    let mut cells = Vec::with_capacity(random_cells);
    while cells.len() < random_cells {
        let big_n = r.gen_range(11..=2000i64);
        let u = r.gen_range(2..=big_n);
        let v = r.gen_range(1..u);
        if u.gcd(&v) != 1 {
            continue;
        }
        // Spread n over the three regimes.
        let n = match cells.len() % 3 {
            0 => r.gen_range(1..=big_n * (u - v)),
            1 => r.gen_range(big_n * (u - v)..=big_n * (u + v)),
            _ => r.gen_range(big_n * (u + v)..=big_n * (u + v) + 2 * big_n * big_n),
        };
        cells.push((u, v, n, big_n));
    }
    let results: Vec<Result<SuiteOutcome>> = cells
        .par_iter()
        .map(|&(u, v, n, big_n)| {
            let mut out = SuiteOutcome::new("progression regimes");
            let cell = ProgressionCell::new(1, u, v, n, big_n)?;
            let verdict = cell.check();
            out.record(verdict.is_ok(), || format!("{cell:?}: {}", verdict.unwrap_err()));
            Ok(out)
        })
        .collect();
    for res in results {
        out.absorb(res?);
    }
    Ok(out)
}

/// For every coprime `x, y <= N` with `N(x + y) > m`, the floor formula,
/// a scan over `k`, and a direct count of `(b, d)` with `bx + dy = m` all
/// agree, and the line itself is well formed.
pub fn solution_line_identity(max_m: i64, max_n: i64, mapping: B0Mapping) -> Result<SuiteOutcome> {
    let results: Vec<Result<SuiteOutcome>> = (1..=max_n)
        .into_par_iter()
        .map(|big_n| {
            let mut out = SuiteOutcome::new("solution lines");
            for m in 1..=max_m {
                for x in 1..=big_n {
                    for y in 1..=big_n {
                        if big_n * (x + y) <= m || x.gcd(&y) != 1 {
                            continue;
                        }
                        let line = decomposition::solution_line_with(x, y, m, big_n, mapping)?;
                        let formula = line.floor_formula_count();
                        let scan = line.scan_count();
                        let direct = decomposition::direct_bd_count(x, y, m, big_n);
                        let shape = line.check();
                        out.record(formula == scan && scan == direct && formula >= 0 && shape.is_ok(), || {
                            format!(
                                "x={x} y={y} m={m} N={big_n}: formula {formula}, scan {scan}, direct {direct}, line {:?}",
                                shape.err()
                            )
                        });
                    }
                }
            }
            Ok(out)
        })
        .collect();
    let results: Result<Vec<_>> = results.into_iter().collect();
    Ok(merge("solution lines", results?))
}

/// `V = (N - b0)/y` whenever `x <= M - (1 - sigma)/r`, for every `r | h`,
/// `r <= N`, with `m = h/r` and `M = N/r`.
pub fn upper_branch_observation(max_h: i64, max_n: i64) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("upper endpoint branch");
    for big_n in 1..=max_n {
        for h in 1..=max_h.min(2 * big_n * big_n) {
            for r in arith::divisors(h as u64)? {
                let r = r as i64;
                if r > big_n {
                    continue;
                }
                let top = big_n / r;
                for x in 1..=top {
                    // x <= (N - 1 + sigma)/r  <=>  N(r x + 1) <= h
                    if big_n * (r * x + 1) > h {
                        continue;
                    }
                    for y in 1..=top {
                        if x.gcd(&y) != 1 || r * (x + y) <= big_n {
                            continue;
                        }
                        let line = decomposition::solution_line(x, y, h / r, big_n)?;
                        out.record(decomposition::upper_is_first_branch(&line), || {
                            format!("h={h} N={big_n} r={r} x={x} y={y}: V={}", line.upper)
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Both evaluations of `S(X)` agree, and `|S(X) - (2 - zeta(2)) X| <= 2`
/// for every integer `X <= max_x` and a spread of fractional `X`.
pub fn s_function_checks(max_x: i64) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("two-variable sum");
    let slope = 2.0 - zeta2();
    let mut compare: Vec<f64> = (1..=200).map(|x| x as f64).collect();
    compare.extend([250.5, 317.25, 1000.0, 2048.0, 4999.5]);
    compare.push(max_x as f64);
    for x in compare {
        let fast = decomposition::s_function(x)?;
        let slow = decomposition::s_function_direct(x)?;
        let rel = (fast - slow).abs() / slow.abs().max(1.0);
        out.raise("max relative disagreement", rel);
        out.record(rel <= 1e-9, || format!("X={x}: harmonic {fast}, direct {slow}"));
    }
    let mut points: Vec<f64> = (1..=max_x).map(|x| x as f64).collect();
    points.extend((0..1000).map(|i| 1.0 + i as f64 * 9.973));
    for x in points {
        let dev = (decomposition::s_function(x)? - slope * x).abs();
        out.raise("max |S(X) - (2 - zeta(2))X|", dev);
        out.record(dev <= 2.0, || format!("X={x}: deviation {dev}"));
    }
    Ok(out)
}

/// Grouping `ab + cd = h` over positive entries by `r = gcd(a, c)`:
/// `sum_{r | h, r <= N} sum_{coprime x, y <= N/r} #{(b, d) : bx + dy = h/r}`
/// equals the number of positive quadruples, for every `h <= 2N^2`.
pub fn aggregated_identity(max_n: i64) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("aggregated identity");
    for big_n in 1..=max_n {
        let profile = HyperbolaProfile::build(big_n)?;
        // Representations by positive pairs are half of the signed ones.
        let pos = |k: i64| profile.r(k) as i64 / 2;
        for h in 1..=2 * big_n * big_n {
            let quadruples: i64 = (1..h).map(|j| pos(j) * pos(h - j)).sum();
            let mut grouped = 0i64;
            for r in arith::divisors(h as u64)? {
                let r = r as i64;
                if r > big_n {
                    continue;
                }
                let top = big_n / r;
                for x in 1..=top {
                    for y in 1..=top {
                        if x.gcd(&y) == 1 {
                            grouped += decomposition::direct_bd_count(x, y, h / r, big_n);
                        }
                    }
                }
            }
            out.record(grouped == quadruples, || {
                format!("h={h} N={big_n}: grouped {grouped}, quadruples {quadruples}")
            });
        }
    }
    Ok(out)
}

fn merge(name: &str, parts: Vec<SuiteOutcome>) -> SuiteOutcome {
    let mut out = SuiteOutcome::new(name);
    for p in parts {
        out.absorb(p);
    }
    out
}

/// One cell of a fitted-constant campaign.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub label: String,
    #[serde(rename = "N")]
    pub n: i64,
    pub h: i64,
    pub value: f64,
    pub scale: f64,
    pub ratio: f64,
}

/// A family of `value <= C * scale` observations with the smallest
/// admissible `C` and the growth exponent of `|value|` in `N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantFit {
    pub name: String,
    pub rows: Vec<FitRow>,
    #[serde(rename = "C")]
    pub c: f64,
    /// Least-squares exponent of `|value|` in `N` over the nonzero rows.
    pub alpha: Option<f64>,
}

impl ConstantFit {
    fn from_rows(name: &str, rows: Vec<FitRow>) -> Self {
        let c = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.value != 0.0)
            .map(|r| (r.n as f64, r.value.abs()))
            .collect();
        let alpha = fit_exponent(&pts).ok().map(|f| f.alpha);
        Self {
            name: name.into(),
            rows,
            c,
            alpha,
        }
    }

    pub fn bounded(&self) -> bool {
        !self.rows.is_empty() && self.c.is_finite()
    }
}

/// `|T~(h, N) - T(h, N)| <= C N^0.1 (h + N)` over a grid.
pub fn progression_gap_fit(grid: &Grid, caps: &CounterCaps) -> Result<ConstantFit> {
    let cells = grid.cells();
    let exact = crate::asymptotics::exact_counts(&cells.iter().map(|c| (c.1, c.2)).collect::<Vec<_>>(), caps);
    let labels: BTreeMap<(i64, i64), String> =
        cells.iter().map(|c| ((c.1, c.2), grid.rules[c.0].label())).collect();
    let rows: Vec<Result<FitRow>> = exact
        .into_par_iter()
        .map(|(h, n, res)| {
            let (_, t) = res?;
            let tt = decomposition::t_tilde(h, n)?;
            let value = (tt - t) as f64;
            let scale = (n as f64).powf(0.1) * (h + n) as f64;
            Ok(FitRow {
                label: labels[&(h, n)].clone(),
                n,
                h,
                value,
                scale,
                ratio: value.abs() / scale,
            })
        })
        .collect();
    let rows: Result<Vec<_>> = rows.into_iter().collect();
    Ok(ConstantFit::from_rows("|T~ - T| / (N^0.1 (h+N))", rows?))
}

/// Coprime main-term sum against `(2/zeta(2) - 1) N^2 sigma_{-1}(h)`,
/// normalised by `N^1.1`.
pub fn mainterm_fit(ns: &[i64], hs: &[HRule]) -> Result<ConstantFit> {
    let mut cells = Vec::new();
    for &n in ns {
        for rule in hs {
            cells.push((rule.label(), rule.apply(n), n));
        }
    }
    let constant = 2.0 / zeta2() - 1.0;
    let rows: Vec<Result<FitRow>> = cells
        .into_par_iter()
        .map(|(label, h, n)| {
            let lhs = decomposition::mainterm_lhs(h, n)?;
            let rhs = constant * (n * n) as f64 * arith::to_f64(&arith::sigma_inv(h)?);
            let value = lhs - rhs;
            let scale = (n as f64).powf(1.1);
            Ok(FitRow {
                label,
                n,
                h,
                value,
                scale,
                ratio: value.abs() / scale,
            })
        })
        .collect();
    let rows: Result<Vec<_>> = rows.into_iter().collect();
    Ok(ConstantFit::from_rows("|LHS - (2/zeta(2)-1) N^2 sigma_-1(h)| / N^1.1", rows?))
}

/// The three boundary sums at `h = N^2` and `r = 1`, each against its
/// bound: `M (N^0.1 + |sigma/r|)` for the saw-tooth sums and `M m^0.1` for
/// the integrality count.
pub fn sawtooth_fits(ns: &[i64]) -> Result<Vec<ConstantFit>> {
    let sums: Vec<Result<decomposition::SawtoothSums>> =
        ns.par_iter().map(|&n| decomposition::sawtooth_sums(n * n, n, 1)).collect();
    let mut psi_v = Vec::new();
    let mut psi_u = Vec::new();
    let mut ind = Vec::new();
    for s in sums {
        let s = s?;
        let n = s.big_n;
        let big_m = n as f64 / s.r as f64;
        let sig = decomposition::sigma(s.h, n) / Rational::from_integer(s.r);
        let psi_scale = big_m * ((n as f64).powf(0.1) + arith::abs_f64(&sig));
        let ind_scale = big_m * (s.m as f64).powf(0.1);
        let row = |value: f64, scale: f64| FitRow {
            label: "h=N^2, r=1".into(),
            n,
            h: s.h,
            value,
            scale,
            ratio: value.abs() / scale,
        };
        psi_v.push(row(s.sum_psi_v, psi_scale));
        psi_u.push(row(s.sum_psi_u, psi_scale));
        ind.push(row(s.sum_indicator_u as f64, ind_scale));
    }
    Ok(vec![
        ConstantFit::from_rows("|sum psi(V)| / (M (N^0.1 + |sigma/r|))", psi_v),
        ConstantFit::from_rows("|sum psi(U)| / (M (N^0.1 + |sigma/r|))", psi_u),
        ConstantFit::from_rows("sum 1_Z(U) / (M m^0.1)", ind),
    ])
}

/// Default grid for the progression-gap fit.
pub fn progression_gap_grid() -> Grid {
    Grid::new(
        Grid::geometric(250, 4000, 2),
        vec![
            HRule::Constant { value: 1 },
            HRule::Constant { value: 12 },
            HRule::Proportional { num: 1, den: 2 },
        ],
    )
}

/// Default `h` rules for the main-term fit.
pub fn mainterm_rules() -> Vec<HRule> {
    vec![
        HRule::Constant { value: 1 },
        HRule::Constant { value: 12 },
        HRule::Proportional { num: 1, den: 1 },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        assert!(unit_classes(60, 3, 1).unwrap().pass());
        assert!(congruence_bound(60, 5, 1).unwrap().pass());
        assert!(ramanujan_identity(30, 40).unwrap().pass());
        assert!(coprime_ranges(200, 1).unwrap().pass());
        assert!(fourier_truncation(2000, 2.0, 1).unwrap().pass());
        assert!(table_identities(5000).unwrap().pass());
        assert!(counter_agreement(3, 10, 1).unwrap().pass());
        assert!(progression_regimes(12, 5, 200, 1).unwrap().pass());
        assert!(solution_line_identity(60, 8, decomposition::b0_in_one_to_y).unwrap().pass());
        assert!(upper_branch_observation(60, 8).unwrap().pass());
        assert!(aggregated_identity(5).unwrap().pass());
    }

    #[test]
    fn zero_based_b0_is_caught() {
        fn zero_based(residue: i64, _y: i64) -> i64 {
            residue
        }
        let out = solution_line_identity(60, 8, zero_based).unwrap();
        assert!(out.failed > 0);
        assert!(!out.failures.is_empty());
    }

    #[test]
    fn outcomes_are_deterministic() {
        assert_eq!(coprime_ranges(100, 7).unwrap(), coprime_ranges(100, 7).unwrap());
        assert_eq!(gcd_sum_monitor(20, 7).unwrap(), gcd_sum_monitor(20, 7).unwrap());
    }

    #[test]
    fn suite_names_parse() {
        assert_eq!("lemmas".parse::<Suite>().unwrap(), Suite::Lemmas);
        assert!("bogus".parse::<Suite>().is_err());
    }
}
