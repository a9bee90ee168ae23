//! Exact counters for `T(h, N)`, the number of integer matrices
//! `[[a, b], [c, d]]` with `|a|, |b|, |c|, |d| <= N` and `ad - bc = h`.
//!
//! Three independent algorithms are provided so that each can serve as
//! an oracle for the others:
//!
//! * [`count_naive`] enumerates all `(2N+1)^4` tuples.
//! * [`count_hyperbola`] correlates the hyperbola profile
//!   `R(n) = #{(a, d) : ad = n}` with its shift by `h`, in `O(N^2)`.
//! * [`count_linear`] fixes the first row `(a, b)` and counts the lattice
//!   points `(c, d)` on the line `ad - bc = h` inside the box.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::arith::{ceil_div, ext_gcd, floor_div};
use crate::error::{Error, Result};

/// Which algorithm produced a [`CountResult`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Naive,
    Hyperbola,
    Linear,
    /// The progression approximant; not an exact count of `T(h, N)`.
    TTilde,
}

impl Method {
    pub fn is_exact(self) -> bool {
        !matches!(self, Method::TTilde)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Naive => "naive",
            Method::Hyperbola => "hyperbola",
            Method::Linear => "linear",
            Method::TTilde => "t_tilde",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Method::Naive),
            "hyperbola" => Ok(Method::Hyperbola),
            "linear" => Ok(Method::Linear),
            "t_tilde" => Ok(Method::TTilde),
            other => Err(Error::Domain(format!("unknown counting method `{other}`"))),
        }
    }
}

/// Largest `N` each counter accepts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CounterCaps {
    pub naive: i64,
    pub hyperbola: i64,
    pub linear: i64,
}

impl Default for CounterCaps {
    fn default() -> Self {
        Self {
            naive: 15,
            hyperbola: 4096,
            linear: 20_000,
        }
    }
}

impl CounterCaps {
    fn check(&self, method: Method, n: i64) -> Result<()> {
        let cap = match method {
            Method::Naive => self.naive,
            Method::Hyperbola => self.hyperbola,
            Method::Linear | Method::TTilde => self.linear,
        };
        check_n(n)?;
        if n > cap {
            return Err(Error::Capacity {
                what: match method {
                    Method::Naive => "N for the naive counter",
                    Method::Hyperbola => "N for the hyperbola counter",
                    Method::Linear => "N for the linear counter",
                    Method::TTilde => "N for the progression approximant",
                },
                requested: n as u64,
                cap: cap as u64,
            });
        }
        Ok(())
    }

    /// The fastest exact method whose cap admits `n`.
    pub fn auto_method(&self, n: i64) -> Result<Method> {
        check_n(n)?;
        if n <= self.hyperbola {
            Ok(Method::Hyperbola)
        } else if n <= self.linear {
            Ok(Method::Linear)
        } else {
            Err(Error::Capacity {
                what: "N for every exact counter",
                requested: n as u64,
                cap: self.hyperbola.max(self.linear) as u64,
            })
        }
    }
}

fn check_n(n: i64) -> Result<()> {
    if n < 1 {
        return Err(Error::Domain(format!("N must be positive, got {n}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountResult {
    pub h: i64,
    #[serde(rename = "N")]
    pub n: i64,
    pub method: Method,
    pub count: i64,
    pub elapsed_ns: u64,
}

fn timed(h: i64, n: i64, method: Method, f: impl FnOnce() -> i64) -> CountResult {
    let start = Instant::now();
    let count = f();
    CountResult {
        h,
        n,
        method,
        count,
        elapsed_ns: start.elapsed().as_nanos() as u64,
    }
}

/// Quadruple enumeration over `[-N, N]^4`.
pub fn count_naive(h: i64, n: i64) -> Result<CountResult> {
    count_naive_capped(h, n, &CounterCaps::default())
}

pub fn count_naive_capped(h: i64, n: i64, caps: &CounterCaps) -> Result<CountResult> {
    caps.check(Method::Naive, n)?;
    Ok(timed(h, n, Method::Naive, || {
        let mut count = 0i64;
        for a in -n..=n {
            for b in -n..=n {
                for c in -n..=n {
                    for d in -n..=n {
                        if a * d - b * c == h {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }))
}

/// `R(m) = #{(a, d) in [-N, N]^2 : ad = m}` for `m` in `[-N^2, N^2]`.
///
/// Only the positive half is stored since `R(-m) = R(m)`.
#[derive(Clone, Debug)]
pub struct HyperbolaProfile {
    n: i64,
    r_zero: u64,
    /// Index `m` in `1..=N^2` holds `R(m)`; index 0 is unused.
    r_pos: Vec<u32>,
}

impl HyperbolaProfile {
    pub fn build(n: i64) -> Result<Self> {
        Self::build_capped(n, &CounterCaps::default())
    }

    pub fn build_capped(n: i64, caps: &CounterCaps) -> Result<Self> {
        caps.check(Method::Hyperbola, n)?;
        let nn = n as usize;
        let mut r_pos = vec![0u32; nn * nn + 1];
        for d in 1..=nn {
            let row = &mut r_pos[d..];
            for e in 0..nn {
                row[e * d] += 2;
            }
        }
        Ok(Self {
            n,
            r_zero: 4 * n as u64 + 1,
            r_pos,
        })
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn r_zero(&self) -> u64 {
        self.r_zero
    }

    /// `R(m)` for any integer `m`.
    pub fn r(&self, m: i64) -> u64 {
        if m == 0 {
            return self.r_zero;
        }
        let m = m.unsigned_abs() as usize;
        self.r_pos.get(m).map_or(0, |&v| v as u64)
    }

    /// `R(1), ..., R(N^2)`.
    pub fn positive(&self) -> &[u32] {
        &self.r_pos[1..]
    }
}

/// `T(h, N) = sum_n R(n + h) R(n)`, splitting `bc = n` and `ad = n + h`.
pub fn count_hyperbola(h: i64, n: i64, profile: &HyperbolaProfile) -> Result<CountResult> {
    check_n(n)?;
    if profile.n != n {
        return Err(Error::Precondition(format!(
            "profile built for N={} used with N={n}",
            profile.n
        )));
    }
    Ok(timed(h, n, Method::Hyperbola, || correlate(profile, h.abs())))
}

fn correlate(profile: &HyperbolaProfile, h: i64) -> i64 {
    let n2 = profile.n * profile.n;
    if h > 2 * n2 {
        return 0;
    }
    let pos = profile.positive();
    let dot = |x: &[u32], y: &[u32]| -> u64 {
        x.iter().zip(y).map(|(&p, &q)| p as u64 * q as u64).sum()
    };
    if h == 0 {
        let squares = dot(pos, pos);
        return (profile.r_zero * profile.r_zero + 2 * squares) as i64;
    }
    let h = h as usize;
    let n2 = n2 as usize;
    // bc = n and ad = n + h of the same sign: both signs give the same sum.
    let same_sign = if h < n2 {
        dot(&pos[..n2 - h], &pos[h..])
    } else {
        0
    };
    // bc = -j < 0 and ad = h - j > 0 with 1 <= j < h.
    let lo = h.saturating_sub(n2).max(1);
    let hi = (h - 1).min(n2);
    let mixed: u64 = (lo..=hi)
        .map(|j| pos[j - 1] as u64 * pos[h - j - 1] as u64)
        .sum();
    // One of ad, bc is zero.
    let with_zero = if h <= n2 {
        2 * profile.r_zero * pos[h - 1] as u64
    } else {
        0
    };
    (2 * same_sign + mixed + with_zero) as i64
}

/// Number of `(c, d)` in `[-N, N]^2` with `a d - b c = h`.
///
/// Runs in `O(log max(|a|, |b|))`: a particular solution from the
/// extended gcd, then the admissible range of the integer parameter.
pub fn segment_solution_count(a: i64, b: i64, h: i64, n: i64) -> Result<i64> {
    if a == 0 && b == 0 {
        return Err(Error::Precondition("segment needs (a, b) != (0, 0)".into()));
    }
    Ok(segment_count_unchecked(a, b, h, n))
}

pub(crate) fn segment_count_unchecked(a: i64, b: i64, h: i64, n: i64) -> i64 {
    let box_width = 2 * n + 1;
    if a == 0 {
        // -b c = h, d free
        return if h % b == 0 && (h / b).abs() <= n { box_width } else { 0 };
    }
    if b == 0 {
        // a d = h, c free
        return if h % a == 0 && (h / a).abs() <= n { box_width } else { 0 };
    }
    let (g, s, _) = ext_gcd(a, b);
    if h % g != 0 {
        return 0;
    }
    let scale = h / g;
    // a s + b t = g, so (c, d) = (-t, s) * h / g is one solution and the
    // rest are (c, d) + k (a, b) / g.
    let (a1, b1) = (a / g, b / g);
    // Reduce d modulo |b / g| first so the products stay small.
    let modulus = b1.abs();
    let d0 = s.rem_euclid(modulus) * scale.rem_euclid(modulus) % modulus;
    let c0 = (a * d0 - h) / b;
    let (k_lo1, k_hi1) = param_range(d0, b1, n);
    let (k_lo2, k_hi2) = param_range(c0, a1, n);
    let lo = k_lo1.max(k_lo2);
    let hi = k_hi1.min(k_hi2);
    (hi - lo + 1).max(0)
}

/// Integers `k` with `-N <= x0 + k * step <= N`, as a closed range.
fn param_range(x0: i64, step: i64, n: i64) -> (i64, i64) {
    if step > 0 {
        (ceil_div(-n - x0, step), floor_div(n - x0, step))
    } else {
        (ceil_div(n - x0, step), floor_div(-n - x0, step))
    }
}

/// `T(h, N)` as the sum of line counts over every first row `(a, b)`.
pub fn count_linear(h: i64, n: i64) -> Result<CountResult> {
    count_linear_capped(h, n, &CounterCaps::default())
}

pub fn count_linear_capped(h: i64, n: i64, caps: &CounterCaps) -> Result<CountResult> {
    caps.check(Method::Linear, n)?;
    Ok(timed(h, n, Method::Linear, || {
        let h = h.abs();
        if h > 2 * n * n {
            return 0;
        }
        // (a, b) and (-a, -b) carry the same count, so sum over the half
        // plane a > 0 or (a = 0, b > 0) and double.
        let mut half = 0i64;
        for b in 1..=n {
            half += segment_count_unchecked(0, b, h, n);
        }
        for a in 1..=n {
            for b in -n..=n {
                half += segment_count_unchecked(a, b, h, n);
            }
        }
        let origin = if h == 0 { (2 * n + 1) * (2 * n + 1) } else { 0 };
        2 * half + origin
    }))
}

/// Number of singular matrices, `T(0, N) = sum_n R(n)^2`.
pub fn count_zero_det(n: i64) -> Result<CountResult> {
    let profile = HyperbolaProfile::build(n)?;
    count_hyperbola(0, n, &profile)
}

/// Exact count by the fastest method the caps allow.
pub fn count_auto(h: i64, n: i64, caps: &CounterCaps) -> Result<CountResult> {
    match caps.auto_method(n)? {
        Method::Hyperbola => {
            let profile = HyperbolaProfile::build_capped(n, caps)?;
            count_hyperbola(h, n, &profile)
        }
        _ => count_linear_capped(h, n, caps),
    }
}

/// Count with an explicitly chosen exact method.
pub fn count_with(method: Method, h: i64, n: i64, caps: &CounterCaps) -> Result<CountResult> {
    match method {
        Method::Naive => count_naive_capped(h, n, caps),
        Method::Hyperbola => {
            let profile = HyperbolaProfile::build_capped(n, caps)?;
            count_hyperbola(h, n, &profile)
        }
        Method::Linear => count_linear_capped(h, n, caps),
        Method::TTilde => {
            caps.check(Method::TTilde, n)?;
            let start = Instant::now();
            let count = crate::decomposition::t_tilde(h.abs(), n)?;
            Ok(CountResult {
                h,
                n,
                method,
                count,
                elapsed_ns: start.elapsed().as_nanos() as u64,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_segment(a: i64, b: i64, h: i64, n: i64) -> i64 {
        let mut k = 0;
        for c in -n..=n {
            for d in -n..=n {
                if a * d - b * c == h {
                    k += 1;
                }
            }
        }
        k
    }

    #[test]
    fn naive_examples() {
        assert_eq!(count_naive(1, 1).unwrap().count, 20);
        for n in 1..=5 {
            assert_eq!(count_naive(2 * n * n, n).unwrap().count, 4);
        }
        // 2N^2 - 1 = 1 when N = 1, so the gap below 2N^2 starts at N = 2.
        for n in 2..=5 {
            assert_eq!(count_naive(2 * n * n - 1, n).unwrap().count, 0);
        }
        assert!(matches!(count_naive(1, 16), Err(Error::Capacity { .. })));
    }

    #[test]
    fn profile_examples() {
        let p = HyperbolaProfile::build(1).unwrap();
        assert_eq!(p.r_zero(), 5);
        assert_eq!(p.r(1), 2);
        assert_eq!(p.r(-1), 2);

        let p = HyperbolaProfile::build(2).unwrap();
        assert_eq!(p.r(2), 4);
        assert_eq!(p.r(3), 0);
        assert_eq!(p.r(4), 2);
        assert_eq!(p.r(5), 0);
    }

    #[test]
    fn profile_invariants() {
        for n in 1..=40 {
            let p = HyperbolaProfile::build(n).unwrap();
            assert_eq!(p.r_zero(), 4 * n as u64 + 1);
            let total: u64 = p.positive().iter().map(|&v| v as u64).sum();
            assert_eq!(p.r_zero() + 2 * total, ((2 * n + 1) * (2 * n + 1)) as u64);
            assert!(p.positive().iter().all(|v| v % 2 == 0));
            assert_eq!(p.r(1), 2);
            assert_eq!(p.r(n * n), 2);
        }
    }

    #[test]
    fn profile_capacity() {
        let caps = CounterCaps { hyperbola: 10, ..Default::default() };
        assert!(matches!(
            HyperbolaProfile::build_capped(11, &caps),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn hyperbola_examples() {
        let p = HyperbolaProfile::build(1).unwrap();
        assert_eq!(count_hyperbola(0, 1, &p).unwrap().count, 33);
        assert_eq!(count_hyperbola(3, 1, &p).unwrap().count, 0);
        assert_eq!(count_hyperbola(-1, 1, &p).unwrap().count, 20);
        let p2 = HyperbolaProfile::build(2).unwrap();
        assert!(count_hyperbola(1, 1, &p2).is_err());
        assert_eq!(count_hyperbola(9, 2, &p2).unwrap().count, 0);
    }

    #[test]
    fn hyperbola_matches_naive() {
        for n in 1..=6 {
            let p = HyperbolaProfile::build(n).unwrap();
            for h in -2 * n * n - 1..=2 * n * n + 1 {
                assert_eq!(
                    count_hyperbola(h, n, &p).unwrap().count,
                    count_naive(h, n).unwrap().count,
                    "h={h} N={n}"
                );
            }
        }
    }

    #[test]
    fn segment_examples() {
        assert_eq!(segment_solution_count(1, 0, 3, 5).unwrap(), 11);
        assert_eq!(segment_solution_count(2, 4, 3, 9).unwrap(), 0);
        assert_eq!(segment_solution_count(1, 1, 1, 2).unwrap(), 4);
        assert!(segment_solution_count(0, 0, 1, 2).is_err());
    }

    #[test]
    fn segment_matches_brute_force() {
        let n = 4;
        for a in -n..=n {
            for b in -n..=n {
                if a == 0 && b == 0 {
                    continue;
                }
                for h in -2 * n * n - 2..=2 * n * n + 2 {
                    assert_eq!(
                        segment_solution_count(a, b, h, n).unwrap(),
                        brute_segment(a, b, h, n),
                        "a={a} b={b} h={h}"
                    );
                }
            }
        }
    }

    #[test]
    fn linear_examples() {
        for n in 1..=6 {
            assert_eq!(count_linear(2 * n * n, n).unwrap().count, 4);
            assert_eq!(count_linear(0, n).unwrap().count, count_naive(0, n).unwrap().count);
        }
        assert_eq!(count_linear(0, 1).unwrap().count, 33);
    }

    #[test]
    fn zero_det_examples() {
        assert_eq!(count_zero_det(1).unwrap().count, 33);
        assert_eq!(count_zero_det(2).unwrap().count, count_naive(0, 2).unwrap().count);
        for n in 1..=30 {
            assert!(count_zero_det(n).unwrap().count >= (4 * n + 1) * (4 * n + 1));
        }
    }

    #[test]
    fn monotone_in_n() {
        for h in [1, 2, 6, 12, 30] {
            let mut prev = 0;
            for n in 1..=25 {
                let t = count_auto(h, n, &CounterCaps::default()).unwrap().count;
                assert!(t >= prev, "h={h} N={n}");
                prev = t;
            }
        }
    }

    #[test]
    fn method_names_round_trip() {
        for m in [Method::Naive, Method::Hyperbola, Method::Linear, Method::TTilde] {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("fast".parse::<Method>().is_err());
    }

    proptest! {
        #[test]
        fn segment_matches_brute_force_large(a in -40i64..40, b in -40i64..40, h in -3000i64..3000, n in 1i64..40) {
            prop_assume!(a != 0 || b != 0);
            prop_assert_eq!(segment_solution_count(a, b, h, n).unwrap(), brute_segment(a, b, h, n));
        }

        #[test]
        fn hyperbola_is_sign_symmetric(n in 1i64..60, h in 0i64..7200) {
            let p = HyperbolaProfile::build(n).unwrap();
            prop_assert_eq!(count_hyperbola(h, n, &p).unwrap().count, count_hyperbola(-h, n, &p).unwrap().count);
        }
    }
}
