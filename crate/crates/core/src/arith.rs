//! Elementary arithmetic: sieved multiplicative tables, divisor sums,
//! modular inverses, Ramanujan sums, the saw-tooth function and the
//! coprime-counting identities the counting machinery leans on.
//!
//! Everything here is exact over the integers, except the saw-tooth
//! helpers that deliberately work on `f64`.

use std::f64::consts::PI;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::Rational;

/// Default upper bound on the sieve limit, in table entries.
pub const DEFAULT_SIEVE_CAP: usize = 1 << 26;

/// Sieve-built multiplicative function tables on `1..=limit`.
///
/// Index `n` of every table holds the value at `n`; index 0 is unused
/// and set to zero. The tables are immutable after construction.
#[derive(Clone, Debug)]
pub struct DivisorTables {
    limit: usize,
    spf: Vec<u32>,
    phi: Vec<u32>,
    mu: Vec<i8>,
    tau_prime: Vec<u32>,
    primes: Vec<u32>,
}

impl DivisorTables {
    /// Build the tables with a linear sieve, refusing limits above
    /// [`DEFAULT_SIEVE_CAP`].
    pub fn build(limit: usize) -> Result<Self> {
        Self::build_capped(limit, DEFAULT_SIEVE_CAP)
    }

    pub fn build_capped(limit: usize, cap: usize) -> Result<Self> {
        if limit == 0 || limit > cap {
            return Err(Error::Capacity {
                what: "sieve limit",
                requested: limit as u64,
                cap: cap as u64,
            });
        }
        let mut spf = vec![0u32; limit + 1];
        let mut phi = vec![0u32; limit + 1];
        let mut mu = vec![0i8; limit + 1];
        let mut tau_prime = vec![0u32; limit + 1];
        let mut primes = Vec::new();
        phi[1] = 1;
        mu[1] = 1;
        tau_prime[1] = 1;
        for n in 2..=limit {
            if spf[n] == 0 {
                spf[n] = n as u32;
                phi[n] = n as u32 - 1;
                mu[n] = -1;
                tau_prime[n] = 2;
                primes.push(n as u32);
            }
            for &p in &primes {
                let p = p as usize;
                let m = n * p;
                if p > spf[n] as usize || m > limit {
                    break;
                }
                spf[m] = p as u32;
                if p == spf[n] as usize {
                    // p^2 | m: phi picks up a full factor p, mu vanishes,
                    // and the square-free divisor count is unchanged.
                    phi[m] = phi[n] * p as u32;
                    mu[m] = 0;
                    tau_prime[m] = tau_prime[n];
                } else {
                    phi[m] = phi[n] * (p as u32 - 1);
                    mu[m] = -mu[n];
                    tau_prime[m] = tau_prime[n] * 2;
                }
            }
        }
        Ok(Self {
            limit,
            spf,
            phi,
            mu,
            tau_prime,
            primes,
        })
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    /// Smallest prime factor of `n` for `2 <= n <= limit`.
    pub fn spf(&self, n: usize) -> u32 {
        self.spf[n]
    }

    pub fn phi(&self, n: usize) -> u64 {
        self.phi[n] as u64
    }

    pub fn mu(&self, n: usize) -> i64 {
        self.mu[n] as i64
    }

    /// Number of square-free divisors of `n`, i.e. `2^omega(n)`.
    pub fn tau_prime(&self, n: usize) -> u64 {
        self.tau_prime[n] as u64
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Prime factorisation as ascending `(prime, exponent)` pairs.
    ///
    /// Values above the sieve limit are factored by trial division with
    /// the sieved primes, which is complete as long as `n <= limit^2`.
    pub fn factorize(&self, n: u64) -> Result<Vec<(u64, u32)>> {
        if n == 0 {
            return Err(Error::Domain("cannot factor zero".into()));
        }
        let mut out: Vec<(u64, u32)> = Vec::new();
        let push = |out: &mut Vec<(u64, u32)>, p: u64| match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        };
        let mut rest = n;
        if rest > self.limit as u64 {
            for &p in &self.primes {
                let p = p as u64;
                if p * p > rest {
                    break;
                }
                while rest % p == 0 {
                    push(&mut out, p);
                    rest /= p;
                }
                if rest <= self.limit as u64 {
                    break;
                }
            }
            if rest > self.limit as u64 {
                let largest = *self.primes.last().unwrap_or(&1) as u64;
                if largest.saturating_mul(largest) < rest {
                    return Err(Error::Capacity {
                        what: "trial division beyond sieve",
                        requested: n,
                        cap: (self.limit as u64).saturating_mul(self.limit as u64),
                    });
                }
                push(&mut out, rest);
                return Ok(out);
            }
        }
        while rest > 1 {
            let p = self.spf[rest as usize] as u64;
            push(&mut out, p);
            rest /= p;
        }
        Ok(out)
    }

    /// All positive divisors of `n` in ascending order.
    pub fn divisors(&self, n: u64) -> Result<Vec<u64>> {
        Ok(divisors_from_factors(&self.factorize(n)?))
    }
}

/// Prime factorisation by trial division, for callers without a sieve.
pub fn factorize(n: u64) -> Result<Vec<(u64, u32)>> {
    if n == 0 {
        return Err(Error::Domain("cannot factor zero".into()));
    }
    let mut out = Vec::new();
    let mut rest = n;
    let mut p = 2u64;
    while p * p <= rest {
        if rest % p == 0 {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        out.push((rest, 1));
    }
    Ok(out)
}

pub fn divisors_from_factors(factors: &[(u64, u32)]) -> Vec<u64> {
    let mut divs = vec![1u64];
    for &(p, e) in factors {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// Ascending divisors of `n`, by trial division.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    Ok(divisors_from_factors(&factorize(n)?))
}

/// Möbius function by trial division.
pub fn mobius(n: u64) -> Result<i64> {
    let f = factorize(n)?;
    if f.iter().any(|&(_, e)| e > 1) {
        Ok(0)
    } else if f.len() % 2 == 0 {
        Ok(1)
    } else {
        Ok(-1)
    }
}

/// Euler's totient by trial division.
pub fn totient(n: u64) -> Result<u64> {
    let f = factorize(n)?;
    Ok(f.iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1)))
}

/// The exact divisor sum `sum_{d | h} 1/d = sigma_1(h) / h`.
pub fn sigma_inv(h: i64) -> Result<Rational> {
    if h <= 0 {
        return Err(Error::Domain(format!("sigma_inv needs h >= 1, got {h}")));
    }
    let sigma: u64 = divisors(h as u64)?.iter().sum();
    Ok(Rational::new(sigma as i64, h))
}

/// Extended Euclid: returns `(g, s, t)` with `a*s + b*t = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// The inverse of `a` modulo `m`, reduced into `[0, m)`.
pub fn mod_inverse(a: i64, m: i64) -> Result<i64> {
    if m <= 0 {
        return Err(Error::Domain(format!("modulus must be positive, got {m}")));
    }
    if m == 1 {
        return Ok(0);
    }
    let (g, s, _) = ext_gcd(a.rem_euclid(m), m);
    if g != 1 {
        return Err(Error::NotInvertible { a, m });
    }
    Ok(s.rem_euclid(m))
}

/// Ramanujan sum `c_y(n)` via `sum_{d | (n, y)} d * mu(y / d)`.
pub fn ramanujan_sum(y: i64, n: i64) -> Result<i64> {
    if y <= 0 {
        return Err(Error::Domain(format!("ramanujan_sum needs y >= 1, got {y}")));
    }
    let g = n.gcd(&y);
    let mut total = 0i64;
    for d in divisors(g as u64)? {
        let d = d as i64;
        total += d * mobius((y / d) as u64)?;
    }
    Ok(total)
}

/// `c_y(n)` summed directly as `sum_{t in (Z/yZ)^x} cos(2 pi n t / y)`.
///
/// The imaginary parts cancel in `t <-> y - t` pairs, so only the real
/// part is accumulated.
pub fn ramanujan_sum_direct(y: i64, n: i64) -> Result<f64> {
    if y <= 0 {
        return Err(Error::Domain(format!("ramanujan_sum needs y >= 1, got {y}")));
    }
    let n = n.rem_euclid(y);
    let mut total = 0.0;
    for t in 1..=y {
        if t.gcd(&y) == 1 {
            let k = (n * t) % y;
            total += (2.0 * PI * k as f64 / y as f64).cos();
        }
    }
    Ok(total)
}

/// The trivial bound `sum_{d | (n, y)} d` on `|c_y(n)|`.
pub fn ramanujan_bound(y: i64, n: i64) -> Result<i64> {
    let g = n.gcd(&y);
    Ok(divisors(g as u64)?.iter().sum::<u64>() as i64)
}

/// Saw-tooth function `x - floor(x) - 1/2`.
pub fn sawtooth(x: f64) -> f64 {
    x - x.floor() - 0.5
}

/// Saw-tooth function on an exact rational, `q - floor(q) - 1/2`.
pub fn sawtooth_exact(q: &Rational) -> Rational {
    q - q.floor() - Rational::new(1, 2)
}

/// Distance from `theta` to the nearest integer.
pub fn dist_to_nearest_int(theta: f64) -> f64 {
    let f = theta - theta.floor();
    f.min(1.0 - f)
}

/// Truncated Fourier series of the saw-tooth, together with the error
/// scale `min{1, 1/(Q ||theta||)}`.
///
/// Pairing `h` with `-h` gives `-sum_{1 <= h <= Q} sin(2 pi h theta) / (pi h)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourierApprox {
    pub approx: f64,
    pub bound: f64,
}

pub fn sawtooth_fourier(theta: f64, q: f64) -> Result<FourierApprox> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::Domain(format!("truncation Q must be >= 1, got {q}")));
    }
    let terms = q.floor() as u64;
    // Reduce theta first so that large |theta| does not lose phase accuracy.
    let frac = theta - theta.floor();
    let mut approx = 0.0;
    for h in 1..=terms {
        let h = h as f64;
        approx -= (2.0 * PI * h * frac).sin() / (PI * h);
    }
    let dist = dist_to_nearest_int(theta);
    let bound = if dist == 0.0 {
        1.0
    } else {
        (1.0 / (q * dist)).min(1.0)
    };
    Ok(FourierApprox { approx, bound })
}

/// `#{1 <= v < u : gcd(v, u) = 1, v = r (mod q)}` by direct enumeration.
pub fn coprime_residue_count(u: i64, q: i64, r: i64) -> Result<u64> {
    if u <= 0 || q <= 0 || u % q != 0 {
        return Err(Error::Precondition(format!("need q | u with u, q >= 1 (u={u}, q={q})")));
    }
    if r.gcd(&q) != 1 {
        return Err(Error::Precondition(format!("need gcd(r, q) = 1 (r={r}, q={q})")));
    }
    let target = r.rem_euclid(q);
    // For u = 1 the empty range [1, 1) would give 0, but the unit group of
    // Z/1Z has one element; count the class of 0 to keep phi(u)/phi(q).
    if u == 1 {
        return Ok(1);
    }
    Ok((1..u)
        .filter(|&v| v % q == target && v.gcd(&u) == 1)
        .count() as u64)
}

/// `#{n in [start, start + len) : gcd(n, q) = 1}` by inclusion-exclusion
/// over the square-free divisors of `q`.
pub fn coprime_range_count(start: i64, len: i64, q: i64) -> Result<i64> {
    if len < 0 || q <= 0 {
        return Err(Error::Domain(format!("need len >= 0 and q >= 1 (len={len}, q={q})")));
    }
    let primes: Vec<i64> = factorize(q as u64)?.iter().map(|&(p, _)| p as i64).collect();
    let end = start + len - 1;
    let mut total = 0i64;
    for mask in 0u32..(1 << primes.len()) {
        let mut d = 1i64;
        for (i, p) in primes.iter().enumerate() {
            if mask >> i & 1 == 1 {
                d *= p;
            }
        }
        let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
        total += sign * (floor_div(end, d) - floor_div(start - 1, d));
    }
    Ok(total)
}

/// `floor(a / b)` for `b != 0`.
pub fn floor_div(a: i64, b: i64) -> i64 {
    Integer::div_floor(&a, &b)
}

/// `ceil(a / b)` for `b != 0`.
pub fn ceil_div(a: i64, b: i64) -> i64 {
    -Integer::div_floor(&-a, &b)
}

/// `sum_{1 <= y <= bound} gcd(y, m)`.
pub fn gcd_sum(m: i64, bound: i64) -> i64 {
    (1..=bound).map(|y| y.gcd(&m)).sum()
}

/// Exact rational converted to `f64` for reporting.
pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| *q.numer() as f64 / *q.denom() as f64)
}

/// `|q|` as an `f64`.
pub fn abs_f64(q: &Rational) -> f64 {
    to_f64(&q.abs())
}
