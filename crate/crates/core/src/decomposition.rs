//! The structural objects behind the two main-term evaluations.
//!
//! Small-`h` side: fixing a divisor `d | h` and a reduced pair `v < u`,
//! the solutions of `ux - vy = n` form an arithmetic progression in `y`.
//! [`r_uv`] counts them exactly and [`r_tilde_uv`] drops the length
//! constraint and keeps only the residue class; [`t_tilde`] sums the
//! latter into a uniformised approximant of `T(h, N)`.
//!
//! Near `h = N^2`: for coprime `(x, y)` every positive solution of
//! `bx + dy = m` is `(b0 + ky, d0 - kx)`, and the box `[1, N]^2` cuts the
//! parameter `k` down to `[U, V]` ([`SolutionLine`]). Counting that
//! interval exposes a smooth part, saw-tooth boundary terms and an
//! integrality indicator, all of which are computed here exactly.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{self, mod_inverse, sawtooth_exact};
use crate::counting::segment_count_unchecked;
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::Rational;

fn check_pair(u: i64, v: i64) -> Result<()> {
    if u < 1 || v < 1 {
        return Err(Error::Precondition(format!("need positive u, v (u={u}, v={v})")));
    }
    if u.gcd(&v) != 1 {
        return Err(Error::Precondition(format!("gcd({u}, {v}) != 1")));
    }
    Ok(())
}

/// `#{(x, y) in [-N, N]^2 : ux - vy = n}`.
pub fn r_uv(u: i64, v: i64, n: i64, big_n: i64) -> Result<i64> {
    check_pair(u, v)?;
    Ok(segment_count_unchecked(u, v, n, big_n))
}

/// The residue `-n v^{-1} mod u` that every valid `y` must lie in.
pub fn progression_residue(u: i64, v: i64, n: i64) -> Result<i64> {
    check_pair(u, v)?;
    let inv = mod_inverse(v, u)?;
    Ok((-(n.rem_euclid(u)) * inv).rem_euclid(u))
}

/// Integers in `[lo, hi]` congruent to `c` modulo `u`.
pub fn count_in_class(lo: i64, hi: i64, c: i64, u: i64) -> i64 {
    if hi < lo {
        return 0;
    }
    (arith::floor_div(hi - c, u) - arith::floor_div(lo - 1 - c, u)).max(0)
}

/// `#{y in [-N, N] : y = -n v^{-1} (mod u)}`.
pub fn r_tilde_uv(u: i64, v: i64, n: i64, big_n: i64) -> Result<i64> {
    let c = progression_residue(u, v, n)?;
    Ok(count_in_class(-big_n, big_n, c, u))
}

/// The uniformised approximant
/// `8 sum_{d | h, d <= N} sum_{1 <= v < u <= N/d, (u,v)=1} r~_{u,v}(h/d)`.
pub fn t_tilde(h: i64, big_n: i64) -> Result<i64> {
    if big_n < 1 || h < 1 || h > 2 * big_n * big_n {
        return Err(Error::Domain(format!("t_tilde needs 1 <= h <= 2N^2 (h={h}, N={big_n})")));
    }
    let mut total = 0i64;
    for d in arith::divisors(h as u64)? {
        let d = d as i64;
        if d > big_n {
            break;
        }
        let n = h / d;
        let top = big_n / d;
        for u in 2..=top {
            let n_mod = n.rem_euclid(u);
            for v in 1..u {
                let (g, s, _) = arith::ext_gcd(v, u);
                if g != 1 {
                    continue;
                }
                let c = (-(n_mod * s.rem_euclid(u))).rem_euclid(u);
                total += count_in_class(-big_n, big_n, c, u);
            }
        }
    }
    Ok(8 * total)
}

/// One `(d, u, v)` cell of the progression decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgressionCell {
    pub d: i64,
    pub u: i64,
    pub v: i64,
    pub n: i64,
    #[serde(rename = "N")]
    pub big_n: i64,
    pub r: i64,
    pub r_tilde: i64,
}

impl ProgressionCell {
    pub fn new(d: i64, u: i64, v: i64, n: i64, big_n: i64) -> Result<Self> {
        Ok(Self {
            d,
            u,
            v,
            n,
            big_n,
            r: r_uv(u, v, n, big_n)?,
            r_tilde: r_tilde_uv(u, v, n, big_n)?,
        })
    }

    /// Check the three-regime relations between `r` and `r~`.
    ///
    /// Besides `r~ >= r`, the gap `r~ - r` must equal the number of `y`
    /// in `((Nu - n)/v, N]` lying in the progression's residue class,
    /// which is recounted here by a plain loop.
    pub fn check(&self) -> std::result::Result<(), String> {
        let (u, v, n, big_n) = (self.u, self.v, self.n, self.big_n);
        if self.r_tilde < self.r {
            return Err(format!("{self:?}: r~ < r"));
        }
        if n < big_n * (u - v) && self.r_tilde != self.r {
            return Err(format!("{self:?}: r~ != r below N(u-v)"));
        }
        if n > big_n * (u + v) {
            if self.r != 0 {
                return Err(format!("{self:?}: r != 0 above N(u+v)"));
            }
            let gap = (self.r_tilde as f64 - 2.0 * big_n as f64 / u as f64).abs();
            if gap > 5.0 {
                return Err(format!("{self:?}: |r~ - 2N/u| = {gap} > 5"));
            }
        }
        let c = progression_residue(u, v, n).map_err(|e| e.to_string())?;
        let tail = ((-big_n)..=big_n)
            .filter(|&y| v * y > big_n * u - n && (y - c) % u == 0)
            .count() as i64;
        if self.r_tilde - self.r != tail {
            return Err(format!("{self:?}: r~ - r != tail recount {tail}"));
        }
        Ok(())
    }
}

/// Base solution and admissible parameter window for `bx + dy = m`
/// with `b, d` in `[1, N]`.
///
/// Every solution is `(b0 + k y, d0 - k x)`, and the box constraint is
/// exactly `lower <= k <= upper` where `lower = U` and `upper = V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionLine {
    pub x: i64,
    pub y: i64,
    pub m: i64,
    pub big_n: i64,
    /// In `[1, y]`, with `b0 x = m (mod y)`.
    pub b0: i64,
    pub d0: i64,
    /// `U = max{(1 - b0)/y, (d0 - N)/x}`.
    pub lower: Rational,
    /// `V = min{(N - b0)/y, (d0 - 1)/x}`.
    pub upper: Rational,
}

/// Representative of `b0` chosen from its residue class modulo `y`.
pub type B0Mapping = fn(residue: i64, y: i64) -> i64;

/// Map residue 0 to `y`, so that `b0` lies in `[1, y]`.
pub fn b0_in_one_to_y(residue: i64, y: i64) -> i64 {
    if residue == 0 {
        y
    } else {
        residue
    }
}

pub fn solution_line(x: i64, y: i64, m: i64, big_n: i64) -> Result<SolutionLine> {
    solution_line_with(x, y, m, big_n, b0_in_one_to_y)
}

/// [`solution_line`] with a caller-supplied `b0` representative, used to
/// confirm that the identity checks notice a wrong convention.
pub fn solution_line_with(
    x: i64,
    y: i64,
    m: i64,
    big_n: i64,
    mapping: B0Mapping,
) -> Result<SolutionLine> {
    if x < 1 || y < 1 || x.gcd(&y) != 1 {
        return Err(Error::Precondition(format!("need coprime positive x, y (x={x}, y={y})")));
    }
    let residue = (m.rem_euclid(y) * mod_inverse(x, y)?).rem_euclid(y);
    let b0 = mapping(residue, y);
    let d0 = (m - b0 * x) / y;
    let lower = Rational::new(1 - b0, y).max(Rational::new(d0 - big_n, x));
    let upper = Rational::new(big_n - b0, y).min(Rational::new(d0 - 1, x));
    Ok(SolutionLine {
        x,
        y,
        m,
        big_n,
        b0,
        d0,
        lower,
        upper,
    })
}

impl SolutionLine {
    /// `floor(V) - floor(U) + 1_Z(U)`, or 0 when `U > V`.
    pub fn floor_formula_count(&self) -> i64 {
        if self.lower > self.upper {
            return 0;
        }
        let indicator = self.lower.is_integer() as i64;
        self.upper.floor().to_integer() - self.lower.floor().to_integer() + indicator
    }

    /// Count of integers `k` in `[U, V]` by stepping from `ceil(U)`.
    pub fn scan_count(&self) -> i64 {
        let mut k = self.lower.ceil().to_integer();
        let mut count = 0;
        while Rational::from_integer(k) <= self.upper {
            count += 1;
            k += 1;
        }
        count
    }

    pub fn lower_is_integer(&self) -> bool {
        self.lower.is_integer()
    }

    /// Check the defining relations of the line.
    pub fn check(&self) -> std::result::Result<(), String> {
        let (x, y, m, big_n) = (self.x, self.y, self.m, self.big_n);
        if !(1..=y).contains(&self.b0) {
            return Err(format!("{self:?}: b0 outside [1, y]"));
        }
        if (self.b0 * x - m).rem_euclid(y) != 0 || self.b0 * x + self.d0 * y != m {
            return Err(format!("{self:?}: (b0, d0) does not solve bx + dy = m"));
        }
        let mut k = self.lower.ceil().to_integer();
        while Rational::from_integer(k) <= self.upper {
            let (b, d) = (self.b0 + k * y, self.d0 - k * x);
            if !(1..=big_n).contains(&b) || !(1..=big_n).contains(&d) {
                return Err(format!("{self:?}: k={k} leaves the box"));
            }
            k += 1;
        }
        Ok(())
    }
}

/// `#([U, V] ∩ Z)` for the line, computed by the floor formula and by a
/// direct scan, which must agree.
pub fn admissible_k_count(line: &SolutionLine) -> i64 {
    let formula = line.floor_formula_count();
    let scanned = line.scan_count();
    assert_eq!(formula, scanned, "floor formula disagrees with scan for {line:?}");
    formula
}

/// `#{(b, d) in [1, N]^2 : bx + dy = m}` by looping over `b`.
pub fn direct_bd_count(x: i64, y: i64, m: i64, big_n: i64) -> i64 {
    (1..=big_n)
        .filter(|&b| {
            let rest = m - b * x;
            rest > 0 && rest % y == 0 && rest / y <= big_n
        })
        .count() as i64
}

/// `S(X) = sum_{1 <= x, y <= X, x + y > X} (x + y - X) / (xy)` through
/// the harmonic rearrangement `2H - X sum_{n <= H} 1/n^2`, `H = floor(X)`.
pub fn s_function(big_x: f64) -> Result<f64> {
    if !(big_x >= 1.0) || !big_x.is_finite() {
        return Err(Error::Domain(format!("S(X) needs X >= 1, got {big_x}")));
    }
    let h = big_x.floor() as u64;
    let mut inv_squares = CompensatedSum::default();
    for n in (1..=h).rev() {
        let n = n as f64;
        inv_squares.add(1.0 / (n * n));
    }
    Ok(2.0 * h as f64 - big_x * inv_squares.value())
}

/// `S(X)` by the defining double sum, in `O(X^2)`.
pub fn s_function_direct(big_x: f64) -> Result<f64> {
    if !(big_x >= 1.0) || !big_x.is_finite() {
        return Err(Error::Domain(format!("S(X) needs X >= 1, got {big_x}")));
    }
    let h = big_x.floor() as u64;
    let mut total = CompensatedSum::default();
    for x in 1..=h {
        for y in 1..=h {
            let s = (x + y) as f64;
            if s > big_x {
                total.add((s - big_x) / (x as f64 * y as f64));
            }
        }
    }
    Ok(total.value())
}

/// `sum_{r | h, r <= N} sum_{(x, y) = 1, x, y <= M, x + y > M} N (x + y - M) / (xy)`
/// with `M = N / r`.
pub fn mainterm_lhs(h: i64, big_n: i64) -> Result<f64> {
    check_h_range(h, big_n)?;
    let mut total = CompensatedSum::default();
    for r in arith::divisors(h as u64)? {
        let r = r as i64;
        if r > big_n {
            break;
        }
        let top = big_n / r;
        for x in 1..=top {
            // x + y > N/r  <=>  r (x + y) > N
            let y_start = (big_n / r - x + 1).max(1);
            for y in y_start..=top {
                if x.gcd(&y) != 1 {
                    continue;
                }
                let numer = big_n as f64 * (r * (x + y) - big_n) as f64;
                total.add(numer / (r as f64 * x as f64 * y as f64));
            }
        }
    }
    Ok(total.value())
}

/// The same sum as [`mainterm_lhs`], through Möbius inversion:
/// each inner sum equals `N sum_{k <= M} mu(k)/k * S(M/k)`.
pub fn mainterm_lhs_mobius(h: i64, big_n: i64) -> Result<f64> {
    check_h_range(h, big_n)?;
    let mut total = CompensatedSum::default();
    for r in arith::divisors(h as u64)? {
        let r = r as i64;
        if r > big_n {
            break;
        }
        let top = big_n / r;
        for k in 1..=top {
            let mu = arith::mobius(k as u64)?;
            if mu == 0 {
                continue;
            }
            let m_over_k = big_n as f64 / (r * k) as f64;
            total.add(big_n as f64 * mu as f64 / k as f64 * s_function(m_over_k)?);
        }
    }
    Ok(total.value())
}

fn check_h_range(h: i64, big_n: i64) -> Result<()> {
    if big_n < 1 || h < 1 || h > 2 * big_n * big_n {
        return Err(Error::Domain(format!("need 1 <= h <= 2N^2 (h={h}, N={big_n})")));
    }
    Ok(())
}

/// Boundary sums over coprime `1 <= x, y <= M` with `x + y > M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SawtoothSums {
    pub h: i64,
    #[serde(rename = "N")]
    pub big_n: i64,
    pub r: i64,
    pub m: i64,
    /// `M = N / r` as a reduced fraction string.
    pub big_m: String,
    pub pairs: u64,
    pub sum_psi_v: f64,
    pub sum_psi_u: f64,
    pub sum_indicator_u: u64,
}

pub fn sawtooth_sums(h: i64, big_n: i64, r: i64) -> Result<SawtoothSums> {
    check_h_range(h, big_n)?;
    if r < 1 || r > big_n || h % r != 0 {
        return Err(Error::Precondition(format!("need r | h and r <= N (r={r}, h={h}, N={big_n})")));
    }
    let m = h / r;
    let top = big_n / r;
    let mut psi_v = CompensatedSum::default();
    let mut psi_u = CompensatedSum::default();
    let mut indicator = 0u64;
    let mut pairs = 0u64;
    for x in 1..=top {
        let y_start = (big_n / r - x + 1).max(1);
        for y in y_start..=top {
            if x.gcd(&y) != 1 {
                continue;
            }
            let line = solution_line(x, y, m, big_n)?;
            pairs += 1;
            psi_v.add(arith::to_f64(&sawtooth_exact(&line.upper)));
            psi_u.add(arith::to_f64(&sawtooth_exact(&line.lower)));
            indicator += line.lower_is_integer() as u64;
        }
    }
    let big_m = Rational::new(big_n, r);
    Ok(SawtoothSums {
        h,
        big_n,
        r,
        m,
        big_m: big_m.to_string(),
        pairs,
        sum_psi_v: psi_v.value(),
        sum_psi_u: psi_u.value(),
        sum_indicator_u: indicator,
    })
}

/// `sigma = (h - N^2) / N` as an exact fraction.
pub fn sigma(h: i64, big_n: i64) -> Rational {
    Rational::new(h - big_n * big_n, big_n)
}

/// Whether `V` takes its first branch, `(N - b0)/y`, for the line.
pub fn upper_is_first_branch(line: &SolutionLine) -> bool {
    line.upper == Rational::new(line.big_n - line.b0, line.y)
}
