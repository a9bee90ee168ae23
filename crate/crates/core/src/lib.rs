//! Exact counting of 2×2 integer matrices with entries in `[-N, N]` and a
//! prescribed determinant, together with the arithmetic and structural
//! machinery used to compare those counts with their asymptotic main
//! terms.
//!
//! ```
//! use detcount::counting::{count_hyperbola, count_naive, HyperbolaProfile};
//!
//! // 20 matrices with entries in {-1, 0, 1} have determinant 1.
//! assert_eq!(count_naive(1, 1)?.count, 20);
//!
//! let profile = HyperbolaProfile::build(50)?;
//! let t = count_hyperbola(2 * 50 * 50 - 1, 50, &profile)?;
//! assert_eq!(t.count, 0);
//! # Ok::<(), detcount::Error>(())
//! ```

pub mod arith;
pub mod asymptotics;
pub mod counting;
pub mod decomposition;
mod error;
pub mod numeric;
pub mod suites;

pub use error::{Error, Result};

/// Exact rational number with `i64` parts, always stored in lowest terms.
pub type Rational = num_rational::Ratio<i64>;

/// Parse `"p/q"` or `"p"` into a reduced [`Rational`].
pub fn parse_fraction(text: &str) -> Result<Rational> {
    let bad = || Error::Domain(format!("not a fraction: `{text}`"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text.trim(), "1"),
    };
    let num: i64 = num.parse().map_err(|_| bad())?;
    let den: i64 = den.parse().map_err(|_| bad())?;
    if den == 0 {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// `p/q` rendering of a [`Rational`], the inverse of [`parse_fraction`].
pub fn format_fraction(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/counting.md")]
    mod counting {}
    #[doc = include_str!("../../../book/src/arithmetic.md")]
    mod arithmetic {}
    #[doc = include_str!("../../../book/src/progressions.md")]
    mod progressions {}
    #[doc = include_str!("../../../book/src/solution-lines.md")]
    mod solution_lines {}
    #[doc = include_str!("../../../book/src/asymptotics.md")]
    mod asymptotics {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
}
