//! Parallel evaluation of sweep cells.

use std::collections::BTreeMap;
use std::time::Instant;

use detcount::counting::{self, CounterCaps, HyperbolaProfile, Method};
use detcount::decomposition;
use rayon::prelude::*;

use crate::config::MethodChoice;

/// Method used, count, and the time spent on the cell itself.
pub type CellOutcome = detcount::Result<(Method, i64, u64)>;

/// Count every `(h, N)` cell. Hyperbola cells that share `N` share one
/// profile, whose construction is not charged to any single cell. The
/// result is sorted by `(N, h)` whatever the scheduling.
pub fn count_cells(cells: &[(i64, i64)], method: MethodChoice, caps: &CounterCaps) -> Vec<(i64, i64, CellOutcome)> {
    let mut by_n: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    for &(h, n) in cells {
        by_n.entry(n).or_default().push(h);
    }
    let groups: Vec<(i64, Vec<i64>)> = by_n.into_iter().collect();
    let mut out: Vec<(i64, i64, CellOutcome)> = groups
        .into_par_iter()
        .flat_map_iter(|(n, hs)| count_group(n, hs, method, caps))
        .collect();
    out.sort_by_key(|&(h, n, _)| (n, h));
    out
}

fn count_group(n: i64, hs: Vec<i64>, method: MethodChoice, caps: &CounterCaps) -> Vec<(i64, i64, CellOutcome)> {
    let chosen = match method {
        MethodChoice::Auto => caps.auto_method(n),
        MethodChoice::Fixed(m) => Ok(m),
    };
    let chosen = match chosen {
        Ok(m) => m,
        Err(e) => return hs.into_iter().map(|h| (h, n, Err(e.clone()))).collect(),
    };
    if chosen == Method::Hyperbola {
        let profile = match HyperbolaProfile::build_capped(n, caps) {
            Ok(p) => p,
            Err(e) => return hs.into_iter().map(|h| (h, n, Err(e.clone()))).collect(),
        };
        return hs
            .into_iter()
            .map(|h| {
                let start = Instant::now();
                let res = counting::count_hyperbola(h, n, &profile);
                let elapsed = start.elapsed().as_nanos() as u64;
                (h, n, res.map(|r| (Method::Hyperbola, r.count, elapsed)))
            })
            .collect();
    }
    hs.into_iter()
        .map(|h| {
            let start = Instant::now();
            let res = match chosen {
                Method::TTilde => decomposition::t_tilde(h, n),
                m => counting::count_with(m, h, n, caps).map(|r| r.count),
            };
            let elapsed = start.elapsed().as_nanos() as u64;
            (h, n, res.map(|c| (chosen, c, elapsed)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_and_exact() {
        let caps = CounterCaps::default();
        let out = count_cells(&[(8, 2), (1, 1), (7, 2), (0, 3)], MethodChoice::Auto, &caps);
        let counts: Vec<(i64, i64, i64)> = out.iter().map(|(h, n, r)| (*h, *n, r.as_ref().unwrap().1)).collect();
        assert_eq!(counts, vec![(1, 1, 20), (7, 2, 0), (8, 2, 4), (0, 3, counting::count_naive(0, 3).unwrap().count)]);
    }

    #[test]
    fn capacity_errors_are_per_cell() {
        let caps = CounterCaps::default();
        let out = count_cells(&[(1, 100)], MethodChoice::Fixed(Method::Naive), &caps);
        assert!(out[0].2.is_err());
    }
}
