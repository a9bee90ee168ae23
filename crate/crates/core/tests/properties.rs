use std::collections::HashMap;

use detcount::arith;
use detcount::counting::{self, CounterCaps, HyperbolaProfile};
use detcount::decomposition;
use proptest::prelude::*;

/// Determinant histogram over `[-N, N]^4` by direct enumeration.
fn histogram(n: i64) -> HashMap<i64, i64> {
    let mut out = HashMap::new();
    for a in -n..=n {
        for b in -n..=n {
            for c in -n..=n {
                for d in -n..=n {
                    *out.entry(a * d - b * c).or_insert(0) += 1;
                }
            }
        }
    }
    out
}

#[test]
fn every_counter_matches_the_histogram() {
    for n in 1..=7 {
        let hist = histogram(n);
        let profile = HyperbolaProfile::build(n).unwrap();
        for h in -2 * n * n - 2..=2 * n * n + 2 {
            let want = hist.get(&h).copied().unwrap_or(0);
            assert_eq!(counting::count_hyperbola(h, n, &profile).unwrap().count, want, "hyperbola T({h},{n})");
            assert_eq!(counting::count_linear(h, n).unwrap().count, want, "linear T({h},{n})");
        }
        assert_eq!(counting::count_zero_det(n).unwrap().count, hist[&0]);
    }
}

#[test]
fn counts_sum_to_the_box_size() {
    for n in [5, 13, 30] {
        let profile = HyperbolaProfile::build(n).unwrap();
        let total: i64 = (-2 * n * n..=2 * n * n)
            .map(|h| counting::count_hyperbola(h, n, &profile).unwrap().count)
            .sum();
        assert_eq!(total, (2 * n + 1).pow(4));
    }
}

#[test]
fn totient_and_mobius_agree_with_gcd_scans() {
    for m in 1u64..=300 {
        let phi = (1..=m).filter(|&k| num_integer::gcd(k, m) == 1).count() as u64;
        assert_eq!(arith::totient(m).unwrap(), phi);
        let mu_sum: i64 = arith::divisors(m).unwrap().iter().map(|&d| arith::mobius(d).unwrap()).sum();
        assert_eq!(mu_sum, i64::from(m == 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn counts_are_even_in_h(h in 1i64..5000, n in 1i64..60) {
        let caps = CounterCaps::default();
        prop_assert_eq!(
            counting::count_auto(h, n, &caps).unwrap().count,
            counting::count_auto(-h, n, &caps).unwrap().count
        );
    }

    #[test]
    fn counts_grow_with_the_box(h in -500i64..500, n in 1i64..40) {
        let caps = CounterCaps::default();
        let small = counting::count_auto(h, n, &caps).unwrap().count;
        let large = counting::count_auto(h, n + 1, &caps).unwrap().count;
        prop_assert!(small <= large);
    }

    #[test]
    fn linear_and_hyperbola_agree(h in -3000i64..3000, n in 1i64..50) {
        let profile = HyperbolaProfile::build(n).unwrap();
        prop_assert_eq!(
            counting::count_hyperbola(h, n, &profile).unwrap().count,
            counting::count_linear(h, n).unwrap().count
        );
    }

    #[test]
    fn solution_line_count_matches_direct(x in 1i64..25, y in 1i64..25, m in 1i64..400, n in 1i64..25) {
        prop_assume!(num_integer::gcd(x, y) == 1);
        let line = decomposition::solution_line(x, y, m, n).unwrap();
        prop_assert_eq!(decomposition::admissible_k_count(&line), decomposition::direct_bd_count(x, y, m, n));
    }

    #[test]
    fn ramanujan_sum_matches_exponential_sum(y in 1i64..200, k in -300i64..300) {
        let exact = arith::ramanujan_sum(y, k).unwrap() as f64;
        let direct = arith::ramanujan_sum_direct(y, k).unwrap();
        prop_assert!((exact - direct).abs() < 1e-6);
    }

    #[test]
    fn mainterm_forms_agree(raw in 0i64..1_000_000, n in 1i64..120) {
        let h = 1 + raw % (2 * n * n);
        let direct = decomposition::mainterm_lhs(h, n).unwrap();
        let mobius = decomposition::mainterm_lhs_mobius(h, n).unwrap();
        prop_assert!((direct - mobius).abs() <= 1e-9 * direct.abs().max(1.0));
    }
}
