//! Acceptance gate: one pass/fail line per criterion, nonzero exit if any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use detcount::asymptotics::{self, Grid, HRule, RegimeReport, Thresholds};
use detcount::counting::{self, CounterCaps};
use detcount::decomposition;
use detcount::suites::{self, ConstantFit, SuiteOutcome};

const SEED: u64 = 0;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn suite_line(o: &SuiteOutcome) -> String {
    let mut s = format!("{} {}/{}", o.name, o.checked - o.failed, o.checked);
    for f in &o.failures {
        s.push_str(&format!("\n      violation: {f}"));
    }
    s
}

fn checks_line(r: &RegimeReport) -> String {
    r.checks
        .iter()
        .map(|c| {
            let tag = match (c.pass, c.required) {
                (true, _) => "ok",
                (false, true) => "FAIL",
                (false, false) => "over (charted)",
            };
            format!("{} = {:.4} vs {:.4} [{tag}]", c.name, c.value, c.threshold)
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn fit_line(f: &ConstantFit) -> String {
    match f.alpha {
        Some(a) => format!("{}: C = {:.4}, exponent {:.3}", f.name, f.c, a),
        None => format!("{}: C = {:.4}", f.name, f.c),
    }
}

fn oracle_equivalence() -> Verdict {
    let t = Instant::now();
    let out = suites::counter_agreement(6, 300, SEED).expect("counter agreement");
    let elapsed = t.elapsed();
    verdict(
        out.pass() && elapsed < Duration::from_secs(120),
        format!("{} in {:.1?}", suite_line(&out), elapsed),
    )
}

fn closed_form_cells() -> Verdict {
    let caps = CounterCaps::default();
    let mut bad = Vec::new();
    for n in 1..=50 {
        let top = counting::count_auto(2 * n * n, n, &caps).unwrap().count;
        if top != 4 {
            bad.push(format!("T(2N^2, {n}) = {top}"));
        }
        // 2N^2 - 1 = 1 when N = 1, whose count is the exhaustive 20.
        if n >= 2 {
            let below = counting::count_auto(2 * n * n - 1, n, &caps).unwrap().count;
            if below != 0 {
                bad.push(format!("T(2N^2-1, {n}) = {below}"));
            }
        }
    }
    let one = counting::count_naive(1, 1).unwrap().count;
    if one != 20 {
        bad.push(format!("T(1,1) = {one}"));
    }
    verdict(
        bad.is_empty(),
        format!("T(2N^2,N)=4 for N<=50, T(2N^2-1,N)=0 for 2<=N<=50, T(1,1)={one}; violations {bad:?}"),
    )
}

fn thm1_grid() -> Grid {
    Grid::new(
        Grid::geometric(250, 4000, 2),
        vec![
            HRule::Constant { value: 1 },
            HRule::Constant { value: 12 },
            HRule::Proportional { num: 1, den: 2 },
        ],
    )
}

fn theorem_one() -> Verdict {
    let t = Instant::now();
    let r = asymptotics::verify_thm1(&thm1_grid(), &Thresholds::default(), &CounterCaps::default()).unwrap();
    let elapsed = t.elapsed();
    let wanted = ["max |E1|/MT1 at N=4000, h<=N", "exponent of |E1| in N at h=1"];
    let ok = wanted.iter().all(|w| r.check(w).map(|c| c.pass).unwrap_or(false));
    verdict(
        ok && !r.degraded() && elapsed < Duration::from_secs(600),
        format!("{} in {:.1?}", checks_line(&r), elapsed),
    )
}

fn theorem_two() -> Verdict {
    let t = Instant::now();
    let grid = Grid::new(
        Grid::geometric(250, 4000, 2),
        vec![
            HRule::SquarePlus { num: 0, den: 1 },
            HRule::SquarePlus { num: 1, den: 2 },
            HRule::SquarePlus { num: -1, den: 2 },
        ],
    );
    let r = asymptotics::verify_thm2(&grid, &Thresholds::default(), &CounterCaps::default()).unwrap();
    let elapsed = t.elapsed();
    verdict(
        r.pass && elapsed < Duration::from_secs(600),
        format!("{} in {:.1?}", checks_line(&r), elapsed),
    )
}

fn large_h() -> Verdict {
    let r = asymptotics::verify_prop13(0.5, &[100, 200, 400, 800], &Thresholds::default(), &CounterCaps::default())
        .unwrap();
    verdict(r.pass, format!("{}; fitted C = {:.3}", checks_line(&r), r.c))
}

fn lemma_suites() -> Verdict {
    let outs = [
        suites::unit_classes(2000, 20, SEED).unwrap(),
        suites::congruence_bound(1000, 20, SEED).unwrap(),
        suites::ramanujan_identity(500, 500).unwrap(),
        suites::coprime_ranges(10_000, SEED).unwrap(),
    ];
    let residual = outs[2].metrics["max float residual"];
    let lines: Vec<String> = outs.iter().map(suite_line).collect();
    verdict(
        outs.iter().all(SuiteOutcome::pass) && residual < 1e-6,
        format!("{}; max float residual {residual:.2e}", lines.join(", ")),
    )
}

fn progression_structure() -> Verdict {
    let regimes = suites::progression_regimes(50, 10, 10_000, SEED).unwrap();
    let gap = suites::progression_gap_fit(&thm1_grid(), &CounterCaps::default()).unwrap();
    verdict(
        regimes.pass() && gap.bounded(),
        format!("{}; {}", suite_line(&regimes), fit_line(&gap)),
    )
}

fn line_structure() -> Verdict {
    let lines = suites::solution_line_identity(400, 20, decomposition::b0_in_one_to_y).unwrap();
    let s = suites::s_function_checks(10_000).unwrap();
    let main = suites::mainterm_fit(&Grid::geometric(200, 3200, 2), &suites::mainterm_rules()).unwrap();
    let alpha = main.alpha.unwrap_or(f64::INFINITY);
    verdict(
        lines.pass() && s.pass() && alpha <= 1.2,
        format!(
            "{}; {} (max deviation {:.4}); {}",
            suite_line(&lines),
            suite_line(&s),
            s.metrics["max |S(X) - (2 - zeta(2))X|"],
            fit_line(&main)
        ),
    )
}

fn boundary_sums() -> Verdict {
    let fits = suites::sawtooth_fits(&Grid::geometric(100, 1600, 2)).unwrap();
    let lines: Vec<String> = fits.iter().map(fit_line).collect();
    verdict(fits.iter().all(ConstantFit::bounded), lines.join("; "))
}

fn singular_count() -> Verdict {
    let r = asymptotics::verify_t_zero(&Grid::geometric(100, 3200, 2), &Thresholds::default(), &CounterCaps::default())
        .unwrap();
    verdict(r.pass, format!("{}; fitted C = {:.3}", checks_line(&r), r.c))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("closed-form cells", closed_form_cells),
        ("small-h asymptotic", theorem_one),
        ("near-N^2 asymptotic", theorem_two),
        ("large-h error floor", large_h),
        ("arithmetic lemma suites", lemma_suites),
        ("progression structure", progression_structure),
        ("solution-line structure", line_structure),
        ("boundary sums", boundary_sums),
        ("singular matrices", singular_count),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let v = run();
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!("[{status}] {:>2}. {name} ({:.1?}): {}", i + 1, t.elapsed(), v.detail);
        failed += !v.pass as usize;
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
