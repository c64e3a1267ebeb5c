//! Acceptance criteria. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any fails. All comparisons are exact.

mod common;

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{q, qs, rational_roots_by_enumeration, somos_integer_oracle};
use rectree::analysis::{check_conjecture, f_exponent, verify_closed_form_branch};
use rectree::recurrence::{
    make_first_order, make_order3_unfolding, make_somos_ratio_quadratic, step_polynomial,
    ParamPoint,
};
use rectree::search::{run_search, Coeffs, IntRange, SearchSpec};
use rectree::somos::{ac_direct, check_claim1, check_claim2, check_t_identity, somos4, t_value};
use rectree::tree::{build_tree, level_stats};
use rectree::{solve_quadratic, Rational, RootKind};

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn grid(lo: i64, hi: i64) -> Vec<ParamPoint> {
    (lo..=hi)
        .flat_map(|c1| (lo..=hi).map(move |c2| ParamPoint::new(c1, c2)))
        .collect()
}

fn within(start: Instant, limit: Duration, what: &str) -> Outcome {
    let took = start.elapsed();
    ensure!(took < limit, "{what} took {took:?}, limit {limit:?}");
    Ok(())
}

fn ac1_somos_integrality() -> Outcome {
    let start = Instant::now();
    for c in grid(1, 5) {
        let run = somos4(c, 30).map_err(|e| e.to_string())?;
        ensure!(run.is_integral(), "non-integer term at {c}");
        let oracle =
            somos_integer_oracle(c.c1, c.c2, 30).ok_or(format!("oracle inexact at {c}"))?;
        let oracle: Vec<Rational> = oracle.into_iter().map(Rational::from).collect();
        ensure!(
            run.s == oracle,
            "library and integer oracle disagree at {c}"
        );
    }
    let head: Vec<Rational> = [1, 1, 1, 1, 2, 3, 7, 23, 59, 314, 1529]
        .iter()
        .map(|&v| Rational::from(v))
        .collect();
    ensure!(
        somos4(ParamPoint::new(1, 1), 30).unwrap().s[..11] == head[..],
        "Somos-4 prefix at (1,1)"
    );
    within(start, Duration::from_secs(5), "integrality sweep")
}

fn ac2_displayed_terms() -> Outcome {
    for c in grid(1, 5) {
        let (c1, c2) = (c.c1, c.c2);
        let run = somos4(c, 7).map_err(|e| e.to_string())?;
        ensure!(*run.term(5) == c1 + c2, "s(5) at {c}");
        ensure!(*run.term(6) == c1 * c1 + c1 * c2 + c2, "s(6) at {c}");
        let s7 = c1.pow(3) + 2 * c1 * c1 * c2 + c1 * c2 + 2 * c1 * c2 * c2 + c2.pow(3);
        ensure!(*run.term(7) == s7, "s(7) at {c}");
    }
    Ok(())
}

fn ac3_claim1() -> Outcome {
    let start = Instant::now();
    for c in grid(1, 5) {
        ensure!(
            check_claim1(c, 50).map_err(|e| e.to_string())?,
            "claim 1 fails at {c}"
        );
        // Independent route: ratios of ratios straight from the integer oracle.
        let s: Vec<Rational> = somos_integer_oracle(c.c1, c.c2, 52)
            .unwrap()
            .into_iter()
            .map(Rational::from)
            .collect();
        let direct = ac_direct(c, 50).map_err(|e| e.to_string())?;
        for n in 0..50 {
            let rr = (&s[n + 2] * &s[n]).checked_div(&s[n + 1].square()).unwrap();
            ensure!(rr == direct[n], "a({}) at {c}", n + 1);
        }
    }
    within(start, Duration::from_secs(5), "claim 1 sweep")
}

fn ac4_claim2_and_t() -> Outcome {
    for c in grid(1, 5) {
        ensure!(
            check_claim2(c, 100).map_err(|e| e.to_string())?,
            "claim 2 fails at {c}"
        );
        ensure!(
            check_t_identity(c, 100).map_err(|e| e.to_string())?,
            "T(n) != 0 at {c}"
        );
        let a = ac_direct(c, 3).unwrap();
        ensure!(t_value(c, &a[0], &a[1]).is_zero(), "T(1) at {c}");
        ensure!(a[2] == c.sum(), "a(3) = c1 + c2 at {c}");
    }
    Ok(())
}

fn ac5_single_sequence_tree() -> Outcome {
    let start = Instant::now();
    for c in grid(1, 3) {
        let t = build_tree(&make_somos_ratio_quadratic(c), &[Rational::one()], 14)
            .map_err(|e| e.to_string())?;
        ensure!(!t.has_nonrational_cutoff(), "irrational branch at {c}");
        let stats = level_stats(&t);
        ensure!(stats.len() == 14, "expected 14 levels at {c}");
        for s in &stats[1..] {
            ensure!(
                s.new_values.len() == 1,
                "depth {} has {} new values at {c}",
                s.depth,
                s.new_values.len()
            );
        }
        // a_c(2) = 1 repeats the root, so depth d contributes a_c(d + 1).
        let a = ac_direct(c, 15).unwrap();
        for s in &stats[1..] {
            let d = s.depth as usize;
            ensure!(
                s.new_values[0] == a[d],
                "new value at depth {d} is not a_c({}) at {c}",
                d + 1
            );
        }
    }
    within(start, Duration::from_secs(60), "depth-14 trees")
}

fn ac6_symmetric_first_order() -> Outcome {
    let mut checked = 0;
    for a1 in -3..=3i64 {
        for a2 in -3..=3i64 {
            for b1 in -5..=5i64 {
                let disc = Rational::from((a1 + a2).pow(2) - 4 * (b1 + a1));
                if rectree::exact_sqrt(&disc).is_none() {
                    continue;
                }
                checked += 1;
                let t = build_tree(&make_first_order(a1, a2, b1, a1), &[Rational::one()], 10)
                    .map_err(|e| e.to_string())?;
                ensure!(
                    !t.has_nonrational_cutoff(),
                    "({a1},{a2},{b1},{a1}) leaves Q before depth 10"
                );
                ensure!(
                    t.backtracking_violations().is_empty(),
                    "({a1},{a2},{b1},{a1}) breaks back-tracking"
                );
                ensure!(
                    t.unverified_children().is_empty(),
                    "({a1},{a2},{b1},{a1}) has a non-root child"
                );
            }
        }
    }
    ensure!(checked > 0, "no tuple passed the discriminant filter");
    Ok(())
}

fn ac7_worked_example() -> Outcome {
    let r = make_first_order(1, 5, 8, 1);
    let t = build_tree(&r, &[Rational::one()], 12).map_err(|e| e.to_string())?;
    let level2: Vec<_> = t.levels()[1].iter().map(|&id| t.node(id)).collect();
    ensure!(
        level2.len() == 1 && level2[0].value == q("-3") && level2[0].multiplicity == 2,
        "a(2) should be the double root -3"
    );
    let level3: BTreeSet<Rational> = t.levels()[2]
        .iter()
        .map(|&id| t.node(id).value.clone())
        .collect();
    ensure!(
        level3.into_iter().collect::<Vec<_>>() == qs(&["5/9", "1"]),
        "level 3 should be {{1, 5/9}}"
    );
    // Oracle for level 3: rational roots of 9X² − 14X + 5 by enumeration.
    let (p2, p1, p0) = step_polynomial(&r, &[q("-3")]).unwrap();
    ensure!(
        rational_roots_by_enumeration(&p2, &p1, &p0) == Some(qs(&["5/9", "1"])),
        "enumeration oracle disagrees"
    );
    ensure!(!t.has_nonrational_cutoff(), "tree leaves Q before depth 12");
    for s in level_stats(&t) {
        ensure!(
            s.new_values.len() <= 2,
            "depth {} has {} new values",
            s.depth,
            s.new_values.len()
        );
    }
    Ok(())
}

fn ac8_closed_form() -> Outcome {
    for c in grid(1, 4) {
        let rep = verify_closed_form_branch(c, 16).map_err(|e| e.to_string())?;
        ensure!(
            rep.matched,
            "closed form misses at n = {:?} for {c}",
            rep.mismatch_at
        );
        ensure!(
            rep.found_path == rep.expected && rep.found_path.len() == 16,
            "path length at {c}"
        );
    }
    let f: Vec<u64> = (4..=12).map(f_exponent).collect();
    ensure!(f == [0, 1, 2, 4, 6, 9, 12, 16, 20], "f(4..12) = {f:?}");
    for i in 2..=20u64 {
        if 2 * (i + 1) > 40 {
            break;
        }
        ensure!(
            f_exponent(2 * i + 1) - f_exponent(2 * i) == i - 1,
            "f(2i+1) - f(2i) at i = {i}"
        );
        ensure!(
            f_exponent(2 * (i + 1)) - f_exponent(2 * i + 1) == i - 1,
            "f(2i+2) - f(2i+1) at i = {i}"
        );
    }
    Ok(())
}

fn ac9_order3_base() -> Outcome {
    let r = make_order3_unfolding(ParamPoint::new(1, 1));
    let roots = |w: &[&str]| {
        let (p2, p1, p0) = step_polynomial(&r, &qs(w)).unwrap();
        let sol = solve_quadratic(&p2, &p1, &p0);
        let oracle = rational_roots_by_enumeration(&p2, &p1, &p0).unwrap();
        (sol, oracle)
    };
    let (first, oracle) = roots(&["1", "1", "1"]);
    ensure!(
        first.kind == RootKind::TwoRational
            && first.roots == qs(&["1", "2"])
            && oracle == first.roots,
        "first branching"
    );
    let (s6, oracle) = roots(&["1", "1", "2"]);
    ensure!(
        s6.roots == qs(&["3", "4"]) && oracle == s6.roots,
        "s(6) candidates"
    );

    // The same candidates inside the built tree, following s(4)=1, s(5)=1, s(6)=2.
    let t = build_tree(&r, &qs(&["1", "1", "1"]), 7).map_err(|e| e.to_string())?;
    let mut picks = [q("1"), q("1"), q("2")].into_iter();
    let mut offered = Vec::new();
    let path = rectree::extract_path(&t, |d, c| {
        if d >= 4 {
            offered.push(c.to_vec());
            picks.next()
        } else {
            c.first().cloned()
        }
    });
    ensure!(path == qs(&["1", "1", "1", "1", "1", "2"]), "path {path:?}");
    ensure!(
        offered[0] == qs(&["1", "2"]) && offered[1] == qs(&["1", "2"]),
        "s(4), s(5) candidates"
    );
    // After 1, 1, 2 the window for s(7) is (1, 1, 2): candidates {3, 4} again.
    ensure!(
        offered[3] == qs(&["3", "4"]),
        "candidates after choosing 1, 1, 2: {:?}",
        offered[3]
    );
    Ok(())
}

fn ac10_conjecture() -> Outcome {
    let start = Instant::now();
    let rep = check_conjecture(ParamPoint::new(1, 1), 6, 20).map_err(|e| e.to_string())?;
    ensure!(rep.values_checked > 0, "no values checked");
    ensure!(
        rep.witnesses_consistent(),
        "a witness does not multiply back to its value"
    );
    ensure!(
        rep.all_factorable == rep.failures.is_empty(),
        "report flags inconsistent"
    );
    ensure!(
        rep.all_factorable,
        "not factorable within horizon: {:?}",
        rep.failures
    );
    within(start, Duration::from_secs(120), "conjecture check")
}

fn ac11_search() -> Outcome {
    let spec = SearchSpec {
        a1: IntRange::new(-2, 6),
        a2: IntRange::new(-2, 6),
        b1: IntRange::new(-2, 9),
        b2: IntRange::new(0, 0),
        enforce_a1_eq_b2: true,
        initial_value: Rational::one(),
        test_depth: 8,
    };
    let first = run_search(&spec).map_err(|e| e.to_string())?;
    ensure!(
        first.hits.iter().any(|h| h.coeffs
            == Coeffs {
                a1: 1,
                a2: 5,
                b1: 8,
                b2: 1
            }),
        "(1,5,8,1) not among hits"
    );
    ensure!(
        first.failed_deeper == 0,
        "a symmetric tuple passed level 2 but failed deeper"
    );
    let second = run_search(&spec).map_err(|e| e.to_string())?;
    ensure!(first == second, "reports differ between runs");
    let a = serde_json::to_string(&first).unwrap();
    let b = serde_json::to_string(&second).unwrap();
    ensure!(a == b, "JSON differs between runs");
    Ok(())
}

fn main() {
    let criteria: [Criterion; 11] = [
        (
            "AC-1  Somos-4 integrality, c in [1,5]^2, n <= 30",
            ac1_somos_integrality,
        ),
        (
            "AC-2  s(5), s(6), s(7) polynomial identities",
            ac2_displayed_terms,
        ),
        (
            "AC-3  ratios of ratios = direct generator, n <= 50",
            ac3_claim1,
        ),
        (
            "AC-4  second identity and T(n) = 0, n <= 100",
            ac4_claim2_and_t,
        ),
        (
            "AC-5  one new value per level, depth 14",
            ac5_single_sequence_tree,
        ),
        (
            "AC-6  A1 = B2 trees rational to depth 10, back-tracking",
            ac6_symmetric_first_order,
        ),
        ("AC-7  worked example (1,5,8,1)", ac7_worked_example),
        (
            "AC-8  closed-form branch to depth 16, f(n) identities",
            ac8_closed_form,
        ),
        ("AC-9  order-3 base case", ac9_order3_base),
        ("AC-10 conjecture factorization at (1,1)", ac10_conjecture),
        (
            "AC-11 search reproduces (1,5,8,1), deterministic",
            ac11_search,
        ),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(format!(
                "panicked: {:?}",
                p.downcast_ref::<String>()
                    .map(String::as_str)
                    .or(p.downcast_ref::<&str>().copied())
            ))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS  {name}  ({secs:.2}s)"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {name}  ({secs:.2}s): {msg}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {} failed",
        criteria.len() - failed,
        failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
