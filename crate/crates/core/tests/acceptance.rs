//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rayon::prelude::*;
use tdpoly::identities::{check_bernoulli_stirling_form, check_kellner, check_worpitzky_classic};
use tdpoly::quadrature::NUMERIC_ABS_TOL_AT_ZERO;
use tdpoly::triangles::stirling2_row;
use tdpoly::{
    bernoulli_number, check_theorem3_exact, check_theorem3_numeric, check_theorem4_series, check_worpitzky_general,
    falling_factorial, geometric_poly, laguerre_rule, rat_pow, stirling2, verify_sweep, whitney2_explicit_row,
    whitney2_table, IdentityId, Rational, Selection, SweepGrid, WhitneyParams,
};

const THEOREM1_MAX_SECONDS: f64 = 10.0;
const THEOREM3_NUMERIC_REL_TOL: f64 = 1e-8;
const THEOREM3_NUMERIC_MAX_N: usize = 12;
const THEOREM3_LAGUERRE_ORDER: usize = 64;
const THEOREM4_PAIRWISE_TOL: f64 = 1e-8;
const WEIGHT_SUM_TOL: f64 = 1e-12;
const GAMMA_MOMENT_REL_TOL: f64 = 1e-9;

type Outcome = Result<String, String>;

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

/// m ∈ 1..=5, a ∈ {-3, -5/2, ..., 3}.
fn criterion_grid() -> Vec<WhitneyParams> {
    let g = SweepGrid::default();
    g.m.iter()
        .flat_map(|&m| g.a.iter().map(move |a| WhitneyParams::new(m as i64, a.clone()).unwrap()))
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn theorem1_exact_suite() -> Outcome {
    let grid = SweepGrid::default();
    let start = Instant::now();
    let report = verify_sweep(&grid, Selection::Theorem1);
    let elapsed = start.elapsed().as_secs_f64();
    let checks: Vec<_> = report.checks.iter().filter(|c| c.id == IdentityId::Theorem1).collect();
    let expected = 5 * 13 * 26;
    ensure(checks.len() == expected, || format!("{} checks, expected {expected}", checks.len()))?;
    if let Some(bad) = checks.iter().find(|c| !c.holds) {
        return Err(format!("m={} a={} n={}: {:?} != {:?}", bad.m, bad.a, bad.n, bad.lhs, bad.rhs));
    }
    ensure(elapsed < THEOREM1_MAX_SECONDS, || format!("took {elapsed:.2} s"))?;
    Ok(format!("{} exact equalities in {elapsed:.2} s", checks.len()))
}

fn kellner_reduction() -> Outcome {
    for n in 0..=25 {
        let c = check_kellner(n);
        ensure(c.holds, || format!("n={n}: {:?} != {:?}", c.lhs, c.rhs))?;
    }
    let zero = Rational::zero();
    let minus_one = -Rational::one();
    ensure(geometric_poly(1).definite_integral(&minus_one, &zero) == q("-1/2"), || "B_1 != -1/2".into())?;
    ensure(geometric_poly(3).definite_integral(&minus_one, &zero).is_zero(), || "B_3 != 0".into())?;
    Ok("∫_{-1}^{0} w_n = B_n for n <= 25".into())
}

fn worpitzky_suite() -> Outcome {
    for n in 0..=20 {
        let c = check_worpitzky_classic(n);
        ensure(c.holds, || format!("double sum n={n}"))?;
    }
    for n in 1..=20 {
        let c = check_bernoulli_stirling_form(n).unwrap();
        ensure(c.holds, || format!("Stirling form n={n}"))?;
    }
    let params = criterion_grid();
    let failures: Vec<String> = params
        .par_iter()
        .flat_map_iter(|p| (0..=25).map(move |n| (p.clone(), n)))
        .filter_map(|(p, n)| {
            let c = check_worpitzky_general(&p, n);
            (!c.holds).then(|| format!("general m={} a={} n={n}", p.m(), p.a()))
        })
        .collect();
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok(format!("classic forms n <= 20, generalized form on {} grid points", params.len() * 26))
}

fn theorem3_suite() -> Outcome {
    let params = criterion_grid();
    let exact_failures: Vec<String> = params
        .par_iter()
        .flat_map_iter(|p| (0..=25).map(move |n| (p.clone(), n)))
        .filter_map(|(p, n)| (!check_theorem3_exact(&p, n).holds).then(|| format!("m={} a={} n={n}", p.m(), p.a())))
        .collect();
    ensure(exact_failures.is_empty(), || format!("exact: {}", exact_failures.join("; ")))?;
    const XS: [f64; 4] = [-2.0, -0.5, 0.5, 2.0];
    let rows: Vec<(String, f64, bool)> = params
        .par_iter()
        .flat_map_iter(|p| (0..=THEOREM3_NUMERIC_MAX_N).flat_map(move |n| XS.iter().map(move |&x| (p.clone(), n, x))))
        .map(|(p, n, x)| {
            let r = check_theorem3_numeric(&p, n, x, THEOREM3_LAGUERRE_ORDER).unwrap();
            let ok = r.passes(THEOREM3_NUMERIC_REL_TOL, NUMERIC_ABS_TOL_AT_ZERO);
            (format!("m={} a={} n={n} x={x}: rel {:.2e}", p.m(), p.a(), r.rel()), r.rel(), ok)
        })
        .collect();
    let worst = rows.iter().map(|r| r.1).fold(0.0f64, f64::max);
    let bad: Vec<&str> = rows.iter().filter(|r| !r.2).map(|r| r.0.as_str()).collect();
    ensure(bad.is_empty(), || format!("numeric: {}", bad.join("; ")))?;
    Ok(format!("exact on {} points; numeric worst rel {worst:.2e} over {} points", params.len() * 26, rows.len()))
}

fn theorem4_points() -> Vec<(WhitneyParams, Rational, Rational)> {
    let xs = ["-1", "-1/2", "1/2", "1"];
    let zs = ["-1/5", "-1/10", "1/10", "1/5", "1/20"];
    let a_values = ["0", "1", "-3/2", "5/2", "-1", "1/3", "2"];
    (0..20)
        .map(|i| {
            let p = WhitneyParams::new(1 + (i % 3) as i64, q(a_values[i % 7])).unwrap();
            (p, q(xs[i % 4]), q(zs[i % 5]))
        })
        .collect()
}

fn theorem4_suite() -> Outcome {
    let mut worst = 0.0f64;
    for (p, x, z) in theorem4_points() {
        let (m, xf, zf) = (p.m() as f64, x.to_f64(), z.to_f64());
        let ratio = xf * (m * zf).exp_m1() / m;
        ensure(ratio < 0.5, || format!("sample m={m} x={x} z={z} outside the safe region"))?;
        let long = check_theorem4_series(&p, &x, &z, 40).map_err(|e| e.to_string())?;
        let short = check_theorem4_series(&p, &x, &z, 10).map_err(|e| e.to_string())?;
        ensure(long.residual < THEOREM4_PAIRWISE_TOL, || {
            format!("m={m} a={} x={x} z={z}: residual {:.2e}", p.a(), long.residual)
        })?;
        ensure(long.residual <= short.residual, || {
            format!("m={m} x={x} z={z}: N=40 residual {:.2e} > N=10 residual {:.2e}", long.residual, short.residual)
        })?;
        worst = worst.max(long.residual);
    }
    Ok(format!("20 points, worst pairwise residual {worst:.2e}"))
}

/// Set partitions of an n-set into k blocks by restricted growth strings.
fn count_partitions(n: usize) -> Vec<u64> {
    let mut counts = vec![0u64; n + 1];
    fn go(i: usize, n: usize, blocks: usize, counts: &mut [u64]) {
        if i == n {
            counts[blocks] += 1;
            return;
        }
        for b in 0..=blocks {
            go(i + 1, n, if b == blocks { blocks + 1 } else { blocks }, counts);
        }
    }
    go(0, n, 0, &mut counts);
    counts
}

/// Ordered set partitions of an n-set: surjections onto 0..k, summed over k.
fn count_ordered_partitions(n: usize) -> u64 {
    if n == 0 {
        return 1;
    }
    (1..=n)
        .map(|k| {
            let total = (k as u64).pow(n as u32);
            (0..total)
                .filter(|&code| {
                    let mut seen = vec![false; k];
                    let mut c = code;
                    for _ in 0..n {
                        seen[(c % k as u64) as usize] = true;
                        c /= k as u64;
                    }
                    seen.iter().all(|&s| s)
                })
                .count() as u64
        })
        .sum()
}

fn oracle_suite() -> Outcome {
    let classical = WhitneyParams::classical();
    let table = whitney2_table(&classical, 20);
    for n in 0..=8 {
        let counts = count_partitions(n);
        for k in 0..=n {
            ensure(table.get(n, k as i64) == Rational::from(counts[k] as i64), || {
                format!("W̃_(1,0)({n},{k}) != partition count {}", counts[k])
            })?;
        }
    }
    for n in 0..=20 {
        let row = stirling2_row(n);
        for k in 0..=n {
            ensure(table.get(n, k as i64) == Rational::from(row[k].clone()), || format!("S({n},{k})"))?;
        }
    }
    let expected = [1u64, 1, 3, 13, 75, 541, 4683, 47293];
    for (n, &e) in expected.iter().enumerate() {
        let enumerated = count_ordered_partitions(n);
        ensure(enumerated == e, || format!("enumeration w_{n} = {enumerated}, expected {e}"))?;
        let w = geometric_poly(n).eval(&Rational::one());
        ensure(w == Rational::from(e as i64), || format!("w_{n}(1) = {w}, expected {e}"))?;
    }
    let params = criterion_grid();
    let disagreements: Vec<String> = params
        .par_iter()
        .filter_map(|p| {
            let t = whitney2_table(p, 40);
            (0..=40)
                .find(|&n| whitney2_explicit_row(p, n).as_slice() != t.row(n))
                .map(|n| format!("m={} a={} row {n}", p.m(), p.a()))
        })
        .collect();
    ensure(disagreements.is_empty(), || disagreements.join("; "))?;
    Ok(format!("partitions n <= 8, Stirling n <= 20, Fubini n <= 7, routes agree n <= 40 on {} params", params.len()))
}

fn property_suite() -> Outcome {
    for k in 1..=12 {
        ensure(bernoulli_number(2 * k + 1).is_zero(), || format!("B_{} != 0", 2 * k + 1))?;
    }
    for n in 0..=10usize {
        for x in 0..=n as i64 {
            let x = Rational::from(x);
            let lhs: Rational = (0..=n)
                .map(|k| Rational::from(stirling2(n, k as i64)) * falling_factorial(&x, k as u32))
                .sum();
            ensure(lhs == rat_pow(&x, n as u32), || format!("Stirling expansion n={n} x={x}"))?;
        }
    }
    let mut worst_sum = 0.0f64;
    for order in 1..=128 {
        let rule = laguerre_rule(order).map_err(|e| e.to_string())?;
        let total: f64 = rule.weights().iter().sum();
        worst_sum = worst_sum.max((total - 1.0).abs());
        ensure(rule.nodes()[0] > 0.0 && rule.nodes().windows(2).all(|w| w[0] < w[1]), || {
            format!("order {order} nodes not strictly increasing and positive")
        })?;
    }
    ensure(worst_sum < WEIGHT_SUM_TOL, || format!("weight sum off by {worst_sum:.2e}"))?;
    let rule = laguerre_rule(64).unwrap();
    let mut fact = 1.0f64;
    let mut worst_moment = 0.0f64;
    for k in 0..=20 {
        if k > 0 {
            fact *= k as f64;
        }
        let rel = (rule.integrate(|l| l.powi(k)) - fact).abs() / fact;
        worst_moment = worst_moment.max(rel);
    }
    ensure(worst_moment < GAMMA_MOMENT_REL_TOL, || format!("gamma moment rel error {worst_moment:.2e}"))?;
    Ok(format!(
        "odd Bernoulli vanish, Stirling expansion, weight sums within {worst_sum:.1e}, moments within {worst_moment:.1e}"
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("1 theorem1 exact suite", theorem1_exact_suite),
        ("2 Kellner reduction", kellner_reduction),
        ("3 Worpitzky suite", worpitzky_suite),
        ("4 theorem3 exact + numeric", theorem3_suite),
        ("5 theorem4 series/closed form/integral", theorem4_suite),
        ("6 oracle suite", oracle_suite),
        ("7 property suite", property_suite),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] criterion {name}: {detail} ({secs:.2} s)"),
            Err(reason) => {
                failed += 1;
                println!("[FAIL] criterion {name}: {reason} ({secs:.2} s)");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 7 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
