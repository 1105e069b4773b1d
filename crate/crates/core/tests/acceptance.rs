//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion to
//! stderr (uncaptured) and fails if any criterion fails.

use std::io::Write;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, Zero};
use polygame_core::solver::SolverConfig;
use polygame_core::strategy::{
    CrtLift, NoraCubefree, NoraEven, NoraSixteen, Strategy, WandaFourthPower, WandaLast,
    WandaPrimePower,
};
use polygame_core::verify::{
    abelian_suite, certify_strategy, default_theorem1_grid, oracle_properties, theorem1_table,
    to_jsonl, valued_certification_suite, AbelianSuiteConfig, CertificationReport, OracleConfig,
    Theorem1Row, Universe, ValuedSuiteConfig,
};
use polygame_core::{Arena, Player};

const SMALL_GRID_LIMIT: Duration = Duration::from_secs(10 * 60);
const LARGE_GRID_LIMIT: Duration = Duration::from_secs(15 * 60);
const LINES_48_LIMIT: Duration = Duration::from_secs(10 * 60);
const ABELIAN_LIMIT: Duration = Duration::from_secs(5 * 60);

struct Outcome {
    ok: bool,
    summary: String,
    jsonl: String,
}

fn report(n: usize, o: &Outcome) {
    let tag = if o.ok { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    writeln!(err, "[{tag}] criterion {n}: {}", o.summary).unwrap();
}

fn grid_rows(grid: &[(u64, usize)]) -> (Vec<Theorem1Row>, Duration) {
    let cfg = SolverConfig {
        parallel: true,
        ..SolverConfig::default()
    };
    let start = Instant::now();
    let rows = theorem1_table(grid, &cfg).unwrap();
    (rows, start.elapsed())
}

fn theorem_grid(small: bool) -> Outcome {
    let grid: Vec<_> = default_theorem1_grid()
        .into_iter()
        .filter(|&(_, d)| (d <= 3) == small)
        .collect();
    let (rows, elapsed) = grid_rows(&grid);
    let limit = if small {
        SMALL_GRID_LIMIT
    } else {
        LARGE_GRID_LIMIT
    };
    let matched = rows.iter().filter(|r| r.matches).count();
    let mismatches: Vec<String> = rows
        .iter()
        .filter(|r| !r.matches)
        .map(|r| format!("N={} d={} first={}", r.n, r.d, r.first))
        .collect();
    Outcome {
        ok: matched == rows.len() && elapsed < limit,
        summary: format!(
            "{matched}/{} rows ({} cells x 2 first players) solver = classify in {:.1?} (limit {:?}){}",
            rows.len(),
            grid.len(),
            elapsed,
            limit,
            if mismatches.is_empty() { String::new() } else { format!("; mismatches {mismatches:?}") }
        ),
        jsonl: to_jsonl(&rows).unwrap(),
    }
}

fn exhaustive(
    s: &dyn Strategy,
    n: u64,
    d: usize,
    role: Player,
    first: Player,
) -> CertificationReport {
    let arena = Arena::cyclic(n, d).unwrap();
    certify_strategy(s, &arena, role, first, &Universe::Exhaustive).unwrap()
}

fn exhaustive_certification() -> Outcome {
    use Player::{Nora, Wanda};
    let mut runs = Vec::new();
    for n in 2..=16u64 {
        for d in 1..=5 {
            for first in [Nora, Wanda] {
                if WandaLast
                    .applicable(&Arena::cyclic(n, d).unwrap(), first)
                    .is_ok()
                {
                    runs.push(exhaustive(&WandaLast, n, d, Wanda, first));
                }
            }
        }
    }
    for n in 4..=16u64 {
        for d in [2, 4] {
            if NoraEven
                .applicable(&Arena::cyclic(n, d).unwrap(), Nora)
                .is_ok()
            {
                runs.push(exhaustive(&NoraEven, n, d, Nora, Nora));
            }
        }
    }
    for n in [9, 12, 15] {
        runs.push(exhaustive(&NoraCubefree, n, 3, Nora, Wanda));
    }
    for n in [8, 27, 32, 64] {
        runs.push(exhaustive(&WandaPrimePower, n, 3, Wanda, Wanda));
    }
    for n in [16, 81] {
        runs.push(exhaustive(&WandaFourthPower, n, 3, Wanda, Wanda));
    }
    runs.push(exhaustive(&NoraSixteen, 16, 5, Nora, Wanda));
    runs.push(exhaustive(
        &CrtLift::new(Arc::new(WandaPrimePower), 8),
        72,
        3,
        Wanda,
        Wanda,
    ));
    let forty_eight = exhaustive(&NoraSixteen, 48, 5, Nora, Wanda);
    let t48 = forty_eight.wall_time;
    runs.push(forty_eight);

    let lines = |n: u64| {
        runs.iter()
            .find(|r| {
                r.degree == 5
                    && r.strategy == "nora_sixteen"
                    && r.arena == Arena::cyclic(n, 5).unwrap().spec()
            })
            .map_or(0, |r| r.games)
    };
    let lost: Vec<String> = runs
        .iter()
        .filter(|r| !r.all_won())
        .map(|r| {
            format!(
                "{} {:?} d={} first={}",
                r.strategy, r.arena, r.degree, r.first
            )
        })
        .collect();
    let games: u64 = runs.iter().map(|r| r.games).sum();
    let wins: u64 = runs.iter().map(|r| r.wins).sum();
    Outcome {
        ok: lost.is_empty() && t48 < LINES_48_LIMIT,
        summary: format!(
            "{} exhaustive runs, {wins}/{games} adversary lines won; nora_sixteen lines N=16: {}, N=48: {} in {:.1?} (limit {:?}){}",
            runs.len(),
            lines(16),
            lines(48),
            t48,
            LINES_48_LIMIT,
            if lost.is_empty() { String::new() } else { format!("; losing runs {lost:?}") }
        ),
        jsonl: to_jsonl(&runs).unwrap(),
    }
}

fn valued_certification() -> Outcome {
    let report = valued_certification_suite(&ValuedSuiteConfig::default()).unwrap();
    let mut ok = report.integral_polygon_misses == 0;
    let mut parts = Vec::new();
    for name in ["nora_quad", "nora_quartic", "nora_highdeg", "nora_cubic"] {
        let mine: Vec<_> = report.runs.iter().filter(|r| r.strategy == name).collect();
        let random: Vec<_> = mine
            .iter()
            .filter(|r| r.universe.starts_with("random"))
            .collect();
        let (rg, rw) = (
            random.iter().map(|r| r.games).sum::<u64>(),
            random.iter().map(|r| r.wins).sum::<u64>(),
        );
        let scripted: Vec<_> = mine
            .iter()
            .filter(|r| r.universe.starts_with("scripted"))
            .collect();
        let (sg, sw) = (
            scripted.iter().map(|r| r.games).sum::<u64>(),
            scripted.iter().map(|r| r.wins).sum::<u64>(),
        );
        let missing = report
            .totals_for(name)
            .map_or(vec!["<no runs>".to_string()], |t| {
                t.missing_branches.clone()
            });
        ok &= rg >= 1000 && rw == rg && sg > 0 && sw == sg && missing.is_empty();
        parts.push(format!("{name} random {rw}/{rg} scripted {sw}/{sg}"));
        if !missing.is_empty() {
            parts.push(format!("{name} missing branches {missing:?}"));
        }
    }
    let integral = report.totals_for("wanda_integral").unwrap();
    ok &= integral.passed() && integral.games >= 1000;
    parts.push(format!(
        "wanda_integral {}/{} at p=5, {} polygon misses",
        integral.wins, integral.games, report.integral_polygon_misses
    ));
    Outcome {
        ok,
        summary: parts.join("; "),
        jsonl: to_jsonl(&report.runs).unwrap(),
    }
}

fn oracles() -> Outcome {
    let tallies = oracle_properties(&OracleConfig::default()).unwrap();
    let ok = tallies.iter().all(|t| t.all_passed());
    let mut parts: Vec<String> = tallies
        .iter()
        .map(|t| format!("{} {}/{}", t.property, t.passed, t.total))
        .collect();
    parts.extend(tallies.iter().filter_map(|t| {
        t.first_failure
            .as_ref()
            .map(|f| format!("first failure {f}"))
    }));
    Outcome {
        ok,
        summary: parts.join("; "),
        jsonl: to_jsonl(&tallies).unwrap(),
    }
}

fn trial_division_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        while n % q == 0 {
            out.push(q);
            n /= q;
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `x = n0 + n * step / 2` for some integer `n`.
fn on_half_lattice(x: i64, n0: i64, step: usize) -> bool {
    (Ratio::from_integer(2 * (x - n0)) / Ratio::from_integer(step as i64)).is_integer()
}

fn cubic_disc(f: &[BigRational]) -> BigRational {
    let (d, c, b, a) = (&f[0], &f[1], &f[2], &f[3]);
    let k = |n: i64| BigRational::from_integer(BigInt::from(n));
    b * b * c * c - k(4) * a * c * c * c - k(4) * b * b * b * d - k(27) * a * a * d * d
        + k(18) * a * b * c * d
}

fn abelian() -> Outcome {
    let config = AbelianSuiteConfig::default();
    let start = Instant::now();
    let report = abelian_suite(&config).unwrap();
    let elapsed = start.elapsed();
    let mut parts = Vec::new();

    let p9 = report
        .primes
        .iter()
        .find(|a| a.degree_bound == 9)
        .map(|a| a.prime);
    let bad_primes: Vec<(usize, u64)> = report
        .primes
        .iter()
        .filter(|a| {
            let p = a.prime;
            let prime = trial_division_factors(p) == vec![p];
            let half = trial_division_factors((p - 1) / 2);
            !(prime && p % 4 == 3 && half.iter().all(|&q| q as usize > a.degree_bound))
        })
        .map(|a| (a.degree_bound, a.prime))
        .collect();
    parts.push(format!("find_abelian_prime(9) = {p9:?}"));
    parts.push(format!(
        "{}/{} degree bounds 9..=20 valid",
        report.primes.len() - bad_primes.len(),
        report.primes.len()
    ));

    let mut violations = 0;
    for a in &report.avoidance {
        let descending = a.sequence.windows(2).all(|w| w[0] > w[1]);
        let sized = a.sequence.len() == config.avoid_count && a.sequence.iter().all(|&x| x < 0);
        let hits = a
            .sequence
            .iter()
            .filter(|&&x| on_half_lattice(x, a.n1, a.i) || on_half_lattice(x, a.n2, a.d - a.i))
            .count();
        if !descending || !sized || hits > 0 {
            violations += 1;
        }
    }
    parts.push(format!(
        "ap_avoid {} parameter points, {violations} violations",
        report.avoidance.len()
    ));

    let mut good_games = 0;
    for g in &report.cubic_games {
        let coeffs: Option<Vec<BigRational>> = g.coeffs.iter().map(|c| c.parse().ok()).collect();
        let disc_negative = coeffs
            .as_ref()
            .is_some_and(|f| cubic_disc(f).is_negative() && !f[3].is_zero());
        let rootless = g
            .certificate
            .as_ref()
            .is_some_and(|c| c.no_qp_root && c.prime == g.prime);
        if g.complete && disc_negative && rootless {
            good_games += 1;
        }
    }
    let primes: Vec<u64> = config.cubic_primes.clone();
    parts.push(format!(
        "nora_abelian_cubic {good_games}/{} games disc < 0 and rootless (p in {primes:?}, {} per prime)",
        report.cubic_games.len(),
        config.cubic_games
    ));
    parts.push(format!("{elapsed:.1?} (limit {ABELIAN_LIMIT:?})"));

    let ok = p9 == Some(107)
        && bad_primes.is_empty()
        && report.primes.len() == 12
        && violations == 0
        && good_games == report.cubic_games.len()
        && good_games as u64 >= config.cubic_games
        && elapsed < ABELIAN_LIMIT;
    let mut jsonl = to_jsonl(&report.primes).unwrap();
    jsonl.push_str(&to_jsonl(&report.avoidance).unwrap());
    jsonl.push_str(&to_jsonl(&report.cubic_games).unwrap());
    Outcome {
        ok,
        summary: parts.join("; "),
        jsonl,
    }
}

fn run_all() -> Vec<Outcome> {
    vec![
        theorem_grid(true),
        theorem_grid(false),
        exhaustive_certification(),
        valued_certification(),
        oracles(),
        abelian(),
    ]
}

#[test]
fn primary_acceptance_criteria() {
    let first = run_all();
    for (k, o) in first.iter().enumerate() {
        report(k + 1, o);
    }
    let second = run_all();
    let differing: Vec<usize> = first
        .iter()
        .zip(&second)
        .enumerate()
        .filter(|(_, (a, b))| a.jsonl != b.jsonl)
        .map(|(k, _)| k + 1)
        .collect();
    let bytes: usize = first.iter().map(|o| o.jsonl.len()).sum();
    let determinism = Outcome {
        ok: differing.is_empty(),
        summary: format!(
            "second run of criteria 1-6 byte-identical JSONL ({bytes} bytes){}",
            if differing.is_empty() {
                String::new()
            } else {
                format!("; differs for {differing:?}")
            }
        ),
        jsonl: String::new(),
    };
    report(7, &determinism);

    let failed: Vec<usize> = first
        .iter()
        .chain([&determinism])
        .enumerate()
        .filter(|(_, o)| !o.ok)
        .map(|(k, _)| k + 1)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
