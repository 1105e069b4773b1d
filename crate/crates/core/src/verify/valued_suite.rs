//! Certification runs for the Q_p strategies: branch-covering scripted
//! lines over a small value grid, seeded random adversaries, and
//! cube-forcing lines for the cubic.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::game::{Arena, GameState, Move, Player};
use crate::strategy::{NoraCubic, NoraHighdeg, NoraQuad, NoraQuartic, Strategy, WandaIntegral};
use crate::valued::{newton_polygon_of, p_pow, rat};
use crate::zring::last_player;

use super::{certify_strategy, sample_rational, CertificationReport, Universe};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuedSuiteConfig {
    pub primes: Vec<u64>,
    pub seeds: Vec<u64>,
    /// Random games per (seed, prime, arena).
    pub trials: u64,
    /// Random adversary orders are drawn from `[-bound, bound]`.
    pub bound: i64,
    pub integral_prime: u64,
    pub integral_games: u64,
    /// Cube-forcing lines per prime for the cubic.
    pub cube_lines: u64,
}

impl Default for ValuedSuiteConfig {
    fn default() -> Self {
        ValuedSuiteConfig {
            primes: vec![2, 3, 5, 7],
            seeds: vec![1, 2, 3, 4, 5],
            trials: 50,
            bound: 4,
            integral_prime: 5,
            integral_games: 1000,
            cube_lines: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyTotals {
    pub strategy: String,
    pub games: u64,
    pub wins: u64,
    pub branches: BTreeSet<String>,
    /// Expected case labels never reached.
    pub missing_branches: Vec<String>,
}

impl StrategyTotals {
    pub fn passed(&self) -> bool {
        self.games > 0 && self.wins == self.games && self.missing_branches.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuedSuiteReport {
    pub runs: Vec<CertificationReport>,
    pub totals: Vec<StrategyTotals>,
    /// Finished `wanda_integral` games without an integer-slope segment of
    /// length one.
    pub integral_polygon_misses: u64,
}

impl ValuedSuiteReport {
    pub fn all_passed(&self) -> bool {
        self.integral_polygon_misses == 0 && self.totals.iter().all(StrategyTotals::passed)
    }

    pub fn totals_for(&self, strategy: &str) -> Option<&StrategyTotals> {
        self.totals.iter().find(|t| t.strategy == strategy)
    }
}

/// Adversary values used by scripted lines.
fn value_grid(p: u64) -> Vec<BigRational> {
    vec![
        BigRational::zero(),
        rat(1),
        rat(p as i64),
        p_pow(p, -1),
        p_pow(p, 3),
    ]
}

/// Every adversary line where each adversary move picks an open slot and a
/// grid value, the strategy answering in between.
pub fn grid_lines(
    strategy: &dyn Strategy,
    arena: &Arena,
    first: Player,
    values: &[BigRational],
) -> Result<Vec<Vec<Move>>> {
    fn walk(
        strategy: &dyn Strategy,
        state: GameState,
        values: &[BigRational],
        line: &mut Vec<Move>,
        out: &mut Vec<Vec<Move>>,
    ) -> Result<()> {
        if state.is_complete() {
            out.push(line.clone());
            return Ok(());
        }
        if state.to_move() == Some(strategy.player()) {
            return match strategy
                .decide(&state)
                .and_then(|d| state.apply_move(&d.mv))
            {
                Ok(next) => walk(strategy, next, values, line, out),
                // the certification run reports it
                Err(_) => {
                    out.push(line.clone());
                    Ok(())
                }
            };
        }
        for slot in state.legal_moves()? {
            for v in values {
                if v.is_zero() && slot.zero_excluded {
                    continue;
                }
                let mv = Move::rational(slot.index, v.clone());
                let Ok(next) = state.apply_move(&mv) else {
                    continue;
                };
                line.push(mv);
                walk(strategy, next, values, line, out)?;
                line.pop();
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(
        strategy,
        GameState::new(arena.clone(), first),
        values,
        &mut Vec::new(),
        &mut out,
    )?;
    Ok(out)
}

/// Wanda opens `a_3 = r` (or `a_0 = r`), then makes `a_0/a_3` a cube once
/// Nora has answered.
pub fn cube_forcing_lines(p: u64, seed: u64, count: u64) -> Vec<Vec<Move>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let r = sample_rational(&mut rng, p, -2, 2);
            let c = sample_rational(&mut rng, p, -2, 2);
            let cube = &r * &c * &c * &c;
            if k % 2 == 0 {
                vec![Move::rational(3, r), Move::rational(0, cube)]
            } else {
                // a_3 / a_0 is the cube in the reversed orientation
                vec![Move::rational(0, r), Move::rational(3, cube)]
            }
        })
        .collect()
}

fn has_unit_length_integer_slope(state: &GameState, p: u64) -> bool {
    let Ok(f) = state.poly().rational_coeffs() else {
        return false;
    };
    newton_polygon_of(&f, p)
        .map(|poly| {
            poly.segments
                .iter()
                .any(|s| s.length == 1 && s.slope.as_int().is_some())
        })
        .unwrap_or(false)
}

struct Target {
    strategy: Box<dyn Strategy>,
    arenas: Vec<(usize, Player)>,
    expected: &'static [&'static str],
}

fn targets() -> Vec<Target> {
    vec![
        Target {
            strategy: Box::new(NoraQuad),
            arenas: vec![(2, Player::Nora)],
            expected: &["quad.open", "quad.close"],
        },
        Target {
            strategy: Box::new(NoraQuartic),
            arenas: vec![(4, Player::Nora)],
            expected: &[
                "quartic.a1",
                "quartic.a3",
                "quartic.a2pin",
                "quartic.close.a0",
                "quartic.close.a4",
                "quartic.close.parity_differs",
                "quartic.close.parity_same",
            ],
        },
        Target {
            strategy: Box::new(NoraHighdeg),
            arenas: vec![(5, Player::Wanda), (6, Player::Nora)],
            expected: &[
                "highdeg.pin.a1",
                "highdeg.pin.ad1",
                "highdeg.free",
                "highdeg.close.a0",
                "highdeg.close.ad",
                "highdeg.close.middle",
            ],
        },
        Target {
            strategy: Box::new(NoraCubic),
            arenas: vec![(3, Player::Wanda)],
            expected: &[
                "cubic.a2zero",
                "cubic.a1zero",
                "cubic.middle_pin",
                "cubic.noncube",
                "cubic.cube",
                "cubic.close.extreme",
            ],
        },
    ]
}

fn totals(strategy: &str, runs: &[CertificationReport], expected: &[&str]) -> StrategyTotals {
    let mine: Vec<_> = runs.iter().filter(|r| r.strategy == strategy).collect();
    let branches: BTreeSet<String> = mine
        .iter()
        .flat_map(|r| r.branches.iter().cloned())
        .collect();
    StrategyTotals {
        strategy: strategy.to_string(),
        games: mine.iter().map(|r| r.games).sum(),
        wins: mine.iter().map(|r| r.wins).sum(),
        missing_branches: expected
            .iter()
            .filter(|b| !branches.contains(**b))
            .map(|b| b.to_string())
            .collect(),
        branches,
    }
}

pub fn valued_certification_suite(config: &ValuedSuiteConfig) -> Result<ValuedSuiteReport> {
    let mut runs = Vec::new();
    let mut all_totals = Vec::new();
    for t in targets() {
        let s = t.strategy.as_ref();
        for &p in &config.primes {
            for &(d, first) in &t.arenas {
                debug_assert_eq!(last_player(d, first), Player::Nora);
                let arena = Arena::valued(p, d)?;
                let lines = grid_lines(s, &arena, first, &value_grid(p))?;
                runs.push(certify_strategy(
                    s,
                    &arena,
                    Player::Nora,
                    first,
                    &Universe::Scripted(lines),
                )?);
                if d == 3 {
                    let lines = cube_forcing_lines(p, p, config.cube_lines);
                    runs.push(certify_strategy(
                        s,
                        &arena,
                        Player::Nora,
                        first,
                        &Universe::Scripted(lines),
                    )?);
                }
                for &seed in &config.seeds {
                    let u = Universe::Random {
                        seed,
                        trials: config.trials,
                        bound: config.bound,
                    };
                    runs.push(certify_strategy(s, &arena, Player::Nora, first, &u)?);
                }
            }
        }
        all_totals.push(totals(&s.id(), &runs, t.expected));
    }

    let p = config.integral_prime;
    let arena = Arena::valued(p, 3)?.integral(true);
    let u = Universe::Random {
        seed: 1,
        trials: config.integral_games,
        bound: config.bound,
    };
    let report = certify_strategy(&WandaIntegral, &arena, Player::Wanda, Player::Wanda, &u)?;
    let misses = super::random_games(
        &WandaIntegral,
        &arena,
        Player::Wanda,
        1,
        config.integral_games,
        config.bound,
    )?
    .iter()
    .filter(|s| !has_unit_length_integer_slope(s, p))
    .count() as u64;
    runs.push(report);
    all_totals.push(totals(
        "wanda_integral",
        &runs,
        &[
            "integral.open",
            "integral.a1",
            "integral.a2",
            "integral.unit",
        ],
    ));
    Ok(ValuedSuiteReport {
        runs,
        totals: all_totals,
        integral_polygon_misses: misses,
    })
}
