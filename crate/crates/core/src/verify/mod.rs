//! Certification harness: plays a fixed strategy against every (or a
//! sampled set of) adversary lines and adjudicates each finished game with
//! the root oracle of the arena.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Arena, ArenaKind, ArenaSpec, Coeff, GameState, LogRecord, Move, Player};
use crate::solver::{solve_table, SolverConfig};
use crate::strategy::{canonical_move, Strategy};
use crate::valued::p_pow;
use crate::zring::classify;

mod abelian_suite;
mod oracles;
mod valued_suite;

pub use abelian_suite::{abelian_suite, AbelianSuiteConfig, AbelianSuiteReport, CubicGame};
pub use oracles::{brute_force_hull, oracle_properties, OracleConfig, PropertyTally};
pub use valued_suite::{
    cube_forcing_lines, grid_lines, valued_certification_suite, StrategyTotals, ValuedSuiteConfig,
    ValuedSuiteReport,
};

/// Adversary lines exceeding this estimate are refused in exhaustive mode.
pub const EXHAUSTIVE_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Universe {
    /// Every legal adversary move at every adversary turn (cyclic only).
    Exhaustive,
    /// Adversary move sequences; a line that runs out continues with
    /// canonical moves.
    Scripted(Vec<Vec<Move>>),
    /// `trials` games with uniformly chosen open slots and sampled values;
    /// valued arenas draw orders from `[-bound, bound]`.
    Random { seed: u64, trials: u64, bound: i64 },
}

impl Universe {
    pub fn label(&self) -> String {
        match self {
            Universe::Exhaustive => "exhaustive".into(),
            Universe::Scripted(lines) => format!("scripted({})", lines.len()),
            Universe::Random {
                seed,
                trials,
                bound,
            } => {
                format!("random(seed={seed},trials={trials},bound={bound})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub log: Vec<LogRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub strategy: String,
    pub arena: ArenaSpec,
    pub degree: usize,
    pub role: Player,
    pub first: Player,
    pub universe: String,
    pub games: u64,
    pub wins: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    /// Case labels the strategy passed through.
    pub branches: BTreeSet<String>,
    /// Excluded from the wire form so reports stay byte-identical.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl CertificationReport {
    pub fn all_won(&self) -> bool {
        self.games > 0 && self.wins == self.games
    }
}

#[derive(Default)]
struct Tally {
    games: u64,
    wins: u64,
    loss: Option<(GameState, Option<String>)>,
    branches: BTreeSet<&'static str>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.games += other.games;
        self.wins += other.wins;
        if self.loss.is_none() {
            self.loss = other.loss;
        }
        self.branches.extend(other.branches);
        self
    }

    fn lose(&mut self, state: &GameState, error: Option<String>) {
        self.games += 1;
        if self.loss.is_none() {
            self.loss = Some((state.clone(), error));
        }
    }

    fn finish(&mut self, state: &GameState, role: Player) {
        match state.adjudicate() {
            Ok(o) if o.winner == role => {
                self.games += 1;
                self.wins += 1;
            }
            Ok(_) => self.lose(state, None),
            Err(e) => self.lose(state, Some(e.to_string())),
        }
    }
}

enum Step {
    Next(GameState),
    Failed(String),
}

fn strategy_step(strategy: &dyn Strategy, state: &GameState, tally: &mut Tally) -> Step {
    match strategy.decide(state) {
        Ok(d) => {
            tally.branches.insert(d.branch);
            match state.apply_move(&d.mv) {
                Ok(next) => Step::Next(next),
                Err(e) => Step::Failed(format!("strategy move rejected: {e}")),
            }
        }
        Err(e) => Step::Failed(format!("strategy failed: {e}")),
    }
}

/// Legal adversary moves over a cyclic arena in index-then-value order.
fn cyclic_moves(state: &GameState) -> Vec<Move> {
    let n = state.arena().modulus().expect("cyclic arena");
    let mut out = Vec::new();
    for slot in state.legal_moves().unwrap_or_default() {
        let lo = u64::from(slot.zero_excluded);
        out.extend((lo..n).map(|v| Move::residue(slot.index, v)));
    }
    out
}

fn explore(strategy: &dyn Strategy, role: Player, state: GameState, tally: &mut Tally) {
    if state.is_complete() {
        tally.finish(&state, role);
        return;
    }
    if state.to_move() == Some(role) {
        match strategy_step(strategy, &state, tally) {
            Step::Next(next) => explore(strategy, role, next, tally),
            Step::Failed(e) => tally.lose(&state, Some(e)),
        }
        return;
    }
    for mv in cyclic_moves(&state) {
        let next = state.apply_move(&mv).expect("enumerated moves are legal");
        explore(strategy, role, next, tally);
    }
}

/// Upper bound on the number of adversary lines from a fresh game.
pub fn exhaustive_lines(arena: &Arena, role: Player, first: Player) -> Option<u64> {
    let n = arena.modulus()?;
    let mut total = 1u64;
    let mut mover = first;
    for k in (1..=arena.degree as u64 + 1).rev() {
        if mover != role {
            total = total.checked_mul(k.checked_mul(n)?)?;
        }
        mover = mover.other();
    }
    Some(total)
}

/// Expands the tree in line order until there are enough independent
/// subtrees to spread across threads.
fn frontier(
    strategy: &dyn Strategy,
    role: Player,
    root: GameState,
    tally: &mut Tally,
) -> Vec<GameState> {
    let mut layer = vec![root];
    for _ in 0..2 {
        let mut next_layer = Vec::new();
        for mut s in layer {
            while !s.is_complete() && s.to_move() == Some(role) {
                match strategy_step(strategy, &s, tally) {
                    Step::Next(n) => s = n,
                    _ => break,
                }
            }
            if s.is_complete() || s.to_move() == Some(role) {
                next_layer.push(s);
            } else {
                next_layer.extend(
                    cyclic_moves(&s)
                        .iter()
                        .map(|m| s.apply_move(m).expect("legal")),
                );
            }
        }
        layer = next_layer;
    }
    layer
}

fn certify_exhaustive(
    strategy: &dyn Strategy,
    arena: &Arena,
    role: Player,
    first: Player,
) -> Result<Tally> {
    let lines = exhaustive_lines(arena, role, first)
        .ok_or_else(|| Error::not_applicable("exhaustive certification needs a cyclic arena"))?;
    if lines > EXHAUSTIVE_BUDGET {
        return Err(Error::ResourceLimit(format!(
            "{lines} adversary lines exceed the budget of {EXHAUSTIVE_BUDGET}"
        )));
    }
    let mut head = Tally::default();
    let roots = frontier(
        strategy,
        role,
        GameState::new(arena.clone(), first),
        &mut head,
    );
    let branches = std::mem::take(&mut head.branches);
    let tally = roots
        .into_par_iter()
        .map(|s| {
            let mut t = Tally::default();
            explore(strategy, role, s, &mut t);
            t
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Tally::default(), Tally::merge);
    Ok(Tally {
        branches: branches
            .into_iter()
            .chain(tally.branches.iter().copied())
            .collect(),
        ..tally
    })
}

/// Plays one game where the adversary follows `pick`; returns the final
/// (or failing) state.
fn play_line(
    strategy: &dyn Strategy,
    role: Player,
    mut state: GameState,
    tally: &mut Tally,
    mut pick: impl FnMut(&GameState) -> Result<Move>,
) -> Result<()> {
    while !state.is_complete() {
        if state.to_move() == Some(role) {
            match strategy_step(strategy, &state, tally) {
                Step::Next(n) => state = n,
                Step::Failed(e) => {
                    tally.lose(&state, Some(e));
                    return Ok(());
                }
            }
        } else {
            state = state.apply_move(&pick(&state)?)?;
        }
    }
    tally.finish(&state, role);
    Ok(())
}

fn scripted_line(
    strategy: &dyn Strategy,
    role: Player,
    arena: &Arena,
    first: Player,
    line: &[Move],
    tally: &mut Tally,
) -> Result<()> {
    let mut it = line.iter();
    play_line(
        strategy,
        role,
        GameState::new(arena.clone(), first),
        tally,
        |s| Ok(it.next().cloned().unwrap_or(canonical_move(s)?)),
    )
}

/// A nonzero rational `±(a/b) p^o` with `a, b` prime to p, `|a|, |b| <= 10^4`
/// and `o` uniform in `[lo, hi]`.
pub fn sample_rational<R: Rng>(rng: &mut R, p: u64, lo: i64, hi: i64) -> BigRational {
    let mut unit = || loop {
        let v: i64 = rng.gen_range(1..=10_000);
        if v as u64 % p != 0 {
            break v;
        }
    };
    let (a, b) = (unit(), unit());
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    let o = rng.gen_range(lo..=hi);
    BigRational::new(BigInt::from(sign * a), BigInt::from(b)) * p_pow(p, o)
}

/// Adversary sampler: uniform open slot; cyclic values uniform among legal
/// residues, valued values from [`sample_rational`] with an occasional 0 in
/// middle slots.
pub fn random_move<R: Rng>(rng: &mut R, state: &GameState, bound: i64) -> Result<Move> {
    let slots = state.legal_moves()?;
    let slot = &slots[rng.gen_range(0..slots.len())];
    let arena = state.arena();
    let value = match &arena.kind {
        ArenaKind::Cyclic(r) => {
            let lo = u64::from(slot.zero_excluded);
            Coeff::Residue(rng.gen_range(lo..r.modulus()))
        }
        ArenaKind::Valued(c) => {
            if !slot.zero_excluded && rng.gen_ratio(1, 8) {
                Coeff::Rational(BigRational::from_integer(0.into()))
            } else {
                let lo = if arena.integral { 0 } else { -bound };
                Coeff::Rational(sample_rational(rng, c.prime, lo, bound))
            }
        }
    };
    Ok(Move {
        index: slot.index,
        value,
    })
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn certify_random(
    strategy: &dyn Strategy,
    arena: &Arena,
    role: Player,
    first: Player,
    seed: u64,
    trials: u64,
    bound: i64,
) -> Result<Tally> {
    let tallies = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let mut tally = Tally::default();
            play_line(
                strategy,
                role,
                GameState::new(arena.clone(), first),
                &mut tally,
                |s| random_move(&mut rng, s, bound),
            )
            .map(|_| tally)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(tallies.into_iter().fold(Tally::default(), Tally::merge))
}

/// Final positions of the games a random certification run plays, in trial
/// order. A strategy failure ends that game early.
pub fn random_games(
    strategy: &dyn Strategy,
    arena: &Arena,
    first: Player,
    seed: u64,
    trials: u64,
    bound: i64,
) -> Result<Vec<GameState>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let mut state = GameState::new(arena.clone(), first);
            while !state.is_complete() {
                let mv = if state.to_move() == Some(strategy.player()) {
                    match strategy.decide(&state) {
                        Ok(d) => d.mv,
                        Err(_) => break,
                    }
                } else {
                    random_move(&mut rng, &state, bound)?
                };
                state = state.apply_move(&mv)?;
            }
            Ok(state)
        })
        .collect()
}

/// Adversary moves of a finished line, in order.
fn adversary_moves(state: &GameState, role: Player) -> Vec<Move> {
    state
        .log()
        .iter()
        .filter(|e| e.player != role)
        .map(|e| Move {
            index: e.index,
            value: e.value.clone(),
        })
        .collect()
}

/// Replays adversary moves against the strategy; `Some(loss)` if the line
/// still defeats it and every scripted move stays legal.
fn replay_loss(
    strategy: &dyn Strategy,
    role: Player,
    arena: &Arena,
    first: Player,
    moves: &[Move],
) -> Option<(GameState, Option<String>)> {
    let mut tally = Tally::default();
    let mut it = moves.iter();
    let mut ok = true;
    play_line(
        strategy,
        role,
        GameState::new(arena.clone(), first),
        &mut tally,
        |_| match it.next() {
            Some(m) => Ok(m.clone()),
            None => {
                ok = false;
                Err(Error::illegal("line exhausted"))
            }
        },
    )
    .ok()?;
    ok.then_some(())?;
    tally.loss
}

/// Per-move shrinking: each adversary value is tried as 0 then 1 and kept
/// when the line still wins against the strategy.
fn shrink(
    strategy: &dyn Strategy,
    role: Player,
    arena: &Arena,
    first: Player,
    loss: (GameState, Option<String>),
) -> (GameState, Option<String>) {
    let mut best = loss;
    let mut moves = adversary_moves(&best.0, role);
    for k in 0..moves.len() {
        for v in [0, 1] {
            let mut trial = moves.clone();
            trial[k].value = crate::strategy::int_coeff(arena, v);
            if trial[k].value == moves[k].value {
                break;
            }
            if let Some(l) = replay_loss(strategy, role, arena, first, &trial) {
                moves = trial;
                best = l;
                break;
            }
        }
    }
    best
}

pub fn certify_strategy(
    strategy: &dyn Strategy,
    arena: &Arena,
    role: Player,
    first: Player,
    universe: &Universe,
) -> Result<CertificationReport> {
    if strategy.player() != role {
        return Err(Error::not_applicable(format!(
            "{} plays {}",
            strategy.id(),
            strategy.player()
        )));
    }
    strategy.applicable(arena, first)?;
    let start = Instant::now();
    let tally = match universe {
        Universe::Exhaustive => certify_exhaustive(strategy, arena, role, first)?,
        Universe::Scripted(lines) => {
            let mut tally = Tally::default();
            for line in lines {
                scripted_line(strategy, role, arena, first, line, &mut tally)?;
            }
            tally
        }
        Universe::Random {
            seed,
            trials,
            bound,
        } => certify_random(strategy, arena, role, first, *seed, *trials, *bound)?,
    };
    let counterexample = tally.loss.map(|loss| {
        let (state, error) = shrink(strategy, role, arena, first, loss);
        Counterexample {
            log: state.to_record().log,
            error,
        }
    });
    Ok(CertificationReport {
        strategy: strategy.id(),
        arena: arena.spec(),
        degree: arena.degree,
        role,
        first,
        universe: universe.label(),
        games: tally.games,
        wins: tally.wins,
        counterexample,
        branches: tally.branches.into_iter().map(String::from).collect(),
        wall_time: start.elapsed(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem1Row {
    pub n: u64,
    pub d: usize,
    pub first: Player,
    pub predicted: Player,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<Player>,
    pub matches: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Composite moduli paired with degrees 1..=3, then the larger-degree cells.
pub fn default_theorem1_grid() -> Vec<(u64, usize)> {
    let small = [4, 6, 8, 9, 10, 12, 14, 15, 16, 18, 20, 25, 27, 32, 49];
    let mut grid: Vec<(u64, usize)> = small
        .iter()
        .flat_map(|&n| (1..=3).map(move |d| (n, d)))
        .collect();
    grid.extend([4, 6, 8, 9].map(|n| (n, 4)));
    grid.extend([4, 8, 9, 16].map(|n| (n, 5)));
    grid
}

/// Solves each cell for both first players and compares with the
/// classification. Solver failures are recorded per row.
pub fn theorem1_table(grid: &[(u64, usize)], config: &SolverConfig) -> Result<Vec<Theorem1Row>> {
    let mut rows = Vec::new();
    for &(n, d) in grid {
        let solved = solve_table(n, d, config);
        for first in [Player::Nora, Player::Wanda] {
            let predicted = classify(n, d, first)?;
            let (solver, error) = match &solved {
                Ok(row) => (
                    Some(if first == Player::Nora {
                        row.nora_first
                    } else {
                        row.wanda_first
                    }),
                    None,
                ),
                Err(e) => (None, Some(e.to_string())),
            };
            rows.push(Theorem1Row {
                n,
                d,
                first,
                predicted,
                solver,
                matches: solver == Some(predicted),
                error,
            });
        }
    }
    Ok(rows)
}

/// Newline-separated JSON, one record per line.
pub fn to_jsonl<T: Serialize>(records: &[T]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).map_err(|e| Error::Parse(e.to_string()))?);
        out.push('\n');
    }
    Ok(out)
}
