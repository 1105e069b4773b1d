//! Exhaustive minimax over cyclic arenas with a packed-state memo table.
//!
//! Every slot is a base-(N+1) digit, the digit `N` meaning unset. Positions
//! with a single open slot are decided directly from the root sets of the
//! candidate completions instead of recursing into terminal codes.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, AtomicU8, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Arena, ArenaKind, GameState, Move, Player};
use crate::zring::CyclicRing;

pub const DEFAULT_BUDGET: u64 = 1 << 25;
const FLAT_LIMIT: u64 = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Upper bound on (N+1)^(d+1).
    pub budget: u64,
    /// Evaluate root-level children on the rayon pool. `states_visited`
    /// then depends on scheduling; winners do not.
    pub parallel: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            budget: DEFAULT_BUDGET,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PvMove {
    pub player: Player,
    pub index: usize,
    pub value: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub winner: Player,
    pub principal_variation: Vec<PvMove>,
    pub states_visited: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: u64,
    pub d: usize,
    pub nora_first: Player,
    pub wanda_first: Player,
}

const UNKNOWN: u8 = 0;

fn encode(p: Player) -> u8 {
    match p {
        Player::Nora => 1,
        Player::Wanda => 2,
    }
}

fn decode(v: u8) -> Player {
    if v == 1 {
        Player::Nora
    } else {
        Player::Wanda
    }
}

enum Memo {
    Flat(Vec<AtomicU8>),
    Map(Mutex<HashMap<u64, u8>>),
}

impl Memo {
    fn get(&self, code: u64) -> u8 {
        match self {
            Memo::Flat(t) => t[code as usize].load(Ordering::Relaxed),
            Memo::Map(m) => *m.lock().unwrap().get(&code).unwrap_or(&UNKNOWN),
        }
    }

    // Concurrent writers always store the same value for a code.
    fn set(&self, code: u64, v: u8) {
        match self {
            Memo::Flat(t) => t[code as usize].store(v, Ordering::Relaxed),
            Memo::Map(m) => {
                m.lock().unwrap().insert(code, v);
            }
        }
    }
}

/// Solver bound to one cyclic arena and one first player.
pub struct Solver {
    ring: CyclicRing,
    n: u64,
    d: usize,
    first: Player,
    zero_leading: bool,
    place: Vec<u64>,
    /// powers[x * (d+1) + i] = x^i mod N
    powers: Vec<u64>,
    memo: Memo,
    visited: AtomicU64,
    parallel: bool,
}

pub fn state_space(n: u64, d: usize) -> Option<u64> {
    (n + 1).checked_pow(d as u32 + 1)
}

impl Solver {
    pub fn new(arena: &Arena, first: Player, config: &SolverConfig) -> Result<Solver> {
        let ArenaKind::Cyclic(ring) = &arena.kind else {
            return Err(Error::domain("the solver handles cyclic arenas only"));
        };
        let n = ring.modulus();
        let d = arena.degree;
        let size = state_space(n, d)
            .filter(|&s| s <= config.budget)
            .ok_or_else(|| {
                Error::ResourceLimit(format!(
                    "({}+1)^{} states exceed the budget of {}",
                    n,
                    d + 1,
                    config.budget
                ))
            })?;
        let memo = if size <= FLAT_LIMIT {
            Memo::Flat((0..size).map(|_| AtomicU8::new(UNKNOWN)).collect())
        } else {
            Memo::Map(Mutex::new(HashMap::new()))
        };
        let place = (0..=d).map(|i| (n + 1).pow(i as u32)).collect();
        let mut powers = Vec::with_capacity(n as usize * (d + 1));
        for x in 0..n {
            for i in 0..=d {
                powers.push(ring.pow(x, i as u64));
            }
        }
        Ok(Solver {
            ring: ring.clone(),
            n,
            d,
            first,
            zero_leading: arena.allow_zero_leading,
            place,
            powers,
            memo,
            visited: AtomicU64::new(0),
            parallel: config.parallel,
        })
    }

    pub fn states_visited(&self) -> u64 {
        self.visited.load(Ordering::Relaxed)
    }

    fn digits_of(&self, state: &GameState) -> Result<Vec<u64>> {
        if state.arena().modulus() != Some(self.n) || state.degree() != self.d {
            return Err(Error::domain(
                "state does not belong to this solver's arena",
            ));
        }
        if state.first() != self.first {
            return Err(Error::domain("state has a different first player"));
        }
        Ok(state
            .poly()
            .residues()
            .iter()
            .map(|s| s.unwrap_or(self.n))
            .collect())
    }

    fn code_of(&self, digits: &[u64]) -> u64 {
        digits.iter().zip(&self.place).map(|(v, p)| v * p).sum()
    }

    fn mover(&self, set: usize) -> Player {
        if set % 2 == 0 {
            self.first
        } else {
            self.first.other()
        }
    }

    fn values(&self, index: usize) -> std::ops::Range<u64> {
        let excluded = (index == 0 || index == self.d) && !self.zero_leading;
        (excluded as u64)..self.n
    }

    fn has_root(&self, digits: &[u64]) -> bool {
        let w = self.d + 1;
        (0..self.n as usize).any(|x| {
            let pw = &self.powers[x * w..(x + 1) * w];
            let mut acc = 0u128;
            for i in 0..w {
                acc += digits[i] as u128 * pw[i] as u128;
            }
            acc % self.n as u128 == 0
        })
    }

    /// `hit[v]` is set iff filling the single open slot `j` with `v`
    /// produces a polynomial with a root.
    fn last_slot_hits(&self, digits: &[u64], j: usize) -> Vec<bool> {
        let w = self.d + 1;
        let n = self.n;
        let mut hit = vec![false; n as usize];
        for x in 0..n as usize {
            let pw = &self.powers[x * w..(x + 1) * w];
            let mut g = 0u128;
            for i in 0..w {
                if i != j {
                    g += digits[i] as u128 * pw[i] as u128;
                }
            }
            let target = self.ring.neg((g % n as u128) as u64);
            let xj = pw[j];
            if xj == 0 {
                if target == 0 {
                    return vec![true; n as usize];
                }
                continue;
            }
            let mut acc = 0u64;
            for v in 0..n as usize {
                if acc == target {
                    hit[v] = true;
                }
                acc = self.ring.add(acc, xj);
            }
        }
        hit
    }

    fn last_slot_winner(&self, digits: &[u64], j: usize, mover: Player) -> Player {
        let hit = self.last_slot_hits(digits, j);
        let wants = mover == Player::Wanda;
        if self.values(j).any(|v| hit[v as usize] == wants) {
            mover
        } else {
            mover.other()
        }
    }

    fn winner_of(&self, digits: &mut [u64], set: usize) -> Player {
        if set == self.d + 1 {
            return if self.has_root(digits) {
                Player::Wanda
            } else {
                Player::Nora
            };
        }
        let code = self.code_of(digits);
        let cached = self.memo.get(code);
        if cached != UNKNOWN {
            return decode(cached);
        }
        self.visited.fetch_add(1, Ordering::Relaxed);
        let mover = self.mover(set);
        let result = if set == self.d {
            let j = digits
                .iter()
                .position(|&v| v == self.n)
                .expect("one open slot");
            self.last_slot_winner(digits, j, mover)
        } else {
            let mut result = mover.other();
            'search: for i in 0..=self.d {
                if digits[i] != self.n {
                    continue;
                }
                for v in self.values(i) {
                    digits[i] = v;
                    let w = self.winner_of(digits, set + 1);
                    digits[i] = self.n;
                    if w == mover {
                        result = mover;
                        break 'search;
                    }
                }
            }
            result
        };
        self.memo.set(code, encode(result));
        result
    }

    fn children(&self, digits: &[u64]) -> Vec<(usize, u64)> {
        let mut out = Vec::new();
        for i in 0..=self.d {
            if digits[i] == self.n {
                out.extend(self.values(i).map(|v| (i, v)));
            }
        }
        out
    }

    fn winner_digits(&self, digits: &[u64]) -> Player {
        let set = digits.iter().filter(|&&v| v != self.n).count();
        if !self.parallel || set + 1 >= self.d + 1 {
            return self.winner_of(&mut digits.to_vec(), set);
        }
        let code = self.code_of(digits);
        let cached = self.memo.get(code);
        if cached != UNKNOWN {
            return decode(cached);
        }
        let mover = self.mover(set);
        let wins = self.children(digits).into_par_iter().any(|(i, v)| {
            let mut child = digits.to_vec();
            child[i] = v;
            self.winner_of(&mut child, set + 1) == mover
        });
        let result = if wins { mover } else { mover.other() };
        self.memo.set(code, encode(result));
        result
    }

    pub fn winner(&self, state: &GameState) -> Result<Player> {
        let digits = self.digits_of(state)?;
        Ok(self.winner_digits(&digits))
    }

    /// First child (index asc, value asc) whose value equals the position's
    /// value; the first legal child when the mover is lost.
    fn best_digits(&self, digits: &[u64]) -> Option<(usize, u64)> {
        let set = digits.iter().filter(|&&v| v != self.n).count();
        if set == self.d + 1 {
            return None;
        }
        let target = self.winner_digits(digits);
        let mover = self.mover(set);
        let children = self.children(digits);
        if target != mover {
            return children.first().copied();
        }
        children.into_iter().find(|&(i, v)| {
            let mut child = digits.to_vec();
            child[i] = v;
            self.winner_of(&mut child, set + 1) == mover
        })
    }

    pub fn best_move(&self, state: &GameState) -> Result<Move> {
        if state.is_complete() {
            return Err(Error::GameOver);
        }
        let digits = self.digits_of(state)?;
        let (i, v) = self.best_digits(&digits).expect("open slot exists");
        Ok(Move::residue(i, v))
    }

    pub fn solve(&self, state: &GameState) -> Result<SolveResult> {
        let mut digits = self.digits_of(state)?;
        let winner = self.winner_digits(&digits);
        let mut pv = Vec::new();
        let mut set = digits.iter().filter(|&&v| v != self.n).count();
        while let Some((i, v)) = self.best_digits(&digits) {
            pv.push(PvMove {
                player: self.mover(set),
                index: i,
                value: v,
            });
            digits[i] = v;
            set += 1;
        }
        Ok(SolveResult {
            winner,
            principal_variation: pv,
            states_visited: self.states_visited(),
        })
    }
}

pub fn solve(state: &GameState, config: &SolverConfig) -> Result<SolveResult> {
    Solver::new(state.arena(), state.first(), config)?.solve(state)
}

pub fn best_move(state: &GameState, config: &SolverConfig) -> Result<Move> {
    Solver::new(state.arena(), state.first(), config)?.best_move(state)
}

pub fn solve_table(n: u64, d: usize, config: &SolverConfig) -> Result<TableRow> {
    let arena = Arena::cyclic(n, d)?;
    let run = |first| -> Result<Player> {
        let solver = Solver::new(&arena, first, config)?;
        solver.winner(&GameState::new(arena.clone(), first))
    };
    Ok(TableRow {
        n,
        d,
        nora_first: run(Player::Nora)?,
        wanda_first: run(Player::Wanda)?,
    })
}
