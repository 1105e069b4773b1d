//! Strategy interface, shared move helpers and the engine wrapper.
//!
//! Strategies are pure: everything they remember (chosen prime, exponent,
//! branch) is re-derived from the move log on every call.

mod lift;
mod select;
mod valued;
mod zmod;

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Arena, ArenaKind, Coeff, GameState, Move, Player};
use crate::solver::{Solver, SolverConfig};

pub use lift::CrtLift;
pub use select::{select_strategy, select_valued_strategy, strategy_by_name};
pub use valued::{
    closing_admissible, extreme_bounds, middle_bounds, multi_prime_close, AvoidanceBounds,
    NoraCubic, NoraHighdeg, NoraMultiPrime, NoraQuad, NoraQuartic, ResidueAvoidance, WandaIntegral,
};
pub use zmod::{
    block_even_roots, NoraCubefree, NoraEven, NoraSixteen, WandaFourthPower, WandaLast,
    WandaPrimePower,
};

/// Strategy-private values worth reporting alongside a move.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Memo {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<u32>,
    /// Order of the value placed by a closing move in a valued arena.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<i64>,
}

impl Memo {
    pub fn prime(p: u64, exponent: u32) -> Memo {
        Memo {
            p: Some(p),
            exponent: Some(exponent),
            order: None,
        }
    }

    pub fn order(p: u64, order: i64) -> Memo {
        Memo {
            p: Some(p),
            exponent: None,
            order: Some(order),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub mv: Move,
    /// Case label of the construction that produced the move.
    pub branch: &'static str,
    pub memo: Memo,
}

impl Decision {
    pub fn new(mv: Move, branch: &'static str) -> Decision {
        Decision {
            mv,
            branch,
            memo: Memo::default(),
        }
    }

    pub fn with_memo(mut self, memo: Memo) -> Decision {
        self.memo = memo;
        self
    }
}

pub trait Strategy: Send + Sync {
    fn id(&self) -> String;
    fn player(&self) -> Player;
    /// `Err(NotApplicable)` when the arena or turn order is outside the
    /// strategy's domain.
    fn applicable(&self, arena: &Arena, first: Player) -> Result<()>;
    fn decide(&self, state: &GameState) -> Result<Decision>;
}

pub type StrategyRef = Arc<dyn Strategy>;

impl std::fmt::Debug for dyn Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.id())
    }
}

pub(crate) fn ensure_turn(state: &GameState, player: Player) -> Result<()> {
    match state.to_move() {
        None => Err(Error::GameOver),
        Some(p) if p == player => Ok(()),
        Some(p) => Err(Error::not_applicable(format!("it is {p}'s turn"))),
    }
}

/// Integer `v` as a coefficient of the arena.
pub fn int_coeff(arena: &Arena, v: i64) -> Coeff {
    match &arena.kind {
        ArenaKind::Cyclic(r) => Coeff::Residue(r.reduce_i128(v as i128)),
        ArenaKind::Valued(_) => Coeff::Rational(BigRational::from_integer(BigInt::from(v))),
    }
}

pub fn neg_coeff(arena: &Arena, c: &Coeff) -> Coeff {
    match (&arena.kind, c) {
        (ArenaKind::Cyclic(r), Coeff::Residue(v)) => Coeff::Residue(r.neg(*v)),
        (_, Coeff::Rational(q)) => Coeff::Rational(-q),
        (ArenaKind::Valued(_), Coeff::Residue(v)) => {
            Coeff::Rational(-BigRational::from_integer(BigInt::from(*v)))
        }
    }
}

pub fn sum_coeffs<'a>(arena: &Arena, items: impl Iterator<Item = &'a Coeff>) -> Coeff {
    match &arena.kind {
        ArenaKind::Cyclic(r) => {
            Coeff::Residue(items.fold(0, |acc, c| r.add(acc, c.residue().unwrap_or(0))))
        }
        ArenaKind::Valued(_) => Coeff::Rational(items.fold(BigRational::zero(), |acc, c| {
            acc + c.rational().cloned().unwrap_or_default()
        })),
    }
}

/// The canonical "arbitrary" move: smallest open middle index with value 0,
/// otherwise an open extreme with value 1.
pub fn canonical_move(state: &GameState) -> Result<Move> {
    let d = state.degree();
    let open = state.poly().open_indices();
    if let Some(&i) = open.iter().find(|&&i| i != 0 && i != d) {
        return Ok(Move {
            index: i,
            value: int_coeff(state.arena(), 0),
        });
    }
    let &i = open.first().ok_or(Error::GameOver)?;
    Ok(Move {
        index: i,
        value: int_coeff(state.arena(), 1),
    })
}

pub(crate) fn canonical(state: &GameState, branch: &'static str) -> Result<Decision> {
    Ok(Decision::new(canonical_move(state)?, branch))
}

pub(crate) fn open_count(state: &GameState) -> usize {
    state.degree() + 1 - state.poly().set_count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveSource {
    Strategy,
    Solver,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineMove {
    pub mv: Move,
    pub source: MoveSource,
    pub branch: Option<&'static str>,
}

/// A strategy with a solver fallback for positions the strategy does not
/// handle; without a usable fallback the engine reports the failure.
pub struct Engine {
    role: Player,
    strategy: Option<StrategyRef>,
    solver: Option<Solver>,
}

impl Engine {
    pub fn new(
        arena: &Arena,
        role: Player,
        first: Player,
        strategy: Option<StrategyRef>,
    ) -> Engine {
        let strategy =
            strategy.filter(|s| s.player() == role && s.applicable(arena, first).is_ok());
        let solver = Solver::new(arena, first, &SolverConfig::default()).ok();
        Engine {
            role,
            strategy,
            solver,
        }
    }

    pub fn role(&self) -> Player {
        self.role
    }

    pub fn strategy_id(&self) -> Option<String> {
        self.strategy.as_ref().map(|s| s.id())
    }

    pub fn has_fallback(&self) -> bool {
        self.solver.is_some()
    }

    pub fn next_move(&self, state: &GameState) -> Result<EngineMove> {
        ensure_turn(state, self.role)?;
        let planned = self.strategy.as_ref().map(|s| s.decide(state));
        if let Some(Ok(d)) = &planned {
            if state.check_move(&d.mv).is_ok() {
                return Ok(EngineMove {
                    mv: d.mv.clone(),
                    source: MoveSource::Strategy,
                    branch: Some(d.branch),
                });
            }
        }
        match &self.solver {
            Some(solver) => Ok(EngineMove {
                mv: solver.best_move(state)?,
                source: MoveSource::Solver,
                branch: None,
            }),
            None => match planned {
                Some(Err(e)) => Err(e),
                _ => Err(Error::not_applicable(
                    "no strategy move and no solver fallback",
                )),
            },
        }
    }
}
