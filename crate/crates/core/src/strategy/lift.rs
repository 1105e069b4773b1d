use std::sync::Arc;

use crate::error::{Error, Result};
use crate::game::{Arena, Coeff, GameState, Move, Player};
use crate::zring::CyclicRing;

use super::{Decision, Strategy, StrategyRef};

/// Runs an inner strategy on the `p^k` component of `N = p^k N'` and lifts
/// its values `v` to the residue that is `v mod p^k` and `0 mod N'`.
#[derive(Clone)]
pub struct CrtLift {
    inner: StrategyRef,
    component: u64,
}

impl CrtLift {
    pub fn new(inner: StrategyRef, component: u64) -> CrtLift {
        CrtLift { inner, component }
    }

    pub fn inner(&self) -> &Arc<dyn Strategy> {
        &self.inner
    }

    pub fn component(&self) -> u64 {
        self.component
    }

    fn cofactor(&self, n: u64) -> Result<u64> {
        let q = self.component;
        if q < 2 || n % q != 0 || crate::zring::gcd(q, n / q) != 1 {
            return Err(Error::not_applicable(format!(
                "{q} is not a unitary divisor of {n}"
            )));
        }
        Ok(n / q)
    }

    fn inner_arena(&self, degree: usize) -> Result<Arena> {
        Ok(Arena::cyclic(self.component, degree)?.allowing_zero_leading(true))
    }

    /// Projects a position onto the component ring, replaying the log.
    pub fn project(&self, state: &GameState) -> Result<GameState> {
        let q = self.component;
        let mut inner = GameState::new(self.inner_arena(state.degree())?, state.first());
        for e in state.log() {
            let v = e
                .value
                .residue()
                .ok_or_else(|| Error::not_applicable("cyclic arena required"))?;
            inner = inner.apply_move(&Move::residue(e.index, v % q))?;
        }
        Ok(inner)
    }

    /// The residue mod N that is `v` mod the component and 0 mod the cofactor.
    pub fn lift(&self, n: u64, v: u64) -> Result<u64> {
        let q = self.component;
        let c = self.cofactor(n)?;
        let rq = CyclicRing::new(q)?;
        let t = rq.mul(v % q, rq.inverse(c % q)?);
        Ok(c * t % n)
    }
}

impl Strategy for CrtLift {
    fn id(&self) -> String {
        format!("crt_lift[{}]({})", self.component, self.inner.id())
    }

    fn player(&self) -> Player {
        self.inner.player()
    }

    fn applicable(&self, arena: &Arena, first: Player) -> Result<()> {
        let n = arena
            .modulus()
            .ok_or_else(|| Error::not_applicable("requires a cyclic arena"))?;
        self.cofactor(n)?;
        self.inner
            .applicable(&self.inner_arena(arena.degree)?, first)
    }

    fn decide(&self, state: &GameState) -> Result<Decision> {
        let n = state
            .arena()
            .modulus()
            .ok_or_else(|| Error::not_applicable("requires a cyclic arena"))?;
        let d = self.inner.decide(&self.project(state)?)?;
        let v = match d.mv.value {
            Coeff::Residue(v) => v,
            Coeff::Rational(_) => {
                return Err(Error::not_applicable("inner strategy is not cyclic"))
            }
        };
        Ok(Decision {
            mv: Move::residue(d.mv.index, self.lift(n, v)?),
            ..d
        })
    }
}
