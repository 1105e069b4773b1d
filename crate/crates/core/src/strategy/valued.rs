//! Strategies over Q_p with rational coefficients. Nora's strategies pick
//! closing values `p^n` whose order avoids every order the remaining terms
//! can produce; Wanda's integral strategy forces a length-one segment with
//! integer slope in the Newton polygon.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Arena, ArenaKind, GameState, Move, Player};
use crate::valued::{is_cube_in_qp, ord_int, p_pow, rat, unit_part, Valuation};
use crate::zring::{last_player, CyclicRing};

use super::{canonical, ensure_turn, open_count, Decision, Memo, Strategy};

type Q = Ratio<i64>;

fn prime_of(arena: &Arena) -> Result<u64> {
    match &arena.kind {
        ArenaKind::Valued(c) if c.ramification == 1 => Ok(c.prime),
        _ => Err(Error::not_applicable("requires a Q_p arena")),
    }
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::not_applicable(msg))
    }
}

fn rationals(state: &GameState) -> Vec<Option<BigRational>> {
    state.poly().rationals()
}

/// Orders of the set coefficients; unset and zero slots both read `None`.
fn ords(state: &GameState, p: u64) -> Vec<Option<i64>> {
    rationals(state)
        .iter()
        .map(|c| c.as_ref().and_then(|q| ord_int(q, p)))
        .collect()
}

fn zero_move(i: usize) -> Move {
    Move::rational(i, BigRational::zero())
}

fn fin(v: Valuation) -> Option<Q> {
    v.finite()
}

/// The order bounds used when closing; unused entries stay `None`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AvoidanceBounds {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m1: Option<Valuation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m2: Option<Valuation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m3: Option<Valuation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m4: Option<Valuation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m5: Option<Valuation>,
}

/// Bounds for closing `a_0` given the orders of `a_1..a_d` (`ords[d]` set).
/// For `ord x < M1` the other terms sum to order `ord a_d + d ord x`;
/// otherwise their order is at least `M2`.
pub fn extreme_bounds(ords: &[Option<i64>]) -> AvoidanceBounds {
    let d = ords.len() - 1;
    let od = ords[d].expect("leading coefficient is set");
    let m1 = (1..d)
        .filter_map(|i| ords[i].map(|o| Q::new(o - od, (d - i) as i64)))
        .min()
        .map_or(Valuation::Infinite, Valuation::Finite);
    let m2 = match fin(m1) {
        None => Valuation::Infinite,
        Some(m1) => Valuation::Finite(
            (1..=d)
                .filter_map(|i| ords[i].map(|o| Q::from_integer(o) + m1 * i as i64))
                .min()
                .expect("a_d is set"),
        ),
    };
    AvoidanceBounds {
        m1: Some(m1),
        m2: Some(m2),
        ..Default::default()
    }
}

/// Bounds for closing a middle coefficient `a_i`. `M4` ranges over
/// `0 < j <= d`, so the window `[M3, M4]` is never empty and `a_0` strictly
/// dominates beyond it.
pub fn middle_bounds(ords: &[Option<i64>], i: usize) -> AvoidanceBounds {
    let d = ords.len() - 1;
    let od = ords[d].expect("a_d is set");
    let o0 = ords[0].expect("a_0 is set");
    let others = || {
        (0..=d)
            .filter(move |&j| j != i)
            .filter_map(|j| ords[j].map(|o| (j, o)))
    };
    let m3 = others()
        .filter(|&(j, _)| j < d)
        .map(|(j, o)| Q::new(o - od, (d - j) as i64))
        .min()
        .expect("a_0 is set");
    let m4 = others()
        .filter(|&(j, _)| j > 0)
        .map(|(j, o)| Q::new(o0 - o, j as i64))
        .max()
        .expect("a_d is set");
    let m5 = others()
        .flat_map(|(j, o)| {
            let slope = j as i64 - i as i64;
            [m3, m4].map(|n| Q::from_integer(o) + n * slope)
        })
        .min()
        .expect("nonempty");
    AvoidanceBounds {
        m3: Some(Valuation::Finite(m3)),
        m4: Some(Valuation::Finite(m4)),
        m5: Some(Valuation::Finite(m5)),
        ..Default::default()
    }
}

fn below(bound: Valuation, o: i64) -> bool {
    match bound {
        Valuation::Infinite => true,
        Valuation::Finite(b) => Q::from_integer(o) < b,
    }
}

/// Whether order `o` for the closing coefficient `a_i` avoids every order
/// the rest of the polynomial can take at a nonzero point.
pub fn closing_admissible(ords: &[Option<i64>], i: usize, o: i64) -> bool {
    let d = ords.len() - 1;
    if i == 0 {
        let b = extreme_bounds(ords);
        let od = ords[d].expect("a_d is set");
        (o - od).rem_euclid(d as i64) != 0 && below(b.m2.expect("set"), o)
    } else if i == d {
        let rev: Vec<_> = ords.iter().rev().copied().collect();
        closing_admissible(&rev, 0, o)
    } else {
        let b = middle_bounds(ords, i);
        let (od, o0) = (ords[d].expect("set"), ords[0].expect("set"));
        (o - od).rem_euclid((d - i) as i64) != 0
            && (o0 - o).rem_euclid(i as i64) != 0
            && below(b.m5.expect("set"), o)
    }
}

/// Greatest integer below `bound` (below 0 when the bound is infinite),
/// capped at `cap`, for which `ok` holds.
fn greatest_below(bound: Valuation, cap: Option<i64>, ok: impl Fn(i64) -> bool) -> Result<i64> {
    let mut o = match bound {
        Valuation::Infinite => -1,
        Valuation::Finite(b) => b.ceil().to_integer() - 1,
    };
    if let Some(c) = cap {
        o = o.min(c);
    }
    for _ in 0..4096 {
        if ok(o) {
            return Ok(o);
        }
        o -= 1;
    }
    Err(Error::not_applicable("no admissible closing order found"))
}

/// Closing order for extreme `a_i` (`i` is 0 or d); `a_d` goes through the
/// reversed polynomial.
fn extreme_order(ords: &[Option<i64>], i: usize, cap: Option<i64>) -> Result<i64> {
    let rev: Vec<_>;
    let ords = if i == 0 {
        ords
    } else {
        rev = ords.iter().rev().copied().collect();
        &rev
    };
    let b = extreme_bounds(ords);
    greatest_below(b.m2.expect("set"), cap, |o| closing_admissible(ords, 0, o))
}

fn middle_order(ords: &[Option<i64>], i: usize, cap: Option<i64>) -> Result<i64> {
    let b = middle_bounds(ords, i);
    greatest_below(b.m5.expect("set"), cap, |o| closing_admissible(ords, i, o))
}

fn power_move(i: usize, p: u64, o: i64, tag: &'static str) -> Decision {
    Decision::new(Move::rational(i, p_pow(p, o)), tag).with_memo(Memo::order(p, o))
}

/// Quadratic: `a_1 = 0`, then the remaining extreme gets an order of the
/// other parity (smallest such nonnegative order).
#[derive(Debug, Clone, Copy, Default)]
pub struct NoraQuad;

impl Strategy for NoraQuad {
    fn id(&self) -> String {
        "nora_quad".into()
    }

    fn player(&self) -> Player {
        Player::Nora
    }

    fn applicable(&self, arena: &Arena, first: Player) -> Result<()> {
        prime_of(arena)?;
        require(
            arena.degree == 2 && first == Player::Nora,
            "needs d = 2 with Nora first",
        )
    }

    fn decide(&self, state: &GameState) -> Result<Decision> {
        ensure_turn(state, Player::Nora)?;
        self.applicable(state.arena(), state.first())?;
        let p = prime_of(state.arena())?;
        if state.is_open(1) {
            return Ok(Decision::new(zero_move(1), "quad.open"));
        }
        let i = state.poly().open_indices()[0];
        let other = ords(state, p)[2 - i].expect("opposite extreme is nonzero");
        let o = if other.rem_euclid(2) == 0 { 1 } else { 0 };
        Ok(power_move(i, p, o, "quad.close"))
    }
}

/// Quartic with Nora first and last: zero out `a_1` and `a_3`, or failing
/// that make sure an extreme is closed last.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoraQuartic;

impl Strategy for NoraQuartic {
    fn id(&self) -> String {
        "nora_quartic".into()
    }

    fn player(&self) -> Player {
        Player::Nora
    }

    fn applicable(&self, arena: &Arena, first: Player) -> Result<()> {
        prime_of(arena)?;
        require(!arena.integral, "closing orders may be negative")?;
        require(
            arena.degree == 4 && first == Player::Nora,
            "needs d = 4 with Nora first",
        )
    }

    fn decide(&self, state: &GameState) -> Result<Decision> {
        ensure_turn(state, Player::Nora)?;
        self.applicable(state.arena(), state.first())?;
        let p = prime_of(state.arena())?;
        if open_count(state) == 1 {
            let i = state.poly().open_indices()[0];
            let o = ords(state, p);
            return match i {
                0 => Ok(power_move(
                    0,
                    p,
                    extreme_order(&o, 0, None)?,
                    "quartic.close.a0",
                )),
                4 => Ok(power_move(
                    4,
                    p,
                    extreme_order(&o, 4, None)?,
                    "quartic.close.a4",
                )),
                2 => {
                    let (o0, o4) = (o[0].expect("set"), o[4].expect("set"));
                    if o[1].is_some() || o[3].is_some() {
                        return Err(Error::not_applicable("a_1 and a_3 were not both zeroed"));
                    }
                    if (o0 - o4).rem_euclid(2) != 0 {
                        return Ok(Decision::new(zero_move(2), "quartic.close.parity_differs"));
                    }
                    // orders of the right side share the parity of o0 away from
                    // ord x = (o0 - o4)/4, and are at least (o0 + o4)/2 there
                    let bound = Valuation::Finite(Q::new(o0 + o4, 2));
                    let n = greatest_below(bound, None, |n| (n - o0).rem_euclid(2) == 1)?;
                    Ok(power_move(2, p, n, "quartic.close.parity_same"))
                }
                _ => Err(Error::not_applicable(
                    "odd coefficient left for the closing move",
                )),
            };
        }
        match state.moves_by(Player::Nora).count() {
            0 => Ok(Decision::new(zero_move(1), "quartic.a1")),
            _ if state.is_open(1) => Ok(Decision::new(zero_move(1), "quartic.a1")),
            _ if state.is_open(3) => Ok(Decision::new(zero_move(3), "quartic.a3")),
            _ if state.is_open(2) => Ok(Decision::new(zero_move(2), "quartic.a2pin")),
            _ => canonical(state, "quartic.free"),
        }
    }
}

/// Shared closing logic for degree at least 5: `a_1` and `a_{d-1}` are
/// pinned early, so the final slot is an extreme or lies in `2..=d-2`.
fn highdeg_close(ords: &[Option<i64>], i: usize, cap: Option<i64>) -> Result<(i64, &'static str)> {
    let d = ords.len() - 1;
    if i == 0 {
        Ok((extreme_order(ords, 0, cap)?, "highdeg.close.a0"))
    } else if i == d {
        Ok((extreme_order(ords, d, cap)?, "highdeg.close.ad"))
    } else if i >= 2 && i + 2 <= d {
        Ok((middle_order(ords, i, cap)?, "highdeg.close.middle"))
    } else {
        Err(Error::not_applicable(format!(
            "a_{i} left open for the closing move"
        )))
    }
}

fn highdeg_pin(state: &GameState) -> Result<Decision> {
    let d = state.degree();
    if state.is_open(1) {
        Ok(Decision::new(zero_move(1), "highdeg.pin.a1"))
    } else if state.is_open(d - 1) {
        Ok(Decision::new(zero_move(d - 1), "highdeg.pin.ad1"))
    } else {
        canonical(state, "highdeg.free")
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NoraHighdeg;

impl Strategy for NoraHighdeg {
    fn id(&self) -> String {
        "nora_highdeg".into()
    }

    fn player(&self) -> Player {
        Player::Nora
    }

    fn applicable(&self, arena: &Arena, first: Player) -> Result<()> {
        prime_of(arena)?;
        require(!arena.integral, "closing orders may be negative")?;
        require(
            arena.degree >= 5 && last_player(arena.degree, first) == Player::Nora,
            "needs d >= 5 with Nora last",
        )
    }

    fn decide(&self, state: &GameState) -> Result<Decision> {
        ensure_turn(state, Player::Nora)?;
        self.applicable(state.arena(), state.first())?;
        let p = prime_of(state.arena())?;
        if open_count(state) == 1 {
            let i = state.poly().open_indices()[0];
            let (o, tag) = highdeg_close(&ords(state, p), i, None)?;
            return Ok(power_move(i, p, o, tag));
        }
        highdeg_pin(state)
    }
}

/// Residue data behind the cube branch of the cubic strategy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueAvoidance {
    pub prime: u64,
    pub forbidden_residues: Vec<u64>,
    pub chosen_residue: u64,
    pub target_order: i64,
}

/// With `d = a_0/a_3` a cube of order `3k` and leading residue `d_0`, any
/// factor `x + c` forces the residue of `a_1/a_3` at order `2k` into
/// `{(d_0 - c_0^3)/c_0}`; pick the smallest nonzero residue outside it.
pub fn cube_residue_avoidance(d: &BigRational, p: u64) -> Result<ResidueAvoidance> {
    let od = ord_int(d, p).ok_or_else(|| Error::domain("zero ratio"))?;
    if od.rem_euclid(3) != 0 {
        return Err(Error::domain("order of a cube must be divisible by 3"));
    }
    let u = unit_part(d, p);
    let pm = BigInt::from(p);
    let f = CyclicRing::new(p)?;
    let num = u.numer().mod_floor(&pm).to_u64().expect("small");
    let den = u.denom().mod_floor(&pm).to_u64().expect("small");
    let d0 = f.mul(num, f.inverse(den)?);
    let mut forbidden: Vec<u64> = f
        .units()
        .map(|c| {
            let c3 = f.pow(c, 3);
            Ok(f.mul(f.sub(d0, c3), f.inverse(c)?))
        })
        .collect::<Result<_>>()?;
    forbidden.sort_unstable();
    forbidden.dedup();
    let chosen = (1..p)
        .find(|r| forbidden.binary_search(r).is_err())
        .ok_or_else(|| Error::not_applicable("every nonzero residue is forbidden"))?;
    Ok(ResidueAvoidance {
        prime: p,
        forbidden_residues: forbidden,
        chosen_residue: chosen,
        target_order: 2 * od / 3,
    })
}

/// Cubic with Wanda first. Index `j` below is read in the orientation where
/// Wanda's extreme opening sits at index 3 (reverse when she opened `a_0`).
#[derive(Debug, Clone, Copy, Default)]
pub struct NoraCubic;

impl NoraCubic {
    fn close_extreme(state: &GameState, p: u64, i: usize) -> Result<Decision> {
        let o = extreme_order(&ords(state, p), i, None)?;
        Ok(power_move(i, p, o, "cubic.close.extreme"))
    }
}

impl Strategy for NoraCubic {
    fn id(&self) -> String {
        "nora_cubic".into()
    }

    fn player(&self) -> Player {
        Player::Nora
    }

    fn applicable(&self, arena: &Arena, first: Player) -> Result<()> {
        prime_of(arena)?;
        require(!arena.integral, "Wanda wins the integral cubic")?;
        require(
            arena.degree == 3 && first == Player::Wanda,
            "needs d = 3 with Wanda first",
        )
    }

    fn decide(&self, state: &GameState) -> Result<Decision> {
        ensure_turn(state, Player::Nora)?;
        self.applicable(state.arena(), state.first())?;
        let p = prime_of(state.arena())?;
        let opening = state.log()[0].index;
        let flip = opening == 0;
        let at = |j: usize| if flip { 3 - j } else { j };
        if open_count(state) != 1 {
            return Ok(match opening {
                1 | 2 => Decision::new(zero_move(3 - opening), "cubic.middle_pin"),
                _ if flip => Decision::new(zero_move(at(2)), "cubic.a1zero"),
                _ => Decision::new(zero_move(at(2)), "cubic.a2zero"),
            });
        }
        let i = state.poly().open_indices()[0];
        if i == 0 || i == 3 {
            return Self::close_extreme(state, p, i);
        }
        let q = rationals(state);
        let (lead, konst) = (
            q[at(3)].clone().expect("set"),
            q[at(0)].clone().expect("set"),
        );
        if i != at(1) || q[at(2)].as_ref().is_some_and(|c| !c.is_zero()) {
            return Err(Error::not_applicable("off the planned line"));
        }
        let d = &konst / &lead;
        if !is_cube_in_qp(&d, p)? {
            return Ok(Decision::new(zero_move(i), "cubic.noncube"));
        }
        let ra = cube_residue_avoidance(&d, p)?;
        let value = lead * rat(ra.chosen_residue as i64) * p_pow(p, ra.target_order);
        let o = ord_int(&value, p).expect("nonzero");
        Ok(Decision::new(Move::rational(i, value), "cubic.cube").with_memo(Memo::order(p, o)))
    }
}

/// Wanda first in the integral cubic: `a_0 = p`, then `a_1 = 1` or
/// `a_2 = 1` leaves a slope of length one in the Newton polygon.
#[derive(Debug, Clone, Copy, Default)]
pub struct WandaIntegral;

impl Strategy for WandaIntegral {
    fn id(&self) -> String {
        "wanda_integral".into()
    }

    fn player(&self) -> Player {
        Player::Wanda
    }

    fn applicable(&self, arena: &Arena, first: Player) -> Result<()> {
        prime_of(arena)?;
        require(arena.integral, "needs integral coefficients")?;
        require(
            arena.degree == 3 && first == Player::Wanda,
            "needs d = 3 with Wanda first",
        )
    }

    fn decide(&self, state: &GameState) -> Result<Decision> {
        ensure_turn(state, Player::Wanda)?;
        self.applicable(state.arena(), state.first())?;
        let p = prime_of(state.arena())?;
        if state.log().is_empty() {
            return Ok(Decision::new(
                Move::rational(0, rat(p as i64)),
                "integral.open",
            ));
        }
        let reply = &state.log()[1];
        if reply.index != 1 {
            return Ok(Decision::new(Move::rational(1, rat(1)), "integral.a1"));
        }
        let o = reply.value.rational().and_then(|q| ord_int(q, p));
        match o {
            Some(0) => canonical(state, "integral.unit"),
            _ => Ok(Decision::new(Move::rational(2, rat(1)), "integral.a2")),
        }
    }
}

/// `sum_j p_j^(-k_j)`; its `p_j`-adic order is exactly `-k_j` when every
/// `k_j >= 1`.
pub fn multi_prime_close(terms: &[(u64, u32)]) -> Result<BigRational> {
    let mut primes: Vec<u64> = terms.iter().map(|t| t.0).collect();
    primes.sort_unstable();
    if primes.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::domain("duplicate primes"));
    }
    if terms
        .iter()
        .any(|&(p, k)| !crate::zring::is_prime(p) || k == 0)
    {
        return Err(Error::domain("need primes with exponents at least 1"));
    }
    Ok(terms.iter().map(|&(p, k)| p_pow(p, -(k as i64))).sum())
}

/// Nora last against several primes at once (d = 2 or d >= 5): the
/// per-prime strategy picks a negative closing order at each prime and the
/// orders are merged with [`multi_prime_close`].
#[derive(Debug, Clone)]
pub struct NoraMultiPrime {
    primes: Vec<u64>,
}

impl NoraMultiPrime {
    pub fn new(primes: Vec<u64>) -> Result<NoraMultiPrime> {
        if primes.is_empty() {
            return Err(Error::domain("need at least one prime"));
        }
        multi_prime_close(&primes.iter().map(|&p| (p, 1)).collect::<Vec<_>>())?;
        Ok(NoraMultiPrime { primes })
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Per-prime closing exponents `k_j` for the final slot `i`.
    pub fn closing_exponents(&self, state: &GameState, i: usize) -> Result<Vec<(u64, u32)>> {
        self.primes
            .iter()
            .map(|&p| {
                let o = ords(state, p);
                let n = if state.degree() == 2 {
                    let other = o[2 - i].expect("opposite extreme is nonzero");
                    if other.rem_euclid(2) == 0 {
                        -1
                    } else {
                        -2
                    }
                } else {
                    highdeg_close(&o, i, Some(-1))?.0
                };
                Ok((p, (-n) as u32))
            })
            .collect()
    }
}

impl Strategy for NoraMultiPrime {
    fn id(&self) -> String {
        let ps: Vec<String> = self.primes.iter().map(u64::to_string).collect();
        format!("nora_multi_prime[{}]", ps.join(","))
    }

    fn player(&self) -> Player {
        Player::Nora
    }

    fn applicable(&self, arena: &Arena, first: Player) -> Result<()> {
        require(
            matches!(arena.kind, ArenaKind::Valued(_)),
            "requires a valued arena",
        )?;
        require(!arena.integral, "closing values have negative orders")?;
        let d = arena.degree;
        require(d == 2 || d >= 5, "degrees 1, 3 and 4 are excluded")?;
        require(last_player(d, first) == Player::Nora, "Nora must move last")
    }

    fn decide(&self, state: &GameState) -> Result<Decision> {
        ensure_turn(state, Player::Nora)?;
        self.applicable(state.arena(), state.first())?;
        if open_count(state) == 1 {
            let i = state.poly().open_indices()[0];
            let value = multi_prime_close(&self.closing_exponents(state, i)?)?;
            return Ok(Decision::new(Move::rational(i, value), "multi.close"));
        }
        if state.degree() == 2 {
            return Ok(Decision::new(zero_move(1), "multi.quad.open"));
        }
        highdeg_pin(state)
    }
}
