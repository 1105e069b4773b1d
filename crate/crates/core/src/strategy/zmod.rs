//! Strategies over Z/NZ (and the degree-parity strategy that also covers
//! valued arenas).

use crate::error::{Error, Result};
use crate::game::{Arena, GameState, Move, Player};
use crate::zring::{is_cube_free, last_player, valuation, CyclicRing};

use super::{
    canonical, ensure_turn, int_coeff, neg_coeff, open_count, sum_coeffs, Decision, Memo, Strategy,
};

fn cyclic(arena: &Arena) -> Result<&CyclicRing> {
    arena
        .ring()
        .ok_or_else(|| Error::not_applicable("requires a cyclic arena"))
}

fn residues(state: &GameState) -> Result<(&CyclicRing, Vec<Option<u64>>)> {
    Ok((cyclic(state.arena())?, state.poly().residues()))
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::not_applicable(msg))
    }
}

fn pow_mod(base: u64, exp: usize, m: u64) -> u64 {
    let mut acc = 1 % m;
    for _ in 0..exp {
        acc = acc * (base % m) % m;
    }
    acc
}

/// Smallest nonzero `v < N` whose class mod `m` keeps every unit of Z/mZ
/// from being a root once `a_i = v`. `m` divides N.
fn avoid_units(ring: &CyclicRing, slots: &[Option<u64>], i: usize, m: u64) -> Result<u64> {
    let rm = CyclicRing::new(m)?;
    let mut forbidden = vec![false; m as usize];
    for u in rm.units() {
        let mut h = 0u64;
        for (j, a) in slots.iter().enumerate() {
            if let (true, Some(a)) = (j != i, a) {
                h = rm.add(h, rm.mul(*a % m, pow_mod(u, j, m)));
            }
        }
        let xi = rm.inverse(pow_mod(u, i, m))?;
        forbidden[rm.mul(rm.neg(h), xi) as usize] = true;
    }
    (1..ring.modulus())
        .find(|&v| !forbidden[(v % m) as usize])
        .ok_or_else(|| Error::not_applicable(format!("every class mod {m} is forbidden")))
}

/// Smallest `v < 16` for `a_3` such that no even residue is a root mod 16.
/// Terms of degree four and up vanish at even arguments, so only
/// `a_0..a_2` matter.
pub fn block_even_roots(a0: u64, a1: u64, a2: u64) -> Option<u64> {
    (0..16u64).find(|&v| {
        (0..16u64)
            .step_by(2)
            .all(|x| (a0 + a1 * x + a2 * x * x + v * x * x * x) % 16 != 0)
    })
}

/// Wins for Wanda whenever she moves last (and in every linear game) by
/// forcing `f(1) = 0`, `f(-1) = 0` or a linear root.
#[derive(Debug, Clone, Copy, Default)]
pub struct WandaLast;

impl Strategy for WandaLast {
    fn id(&self) -> String {
        "wanda_last".into()
    }

    fn player(&self) -> Player {
        Player::Wanda
    }

    fn applicable(&self, arena: &Arena, first: Player) -> Result<()> {
        require(
            arena.degree == 1 || last_player(arena.degree, first) == Player::Wanda,
            "Wanda must make the last move",
        )
    }

    fn decide(&self, state: &GameState) -> Result<Decision> {
        ensure_turn(state, Player::Wanda)?;
        self.applicable(state.arena(), state.first())?;
        let arena = state.arena();
        let d = state.degree();
        let open = state.poly().open_indices();
        let one = || int_coeff(arena, 1);
        match d {
            1 => match state.log().last() {
                None => Ok(Decision::new(
                    Move {
                        index: 1,
                        value: one(),
                    },
                    "last.linear.open",
                )),
                Some(e) => Ok(Decision::new(
                    Move {
                        index: 1 - e.index,
                        value: e.value.clone(),
                    },
                    "last.linear.copy",
                )),
            },
            2 => {
                if state.is_open(1) {
                    return Ok(Decision::new(
                        Move {
                            index: 1,
                            value: int_coeff(arena, 0),
                        },
                        "last.quad.open",
                    ));
                }
                let i = open[0];
                let other = state.get(2 - i).expect("opposite extreme is set");
                Ok(Decision::new(
                    Move {
                        index: i,
                        value: neg_coeff(arena, other),
                    },
                    "last.quad.negate",
                ))
            }
            3 => {
                let e = state.log().last().expect("Nora opens the cubic game");
                let partner = 3 - e.index;
                if state.is_open(partner) {
                    Ok(Decision::new(
                        Move {
                            index: partner,
                            value: e.value.clone(),
                        },
                        "last.cubic.mirror",
                    ))
                } else {
                    canonical(state, "last.cubic.offtree")
                }
            }
            _ => {
                if open.len() == 1 {
                    let i = open[0];
                    let rest = sum_coeffs(arena, state.poly().slots().iter().flatten());
                    let value = neg_coeff(arena, &rest);
                    if value.is_zero() && arena.zero_excluded(i) {
                        return canonical(state, "last.sum.blocked");
                    }
                    return Ok(Decision::new(Move { index: i, value }, "last.sum.final"));
                }
                for i in [0, d] {
                    if state.is_open(i) {
                        return Ok(Decision::new(
                            Move {
                                index: i,
                                value: one(),
                            },
                            "last.sum.extreme",
                        ));
                    }
                }
                canonical(state, "last.sum.free")
            }
        }
    }
}

/// Nora with even degree: she opens `a_0 = 1` so non-units are never roots,
/// then closes by dodging the at most phi(N) values that create a unit root.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoraEven;

impl Strategy for NoraEven {
    fn id(&self) -> String {
        "nora_even".into()
    }

    fn player(&self) -> Player {
        Player::Nora
    }

    fn applicable(&self, arena: &Arena, first: Player) -> Result<()> {
        let r = cyclic(arena)?;
        require(
            !r.is_prime_modulus() && r.modulus() >= 4,
            "modulus must be composite",
        )?;
        require(
            arena.degree % 2 == 0 && first == Player::Nora,
            "needs even degree with Nora first",
        )
    }

    fn decide(&self, state: &GameState) -> Result<Decision> {
        ensure_turn(state, Player::Nora)?;
        self.applicable(state.arena(), state.first())?;
        let (ring, slots) = residues(state)?;
        if open_count(state) == 1 {
            let i = state.poly().open_indices()[0];
            let v = avoid_units(ring, &slots, i, ring.modulus())?;
            return Ok(Decision::new(Move::residue(i, v), "even.final"));
        }
        if state.moves_by(Player::Nora).next().is_none() && state.is_open(0) {
            return Ok(Decision::new(Move::residue(0, 1), "even.open"));
        }
        canonical(state, "even.free")
    }
}

/// How Nora closes out an odd-degree game with Wanda opening.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Plan {
    /// `a_0` is a unit: only unit roots need blocking, modulo N.
    Units,
    /// `p` does not divide `a_0`: Nora fixes `a_d = 1` and kills roots mod p.
    ModP(u64),
    /// `p | a_0` but `p^2` does not: Nora fixes `a_1 = 0` and kills roots mod p^2.
    ModP2(u64),
    /// `a_0 = 4u mod 16`.
    Sixteen4,
    /// `a_0 = 8 mod 16`.
    Sixteen8,
}

impl Plan {
    fn memo(self) -> Memo {
        match self {
            Plan::Units => Memo::default(),
            Plan::ModP(p) => Memo::prime(p, 1),
            Plan::ModP2(p) => Memo::prime(p, 2),
            Plan::Sixteen4 | Plan::Sixteen8 => Memo::prime(2, 4),
        }
    }

    fn final_modulus(self, n: u64) -> u64 {
        match self {
            Plan::Units => n,
            Plan::ModP(p) => p,
            Plan::ModP2(p) => p * p,
            Plan::Sixteen4 | Plan::Sixteen8 => 16,
        }
    }
}

fn plan_for(state: &GameState, allow_sixteen: bool) -> Result<Plan> {
    let (ring, _) = residues(state)?;
    let opening = state
        .log()
        .first()
        .ok_or_else(|| Error::not_applicable("Wanda has not opened"))?;
    if opening.index != 0 {
        return Ok(Plan::Units);
    }
    let a0 = opening.value.residue().expect("cyclic arena");
    if ring.is_unit(a0) {
        return Ok(Plan::Units);
    }
    let primes = ring.factorization();
    if let Some(&(p, _)) = primes.iter().find(|&&(p, _)| a0 % p != 0) {
        return Ok(Plan::ModP(p));
    }
    if let Some(&(p, _)) = primes.iter().find(|&&(p, e)| e >= 2 && a0 % (p * p) != 0) {
        return Ok(Plan::ModP2(p));
    }
    if allow_sixteen {
        match valuation(a0 % 16, 2) {
            2 => return Ok(Plan::Sixteen4),
            3 => return Ok(Plan::Sixteen8),
            _ => {}
        }
    }
    Err(Error::not_applicable(format!("no plan for a_0 = {a0}")))
}

fn nora_odd(state: &GameState, allow_sixteen: bool) -> Result<Decision> {
    let (ring, slots) = residues(state)?;
    let plan = plan_for(state, allow_sixteen)?;
    let memo = plan.memo();
    let d = state.degree();
    if open_count(state) == 1 {
        let i = state.poly().open_indices()[0];
        let v = avoid_units(ring, &slots, i, plan.final_modulus(ring.modulus()))?;
        let tag = match plan {
            Plan::Units => "odd.units.final",
            Plan::ModP(_) => "odd.modp.final",
            Plan::ModP2(_) => "odd.modp2.final",
            Plan::Sixteen4 | Plan::Sixteen8 => "sixteen.final",
        };
        return Ok(Decision::new(Move::residue(i, v), tag).with_memo(memo));
    }
    let k = state.moves_by(Player::Nora).count();
    let decision = match (plan, k) {
        (Plan::Units, 0) if state.is_open(0) => {
            Decision::new(Move::residue(0, 1), "odd.units.open")
        }
        (Plan::Units, 0) => canonical(state, "odd.units.unit")?,
        (Plan::ModP(_), 0) => Decision::new(Move::residue(d, 1), "odd.modp.lead"),
        (Plan::ModP2(_), 0) => Decision::new(Move::residue(1, 0), "odd.modp2.linear"),
        (Plan::Sixteen4, 0) => Decision::new(Move::residue(1, 8), "sixteen.four.a1"),
        (Plan::Sixteen8, 0) => Decision::new(Move::residue(1, 4), "sixteen.eight.a1"),
        (Plan::Sixteen4, 1) => {
            if state.is_open(2) {
                Decision::new(Move::residue(2, 0), "sixteen.four.a2")
            } else {
                sixteen_a3(state, &slots, "sixteen.four.a3")?
            }
        }
        (Plan::Sixteen8, 1) => match slots[2] {
            None => Decision::new(Move::residue(2, 1), "sixteen.eight.a2"),
            Some(a2) if a2 % 2 == 1 => canonical(state, "sixteen.eight.odd")?,
            Some(_) => sixteen_a3(state, &slots, "sixteen.eight.a3")?,
        },
        _ => canonical(state, "odd.free")?,
    };
    Ok(decision.with_memo(memo))
}

fn sixteen_a3(state: &GameState, slots: &[Option<u64>], tag: &'static str) -> Result<Decision> {
    if !state.is_open(3) {
        return canonical(state, "sixteen.offtree");
    }
    let a = |i: usize| slots[i].unwrap_or(0) % 16;
    match block_even_roots(a(0), a(1), a(2)) {
        Some(v) => Ok(Decision::new(Move::residue(3, v), tag)),
        None => canonical(state, "sixteen.unblocked"),
    }
}

/// Nora last in an odd-degree game over a cube-free modulus.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoraCubefree;

impl Strategy for NoraCubefree {
    fn id(&self) -> String {
        "nora_cubefree".into()
    }

    fn player(&self) -> Player {
        Player::Nora
    }

    fn applicable(&self, arena: &Arena, first: Player) -> Result<()> {
        let r = cyclic(arena)?;
        require(
            !r.is_prime_modulus() && r.modulus() >= 4,
            "modulus must be composite",
        )?;
        require(is_cube_free(r.modulus())?, "modulus must be cube-free")?;
        require(
            arena.degree % 2 == 1 && arena.degree >= 3 && first == Player::Wanda,
            "needs odd degree at least 3 with Wanda first",
        )
    }

    fn decide(&self, state: &GameState) -> Result<Decision> {
        ensure_turn(state, Player::Nora)?;
        self.applicable(state.arena(), state.first())?;
        nora_odd(state, false)
    }
}

/// Nora last in an odd-degree game (degree above 3) over `16 N'` with `N'`
/// odd and cube-free.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoraSixteen;

impl Strategy for NoraSixteen {
    fn id(&self) -> String {
        "nora_sixteen".into()
    }

    fn player(&self) -> Player {
        Player::Nora
    }

    fn applicable(&self, arena: &Arena, first: Player) -> Result<()> {
        let n = cyclic(arena)?.modulus();
        require(
            valuation(n, 2) == 4 && (n == 16 || is_cube_free(n >> 4)?),
            "modulus must be 16 times an odd cube-free number",
        )?;
        require(
            arena.degree % 2 == 1 && arena.degree > 3 && first == Player::Wanda,
            "needs odd degree above 3 with Wanda first",
        )
    }

    fn decide(&self, state: &GameState) -> Result<Decision> {
        ensure_turn(state, Player::Nora)?;
        self.applicable(state.arena(), state.first())?;
        nora_odd(state, true)
    }
}

fn prime_power(arena: &Arena) -> Result<(u64, u32)> {
    match cyclic(arena)?.factorization() {
        &[(p, m)] => Ok((p, m)),
        _ => Err(Error::not_applicable("modulus must be a prime power")),
    }
}

fn wanda_odd_first(arena: &Arena, first: Player) -> Result<()> {
    require(
        arena.degree % 2 == 1 && arena.degree >= 3 && first == Player::Wanda,
        "needs odd degree at least 3 with Wanda first",
    )
}

/// Wanda first over `p^m`, `m >= 3`, `m != 4`: she opens with
/// `a_0 = -p^(2k)` (m = 2k+1) or `-p^(2k-1)` (m = 2k) and answers Nora's
/// reply so that a root of order about m/2 survives.
#[derive(Debug, Clone, Copy, Default)]
pub struct WandaPrimePower;

impl Strategy for WandaPrimePower {
    fn id(&self) -> String {
        "wanda_prime_power".into()
    }

    fn player(&self) -> Player {
        Player::Wanda
    }

    fn applicable(&self, arena: &Arena, first: Player) -> Result<()> {
        let (_, m) = prime_power(arena)?;
        require(m >= 3 && m != 4, "exponent must be at least 3 and not 4")?;
        wanda_odd_first(arena, first)
    }

    fn decide(&self, state: &GameState) -> Result<Decision> {
        ensure_turn(state, Player::Wanda)?;
        self.applicable(state.arena(), state.first())?;
        let ring = cyclic(state.arena())?;
        let (p, m) = prime_power(state.arena())?;
        let k = m / 2;
        let memo = Memo::prime(p, k);
        let decision = match state.moves_by(Player::Wanda).count() {
            0 => {
                let e = if m % 2 == 1 { 2 * k } else { 2 * k - 1 };
                Decision::new(Move::residue(0, ring.neg(p.pow(e))), "pp.open")
            }
            1 => {
                let reply = &state.log()[1];
                if reply.index != 1 {
                    Decision::new(Move::residue(1, 1), "pp.a1")
                } else {
                    let v = valuation(reply.value.residue().expect("cyclic arena"), p);
                    if v < k {
                        canonical(state, "pp.forced")?
                    } else if v == k {
                        Decision::new(Move::residue(2, 0), "pp.a2zero")
                    } else if m % 2 == 1 {
                        Decision::new(Move::residue(2, 1), "pp.a2one")
                    } else {
                        Decision::new(Move::residue(2, p), "pp.a2p")
                    }
                }
            }
            _ => canonical(state, "pp.free")?,
        };
        Ok(decision.with_memo(memo))
    }
}

/// Wanda first over `p^4` (for p = 2 only in the cubic game): opens with
/// `a_0 = -p^2` and answers Nora's reply.
#[derive(Debug, Clone, Copy, Default)]
pub struct WandaFourthPower;

impl Strategy for WandaFourthPower {
    fn id(&self) -> String {
        "wanda_fourth_power".into()
    }

    fn player(&self) -> Player {
        Player::Wanda
    }

    fn applicable(&self, arena: &Arena, first: Player) -> Result<()> {
        let (p, m) = prime_power(arena)?;
        require(m == 4, "modulus must be a fourth power of a prime")?;
        require(
            p != 2 || arena.degree == 3,
            "over Z/16 only the cubic game is won",
        )?;
        wanda_odd_first(arena, first)
    }

    fn decide(&self, state: &GameState) -> Result<Decision> {
        ensure_turn(state, Player::Wanda)?;
        self.applicable(state.arena(), state.first())?;
        let ring = cyclic(state.arena())?;
        let (p, _) = prime_power(state.arena())?;
        let memo = Memo::prime(p, 2);
        let decision = match state.moves_by(Player::Wanda).count() {
            0 => Decision::new(Move::residue(0, ring.neg(p * p)), "fp.open"),
            1 => {
                let reply = &state.log()[1];
                if reply.index != 1 {
                    Decision::new(Move::residue(1, 1), "fp.a1")
                } else {
                    let a1 = reply.value.residue().expect("cyclic arena");
                    match valuation(a1, p) {
                        0 => canonical(state, "fp.unit")?,
                        1 => Decision::new(Move::residue(2, 0), "fp.a2zero"),
                        2 if p == 2 => {
                            let u1 = a1 / 4;
                            Decision::new(
                                Move::residue(2, ring.reduce_i128(1 - 2 * u1 as i128)),
                                "fp.two.a2",
                            )
                        }
                        2 => Decision::new(Move::residue(2, 1), "fp.a2one.square"),
                        _ => Decision::new(Move::residue(2, 1), "fp.a2one.cube"),
                    }
                }
            }
            _ => canonical(state, "fp.free")?,
        };
        Ok(decision.with_memo(memo))
    }
}
