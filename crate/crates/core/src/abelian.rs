//! Root avoidance in abelian extensions of Q: a cubic strategy forcing a
//! negative discriminant on top of Q_p irreducibility, and a high-degree
//! strategy avoiding roots in an unramified extension adjoined `sqrt p`,
//! where orders live in `(1/2)Z`.

use num_rational::{BigRational, Ratio};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Arena, ArenaKind, GameState, Move, Player};
use crate::strategy::{
    canonical_move, extreme_bounds, middle_bounds, Decision, Memo, NoraCubic, Strategy,
};
use crate::valued::poly::discriminant;
use crate::valued::{ord_int, p_pow, qp_root_exists, Valuation};
use crate::zring::{factorize, is_prime, last_player};

type Q = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianPrime {
    pub degree_bound: usize,
    pub prime: u64,
    /// Factorization of `(p - 1)/2`.
    pub half_cofactor: Vec<(u64, u32)>,
}

impl AbelianPrime {
    /// `p` prime, `p = 3 mod 4`, and every prime factor of `(p-1)/2`
    /// exceeds the degree bound.
    pub fn is_valid(&self) -> bool {
        let p = self.prime;
        let half = (p - 1) / 2;
        is_prime(p)
            && p % 4 == 3
            && self
                .half_cofactor
                .iter()
                .map(|&(q, e)| q.pow(e))
                .product::<u64>()
                == half
            && self
                .half_cofactor
                .iter()
                .all(|&(q, _)| q as usize > self.degree_bound)
    }
}

fn odd_primes_upto(d: usize) -> Vec<u64> {
    (3..=d as u64).filter(|&q| is_prime(q)).collect()
}

/// First prime of the progression `N + 4 t prod(q)` over odd primes `q <= d`,
/// where `N = 3 mod 4` and `N = 2 mod q`, whose half cofactor has no prime
/// factor up to `d`. `limit` caps the number of progression terms tried.
pub fn find_abelian_prime(d: usize, limit: u64) -> Result<AbelianPrime> {
    if d < 2 {
        return Err(Error::domain("degree bound must be at least 2"));
    }
    let qs = odd_primes_upto(d);
    let step = qs.iter().try_fold(4u64, |acc, &q| acc.checked_mul(q));
    let step = step.ok_or_else(|| Error::domain(format!("modulus for d = {d} overflows")))?;
    let base = (3..step + 3)
        .find(|&n| n % 4 == 3 && qs.iter().all(|&q| n % q == 2))
        .expect("CRT solution exists below the modulus");
    for t in 0..limit {
        let Some(n) = step.checked_mul(t).and_then(|s| s.checked_add(base)) else {
            break;
        };
        if !is_prime(n) {
            continue;
        }
        let half = (n - 1) / 2;
        let half_cofactor = if half == 1 {
            Vec::new()
        } else {
            factorize(half)?
        };
        if half_cofactor.iter().all(|&(q, _)| q as usize > d) {
            return Ok(AbelianPrime {
                degree_bound: d,
                prime: n,
                half_cofactor,
            });
        }
    }
    Err(Error::SearchLimit(limit))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfLatticeAvoidance {
    pub n1: i64,
    pub n2: i64,
    pub i: usize,
    pub d: usize,
    pub sequence: Vec<i64>,
}

/// `x` lies in `{n1 + n i/2}` or `{n2 + n (d-i)/2}` for some integer `n`.
pub fn in_half_lattices(x: i64, n1: i64, n2: i64, d: usize, i: usize) -> bool {
    (2 * (x - n1)).rem_euclid(i as i64) == 0 || (2 * (x - n2)).rem_euclid((d - i) as i64) == 0
}

/// The `count` greatest integers below `upper` outside both half-integer
/// progressions, in descending order.
pub fn ap_avoid_below(
    n1: i64,
    n2: i64,
    d: usize,
    i: usize,
    upper: i64,
    count: usize,
) -> Result<HalfLatticeAvoidance> {
    if d <= 8 || i <= 2 || i + 2 >= d {
        return Err(Error::domain(format!(
            "need d > 8 and 2 < i < d - 2, got d = {d}, i = {i}"
        )));
    }
    let span = (2 * d * (count + 1)) as i64;
    let sequence: Vec<i64> = (upper - span..upper)
        .rev()
        .filter(|&x| !in_half_lattices(x, n1, n2, d, i))
        .take(count)
        .collect();
    if sequence.len() < count {
        return Err(Error::SearchLimit(span as u64));
    }
    Ok(HalfLatticeAvoidance {
        n1,
        n2,
        i,
        d,
        sequence,
    })
}

/// [`ap_avoid_below`] starting just below 0.
pub fn ap_avoid(
    n1: i64,
    n2: i64,
    d: usize,
    i: usize,
    count: usize,
) -> Result<HalfLatticeAvoidance> {
    ap_avoid_below(n1, n2, d, i, 0, count)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianCertificate {
    pub prime: u64,
    pub no_qp_root: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disc_negative: Option<bool>,
}

/// Q_p root check plus, for cubics, the sign of the discriminant. A rootless
/// cubic with negative discriminant has Galois group S_3.
pub fn abelian_certificate(f: &[BigRational], p: u64) -> Result<AbelianCertificate> {
    let no_qp_root = !qp_root_exists(f, p)?.exists;
    let disc_negative = (f.len() == 4).then(|| discriminant(f).is_negative());
    Ok(AbelianCertificate {
        prime: p,
        no_qp_root,
        disc_negative,
    })
}

fn prime_of(arena: &Arena) -> Result<u64> {
    match &arena.kind {
        ArenaKind::Valued(c) if c.ramification == 1 => Ok(c.prime),
        _ => Err(Error::not_applicable("requires a Q_p arena")),
    }
}

fn ords(state: &GameState, p: u64) -> Vec<Option<i64>> {
    state
        .poly()
        .rationals()
        .iter()
        .map(|c| c.as_ref().and_then(|q| ord_int(q, p)))
        .collect()
}

/// The cubic strategy, with a closing extreme enlarged by `p^M` (smallest
/// `M` above its order) until the discriminant is negative. The other
/// closing branches already leave `-4B^3 - 27C^2` with `B >= 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoraAbelianCubic;

impl Strategy for NoraAbelianCubic {
    fn id(&self) -> String {
        "nora_abelian_cubic".into()
    }

    fn player(&self) -> Player {
        Player::Nora
    }

    fn applicable(&self, arena: &Arena, first: Player) -> Result<()> {
        NoraCubic.applicable(arena, first)
    }

    fn decide(&self, state: &GameState) -> Result<Decision> {
        let base = NoraCubic.decide(state)?;
        let i = base.mv.index;
        if state.poly().open_indices().len() != 1 || (i != 0 && i != 3) {
            return Ok(base);
        }
        let p = prime_of(state.arena())?;
        let v = base.mv.value.rational().expect("rational arena").clone();
        let o = ord_int(&v, p).expect("closing value is nonzero");
        let mut f: Vec<BigRational> = state
            .poly()
            .rationals()
            .into_iter()
            .map(Option::unwrap_or_default)
            .collect();
        f[i] = v.clone();
        if discriminant(&f).is_negative() {
            return Ok(base);
        }
        for m in o + 1..o + 4096 {
            f[i] = &v + p_pow(p, m);
            if discriminant(&f).is_negative() {
                return Ok(
                    Decision::new(Move::rational(i, f[i].clone()), "abelian.cubic.enlarge")
                        .with_memo(Memo::order(p, o)),
                );
            }
        }
        Err(Error::SearchLimit(4096))
    }
}

/// High degree with Nora last at a prime from [`find_abelian_prime`]: pins
/// `a_1, a_2, a_{d-2}, a_{d-1}`, then closes with orders avoiding every
/// order the other terms reach over `(1/2)Z`.
#[derive(Debug, Clone)]
pub struct NoraAbelianHighdeg {
    prime: AbelianPrime,
    degree: usize,
}

impl NoraAbelianHighdeg {
    pub fn new(degree: usize) -> Result<NoraAbelianHighdeg> {
        if degree <= 8 {
            return Err(Error::domain("degree must exceed 8"));
        }
        Ok(NoraAbelianHighdeg {
            prime: find_abelian_prime(degree, 1_000_000)?,
            degree,
        })
    }

    pub fn abelian_prime(&self) -> &AbelianPrime {
        &self.prime
    }

    pub fn prime(&self) -> u64 {
        self.prime.prime
    }
}

/// Extreme closing order for `a_0` over half-integer `ord x`: outside
/// `{ord a_d + d n : n in (1/2)Z, n < M1}` and below `M2`.
pub fn half_extreme_admissible(ords: &[Option<i64>], o: i64) -> bool {
    let d = ords.len() - 1;
    let od = ords[d].expect("a_d is set");
    let b = extreme_bounds(ords);
    let (m1, m2) = (b.m1.expect("set"), b.m2.expect("set"));
    let in_lattice = (2 * (o - od)).rem_euclid(d as i64) == 0;
    let n = Q::new(o - od, d as i64);
    let small = match m1 {
        Valuation::Infinite => true,
        Valuation::Finite(m) => n < m,
    };
    let below = match m2 {
        Valuation::Infinite => true,
        Valuation::Finite(m) => Q::from_integer(o) < m,
    };
    !(in_lattice && small) && below
}

fn start_below(bound: Valuation) -> i64 {
    match bound {
        Valuation::Infinite => -1,
        Valuation::Finite(b) => b.ceil().to_integer() - 1,
    }
}

fn half_extreme_order(ords: &[Option<i64>]) -> Result<i64> {
    let start = start_below(extreme_bounds(ords).m2.expect("set"));
    (start - 4096..=start)
        .rev()
        .find(|&o| half_extreme_admissible(ords, o))
        .ok_or(Error::SearchLimit(4096))
}

impl Strategy for NoraAbelianHighdeg {
    fn id(&self) -> String {
        format!("nora_abelian_highdeg[{}]", self.prime.prime)
    }

    fn player(&self) -> Player {
        Player::Nora
    }

    fn applicable(&self, arena: &Arena, first: Player) -> Result<()> {
        if prime_of(arena)? != self.prime.prime || arena.degree != self.degree {
            return Err(Error::not_applicable(format!(
                "built for d = {} at p = {}",
                self.degree, self.prime.prime
            )));
        }
        if arena.integral {
            return Err(Error::not_applicable("closing orders may be negative"));
        }
        if last_player(arena.degree, first) != Player::Nora {
            return Err(Error::not_applicable("Nora must move last"));
        }
        Ok(())
    }

    fn decide(&self, state: &GameState) -> Result<Decision> {
        if state.to_move() != Some(Player::Nora) {
            return Err(Error::not_applicable("not Nora's turn"));
        }
        self.applicable(state.arena(), state.first())?;
        let p = self.prime.prime;
        let d = state.degree();
        let open = state.poly().open_indices();
        if open.len() > 1 {
            if let Some(&i) = [1, 2, d - 2, d - 1].iter().find(|&&i| state.is_open(i)) {
                return Ok(Decision::new(
                    Move::rational(i, BigRational::zero()),
                    "abelian.pin",
                ));
            }
            return Ok(Decision::new(canonical_move(state)?, "abelian.free"));
        }
        let i = open[0];
        let o = ords(state, p);
        let (order, tag) = match i {
            0 => (half_extreme_order(&o)?, "abelian.close.a0"),
            _ if i == d => {
                let rev: Vec<_> = o.iter().rev().copied().collect();
                (half_extreme_order(&rev)?, "abelian.close.ad")
            }
            _ if i > 2 && i + 2 < d => {
                let m5 = middle_bounds(&o, i).m5.expect("set");
                let (o0, od) = (o[0].expect("set"), o[d].expect("set"));
                let ap = ap_avoid_below(o0, od, d, i, start_below(m5) + 1, 1)?;
                (ap.sequence[0], "abelian.close.middle")
            }
            _ => {
                return Err(Error::not_applicable(format!(
                    "a_{i} left open for the closing move"
                )))
            }
        };
        Ok(Decision::new(Move::rational(i, p_pow(p, order)), tag).with_memo(Memo::order(p, order)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::parse_rational;
    use crate::valued::rat;
    use Player::*;

    fn play(p: u64, d: usize, first: Player, moves: &[(usize, &str)]) -> GameState {
        let mut s = GameState::new(Arena::valued(p, d).unwrap(), first);
        for &(i, v) in moves {
            s = s
                .apply_move(&Move::rational(i, parse_rational(v).unwrap()))
                .unwrap();
        }
        s
    }

    /// Discriminant of a cubic from the textbook formula on the monic form.
    fn cubic_disc_sign(f: &[BigRational]) -> bool {
        let (a, b, c) = (&f[2] / &f[3], &f[1] / &f[3], &f[0] / &f[3]);
        let disc = &a * &a * &b * &b
            - rat(4) * &b * &b * &b
            - rat(4) * &a * &a * &a * &c
            - rat(27) * &c * &c
            + rat(18) * &a * &b * &c;
        disc.is_negative()
    }

    #[test]
    fn prime_search() {
        let ap = find_abelian_prime(9, 1000).unwrap();
        assert_eq!((ap.prime, ap.half_cofactor.clone()), (107, vec![(53, 1)]));
        assert!(ap.is_valid());
        assert_eq!(find_abelian_prime(2, 10).unwrap().prime, 3);
        assert!(matches!(
            find_abelian_prime(9, 0),
            Err(Error::SearchLimit(0))
        ));
    }

    #[test]
    fn ap_examples() {
        assert_eq!(ap_avoid(0, 0, 9, 4, 4).unwrap().sequence, [-1, -3, -7, -9]);
        // both progressions meet Z in the multiples of 5
        assert_eq!(ap_avoid(0, 0, 10, 5, 3).unwrap().sequence, [-1, -2, -3]);
        assert!(ap_avoid(0, 0, 8, 4, 1).is_err());
        assert!(ap_avoid(0, 0, 9, 2, 1).is_err());
    }

    #[test]
    fn cubic_cube_branch_discriminant() {
        let s = play(5, 3, Wanda, &[(3, "1"), (2, "0"), (0, "125")]);
        let d = NoraAbelianCubic.decide(&s).unwrap();
        assert_eq!(d.mv, Move::rational(1, rat(25)));
        let f = s
            .apply_move(&d.mv)
            .unwrap()
            .poly()
            .rational_coeffs()
            .unwrap();
        assert_eq!(discriminant(&f), rat(-484375));
        let cert = abelian_certificate(&f, 5).unwrap();
        assert_eq!((cert.no_qp_root, cert.disc_negative), (true, Some(true)));
    }

    #[test]
    fn cubic_enlarges_closing_constant() {
        // x^3 - 30x^2 + 0x + a_0: A^2B^2 = 0 and -4A^3C > 0 for small C > 0
        let s = play(5, 3, Wanda, &[(2, "-30"), (1, "0"), (3, "1")]);
        let plain = NoraCubic.decide(&s).unwrap();
        let d = NoraAbelianCubic.decide(&s).unwrap();
        assert_eq!(d.branch, "abelian.cubic.enlarge");
        let (v0, v) = (
            plain.mv.value.rational().unwrap(),
            d.mv.value.rational().unwrap(),
        );
        assert_eq!(ord_int(v0, 5), ord_int(v, 5));
        let f = s
            .apply_move(&d.mv)
            .unwrap()
            .poly()
            .rational_coeffs()
            .unwrap();
        assert!(cubic_disc_sign(&f));
        assert!(!qp_root_exists(&f, 5).unwrap().exists);
    }

    #[test]
    fn highdeg_extreme_close() {
        let st = NoraAbelianHighdeg::new(9).unwrap();
        assert_eq!(st.prime(), 107);
        // Wanda opens a_9 = 1, Nora pins, everything else zero, a_0 last
        let mut s = GameState::new(Arena::valued(107, 9).unwrap(), Wanda);
        s = s.apply_move(&Move::rational(9, rat(1))).unwrap();
        while s.poly().open_indices().len() > 1 {
            let mv = if s.to_move() == Some(Nora) {
                st.decide(&s).unwrap().mv
            } else {
                let i = *s.poly().open_indices().iter().find(|&&i| i != 0).unwrap();
                Move::rational(i, BigRational::zero())
            };
            s = s.apply_move(&mv).unwrap();
        }
        let d = st.decide(&s).unwrap();
        assert_eq!((d.mv.index, d.branch), (0, "abelian.close.a0"));
        assert_eq!(
            d.mv.value.rational().unwrap(),
            &parse_rational("1/107").unwrap()
        );
    }

    #[test]
    fn highdeg_middle_close() {
        let st = NoraAbelianHighdeg::new(9).unwrap();
        let mut moves = vec![(9, "1"), (0, "1")];
        moves.extend([1, 2, 3, 5, 6, 7, 8].map(|i| (i, "0")));
        let mut s = GameState::new(Arena::valued(107, 9).unwrap(), Wanda);
        for (i, v) in moves {
            s = s
                .apply_move(&Move::rational(i, parse_rational(v).unwrap()))
                .unwrap();
        }
        let d = st.decide(&s).unwrap();
        assert_eq!((d.mv.index, d.memo.order), (4, Some(-1)));
        let f = s
            .apply_move(&d.mv)
            .unwrap()
            .poly()
            .rational_coeffs()
            .unwrap();
        assert!(!qp_root_exists(&f, 107).unwrap().exists);
    }
}
