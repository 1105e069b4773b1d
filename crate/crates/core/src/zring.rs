//! Arithmetic in Z/NZ, factorization helpers, naive root counting and the
//! win/loss classification for cyclic arenas.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::Player;

/// Trial division. Input sizes here stay well below 10^9.
pub fn factorize(n: u64) -> Result<Vec<(u64, u32)>> {
    if n < 2 {
        return Err(Error::domain(format!("cannot factorize {n}")));
    }
    let mut out = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while p.saturating_mul(p) <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push((m, 1));
    }
    Ok(out)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut p = 3u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            return false;
        }
        p += 2;
    }
    true
}

pub fn is_cube_free(n: u64) -> Result<bool> {
    Ok(factorize(n)?.iter().all(|&(_, e)| e <= 2))
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Exponent of `p` in `n`; `n = 0` reports `u32::MAX`.
pub fn valuation(n: u64, p: u64) -> u32 {
    if n == 0 {
        return u32::MAX;
    }
    let mut m = n;
    let mut e = 0;
    while m % p == 0 {
        m /= p;
        e += 1;
    }
    e
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicRing {
    modulus: u64,
    factorization: Vec<(u64, u32)>,
    unit_count: u64,
}

impl CyclicRing {
    pub fn new(modulus: u64) -> Result<Self> {
        let factorization = factorize(modulus)?;
        let unit_count = factorization
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product();
        Ok(CyclicRing {
            modulus,
            factorization,
            unit_count,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn factorization(&self) -> &[(u64, u32)] {
        &self.factorization
    }

    pub fn unit_count(&self) -> u64 {
        self.unit_count
    }

    pub fn is_prime_modulus(&self) -> bool {
        self.factorization.len() == 1 && self.factorization[0].1 == 1
    }

    pub fn reduce_i128(&self, v: i128) -> u64 {
        v.rem_euclid(self.modulus as i128) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.modulus as u128) as u64
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        let n = self.modulus as u128;
        ((a as u128 % n + n - b as u128 % n) % n) as u64
    }

    pub fn neg(&self, a: u64) -> u64 {
        self.sub(0, a)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    pub fn pow(&self, base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.modulus;
        let mut b = base % self.modulus;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    pub fn is_unit(&self, a: u64) -> bool {
        gcd(a % self.modulus, self.modulus) == 1
    }

    pub fn units(&self) -> impl Iterator<Item = u64> + '_ {
        (1..self.modulus).filter(move |&x| self.is_unit(x))
    }

    pub fn inverse(&self, u: u64) -> Result<u64> {
        let n = self.modulus as i128;
        let (mut r0, mut r1) = (n, (u % self.modulus) as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        if r0 != 1 {
            return Err(Error::NotAUnit {
                value: u % self.modulus,
                modulus: self.modulus,
            });
        }
        Ok(t0.rem_euclid(n) as u64)
    }

    /// Horner evaluation of `coeffs[0] + coeffs[1] x + ...`.
    pub fn eval(&self, coeffs: &[u64], x: u64) -> u64 {
        coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootCount {
    pub count: u64,
    pub witnesses: Vec<u64>,
}

/// Counts roots of a fully assigned polynomial by evaluating at every residue.
pub fn count_roots(ring: &CyclicRing, slots: &[Option<u64>]) -> Result<RootCount> {
    let coeffs = slots
        .iter()
        .enumerate()
        .map(|(i, s)| s.ok_or(Error::IncompletePolynomial(i)))
        .collect::<Result<Vec<_>>>()?;
    let witnesses: Vec<u64> = (0..ring.modulus())
        .filter(|&x| ring.eval(&coeffs, x) == 0)
        .collect();
    Ok(RootCount {
        count: witnesses.len() as u64,
        witnesses,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameClass {
    LastPlayerWins,
    WandaAlways,
}

/// The last mover makes move d+1, so it is the first player iff d is even.
pub fn last_player(d: usize, first: Player) -> Player {
    if d % 2 == 0 {
        first
    } else {
        first.other()
    }
}

pub fn game_class(n: u64, d: usize) -> Result<GameClass> {
    if n < 4 || is_prime(n) {
        return Err(Error::OutOfScope(format!(
            "N = {n} is not composite; prime moduli are finite fields"
        )));
    }
    if d == 0 {
        return Err(Error::domain("degree must be at least 1"));
    }
    if d == 1 {
        return Ok(GameClass::WandaAlways);
    }
    if d % 2 == 0 || is_cube_free(n)? {
        return Ok(GameClass::LastPlayerWins);
    }
    if d > 3 && valuation(n, 2) == 4 && (n == 16 || is_cube_free(n >> 4)?) {
        return Ok(GameClass::LastPlayerWins);
    }
    Ok(GameClass::WandaAlways)
}

pub fn classify(n: u64, d: usize, first: Player) -> Result<Player> {
    Ok(match game_class(n, d)? {
        GameClass::WandaAlways => Player::Wanda,
        GameClass::LastPlayerWins => last_player(d, first),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use Player::*;

    #[test]
    fn factorize_small() {
        assert_eq!(factorize(48).unwrap(), vec![(2, 4), (3, 1)]);
        assert_eq!(factorize(16).unwrap(), vec![(2, 4)]);
        assert_eq!(factorize(105).unwrap(), vec![(3, 1), (5, 1), (7, 1)]);
        assert!(factorize(1).is_err());
    }

    #[test]
    fn cube_free() {
        assert!(is_cube_free(12).unwrap());
        assert!(!is_cube_free(16).unwrap());
        assert!(is_cube_free(9).unwrap());
    }

    #[test]
    fn inverses() {
        assert_eq!(CyclicRing::new(16).unwrap().inverse(3).unwrap(), 11);
        assert_eq!(CyclicRing::new(9).unwrap().inverse(5).unwrap(), 2);
        assert_eq!(CyclicRing::new(35).unwrap().inverse(1).unwrap(), 1);
        assert!(matches!(
            CyclicRing::new(12).unwrap().inverse(4),
            Err(Error::NotAUnit {
                value: 4,
                modulus: 12
            })
        ));
    }

    #[test]
    fn root_counts() {
        let r8 = CyclicRing::new(8).unwrap();
        let rc = count_roots(&r8, &[Some(7), Some(0), Some(1)]).unwrap();
        assert_eq!((rc.count, rc.witnesses), (4, vec![1, 3, 5, 7]));
        let r7 = CyclicRing::new(7).unwrap();
        assert_eq!(
            count_roots(&r7, &[Some(1), Some(1)]).unwrap().witnesses,
            vec![6]
        );
        let r4 = CyclicRing::new(4).unwrap();
        assert_eq!(count_roots(&r4, &[Some(1), Some(2)]).unwrap().count, 0);
        assert_eq!(
            count_roots(&r4, &[Some(1), None]),
            Err(Error::IncompletePolynomial(1))
        );
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify(16, 3, Nora).unwrap(), Wanda);
        assert_eq!(classify(16, 5, Wanda).unwrap(), Nora);
        assert_eq!(classify(12, 2, Nora).unwrap(), Nora);
        assert_eq!(classify(9, 3, Wanda).unwrap(), Nora);
        assert_eq!(classify(8, 3, Wanda).unwrap(), Wanda);
        assert_eq!(classify(48, 5, Wanda).unwrap(), Nora);
        assert_eq!(classify(32, 5, Wanda).unwrap(), Wanda);
        assert_eq!(classify(4, 1, Nora).unwrap(), Wanda);
        assert!(matches!(classify(7, 2, Nora), Err(Error::OutOfScope(_))));
    }

    #[test]
    fn cube_free_matches_exponents_up_to_200() {
        for n in 4..=200u64 {
            if is_prime(n) {
                continue;
            }
            let direct = (2..=n).all(|k| n % (k * k * k) != 0);
            assert_eq!(is_cube_free(n).unwrap(), direct, "N = {n}");
        }
    }

    #[test]
    fn unit_count_matches_gcd_scan() {
        for n in 2..=300u64 {
            let r = CyclicRing::new(n).unwrap();
            assert_eq!(
                r.unit_count(),
                (0..n).filter(|&x| gcd(x, n) == 1).count() as u64
            );
        }
    }

    #[test]
    fn inverse_is_involutive() {
        for n in 2..=1000u64 {
            let r = CyclicRing::new(n).unwrap();
            for u in r.units() {
                let v = r.inverse(u).unwrap();
                assert_eq!(r.mul(u, v), 1 % n);
                assert_eq!(r.inverse(v).unwrap(), u);
            }
        }
    }

    proptest! {
        #[test]
        fn factorization_reconstructs(n in 2u64..1_000_000) {
            let f = factorize(n).unwrap();
            prop_assert_eq!(f.iter().map(|&(p, e)| p.pow(e)).product::<u64>(), n);
            prop_assert!(f.windows(2).all(|w| w[0].0 < w[1].0));
            prop_assert!(f.iter().all(|&(p, e)| e >= 1 && is_prime(p)));
        }

        #[test]
        fn root_count_translation_invariant(
            n in 2u64..=100,
            raw in proptest::collection::vec(0u64..1000, 1..6),
            c in 0u64..100,
        ) {
            let r = CyclicRing::new(n).unwrap();
            let f: Vec<u64> = raw.iter().map(|v| v % n).collect();
            // g(x) = f(x + c) via evaluation only
            let count_f = (0..n).filter(|&x| r.eval(&f, x) == 0).count();
            let count_g = (0..n).filter(|&x| r.eval(&f, r.add(x, c)) == 0).count();
            prop_assert_eq!(count_f, count_g);
            let slots: Vec<Option<u64>> = f.iter().copied().map(Some).collect();
            prop_assert_eq!(count_roots(&r, &slots).unwrap().count as usize, count_f);
        }
    }
}
