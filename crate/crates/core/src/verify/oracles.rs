//! Seeded property checks of the p-adic oracles against constructions
//! whose answer is known: planted roots, Eisenstein polynomials, a
//! brute-force lower hull, and Newton iteration from simple roots mod p.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::valued::poly::{derivative_z, eval_z};
use crate::valued::{hensel_trace, newton_polygon_of, ord_int, qp_root_exists, rat, Valuation};

use super::sample_rational;

const PRIMES: [u64; 4] = [2, 3, 5, 7];

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyTally {
    pub property: String,
    pub passed: u64,
    pub total: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl PropertyTally {
    fn new(property: &str) -> Self {
        PropertyTally {
            property: property.into(),
            ..Default::default()
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.total += 1;
        if ok {
            self.passed += 1;
        } else if self.first_failure.is_none() {
            self.first_failure = Some(describe());
        }
    }

    pub fn all_passed(&self) -> bool {
        self.total > 0 && self.passed == self.total
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub seed: u64,
    pub planted: u64,
    pub eisenstein: u64,
    pub hulls: u64,
    pub hensel_seeds: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            seed: 1,
            planted: 500,
            eisenstein: 200,
            hulls: 1000,
            hensel_seeds: 100,
        }
    }
}

fn show(f: &[BigRational]) -> String {
    f.iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn mul(f: &[BigRational], g: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); f.len() + g.len() - 1];
    for (i, a) in f.iter().enumerate() {
        for (j, b) in g.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// `(x - r) g(x)` with `r` and the coefficients of `g` random rationals.
fn planted_roots(rng: &mut ChaCha8Rng, count: u64) -> Result<PropertyTally> {
    let mut t = PropertyTally::new("planted_root_found");
    for _ in 0..count {
        let p = PRIMES[rng.gen_range(0..PRIMES.len())];
        let r = sample_rational(rng, p, -3, 3);
        let deg = rng.gen_range(0..=4);
        let g: Vec<BigRational> = (0..=deg)
            .map(|k| {
                if k < deg && rng.gen_bool(0.2) {
                    BigRational::zero()
                } else {
                    sample_rational(rng, p, -3, 3)
                }
            })
            .collect();
        let f = mul(&[-r.clone(), rat(1)], &g);
        let found = qp_root_exists(&f, p)?.exists;
        t.record(found, || format!("p={p} root {r} of [{}]", show(&f)));
    }
    Ok(t)
}

fn unit(rng: &mut ChaCha8Rng, p: u64) -> i64 {
    loop {
        let v: i64 = rng.gen_range(1..=10_000);
        if v as u64 % p != 0 {
            return if rng.gen_bool(0.5) { v } else { -v };
        }
    }
}

/// Degree 2..=6, unit leading coefficient, every other coefficient divisible
/// by p and the constant term exactly once. Irreducible, hence rootless.
fn eisenstein(rng: &mut ChaCha8Rng, count: u64) -> Result<PropertyTally> {
    let mut t = PropertyTally::new("eisenstein_rootless");
    for _ in 0..count {
        let p = PRIMES[rng.gen_range(0..PRIMES.len())];
        let d = rng.gen_range(2..=6);
        let pi = p as i64;
        let mut f: Vec<BigRational> = (0..d).map(|_| rat(pi * rng.gen_range(-50..=50))).collect();
        f[0] = rat(pi * unit(rng, p));
        f.push(rat(unit(rng, p)));
        let found = qp_root_exists(&f, p)?.exists;
        t.record(!found, || format!("p={p} [{}]", show(&f)));
    }
    Ok(t)
}

type Point = (usize, Ratio<i64>);

/// Vertices of the lower convex hull by direct check: the two extreme points,
/// plus every point strictly below the chord of each pair straddling it.
pub fn brute_force_hull(points: &[Point]) -> Vec<Point> {
    let (Some(first), Some(last)) = (points.first(), points.last()) else {
        return Vec::new();
    };
    let mut out = vec![*first];
    for (k, &(i, v)) in points
        .iter()
        .enumerate()
        .skip(1)
        .take(points.len().saturating_sub(2))
    {
        let below_every_chord = points[..k].iter().all(|&(a, va)| {
            points[k + 1..].iter().all(|&(b, vb)| {
                let chord = va + (vb - va) * Ratio::new((i - a) as i64, (b - a) as i64);
                v < chord
            })
        });
        if below_every_chord {
            out.push((i, v));
        }
    }
    if points.len() > 1 {
        out.push(*last);
    }
    out
}

fn hulls(rng: &mut ChaCha8Rng, count: u64) -> Result<PropertyTally> {
    let mut t = PropertyTally::new("newton_hull_matches_brute_force");
    for _ in 0..count {
        let p = PRIMES[rng.gen_range(0..PRIMES.len())];
        let d = rng.gen_range(1..=6);
        let f: Vec<BigRational> = (0..=d)
            .map(|k| {
                if k != 0 && k != d && rng.gen_bool(0.25) {
                    BigRational::zero()
                } else {
                    sample_rational(rng, p, -4, 4)
                }
            })
            .collect();
        let points: Vec<Point> = f
            .iter()
            .enumerate()
            .filter_map(|(i, c)| ord_int(c, p).map(|o| (i, Ratio::from_integer(o))))
            .collect();
        let expected: Vec<(usize, Valuation)> = brute_force_hull(&points)
            .into_iter()
            .map(|(i, v)| (i, Valuation::Finite(v)))
            .collect();
        let got = newton_polygon_of(&f, p)?.vertices;
        t.record(got == expected, || {
            format!("p={p} [{}]: {got:?} vs {expected:?}", show(&f))
        });
    }
    Ok(t)
}

fn pow(p: u64, k: u32) -> BigInt {
    BigInt::from(p).pow(k)
}

/// A random integer polynomial and a simple root of it mod p; retries until
/// one exists.
fn certified_seed(rng: &mut ChaCha8Rng) -> (Vec<BigInt>, BigInt, u64) {
    const SEED_PRIMES: [u64; 6] = [3, 5, 7, 11, 13, 101];
    loop {
        let p = SEED_PRIMES[rng.gen_range(0..SEED_PRIMES.len())];
        let d = rng.gen_range(2..=5);
        let mut f: Vec<BigInt> = (0..d)
            .map(|_| BigInt::from(rng.gen_range(-50..=50)))
            .collect();
        f.push(BigInt::one());
        let df = derivative_z(&f);
        let pb = BigInt::from(p);
        let simple = (0..p).map(BigInt::from).find(|a| {
            eval_z(&f, a).mod_floor(&pb).is_zero() && !eval_z(&df, a).mod_floor(&pb).is_zero()
        });
        if let Some(a) = simple {
            return (f, a, p);
        }
    }
}

/// Each Newton step at least doubles `ord f(alpha)` until the target, and
/// the result is a root mod `p^k` congruent to the seed.
fn hensel_quadratic(rng: &mut ChaCha8Rng, count: u64) -> Result<PropertyTally> {
    let mut t = PropertyTally::new("hensel_quadratic_precision");
    for _ in 0..count {
        let (f, a0, p) = certified_seed(rng);
        let k = rng.gen_range(5..=60);
        let (a, trace) = hensel_trace(&f, &a0, p, k)?;
        // the iterate is kept modulo p^(k+1), which caps the last step
        let doubling = trace.windows(2).all(|w| w[1] >= (2 * w[0]).min(k as u64));
        let root = eval_z(&f, &a).mod_floor(&pow(p, k)).is_zero();
        let lifts = (&a - &a0).mod_floor(&BigInt::from(p)).is_zero();
        t.record(doubling && root && lifts, || {
            format!("p={p} k={k} seed {a0} f={f:?} trace {trace:?}")
        });
    }
    Ok(t)
}

fn sqrt_two_mod_49() -> Result<PropertyTally> {
    let mut t = PropertyTally::new("hensel_sqrt2_mod_49");
    let f = [-2, 0, 1].map(BigInt::from);
    let (a, _) = hensel_trace(&f, &BigInt::from(3), 7, 2)?;
    let residue = (&a * &a - BigInt::from(2)).mod_floor(&BigInt::from(49));
    t.record(a == BigInt::from(10) && residue.is_zero(), || {
        format!("lifted to {a}")
    });
    Ok(t)
}

/// Runs every property; one tally per property, in a fixed order.
pub fn oracle_properties(config: &OracleConfig) -> Result<Vec<PropertyTally>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    Ok(vec![
        planted_roots(&mut rng, config.planted)?,
        eisenstein(&mut rng, config.eisenstein)?,
        hulls(&mut rng, config.hulls)?,
        sqrt_two_mod_49()?,
        hensel_quadratic(&mut rng, config.hensel_seeds)?,
    ])
}
