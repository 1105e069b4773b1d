//! Exact p-adic machinery over the rationals.

mod hensel;
pub mod poly;
mod polygon;
mod roots;

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::zring::is_prime;

pub use hensel::{hensel_lift, hensel_trace};
pub use polygon::{
    lower_hull, newton_polygon, newton_polygon_of, root_orders, NewtonPolygon, Segment,
};
pub use roots::{
    is_cube_in_qp, qp_root_exists, witness_residue, zp_root_exists, RootReport, Witness,
};

/// Order of a field element: a rational number or `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(Ratio<i64>),
    Infinite,
}

impl Valuation {
    pub fn int(n: i64) -> Self {
        Valuation::Finite(Ratio::from_integer(n))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    pub fn finite(&self) -> Option<Ratio<i64>> {
        match self {
            Valuation::Finite(v) => Some(*v),
            Valuation::Infinite => None,
        }
    }

    /// Integer value, if finite and integral.
    pub fn as_int(&self) -> Option<i64> {
        self.finite()
            .filter(|v| v.is_integer())
            .map(|v| v.to_integer())
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
            (Valuation::Infinite, _) => Ordering::Greater,
            (_, Valuation::Infinite) => Ordering::Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Infinite => write!(f, "inf"),
            Valuation::Finite(v) if v.is_integer() => write!(f, "{}", v.numer()),
            Valuation::Finite(v) => write!(f, "{}/{}", v.numer(), v.denom()),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Valuation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "inf" {
            return Ok(Valuation::Infinite);
        }
        parse_ratio_i64(&s)
            .map(Valuation::Finite)
            .map_err(serde::de::Error::custom)
    }
}

fn parse_ratio_i64(s: &str) -> Result<Ratio<i64>> {
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Ratio::new(n, d))
        }
        None => Ok(Ratio::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuedFieldConfig {
    pub prime: u64,
    /// 1 for Q_p; 2 models the half-integer order lattice of Q_p^unr(sqrt p).
    pub ramification: u8,
}

impl ValuedFieldConfig {
    pub fn new(prime: u64, ramification: u8) -> Result<Self> {
        if !is_prime(prime) {
            return Err(Error::domain(format!("{prime} is not prime")));
        }
        if ramification != 1 && ramification != 2 {
            return Err(Error::domain("ramification must be 1 or 2"));
        }
        Ok(ValuedFieldConfig {
            prime,
            ramification,
        })
    }

    pub fn qp(prime: u64) -> Result<Self> {
        Self::new(prime, 1)
    }
}

/// Exponent of `p` in a nonzero integer.
pub fn vp_int(n: &BigInt, p: u64) -> u64 {
    debug_assert!(!n.is_zero());
    let pb = BigInt::from(p);
    let mut m = n.abs();
    let mut e = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return e;
        }
        m = q;
        e += 1;
    }
}

/// Integer order of a rational, `None` for zero.
pub fn ord_int(q: &BigRational, p: u64) -> Option<i64> {
    if q.is_zero() {
        return None;
    }
    Some(vp_int(q.numer(), p) as i64 - vp_int(q.denom(), p) as i64)
}

pub fn ord_p(q: &BigRational, p: u64) -> Valuation {
    match ord_int(q, p) {
        Some(v) => Valuation::int(v),
        None => Valuation::Infinite,
    }
}

/// `p^n` as an exact rational; negative exponents allowed.
pub fn p_pow(p: u64, n: i64) -> BigRational {
    let base = BigInt::from(p).pow(n.unsigned_abs() as u32);
    if n >= 0 {
        BigRational::from_integer(base)
    } else {
        BigRational::new(BigInt::one(), base)
    }
}

/// Unit part `q / p^ord(q)`.
pub fn unit_part(q: &BigRational, p: u64) -> BigRational {
    match ord_int(q, p) {
        Some(v) => q / p_pow(p, v),
        None => BigRational::zero(),
    }
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
