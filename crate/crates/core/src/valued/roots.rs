use std::collections::VecDeque;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::hensel::hensel_lift;
use super::poly::{
    degree, derivative, derivative_z, eval_z, primitive_integer, resultant, reverse, shift_scale,
    squarefree_part, to_q, trimmed, ZPoly,
};
use super::{ord_int, p_pow, unit_part, vp_int};
use crate::error::{Error, Result};

const NODE_CAP: usize = 1_000_000;

/// A root approximation: the root is congruent to `residue` modulo
/// `p^precision`, or to its reciprocal when `inverted` is set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub residue: String,
    pub precision: u32,
    pub inverted: bool,
    /// Order of the root itself; `None` for the root 0.
    pub order: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootReport {
    pub exists: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl RootReport {
    fn found(w: Witness) -> Self {
        RootReport {
            exists: true,
            witness: Some(w),
            reason: None,
        }
    }

    fn none(reason: String) -> Self {
        RootReport {
            exists: false,
            witness: None,
            reason: Some(reason),
        }
    }
}

struct Node {
    alpha: BigInt,
    level: u32,
    h: ZPoly,
}

fn content_vp(h: &[BigInt], p: u64) -> u64 {
    h.iter()
        .filter(|c| !c.is_zero())
        .map(|c| vp_int(c, p))
        .min()
        .unwrap_or(0)
}

fn zero_root() -> RootReport {
    RootReport::found(Witness {
        residue: "0".into(),
        precision: 0,
        inverted: false,
        order: None,
    })
}

/// Decides whether `f` has a root in Z_p by refining residues level by level
/// on the squarefree primitive part.
pub fn zp_root_exists(f: &[BigRational], p: u64) -> Result<RootReport> {
    let f = trimmed(f);
    let Some(d) = degree(&f) else {
        return Err(Error::domain("zero polynomial"));
    };
    if d == 0 {
        return Ok(RootReport::none("nonzero constant".into()));
    }
    if f[0].is_zero() {
        return Ok(zero_root());
    }
    let g = primitive_integer(&squarefree_part(&f));
    let gq = to_q(&g);
    let res = resultant(&gq, &derivative(&gq));
    debug_assert!(!res.is_zero());
    let bound = ord_int(&res, p).unwrap_or(0).max(0) as u32 + 1;
    let hard_cap = 4 * bound + 64;
    // Any Z_p root has order at most ord g(0), so this precision pins it.
    let precision = bound + 2 + vp_int(&g[0], p) as u32;

    let pb = BigInt::from(p);
    let mut queue = VecDeque::from([Node {
        alpha: BigInt::zero(),
        level: 0,
        h: g,
    }]);
    let mut visited = 0usize;
    let mut deepest = 0u32;
    while let Some(node) = queue.pop_front() {
        visited += 1;
        if visited > NODE_CAP {
            return Err(Error::ResourceLimit(format!(
                "more than {NODE_CAP} residue nodes"
            )));
        }
        if node.level > hard_cap {
            return Err(Error::ResourceLimit(format!(
                "residue refinement passed depth {hard_cap}"
            )));
        }
        deepest = deepest.max(node.level);
        let dh = derivative_z(&node.h);
        for r in 0..p {
            let rb = BigInt::from(r);
            if !eval_z(&node.h, &rb).mod_floor(&pb).is_zero() {
                continue;
            }
            let scale = pb.pow(node.level);
            if !eval_z(&dh, &rb).mod_floor(&pb).is_zero() {
                let y = hensel_lift(&node.h, &rb, p, precision)?;
                let total = node.level + precision;
                let x = (&node.alpha + &scale * y).mod_floor(&pb.pow(total));
                let order = vp_int(&x, p) as i64;
                return Ok(RootReport::found(Witness {
                    residue: x.to_string(),
                    precision: total,
                    inverted: false,
                    order: Some(order),
                }));
            }
            let shifted = shift_scale(&node.h, &rb, &pb);
            let c = content_vp(&shifted, p);
            let div = pb.pow(c as u32);
            queue.push_back(Node {
                alpha: &node.alpha + &scale * &rb,
                level: node.level + 1,
                h: shifted.into_iter().map(|t| t / &div).collect(),
            });
        }
    }
    Ok(RootReport::none(format!(
        "no residue class survives below level {}",
        deepest + 1
    )))
}

/// Roots of positive order are found on `f`, roots of negative order as
/// roots of the reversed polynomial.
pub fn qp_root_exists(f: &[BigRational], p: u64) -> Result<RootReport> {
    let f = trimmed(f);
    let Some(d) = degree(&f) else {
        return Err(Error::domain("zero polynomial"));
    };
    if d == 0 {
        return Ok(RootReport::none("nonzero constant".into()));
    }
    if f[0].is_zero() {
        return Ok(zero_root());
    }
    let direct = zp_root_exists(&f, p)?;
    if direct.exists {
        return Ok(direct);
    }
    let rev = zp_root_exists(&reverse(&f), p)?;
    if let Some(mut w) = rev.witness {
        w.inverted = true;
        w.order = w.order.map(|o| -o);
        return Ok(RootReport::found(w));
    }
    Ok(RootReport::none(format!(
        "integral: {}; reciprocal: {}",
        direct.reason.unwrap_or_default(),
        rev.reason.unwrap_or_default()
    )))
}

pub fn is_cube_in_qp(q: &BigRational, p: u64) -> Result<bool> {
    let Some(v) = ord_int(q, p) else {
        return Err(Error::domain("zero has no cube test"));
    };
    if v.rem_euclid(3) != 0 {
        return Ok(false);
    }
    let u = unit_part(q, p);
    let cubic = vec![-u, BigRational::zero(), BigRational::zero(), p_pow(p, 0)];
    Ok(zp_root_exists(&cubic, p)?.exists)
}

/// Integer value of a witness residue.
pub fn witness_residue(w: &Witness) -> BigInt {
    w.residue
        .parse()
        .expect("witness residue is a decimal integer")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valued::poly::eval_q;
    use crate::valued::{rat, ratio};

    fn q(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&c| rat(c)).collect()
    }

    #[test]
    fn zp_examples() {
        let r = zp_root_exists(&q(&[-2, 0, 1]), 7).unwrap();
        assert!(r.exists);
        let w = r.witness.unwrap();
        let x = witness_residue(&w);
        assert!(
            x.mod_floor(&BigInt::from(7)) == BigInt::from(3)
                || x.mod_floor(&BigInt::from(7)) == BigInt::from(4)
        );
        assert!(!zp_root_exists(&q(&[-2, 0, 1]), 5).unwrap().exists);
        assert!(!zp_root_exists(&q(&[-5, 0, 1]), 5).unwrap().exists);
    }

    #[test]
    fn witness_residue_is_close_to_a_root() {
        let f = q(&[-2, 0, 1]);
        let w = zp_root_exists(&f, 7).unwrap().witness.unwrap();
        let x = BigRational::from_integer(witness_residue(&w));
        let val = eval_q(&f, &x);
        assert!(ord_int(&val, 7).unwrap() >= w.precision as i64);
    }

    #[test]
    fn qp_examples() {
        assert!(!qp_root_exists(&q(&[125, 25, 0, 1]), 5).unwrap().exists);
        assert!(!qp_root_exists(&q(&[5, 0, 3]), 5).unwrap().exists);
        let r = qp_root_exists(&[ratio(-1, 4), rat(0), rat(1)], 2).unwrap();
        assert!(r.exists);
        assert_eq!(r.witness.unwrap().order, Some(-1));
        assert!(qp_root_exists(&q(&[-2, 0, 1]), 7).unwrap().exists);
    }

    #[test]
    fn repeated_and_zero_roots() {
        // (x - 3)^2 (x^2 + 1) over Q_3: root 3
        let f = q(&[9, -6, 10, -6, 1]);
        assert!(qp_root_exists(&f, 3).unwrap().exists);
        assert!(qp_root_exists(&q(&[0, 1, 1]), 3).unwrap().exists);
        // x^2 - 17 over Q_2 needs refinement past the first level.
        assert!(qp_root_exists(&q(&[-17, 0, 1]), 2).unwrap().exists);
        assert!(!qp_root_exists(&q(&[-5, 0, 1]), 2).unwrap().exists);
    }

    #[test]
    fn cube_tests() {
        assert!(is_cube_in_qp(&rat(8), 5).unwrap());
        assert!(is_cube_in_qp(&rat(2), 5).unwrap());
        assert!(!is_cube_in_qp(&rat(2), 7).unwrap());
        assert!(!is_cube_in_qp(&rat(5), 5).unwrap());
        assert!(is_cube_in_qp(&ratio(1, 125), 5).unwrap());
        // Cubes among 3-adic units are exactly the classes of +-1 mod 9.
        assert!(is_cube_in_qp(&rat(10), 3).unwrap());
        assert!(is_cube_in_qp(&rat(8), 3).unwrap());
        assert!(!is_cube_in_qp(&rat(2), 3).unwrap());
        assert!(!is_cube_in_qp(&rat(4), 3).unwrap());
    }
}
