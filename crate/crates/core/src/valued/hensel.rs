use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::poly::{derivative_z, eval_z};
use super::vp_int;
use crate::error::{Error, Result};

fn pow(p: u64, k: u64) -> BigInt {
    BigInt::from(p).pow(k as u32)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

/// Runs Newton iteration from `alpha0` and records `ord_p f(alpha)` after
/// every step, the seed included. The final approximation is returned
/// reduced modulo `p^k`.
pub fn hensel_trace(f: &[BigInt], alpha0: &BigInt, p: u64, k: u32) -> Result<(BigInt, Vec<u64>)> {
    let df = derivative_z(f);
    let f0 = eval_z(f, alpha0);
    let d0 = eval_z(&df, alpha0);
    if d0.is_zero() {
        return Err(Error::HenselNotApplicable("f'(alpha0) = 0".into()));
    }
    let delta = vp_int(&d0, p);
    if !f0.is_zero() && vp_int(&f0, p) <= 2 * delta {
        return Err(Error::HenselNotApplicable(format!(
            "ord f(alpha0) = {} is not above 2 ord f'(alpha0) = {}",
            vp_int(&f0, p),
            2 * delta
        )));
    }
    let target = k as u64 + delta;
    let modulus = pow(p, k as u64 + 2 * delta + 1);
    let scale = pow(p, delta);
    let mut alpha = alpha0.clone();
    let mut trace = Vec::new();
    loop {
        let fa = eval_z(f, &alpha);
        let ord = if fa.is_zero() {
            u64::MAX
        } else {
            vp_int(&fa, p)
        };
        trace.push(ord);
        if ord >= target {
            break;
        }
        let u = eval_z(&df, &alpha) / &scale;
        let t = fa / &scale;
        alpha = (&alpha - t * mod_inverse(&u, &modulus)).mod_floor(&modulus);
    }
    Ok((alpha.mod_floor(&pow(p, k as u64)), trace))
}

pub fn hensel_lift(f: &[BigInt], alpha0: &BigInt, p: u64, k: u32) -> Result<BigInt> {
    hensel_trace(f, alpha0, p, k).map(|(a, _)| a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn sqrt_two_mod_49() {
        let f = z(&[-2, 0, 1]);
        let a = hensel_lift(&f, &BigInt::from(3), 7, 2).unwrap();
        assert_eq!(a, BigInt::from(10));
        assert_eq!((&a * &a - 2) % 49, BigInt::zero());
    }

    #[test]
    fn linear_is_fixed() {
        let f = z(&[-12, 1]);
        assert_eq!(
            hensel_lift(&f, &BigInt::from(12), 5, 3).unwrap(),
            BigInt::from(12)
        );
    }

    #[test]
    fn unit_value_rejected() {
        let f = z(&[-2, 0, 1]);
        assert!(matches!(
            hensel_lift(&f, &BigInt::from(1), 5, 3),
            Err(Error::HenselNotApplicable(_))
        ));
    }

    #[test]
    fn singular_seed_with_enough_precision() {
        // x^2 - 17 over Z_2: f(1) = -16, f'(1) = 2, 4 > 2
        let f = z(&[-17, 0, 1]);
        let a = hensel_lift(&f, &BigInt::from(1), 2, 20).unwrap();
        let m = BigInt::from(1u64 << 20);
        assert_eq!((&a * &a - BigInt::from(17)).mod_floor(&m), BigInt::zero());
        assert_eq!(a.mod_floor(&BigInt::from(4)), BigInt::from(1));
    }
}
