//! Dense univariate polynomials over Q and Z, coefficients in ascending order.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type QPoly = Vec<BigRational>;
pub type ZPoly = Vec<BigInt>;

pub fn trim<T: Zero>(f: &mut Vec<T>) {
    while f.last().is_some_and(|c| c.is_zero()) {
        f.pop();
    }
}

pub fn trimmed(f: &[BigRational]) -> QPoly {
    let mut g = f.to_vec();
    trim(&mut g);
    g
}

/// Degree of the trimmed polynomial; `None` for zero.
pub fn degree<T: Zero>(f: &[T]) -> Option<usize> {
    f.iter().rposition(|c| !c.is_zero())
}

pub fn derivative(f: &[BigRational]) -> QPoly {
    f.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
        .collect()
}

pub fn derivative_z(f: &[BigInt]) -> ZPoly {
    f.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect()
}

pub fn eval_q(f: &[BigRational], x: &BigRational) -> BigRational {
    f.iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * x + c)
}

pub fn eval_z(f: &[BigInt], x: &BigInt) -> BigInt {
    f.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

pub fn reverse(f: &[BigRational]) -> QPoly {
    let mut g = trimmed(f);
    g.reverse();
    g
}

pub fn mul(f: &[BigRational], g: &[BigRational]) -> QPoly {
    if f.is_empty() || g.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); f.len() + g.len() - 1];
    for (i, a) in f.iter().enumerate() {
        for (j, b) in g.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    trim(&mut out);
    out
}

/// Euclidean division over Q; panics on a zero divisor.
pub fn divrem(f: &[BigRational], g: &[BigRational]) -> (QPoly, QPoly) {
    let g = trimmed(g);
    let dg = degree(&g).expect("division by zero polynomial");
    let mut r = trimmed(f);
    let lead = g[dg].clone();
    let mut q = vec![BigRational::zero(); r.len().saturating_sub(dg).max(1)];
    while let Some(dr) = degree(&r) {
        if dr < dg {
            break;
        }
        let c = &r[dr] / &lead;
        for (j, gj) in g.iter().enumerate() {
            r[dr - dg + j] -= &c * gj;
        }
        q[dr - dg] = c;
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

/// Monic gcd over Q.
pub fn gcd(f: &[BigRational], g: &[BigRational]) -> QPoly {
    let mut a = trimmed(f);
    let mut b = trimmed(g);
    while !b.is_empty() {
        let (_, r) = divrem(&a, &b);
        a = b;
        b = r;
    }
    if let Some(d) = degree(&a) {
        let lead = a[d].clone();
        for c in a.iter_mut() {
            *c = &*c / &lead;
        }
    }
    a
}

/// Product of the distinct irreducible factors (up to a scalar).
pub fn squarefree_part(f: &[BigRational]) -> QPoly {
    let f = trimmed(f);
    if degree(&f).unwrap_or(0) == 0 {
        return f;
    }
    let g = gcd(&f, &derivative(&f));
    divrem(&f, &g).0
}

/// Clears denominators and removes the integer content; the sign of the
/// leading coefficient is kept.
pub fn primitive_integer(f: &[BigRational]) -> ZPoly {
    let f = trimmed(f);
    if f.is_empty() {
        return Vec::new();
    }
    let l = f.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: ZPoly = f.iter().map(|c| (c * &l).to_integer()).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    ints.into_iter().map(|c| c / &content).collect()
}

pub fn to_q(f: &[BigInt]) -> QPoly {
    f.iter().cloned().map(BigRational::from_integer).collect()
}

/// Coefficients of `f(a + c*y)` for integer `a`, `c`.
pub fn shift_scale(f: &[BigInt], a: &BigInt, c: &BigInt) -> ZPoly {
    // Taylor shift by repeated synthetic division.
    let mut g = f.to_vec();
    let n = g.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = &g[j + 1] * a;
            g[j] += t;
        }
    }
    let mut scale = BigInt::one();
    for coeff in g.iter_mut() {
        *coeff *= &scale;
        scale *= c;
    }
    g
}

/// Determinant by fraction-free Gaussian elimination over Q.
fn determinant(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let pv = m[col][col].clone();
        det *= &pv;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &pv;
            for c in col..n {
                let t = &factor * &m[col][c];
                m[r][c] -= t;
            }
        }
    }
    det
}

/// Resultant via the Sylvester determinant.
pub fn resultant(f: &[BigRational], g: &[BigRational]) -> BigRational {
    let f = trimmed(f);
    let g = trimmed(g);
    let (Some(m), Some(n)) = (degree(&f), degree(&g)) else {
        return BigRational::zero();
    };
    if m == 0 && n == 0 {
        return BigRational::one();
    }
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![BigRational::zero(); size];
        for (j, c) in f.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![BigRational::zero(); size];
        for (j, c) in g.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    determinant(rows)
}

/// `(-1)^{n(n-1)/2} Res(f, f') / a_n`.
pub fn discriminant(f: &[BigRational]) -> BigRational {
    let f = trimmed(f);
    let n = degree(&f).unwrap_or(0);
    if n == 0 {
        return BigRational::zero();
    }
    let r = resultant(&f, &derivative(&f)) / &f[n];
    if (n * (n - 1) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}

pub fn is_negative(q: &BigRational) -> bool {
    q.is_negative()
}
