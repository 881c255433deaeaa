//! Dense polynomials with integer or rational coefficients, lowest degree
//! first, and cyclotomic polynomials.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn trim<T: Zero>(a: &mut Vec<T>) {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
}

pub fn degree<T: Zero>(a: &[T]) -> Option<usize> {
    a.iter().rposition(|c| !c.is_zero())
}

pub fn from_i64(a: &[i64]) -> Vec<BigInt> {
    a.iter().map(|&c| BigInt::from(c)).collect()
}

pub fn mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

pub fn pow(a: &[BigInt], k: u32) -> Vec<BigInt> {
    let mut out = vec![BigInt::one()];
    for _ in 0..k {
        out = mul(&out, a);
    }
    out
}

pub fn sub(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let mut out: Vec<BigInt> = (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default())
        .collect();
    trim(&mut out);
    out
}

/// `a / b` when the division is exact over ℤ, else `None`.
pub fn div_exact(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let db = degree(b)?;
    let mut rem: Vec<BigInt> = a.to_vec();
    trim(&mut rem);
    if rem.is_empty() {
        return Some(Vec::new());
    }
    if rem.len() <= db {
        return None;
    }
    let lead = &b[db];
    let mut quot = vec![BigInt::zero(); rem.len() - db];
    for k in (0..quot.len()).rev() {
        let top = &rem[k + db];
        if top.is_zero() {
            continue;
        }
        let (q, r) = top.div_rem(lead);
        if !r.is_zero() {
            return None;
        }
        for (i, c) in b[..=db].iter().enumerate() {
            rem[k + i] -= &q * c;
        }
        quot[k] = q;
    }
    if rem.iter().all(Zero::is_zero) {
        trim(&mut quot);
        Some(quot)
    } else {
        None
    }
}

/// Largest `k` with `f^k | a`, and `a / f^k`. `f` must be nonconstant.
pub fn divide_out(a: &[BigInt], f: &[BigInt]) -> (u32, Vec<BigInt>) {
    assert!(degree(f).is_some_and(|d| d > 0));
    let mut k = 0;
    let mut cur = a.to_vec();
    trim(&mut cur);
    if cur.is_empty() {
        return (0, cur);
    }
    while let Some(q) = div_exact(&cur, f) {
        cur = q;
        k += 1;
    }
    (k, cur)
}

/// `a(sT)`.
pub fn scale(a: &[BigInt], s: &BigInt) -> Vec<BigInt> {
    let mut pw = BigInt::one();
    a.iter()
        .map(|c| {
            let v = c * &pw;
            pw *= s;
            v
        })
        .collect()
}

pub fn eval(a: &[BigInt], x: &BigInt) -> BigInt {
    a.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

pub fn euler_phi(mut m: u64) -> u64 {
    let mut out = m;
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            while m.is_multiple_of(d) {
                m /= d;
            }
            out -= out / d;
        }
        d += 1;
    }
    if m > 1 {
        out -= out / m;
    }
    out
}

/// All `m ≥ 1` with `φ(m) ≤ bound`, ascending.
pub fn orders_with_phi_at_most(bound: u64) -> Vec<u64> {
    // φ(m) ≥ sqrt(m/2), so m ≤ 2 bound².
    let limit = 2 * bound * bound + 2;
    (1..=limit).filter(|&m| euler_phi(m) <= bound).collect()
}

/// The cyclotomic polynomial `Φ_m(X)`.
pub fn cyclotomic(m: u64) -> Vec<BigInt> {
    assert!(m >= 1);
    let mut num = vec![BigInt::zero(); m as usize + 1];
    num[0] = BigInt::from(-1);
    num[m as usize] = BigInt::one();
    for d in 1..m {
        if m.is_multiple_of(d) {
            num = div_exact(&num, &cyclotomic(d)).expect("cyclotomic division is exact");
        }
    }
    num
}

/// `∏ (1 - s ζ T)` over the primitive `m`-th roots of unity `ζ`.
pub fn scaled_cyclotomic_factor(m: u64, s: &BigInt) -> Vec<BigInt> {
    let mut phi = cyclotomic(m);
    if m == 1 {
        phi = phi.into_iter().map(|c| -c).collect();
    }
    // Φ_m is palindromic for m ≥ 2, so it equals its own reversal.
    scale(&phi, s)
}

/// Rational polynomial helpers.
pub mod rational {
    use super::*;

    pub fn from_int(a: &[BigInt]) -> Vec<BigRational> {
        a.iter().map(|c| BigRational::from_integer(c.clone())).collect()
    }

    pub fn derivative(a: &[BigRational]) -> Vec<BigRational> {
        let mut out: Vec<BigRational> = a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
            .collect();
        trim(&mut out);
        out
    }

    /// Remainder of `a` modulo nonzero `b`.
    pub fn rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        div_rem(a, b).1
    }

    pub fn div_rem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
        let db = degree(b).expect("division by zero polynomial");
        let mut r = a.to_vec();
        trim(&mut r);
        if r.len() <= db {
            return (Vec::new(), r);
        }
        let mut q = vec![BigRational::zero(); r.len() - db];
        let lead = b[db].clone();
        for k in (0..q.len()).rev() {
            let c = &r[k + db] / &lead;
            if c.is_zero() {
                continue;
            }
            for (i, bc) in b[..=db].iter().enumerate() {
                r[k + i] = &r[k + i] - &c * bc;
            }
            q[k] = c;
        }
        trim(&mut r);
        trim(&mut q);
        (q, r)
    }

    pub fn monic(a: &[BigRational]) -> Vec<BigRational> {
        let mut a = a.to_vec();
        trim(&mut a);
        if let Some(lead) = a.last().cloned() {
            for c in a.iter_mut() {
                *c = &*c / &lead;
            }
        }
        a
    }

    /// Monic gcd.
    pub fn gcd(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b);
            a = b;
            b = r;
        }
        monic(&a)
    }

    /// Scales to a primitive integer polynomial with positive leading coefficient.
    pub fn to_primitive_int(a: &[BigRational]) -> Vec<BigInt> {
        let mut a = a.to_vec();
        trim(&mut a);
        let den = a.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let mut out: Vec<BigInt> = a
            .iter()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        let content = out.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if !content.is_zero() {
            let sign = if out.last().is_some_and(|c| c.is_negative()) {
                -1
            } else {
                1
            };
            let content = content * sign;
            for c in out.iter_mut() {
                *c = &*c / &content;
            }
        }
        out
    }

    /// The product of the distinct irreducible factors of `a`.
    pub fn squarefree_part(a: &[BigInt]) -> Vec<BigInt> {
        let ra = from_int(a);
        let g = gcd(&ra, &derivative(&ra));
        let (q, _) = div_rem(&ra, &g);
        to_primitive_int(&q)
    }
}
