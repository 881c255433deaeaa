//! Integer factorization sufficient for squarefree parts: trial division,
//! Miller–Rabin and Pollard–Brent.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

const TRIAL_LIMIT: u64 = 10_000;
const RHO_BUDGET: u64 = 1 << 24;

const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Miller–Rabin with the first twelve prime bases; deterministic below 3.3·10²⁴.
pub fn is_probable_prime(n: &BigInt) -> bool {
    let two = BigInt::from(2);
    if *n < two {
        return false;
    }
    for &w in &WITNESSES {
        let w = BigInt::from(w);
        if *n == w {
            return true;
        }
        if (n % &w).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'witness: for &w in &WITNESSES {
        let mut x = BigInt::from(w).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: &BigInt, c: u64) -> Option<BigInt> {
    let c = BigInt::from(c);
    let f = |x: &BigInt| (x * x + &c) % n;
    let mut y = BigInt::from(2);
    let mut r: u64 = 1;
    let mut q = BigInt::one();
    let m: u64 = 128;
    let mut steps = 0u64;
    loop {
        let x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r {
            let ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                q = (q * (&x - &y).abs()) % n;
            }
            let g = q.gcd(n);
            if !g.is_one() {
                if &g != n {
                    return Some(g);
                }
                // Backtrack one step at a time.
                let mut ys = ys;
                loop {
                    ys = f(&ys);
                    let g = (&x - &ys).abs().gcd(n);
                    if !g.is_one() {
                        return if &g == n { None } else { Some(g) };
                    }
                }
            }
            k += m;
            steps += m;
            if steps > RHO_BUDGET {
                return None;
            }
        }
        r *= 2;
    }
}

fn split(n: &BigInt, out: &mut Vec<BigInt>) -> Result<()> {
    if n.is_one() {
        return Ok(());
    }
    if is_probable_prime(n) {
        out.push(n.clone());
        return Ok(());
    }
    let s = n.sqrt();
    if &(&s * &s) == n {
        split(&s, out)?;
        return split(&s, out);
    }
    for c in 1..20 {
        if let Some(d) = pollard_brent(n, c) {
            split(&d, out)?;
            return split(&(n / &d), out);
        }
    }
    Err(Error::Internal(format!("could not factor {n}")))
}

/// Prime factorization of `|n|` as `(prime, exponent)` pairs, ascending.
pub fn factor(n: &BigInt) -> Result<Vec<(BigInt, u32)>> {
    if n.is_zero() {
        return Err(Error::Invalid("cannot factor zero".into()));
    }
    let mut n = n.abs();
    let mut primes: Vec<BigInt> = Vec::new();
    let mut d = 2u64;
    while d <= TRIAL_LIMIT {
        let bd = BigInt::from(d);
        if &bd * &bd > n {
            break;
        }
        while (&n % &bd).is_zero() {
            n /= &bd;
            primes.push(bd.clone());
        }
        d += if d == 2 { 1 } else { 2 };
    }
    split(&n, &mut primes)?;
    primes.sort();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    Ok(out)
}

/// The squarefree integer `s` with `n = s · k²`, keeping the sign of `n`.
pub fn squarefree_part(n: &BigInt) -> Result<BigInt> {
    let mut s = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    for (p, e) in factor(n)? {
        if e % 2 == 1 {
            s *= p;
        }
    }
    Ok(s)
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let s = n.sqrt();
    &s * &s == *n
}

/// `v_p(n)` for nonzero `n`.
pub fn valuation(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn primality() {
        let primes = [2u64, 3, 5, 97, 7919, 1_000_000_007, 18_446_744_073_709_551_557];
        for p in primes {
            assert!(is_probable_prime(&BigInt::from(p)), "{p}");
        }
        for c in [1u64, 4, 561, 1_000_000_007 * 3, 3_215_031_751] {
            assert!(!is_probable_prime(&BigInt::from(c)), "{c}");
        }
    }

    #[test]
    fn factor_semiprime() {
        let a = BigInt::from(1_000_000_007u64);
        let b = BigInt::from(998_244_353u64);
        let f = factor(&(&a * &b * &a)).unwrap();
        assert_eq!(f, vec![(b.clone(), 1), (a.clone(), 2)]);
        assert_eq!(squarefree_part(&(-&a * &a * &b * 12)).unwrap(), -b * 3);
    }

    #[test]
    fn squarefree_small() {
        for n in 1i64..2000 {
            let s = squarefree_part(&BigInt::from(n)).unwrap();
            let s = s.to_i64().unwrap();
            assert_eq!(n % s, 0);
            let k2 = n / s;
            let k = (k2 as f64).sqrt().round() as i64;
            assert_eq!(k * k, k2);
            assert!((2..=s.abs()).all(|d| d * d > s.abs() || s % (d * d) != 0));
        }
    }
}
