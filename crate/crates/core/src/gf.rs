//! Finite fields `F_q`, `q = p^n`, backed by discrete-log and Zech tables.
//!
//! Elements are integers in `[0, q)`: the base-`p` digits of an element are
//! the coefficients of its residue modulo [`FieldTable::modulus`], lowest
//! degree first. `0` is the zero element and `1` the identity.
//!
//! The counting engine works in the logarithmic domain ([`LogElem`]), where
//! multiplication is an addition of exponents and addition goes through the
//! Zech table `log(1 + g^k)`.

use crate::error::{Error, Result};

/// Largest field size accepted by [`FieldTable::new`].
pub const DEFAULT_CEILING: u64 = 1 << 22;

/// Discrete logarithm of a field element with respect to the table generator,
/// or [`FieldTable::zero_log`] for the zero element.
pub type LogElem = u32;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

#[derive(Clone)]
pub struct FieldTable {
    p: u32,
    n: u32,
    q: u32,
    modulus: Vec<u32>,
    generator: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
}

impl std::fmt::Debug for FieldTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldTable")
            .field("p", &self.p)
            .field("n", &self.n)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .field("generator", &self.generator)
            .finish()
    }
}

impl FieldTable {
    /// Builds `F_{p^n}` with the default size ceiling.
    pub fn new(p: u64, n: u32) -> Result<Self> {
        Self::with_ceiling(p, n, DEFAULT_CEILING)
    }

    /// Builds `F_{p^n}`. The modulus is the monic irreducible of degree `n`
    /// whose lower coefficients, read as base-`p` digits, form the smallest
    /// integer; the generator is the smallest primitive element.
    pub fn with_ceiling(p: u64, n: u32, ceiling: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::ZeroDegree);
        }
        let too_large = || Error::FieldTooLarge { p, n, ceiling };
        let q = p.checked_pow(n).ok_or_else(too_large)?;
        if q > ceiling || q > u32::MAX as u64 / 2 {
            return Err(too_large());
        }
        let modulus = smallest_irreducible(p, n).ok_or(Error::NoIrreducible { p, n })?;
        let p32 = p as u32;
        let q32 = q as u32;
        let mut field = FieldTable {
            p: p32,
            n,
            q: q32,
            modulus,
            generator: 0,
            exp: Vec::new(),
            log: Vec::new(),
            zech: Vec::new(),
        };
        field.generator = field.find_generator();
        field.build_tables();
        Ok(field)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn size(&self) -> u32 {
        self.q
    }

    /// Monic modulus, lowest coefficient first (length `n + 1`).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn generator(&self) -> u32 {
        self.generator
    }

    /// Digits of `x` in base `p`, lowest first, padded to length `n`.
    pub fn digits(&self, mut x: u32) -> Vec<u32> {
        let mut d = Vec::with_capacity(self.n as usize);
        for _ in 0..self.n {
            d.push(x % self.p);
            x /= self.p;
        }
        d
    }

    pub fn from_digits(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0, |acc, &d| acc * self.p + d % self.p)
    }

    // Digit-wise arithmetic used while building the tables.
    fn add_digits(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.n {
            let s = (a % self.p + b % self.p) % self.p;
            out += s * place;
            place *= self.p;
            a /= self.p;
            b /= self.p;
        }
        out
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        let n = self.n as usize;
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u64; 2 * n];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        for k in (n..2 * n).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            for (i, &m) in self.modulus[..n].iter().enumerate() {
                let idx = k - n + i;
                prod[idx] = (prod[idx] + (p - c) * m as u64) % p;
            }
            prod[k] = 0;
        }
        prod[..n].iter().rev().fold(0u32, |acc, &d| acc * self.p + d as u32)
    }

    fn pow_slow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    fn find_generator(&self) -> u32 {
        let order = (self.q - 1) as u64;
        if order == 1 {
            return 1;
        }
        let primes = prime_factors(order);
        (1..self.q)
            .find(|&g| primes.iter().all(|&r| self.pow_slow(g, order / r) != 1))
            .expect("multiplicative group of a finite field is cyclic")
    }

    fn build_tables(&mut self) {
        let qm1 = self.q - 1;
        let mut exp = vec![0u32; qm1 as usize];
        let mut log = vec![qm1; self.q as usize];
        let mut x = 1u32;
        // Multiplication by g as a linear map on digit vectors.
        let columns: Vec<u32> = (0..self.n)
            .map(|i| self.mul_slow(self.generator, self.p.pow(i)))
            .collect();
        for k in 0..qm1 {
            exp[k as usize] = x;
            log[x as usize] = k;
            let mut next = 0;
            let mut y = x;
            for col in &columns {
                let d = y % self.p;
                y /= self.p;
                for _ in 0..d {
                    next = self.add_digits(next, *col);
                }
            }
            x = next;
        }
        debug_assert_eq!(x, 1);
        let mut zech = vec![qm1; qm1 as usize];
        for k in 0..qm1 {
            let v = exp[k as usize];
            let plus_one = v - v % self.p + (v % self.p + 1) % self.p;
            zech[k as usize] = log[plus_one as usize];
        }
        self.exp = exp;
        self.log = log;
        self.zech = zech;
    }

    // Integer-representation arithmetic.

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            a ^ b
        } else if self.n == 1 {
            let s = a + b;
            if s >= self.p {
                s - self.p
            } else {
                s
            }
        } else {
            self.from_log(self.add_log(self.to_log(a), self.to_log(b)))
        }
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 || a == 0 {
            a
        } else if self.n == 1 {
            self.p - a
        } else {
            self.from_log(self.neg_log(self.to_log(a)))
        }
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.from_log(self.mul_log(self.to_log(a), self.to_log(b)))
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            None
        } else {
            Some(self.from_log(self.inv_log(self.to_log(a))))
        }
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        self.from_log(self.pow_log(self.to_log(a), e))
    }

    /// `x ↦ x^p`.
    pub fn frobenius(&self, x: u32) -> u32 {
        self.pow(x, self.p as u64)
    }

    /// Embeds an element of the prime field.
    pub fn from_prime_field(&self, c: u64) -> u32 {
        (c % self.p as u64) as u32
    }

    // Logarithmic domain.

    #[inline]
    pub fn zero_log(&self) -> LogElem {
        self.q - 1
    }

    #[inline]
    pub fn to_log(&self, a: u32) -> LogElem {
        self.log[a as usize]
    }

    #[inline]
    pub fn from_log(&self, l: LogElem) -> u32 {
        if l == self.q - 1 {
            0
        } else {
            self.exp[l as usize]
        }
    }

    #[inline]
    pub fn mul_log(&self, a: LogElem, b: LogElem) -> LogElem {
        let z = self.q - 1;
        if a == z || b == z {
            return z;
        }
        let s = a + b;
        if s >= z {
            s - z
        } else {
            s
        }
    }

    #[inline]
    pub fn add_log(&self, a: LogElem, b: LogElem) -> LogElem {
        let z = self.q - 1;
        if a == z {
            return b;
        }
        if b == z {
            return a;
        }
        let d = if b >= a { b - a } else { b + z - a };
        let t = self.zech[d as usize];
        if t == z {
            return z;
        }
        let s = a + t;
        if s >= z {
            s - z
        } else {
            s
        }
    }

    #[inline]
    pub fn neg_log(&self, a: LogElem) -> LogElem {
        let z = self.q - 1;
        if a == z || self.p == 2 {
            return a;
        }
        let s = a + z / 2;
        if s >= z {
            s - z
        } else {
            s
        }
    }

    #[inline]
    pub fn sub_log(&self, a: LogElem, b: LogElem) -> LogElem {
        self.add_log(a, self.neg_log(b))
    }

    /// Inverse of a nonzero element in the log domain.
    #[inline]
    pub fn inv_log(&self, a: LogElem) -> LogElem {
        let z = self.q - 1;
        debug_assert!(a != z, "inverse of zero");
        if a == 0 {
            0
        } else {
            z - a
        }
    }

    #[inline]
    pub fn pow_log(&self, a: LogElem, e: u64) -> LogElem {
        let z = self.q - 1;
        if a == z {
            return if e == 0 { 0 } else { z };
        }
        ((a as u64 * (e % z as u64)) % z as u64) as LogElem
    }

    /// Log of the integer `c` reduced into the prime field.
    #[inline]
    pub fn log_of_int(&self, c: i64) -> LogElem {
        let p = self.p as i64;
        self.to_log(c.rem_euclid(p) as u32)
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense polynomials over F_p, lowest coefficient first.

fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    poly_rem(prod, m, p)
}

fn poly_rem(mut a: Vec<u64>, m: &[u64], p: u64) -> Vec<u64> {
    trim(&mut a);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while a.len() > dm {
        let k = a.len() - 1;
        let c = a[k] * lead_inv % p;
        for (i, &mi) in m.iter().enumerate() {
            let idx = k - dm + i;
            a[idx] = (a[idx] + (p - c) * mi) % p;
        }
        trim(&mut a);
    }
    a
}

fn poly_gcd(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let mut acc = 1;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// Ben-Or test: a monic `f` of degree `n` is irreducible iff
/// `gcd(f, X^{p^k} - X) = 1` for every `k ≤ n/2`.
pub fn is_irreducible(f: &[u64], p: u64) -> bool {
    let n = f.len() - 1;
    if n == 1 {
        return true;
    }
    let x = vec![0, 1];
    let mut xp = x.clone();
    for _ in 0..n / 2 {
        // xp <- xp^p mod f
        let mut acc = vec![1u64];
        let mut base = xp.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mulmod(&acc, &base, f, p);
            }
            base = poly_mulmod(&base, &base, f, p);
            e >>= 1;
        }
        xp = acc;
        let mut diff = xp.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        let g = poly_gcd(f.to_vec(), diff, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

fn smallest_irreducible(p: u64, n: u32) -> Option<Vec<u32>> {
    let n = n as usize;
    let count = p.pow(n as u32);
    (0..count).find_map(|k| {
        let mut f = Vec::with_capacity(n + 1);
        let mut r = k;
        for _ in 0..n {
            f.push(r % p);
            r /= p;
        }
        f.push(1);
        // A polynomial with zero constant term is divisible by X.
        if n > 1 && f[0] == 0 {
            return None;
        }
        is_irreducible(&f, p).then(|| f.iter().map(|&c| c as u32).collect())
    })
}
