//! Univariate polynomials of degree at most 4 over `F_q`, log domain.
//!
//! This is the inner loop of point counting: after fixing all coordinates
//! but the last, a quartic form becomes one of these, and the number of its
//! roots in `F_q` is `deg gcd(f, X^q - X)`.

use crate::gf::{FieldTable, LogElem};

pub const MAX_DEGREE: usize = 4;

/// Fields up to this size count roots by direct evaluation.
pub const EVAL_FIELD_LIMIT: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UPoly {
    c: [LogElem; MAX_DEGREE + 1],
    len: usize,
}

impl UPoly {
    pub fn zero(field: &FieldTable) -> Self {
        UPoly {
            c: [field.zero_log(); MAX_DEGREE + 1],
            len: 0,
        }
    }

    /// Coefficients lowest degree first.
    pub fn from_logs(field: &FieldTable, c: [LogElem; MAX_DEGREE + 1]) -> Self {
        let z = field.zero_log();
        let mut len = MAX_DEGREE + 1;
        while len > 0 && c[len - 1] == z {
            len -= 1;
        }
        UPoly { c, len }
    }

    pub fn from_ints(field: &FieldTable, c: &[u32]) -> Self {
        let mut logs = [field.zero_log(); MAX_DEGREE + 1];
        for (l, &x) in logs.iter_mut().zip(c) {
            *l = field.to_log(x);
        }
        Self::from_logs(field, logs)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.len.checked_sub(1)
    }

    pub fn coeffs(&self) -> &[LogElem] {
        &self.c[..self.len]
    }

    pub fn eval(&self, field: &FieldTable, x: LogElem) -> LogElem {
        let mut acc = field.zero_log();
        for &c in self.c[..self.len].iter().rev() {
            acc = field.add_log(field.mul_log(acc, x), c);
        }
        acc
    }
}

// Scratch polynomials: coefficient array plus length.
type Buf = [LogElem; 2 * MAX_DEGREE + 1];

fn normalize(field: &FieldTable, a: &Buf, mut len: usize) -> usize {
    while len > 0 && a[len - 1] == field.zero_log() {
        len -= 1;
    }
    len
}

/// Remainder of `a` (length `la`) modulo `b` (length `lb ≥ 1`), in place.
fn rem_in_place(field: &FieldTable, a: &mut Buf, mut la: usize, b: &Buf, lb: usize) -> usize {
    let z = field.zero_log();
    let lead_inv = field.inv_log(b[lb - 1]);
    while la >= lb {
        let top = a[la - 1];
        if top != z {
            let factor = field.neg_log(field.mul_log(top, lead_inv));
            let shift = la - lb;
            for i in 0..lb - 1 {
                a[shift + i] = field.add_log(a[shift + i], field.mul_log(factor, b[i]));
            }
        }
        a[la - 1] = z;
        la = normalize(field, a, la - 1);
    }
    la
}

fn to_buf(field: &FieldTable, p: &UPoly) -> (Buf, usize) {
    let mut b = [field.zero_log(); 2 * MAX_DEGREE + 1];
    b[..p.len].copy_from_slice(&p.c[..p.len]);
    (b, p.len)
}

fn make_monic(field: &FieldTable, a: &mut Buf, len: usize) {
    if len == 0 {
        return;
    }
    let inv = field.inv_log(a[len - 1]);
    for x in a[..len].iter_mut() {
        *x = field.mul_log(*x, inv);
    }
}

fn gcd_buf(field: &FieldTable, mut a: Buf, mut la: usize, mut b: Buf, mut lb: usize) -> (Buf, usize) {
    while lb > 0 {
        la = rem_in_place(field, &mut a, la, &b, lb);
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut la, &mut lb);
    }
    make_monic(field, &mut a, la);
    (a, la)
}

/// Monic gcd; `gcd(0, 0) = 0`.
pub fn gcd(field: &FieldTable, a: &UPoly, b: &UPoly) -> UPoly {
    let (ba, la) = to_buf(field, a);
    let (bb, lb) = to_buf(field, b);
    let (g, lg) = gcd_buf(field, ba, la, bb, lb);
    let mut c = [field.zero_log(); MAX_DEGREE + 1];
    c[..lg].copy_from_slice(&g[..lg]);
    UPoly { c, len: lg }
}

/// `a * b mod f` for residues of length `d = deg f`; `f` monic of length `d + 1`.
#[inline]
fn mulmod(field: &FieldTable, a: &Buf, b: &Buf, f: &Buf, d: usize) -> Buf {
    let z = field.zero_log();
    let mut prod = [z; 2 * MAX_DEGREE + 1];
    for i in 0..d {
        if a[i] == z {
            continue;
        }
        for j in 0..d {
            prod[i + j] = field.add_log(prod[i + j], field.mul_log(a[i], b[j]));
        }
    }
    // f is monic: x^d = -(f_0 + ... + f_{d-1} x^{d-1}).
    for k in (d..2 * d - 1).rev() {
        let top = prod[k];
        if top == z {
            continue;
        }
        let t = field.neg_log(top);
        for i in 0..d {
            prod[k - d + i] = field.add_log(prod[k - d + i], field.mul_log(t, f[i]));
        }
        prod[k] = z;
    }
    prod
}

/// Number of distinct roots of `f` in `F_q` (`q` for the zero polynomial).
pub fn count_roots(field: &FieldTable, f: &UPoly) -> u64 {
    let q = field.size() as u64;
    let d = match f.degree() {
        None => return q,
        Some(0) => return 0,
        Some(1) => return 1,
        Some(d) => d,
    };
    let z = field.zero_log();
    if d == 2 && field.p() != 2 {
        // b^2 - 4ac
        let (c, b, a) = (f.c[0], f.c[1], f.c[2]);
        let four = field.log_of_int(4);
        let disc = field.sub_log(field.mul_log(b, b), field.mul_log(four, field.mul_log(a, c)));
        return if disc == z {
            1
        } else if disc.is_multiple_of(2) {
            2
        } else {
            0
        };
    }
    if field.size() <= EVAL_FIELD_LIMIT {
        return count_roots_by_evaluation(field, f);
    }

    let (mut fm, _) = to_buf(field, f);
    make_monic(field, &mut fm, d + 1);

    // X^p mod f by square-and-multiply.
    let mut xp = [z; 2 * MAX_DEGREE + 1];
    xp[0] = 0;
    let mut base = [z; 2 * MAX_DEGREE + 1];
    base[1] = 0;
    let mut e = field.p() as u64;
    while e > 0 {
        if e & 1 == 1 {
            xp = mulmod(field, &xp, &base, &fm, d);
        }
        e >>= 1;
        if e > 0 {
            base = mulmod(field, &base, &base, &fm, d);
        }
    }

    // Frobenius on F_q[X]/(f): (Σ r_i X^i)^p = Σ r_i^p (X^p)^i.
    let mut r = xp;
    if field.degree() > 1 {
        let mut powers = [[z; 2 * MAX_DEGREE + 1]; MAX_DEGREE];
        powers[0][0] = 0;
        for i in 1..d {
            powers[i] = mulmod(field, &powers[i - 1], &xp, &fm, d);
        }
        let p = field.p() as u64;
        for _ in 1..field.degree() {
            let mut next = [z; 2 * MAX_DEGREE + 1];
            for i in 0..d {
                if r[i] == z {
                    continue;
                }
                let ci = field.pow_log(r[i], p);
                for j in 0..d {
                    next[j] = field.add_log(next[j], field.mul_log(ci, powers[i][j]));
                }
            }
            r = next;
        }
    }

    // gcd(f, X^q - X)
    r[1] = field.sub_log(r[1], 0);
    let lr = normalize(field, &r, d);
    let (_, lg) = gcd_buf(field, fm, d + 1, r, lr);
    (lg - 1) as u64
}

pub fn count_roots_by_evaluation(field: &FieldTable, f: &UPoly) -> u64 {
    let z = field.zero_log();
    let mut n = u64::from(f.eval(field, z) == z);
    for w in 0..field.size() - 1 {
        if f.eval(field, w) == z {
            n += 1;
        }
    }
    n
}
