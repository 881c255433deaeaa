//! Small dense matrices over exact rings.

use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type ZMat = Mat<BigInt>;
pub type QMat = Mat<BigRational>;

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Clone + Num> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = a.clone() * other[(k, j)].clone();
                    out[(i, j)] = out[(i, j)].clone() + v;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() + other[(i, j)].clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() - other[(i, j)].clone()
        })
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() * s.clone())
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn pow(&self, mut e: u64) -> Self {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut out = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// Block-diagonal matrix.
    pub fn block_diag(blocks: &[Self]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(n, m);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(r + i, c + j)] = b[(i, j)].clone();
                }
            }
            r += b.rows;
            c += b.cols;
        }
        out
    }

    /// Characteristic polynomial `det(X I - A)`, lowest degree first, by
    /// Faddeev–LeVerrier. Every division is exact for integer matrices.
    pub fn charpoly(&self) -> Vec<T> {
        assert!(self.is_square());
        let n = self.rows;
        let mut coeffs = vec![T::zero(); n + 1];
        coeffs[n] = T::one();
        let id = Self::identity(n);
        let mut m = Self::zeros(n, n);
        let mut k_t = T::zero();
        for k in 1..=n {
            k_t = k_t + T::one();
            m = self.mul(&m).add(&id.scale(&coeffs[n - k + 1]));
            let am = self.mul(&m);
            coeffs[n - k] = T::zero() - am.trace() / k_t.clone();
        }
        coeffs
    }
}

impl QMat {
    pub fn from_int(m: &ZMat) -> Self {
        Mat::from_fn(m.rows, m.cols, |i, j| BigRational::from_integer(m[(i, j)].clone()))
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
                .collect(),
        )
    }

    /// Integer matrix, if every entry is integral.
    pub fn to_int(&self) -> Option<ZMat> {
        if self.data.iter().all(|x| x.is_integer()) {
            Some(Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)].to_integer()))
        } else {
            None
        }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(piv) = (r..a.rows).find(|&i| !a[(i, c)].is_zero()) else {
                continue;
            };
            for j in 0..a.cols {
                a.data.swap(r * a.cols + j, piv * a.cols + j);
            }
            let inv = a[(r, c)].recip();
            for j in 0..a.cols {
                a[(r, j)] = &a[(r, j)] * &inv;
            }
            for i in 0..a.rows {
                if i != r && !a[(i, c)].is_zero() {
                    let f = a[(i, c)].clone();
                    for j in 0..a.cols {
                        let v = &f * &a[(r, j)];
                        a[(i, j)] = &a[(i, j)] - v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn det(&self) -> BigRational {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut det = BigRational::one();
        for c in 0..n {
            let Some(piv) = (c..n).find(|&i| !a[(i, c)].is_zero()) else {
                return BigRational::zero();
            };
            if piv != c {
                for j in 0..n {
                    a.data.swap(c * n + j, piv * n + j);
                }
                det = -det;
            }
            let p = a[(c, c)].clone();
            det *= &p;
            for i in c + 1..n {
                if a[(i, c)].is_zero() {
                    continue;
                }
                let f = &a[(i, c)] / &p;
                for j in c..n {
                    let v = &f * &a[(c, j)];
                    a[(i, j)] = &a[(i, j)] - v;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square());
        let n = self.rows;
        let mut aug = Mat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = BigRational::one();
        }
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Mat::from_fn(n, n, |i, j| red[(i, n + j)].clone()))
    }

    /// Basis of the right kernel.
    pub fn kernel(&self) -> Vec<Vec<BigRational>> {
        let (red, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![BigRational::zero(); self.cols];
                v[f] = BigRational::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -red[(r, f)].clone();
                }
                v
            })
            .collect()
    }
}

/// Value of a polynomial (lowest degree first) at a square matrix.
pub fn eval_poly<T: Clone + Num>(coeffs: &[T], a: &Mat<T>) -> Mat<T> {
    let n = a.rows();
    let mut acc = Mat::zeros(n, n);
    for c in coeffs.iter().rev() {
        acc = acc.mul(a).add(&Mat::identity(n).scale(c));
    }
    acc
}

/// Smith normal form: unimodular `u`, `v` with `u · m · v = d` diagonal,
/// each diagonal entry nonnegative and dividing the next.
pub struct Smith {
    pub u: ZMat,
    pub d: ZMat,
    pub v: ZMat,
}

impl Smith {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }
}

fn swap_rows(m: &mut ZMat, a: usize, b: usize) {
    if a != b {
        for j in 0..m.cols {
            m.data.swap(a * m.cols + j, b * m.cols + j);
        }
    }
}

fn swap_cols(m: &mut ZMat, a: usize, b: usize) {
    if a != b {
        for i in 0..m.rows {
            m.data.swap(i * m.cols + a, i * m.cols + b);
        }
    }
}

// row_a ← x row_a + y row_b, row_b ← z row_a + w row_b
fn combine_rows(m: &mut ZMat, a: usize, b: usize, [x, y, z, w]: [&BigInt; 4]) {
    for j in 0..m.cols {
        let (ra, rb) = (m[(a, j)].clone(), m[(b, j)].clone());
        m[(a, j)] = x * &ra + y * &rb;
        m[(b, j)] = z * &ra + w * &rb;
    }
}

fn combine_cols(m: &mut ZMat, a: usize, b: usize, [x, y, z, w]: [&BigInt; 4]) {
    for i in 0..m.rows {
        let (ca, cb) = (m[(i, a)].clone(), m[(i, b)].clone());
        m[(i, a)] = x * &ca + y * &cb;
        m[(i, b)] = z * &ca + w * &cb;
    }
}

// Unimodular [x y; z w] sending (a, b) to (g, 0). When a | b the pivot is
// kept in place, so repeated passes cannot cycle.
fn elimination(a: &BigInt, b: &BigInt) -> [BigInt; 4] {
    if (b % a).is_zero() {
        return [BigInt::one(), BigInt::zero(), -(b / a), BigInt::one()];
    }
    let e = a.extended_gcd(b);
    let g = e.gcd;
    [e.x, e.y, -(b / &g), a / &g]
}

pub fn smith(m: &ZMat) -> Smith {
    let (rows, cols) = (m.rows(), m.cols());
    let mut d = m.clone();
    let mut u = ZMat::identity(rows);
    let mut v = ZMat::identity(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // Smallest nonzero entry in the remaining block as pivot.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !d[(i, j)].is_zero() && best.is_none_or(|(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        swap_rows(&mut d, t, pi);
        swap_rows(&mut u, t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);
        loop {
            let mut changed = false;
            for i in t + 1..rows {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let (a, b) = (d[(t, t)].clone(), d[(i, t)].clone());
                let [x, y, z, w] = elimination(&a, &b);
                combine_rows(&mut d, t, i, [&x, &y, &z, &w]);
                combine_rows(&mut u, t, i, [&x, &y, &z, &w]);
                changed = true;
            }
            for j in t + 1..cols {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let (a, b) = (d[(t, t)].clone(), d[(t, j)].clone());
                let [x, y, z, w] = elimination(&a, &b);
                combine_cols(&mut d, t, j, [&x, &y, &z, &w]);
                combine_cols(&mut v, t, j, [&x, &y, &z, &w]);
                changed = true;
            }
            if !changed {
                break;
            }
        }
        // Divisibility: fold any entry not divisible by the pivot into row t.
        let piv = d[(t, t)].clone();
        let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&d[(i, j)] % &piv).is_zero()));
        if let Some(i) = bad {
            let one = BigInt::one();
            let zero = BigInt::zero();
            combine_rows(&mut d, t, i, [&one, &one, &zero, &one]);
            combine_rows(&mut u, t, i, [&one, &one, &zero, &one]);
            continue;
        }
        if d[(t, t)].is_negative() {
            for j in 0..cols {
                d[(t, j)] = -d[(t, j)].clone();
            }
            for j in 0..rows {
                u[(t, j)] = -u[(t, j)].clone();
            }
        }
        t += 1;
    }
    Smith { u, d, v }
}

/// Saturated integer basis (as columns) of the right kernel of `m`, and a
/// left inverse `l` with `l · basis = I`.
pub fn integer_kernel(m: &ZMat) -> (ZMat, ZMat) {
    let s = smith(m);
    let diag = s.diagonal();
    let free: Vec<usize> = (0..m.cols())
        .filter(|&j| diag.get(j).is_none_or(Zero::is_zero))
        .collect();
    let basis = Mat::from_fn(m.cols(), free.len(), |i, k| s.v[(i, free[k])].clone());
    let vinv = QMat::from_int(&s.v)
        .inverse()
        .and_then(|x| x.to_int())
        .expect("unimodular");
    let left = Mat::from_fn(free.len(), m.cols(), |k, j| vinv[(free[k], j)].clone());
    (basis, left)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(rows: &[Vec<i64>]) -> QMat {
        QMat::from_i64_rows(rows)
    }

    fn z(rows: &[Vec<i64>]) -> ZMat {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn inverse_and_det() {
        let a = q(&[vec![2, 1], vec![7, 4]]);
        assert_eq!(a.det(), BigRational::one());
        assert_eq!(a.mul(&a.inverse().unwrap()), QMat::identity(2));
        assert!(q(&[vec![1, 2], vec![2, 4]]).inverse().is_none());
        assert_eq!(q(&[vec![1, 2], vec![2, 4]]).rank(), 1);
    }

    #[test]
    fn charpoly_examples() {
        // [[2, 1], [0, 3]] → (X - 2)(X - 3)
        let a = z(&[vec![2, 1], vec![0, 3]]);
        let cp: Vec<BigInt> = a.charpoly();
        assert_eq!(cp, vec![6.into(), (-5).into(), 1.into()]);
        let b = q(&[vec![0, 1, 0], vec![0, 0, 1], vec![5, -3, 2]]);
        let cp = b.charpoly();
        let expect: Vec<BigRational> = [-5i64, 3, -2, 1]
            .iter()
            .map(|&x| BigRational::from_integer(x.into()))
            .collect();
        assert_eq!(cp, expect);
        assert!(eval_poly(&cp, &b).data.iter().all(Zero::is_zero));
    }

    #[test]
    fn kernel_example() {
        let a = q(&[vec![1, 2, 3], vec![2, 4, 6]]);
        let k = a.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(a.mul_vec(v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn smith_example() {
        let m = z(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = smith(&m);
        assert_eq!(s.diagonal(), vec![2.into(), 6.into(), 12.into()]);
        assert_eq!(s.u.mul(&m).mul(&s.v), s.d);
        assert_eq!(QMat::from_int(&s.u).det().abs(), BigRational::one());
        assert_eq!(QMat::from_int(&s.v).det().abs(), BigRational::one());
    }

    #[test]
    fn saturated_kernel() {
        // The kernel of (2 2 0) is saturated: spanned by (1,-1,0), (0,0,1).
        let m = z(&[vec![2, 2, 0]]);
        let (b, l) = integer_kernel(&m);
        assert_eq!(b.cols(), 2);
        assert_eq!(l.mul(&b), ZMat::identity(2));
        assert!(m.mul(&b).data.iter().all(Zero::is_zero));
    }
}
