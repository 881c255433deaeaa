//! Oracles shared by the integration tests. None of them calls into the
//! arithmetic of the library: fields, determinants, Newton identities and
//! hulls are redone here the slow, obvious way.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use k3picard::bounds::{CandidateEvidence, CyclotomicProfile, PrimeEvidence, SquareClass};
use k3picard::counter::PointCountRecord;
use k3picard::surface::{Exponent, QuarticSurface, SmoothnessStatus};
use k3picard::weil::{KnownFactor, WeilCandidate};

// ---------------------------------------------------------------------------
// Naive F_q and point counting

/// `F_{p^n}` as digit vectors mod an irreducible found by exhaustive search,
/// with a full multiplication table.
pub struct NaiveField {
    pub p: u64,
    pub n: u32,
    pub q: usize,
    mul: Vec<u32>,
    add: Vec<u32>,
}

fn digits(mut x: usize, p: usize, n: usize) -> Vec<usize> {
    let mut d = vec![0; n];
    for di in d.iter_mut() {
        *di = x % p;
        x /= p;
    }
    d
}

fn undigits(d: &[usize], p: usize) -> usize {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

fn has_root_free_factorization(f: &[usize], p: usize) -> bool {
    // f monic of degree n is irreducible iff no monic factor of degree 1..=n/2 divides it.
    let n = f.len() - 1;
    for deg in 1..=n / 2 {
        let count = p.pow(deg as u32);
        for low in 0..count {
            let mut g = digits(low, p, deg);
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn poly_rem(a: &[usize], b: &[usize], p: usize) -> Vec<usize> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        for (i, &bc) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p * p - lead * bc % p) % p;
        }
        r.pop();
    }
    r
}

impl NaiveField {
    pub fn new(p: u64, n: u32) -> Self {
        let (pu, nu) = (p as usize, n as usize);
        let q = pu.pow(n);
        let modulus = (0..q)
            .map(|low| {
                let mut f = digits(low, pu, nu);
                f.push(1);
                f
            })
            .find(|f| nu == 1 || has_root_free_factorization(f, pu))
            .expect("an irreducible exists");
        let mut mul = vec![0u32; q * q];
        let mut add = vec![0u32; q * q];
        for a in 0..q {
            let da = digits(a, pu, nu);
            for b in 0..q {
                let db = digits(b, pu, nu);
                let s: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % pu).collect();
                add[a * q + b] = undigits(&s, pu) as u32;
                let mut prod = vec![0usize; 2 * nu - 1];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % pu;
                    }
                }
                let r = if nu == 1 { prod } else { poly_rem(&prod, &modulus, pu) };
                let mut r = r;
                r.resize(nu, 0);
                mul[a * q + b] = undigits(&r, pu) as u32;
            }
        }
        NaiveField { p, n, q, mul, add }
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.q + b as usize]
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[a as usize * self.q + b as usize]
    }

    /// The image of an integer (prime field elements are `0..p`).
    pub fn from_int(&self, c: &BigInt) -> u32 {
        c.mod_floor(&BigInt::from(self.p)).to_u32().unwrap()
    }

    pub fn pow(&self, a: u32, e: u8) -> u32 {
        (0..e).fold(1, |acc, _| self.mul(acc, a))
    }
}

/// `#X(F_q)` by evaluating `f` at every normalized point of `P³(F_q)`.
pub fn naive_count(surface: &QuarticSurface, p: u64, n: u32) -> u64 {
    let f = NaiveField::new(p, n);
    let terms: Vec<(Exponent, u32)> = surface
        .terms()
        .map(|(e, c)| (e, f.from_int(c)))
        .filter(|&(_, c)| c != 0)
        .collect();
    let q = f.q as u32;
    // Powers 0..=4 of every element.
    let pows: Vec<[u32; 5]> = (0..q).map(|a| [0u8, 1, 2, 3, 4].map(|e| f.pow(a, e))).collect();
    let mut count = 0;
    for lead in 0..4 {
        let free = 3 - lead;
        let total = (q as u64).pow(free as u32);
        for idx in 0..total {
            let mut point = [0u32; 4];
            point[lead] = 1;
            let mut rest = idx;
            for k in 0..free {
                point[lead + 1 + k] = (rest % q as u64) as u32;
                rest /= q as u64;
            }
            let mut v = 0u32;
            for (e, c) in &terms {
                let mut m = *c;
                for i in 0..4 {
                    m = f.mul(m, pows[point[i] as usize][e[i] as usize]);
                }
                v = f.add(v, m);
            }
            if v == 0 {
                count += 1;
            }
        }
    }
    count
}

// ---------------------------------------------------------------------------
// Lines on the Fermat quartic

/// The 48 lines on `x⁴ + y⁴ + z⁴ + w⁴ = 0`, each as two spanning vectors in
/// `ℂ⁴`. For a pairing `{a, b}, {c, d}` of the coordinates the line is
/// `x_a = α x_b, x_c = β x_d` with `α⁴ = β⁴ = -1`.
pub fn fermat_lines() -> Vec<[[Complex64; 4]; 2]> {
    let roots: Vec<Complex64> = (0..4)
        .map(|k| Complex64::from_polar(1.0, std::f64::consts::PI * (2 * k + 1) as f64 / 4.0))
        .collect();
    let pairings = [[0, 1, 2, 3], [0, 2, 1, 3], [0, 3, 1, 2]];
    let mut out = Vec::new();
    for [a, b, c, d] in pairings {
        for &alpha in &roots {
            for &beta in &roots {
                let zero = Complex64::new(0.0, 0.0);
                let one = Complex64::new(1.0, 0.0);
                let mut u = [zero; 4];
                let mut v = [zero; 4];
                u[b] = one;
                u[a] = alpha;
                v[d] = one;
                v[c] = beta;
                out.push([u, v]);
            }
        }
    }
    out
}

fn det4(m: [[Complex64; 4]; 4]) -> Complex64 {
    let mut m = m;
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..4 {
        let piv = (col..4)
            .max_by(|&i, &j| m[i][col].norm().partial_cmp(&m[j][col].norm()).unwrap())
            .unwrap();
        if m[piv][col].norm() < 1e-12 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col];
        for r in col + 1..4 {
            let f = m[r][col] / m[col][col];
            for k in col..4 {
                let t = m[col][k];
                m[r][k] -= f * t;
            }
        }
    }
    det
}

/// Intersection matrix of the 48 lines: -2 on the diagonal, 1 for meeting
/// pairs, 0 otherwise. Two lines meet iff their four spanning vectors are
/// dependent.
pub fn fermat_line_gram() -> Vec<Vec<i64>> {
    let lines = fermat_lines();
    let n = lines.len();
    let mut g = vec![vec![0i64; n]; n];
    for i in 0..n {
        g[i][i] = -2;
        for j in i + 1..n {
            let m = [lines[i][0], lines[i][1], lines[j][0], lines[j][1]];
            let meet = det4(m).norm() < 1e-9;
            g[i][j] = meet as i64;
            g[j][i] = meet as i64;
        }
    }
    g
}

/// Fraction-free Gaussian elimination.
pub fn bareiss_det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Greedily picks lines whose Gram submatrix stays nondegenerate, up to
/// `rank` of them, and returns the determinant of that submatrix.
pub fn fermat_line_lattice_det(rank: usize) -> (Vec<usize>, BigInt) {
    let g = fermat_line_gram();
    let sub = |idx: &[usize]| -> Vec<Vec<BigInt>> {
        idx.iter()
            .map(|&i| idx.iter().map(|&j| BigInt::from(g[i][j])).collect())
            .collect()
    };
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..g.len() {
        if chosen.len() == rank {
            break;
        }
        let mut trial = chosen.clone();
        trial.push(i);
        if !bareiss_det(&sub(&trial)).is_zero() {
            chosen = trial;
        }
    }
    let det = bareiss_det(&sub(&chosen));
    (chosen, det)
}

/// Squarefree representative of the class of `n` by trial division.
pub fn naive_squarefree(n: &BigInt) -> BigInt {
    assert!(!n.is_zero());
    let mut m = n.abs();
    let mut out = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    let mut d = BigInt::from(2);
    while &d * &d <= m {
        let mut e = 0;
        while (&m % &d).is_zero() {
            m /= &d;
            e += 1;
        }
        if e % 2 == 1 {
            out *= &d;
        }
        d += 1;
    }
    out * m
}

// ---------------------------------------------------------------------------
// Polynomials

pub fn pmul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn z(a: &[i64]) -> Vec<BigInt> {
    a.iter().map(|&x| BigInt::from(x)).collect()
}

/// Power sums `s_1..s_k` of the reciprocal roots of `c_0 + c_1 T + …`
/// (`c_0 = 1`) by Newton's identities.
pub fn newton_power_sums(c: &[BigInt], k: usize) -> Vec<BigInt> {
    let coef = |i: usize| c.get(i).cloned().unwrap_or_default();
    let mut s: Vec<BigInt> = Vec::with_capacity(k);
    for n in 1..=k {
        let mut v = -coef(n) * BigInt::from(n);
        for i in 1..n {
            v -= coef(i) * &s[n - i - 1];
        }
        s.push(v);
    }
    s
}

/// `c_{d-i} = ε p^{d-2i} c_i` for `i ≤ d/2`.
pub fn functional_equation_holds(c: &[BigInt], p: u64, eps: i8) -> bool {
    let d = c.len() - 1;
    let p = BigInt::from(p);
    (0..=d / 2).all(|i| c[d - i] == BigInt::from(eps) * p.pow((d - 2 * i) as u32) * &c[i])
}

/// Removes every factor `1 - pζT` (ζ a root of unity of order ≤ 66) by
/// trial division against expanded `∏(1 - pζT)` blocks, returning the
/// remaining factor.
pub fn strip_cyclotomic(c: &[BigInt], p: u64) -> Vec<BigInt> {
    let mut rest = c.to_vec();
    for m in 1..=66u64 {
        let f = scaled_cyclotomic_naive(m, p);
        if f.len() > rest.len() {
            continue;
        }
        while let Some(q) = exact_div(&rest, &f) {
            rest = q;
        }
    }
    rest
}

/// `Φ_m(pT)` normalized to constant term 1, by dividing `T^m - 1` by
/// every `Φ_d`, `d | m`, `d < m`, computed recursively.
pub fn scaled_cyclotomic_naive(m: u64, p: u64) -> Vec<BigInt> {
    fn phi(m: u64) -> Vec<BigInt> {
        let mut num = vec![BigInt::zero(); m as usize + 1];
        num[0] = -BigInt::one();
        num[m as usize] = BigInt::one();
        for d in 1..m {
            if m.is_multiple_of(d) {
                num = exact_div(&num, &phi(d)).unwrap();
            }
        }
        num
    }
    let f = phi(m);
    // Φ_m(pT) with constant term normalized to 1 (Φ_1 gives -1 + pT).
    let sign = if f[0].is_negative() {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    let p = BigInt::from(p);
    f.iter().enumerate().map(|(i, c)| &sign * c * p.pow(i as u32)).collect()
}

/// Exact division of integer polynomials (low-first), if it is exact.
pub fn exact_div(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut a: Vec<BigInt> = a.to_vec();
    while a.len() > 1 && a.last().unwrap().is_zero() {
        a.pop();
    }
    let db = b.len() - 1;
    if a.len() < b.len() {
        return if a.iter().all(|c| c.is_zero()) {
            Some(vec![BigInt::zero()])
        } else {
            None
        };
    }
    let lead = b.last().unwrap();
    let mut q = vec![BigInt::zero(); a.len() - db];
    for k in (0..q.len()).rev() {
        let top = &a[k + db];
        if !(top % lead).is_zero() {
            return None;
        }
        let t = top / lead;
        for (i, bc) in b.iter().enumerate() {
            a[k + i] -= &t * bc;
        }
        q[k] = t;
    }
    a.iter().all(|c| c.is_zero()).then_some(q)
}

/// Roots of a polynomial (low-first, f64) by Durand–Kerner.
pub fn durand_kerner(c: &[f64]) -> Vec<Complex64> {
    let d = c.len() - 1;
    let lead = c[d];
    let monic: Vec<f64> = c.iter().map(|x| x / lead).collect();
    let eval = |z: Complex64| monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a);
    let radius = 1.0 + monic[..d].iter().map(|a| a.abs()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(radius.min(4.0), 0.4 + std::f64::consts::TAU * k as f64 / d as f64))
        .collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..d {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    z
}

/// Largest `| |λ| - p |` over the reciprocal roots outside the cyclotomic part.
pub fn root_modulus_defect(c: &[BigInt], p: u64) -> f64 {
    let rest = strip_cyclotomic(c, p);
    if rest.len() <= 1 {
        return 0.0;
    }
    // Roots of rest(T/p) are p/λ, expected on the unit circle.
    let pf = p as f64;
    let scaled: Vec<f64> = rest
        .iter()
        .enumerate()
        .map(|(i, x)| x.to_f64().unwrap() / pf.powi(i as i32))
        .collect();
    durand_kerner(&scaled)
        .iter()
        .map(|w| (pf / w.norm() - pf).abs())
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Newton polygon

/// Lower convex hull of `(i, v_i)` by brute force: a point is a vertex iff no
/// segment between two other points passes on or below it.
pub fn lower_hull(points: &[(usize, u32)]) -> Vec<(usize, u32)> {
    let mut out = Vec::new();
    for (k, &(x, y)) in points.iter().enumerate() {
        let below = points.iter().enumerate().any(|(i, &(xa, ya))| {
            points.iter().enumerate().any(|(j, &(xb, yb))| {
                if i == k || j == k || xa >= x || xb <= x {
                    return false;
                }
                // Height of segment a-b at x, compared as fractions.
                let lhs = (ya as i64) * (xb - x) as i64 + (yb as i64) * (x - xa) as i64;
                lhs <= (y as i64) * (xb - xa) as i64
            })
        });
        let dominated = points.iter().any(|&(xo, yo)| xo == x && yo < y);
        if !below && !dominated {
            out.push((x, y));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Verdict inputs

/// Evidence at `p` with one candidate per `(rho_upper, delta)`.
pub fn toy_evidence(p: u64, rhos_deltas: &[(usize, i64)]) -> PrimeEvidence {
    PrimeEvidence {
        p,
        smoothness: SmoothnessStatus::Unchecked,
        counts: PointCountRecord {
            p,
            surface_id: String::new(),
            entries: Vec::new(),
        },
        candidates: rhos_deltas
            .iter()
            .map(|&(rho, delta)| CandidateEvidence {
                candidate: WeilCandidate {
                    p,
                    coeffs: vec![BigInt::one()],
                    sign: 1,
                    traces_used: 0,
                    known_factors: vec![KnownFactor::hyperplane()],
                },
                profile: CyclotomicProfile {
                    factors: vec![(1, rho as u32)],
                    remainder_degree: 22 - rho,
                    rho_upper: rho,
                    m_lcm: 1,
                },
                ordinary: true,
                delta: Some(SquareClass::of_integer(&BigInt::from(delta)).unwrap()),
                delta_note: None,
            })
            .collect(),
        need_traces: None,
    }
}
