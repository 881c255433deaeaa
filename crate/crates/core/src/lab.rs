//! Exact experiments with the centralizer of a number field `E` acting on
//! `T = E^r`, inside the special orthogonal group of `ψ = Tr_{E/ℚ} φ`.
//!
//! Rational points stand in for `ℚ_ℓ`-points of the group: statements that
//! hold for every element of the group hold for these samples in
//! particular, which is what can be checked at desk scale.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, QMat, ZMat};
use crate::poly::{self, rational as rpoly};
use crate::roots;

const NUMERIC_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_HEIGHT: i64 = 10;
const MAX_RESAMPLES: usize = 100;

fn q(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn q_vec(a: &[i64]) -> Vec<BigRational> {
    a.iter().map(|&x| q(x)).collect()
}

/// `ℚ[x]/(g)` with an optional complex conjugation `x ↦ c(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumberField {
    g: Vec<BigRational>,
    conj: Option<Vec<BigRational>>,
}

/// Elements are coefficient vectors of length `[E:ℚ]` in the basis `1, x, …`.
pub type Elem = Vec<BigRational>;

impl NumberField {
    pub fn new(g: &[BigInt], conj: Option<Elem>) -> Result<Self> {
        let g = rpoly::from_int(g);
        if poly::degree(&g).unwrap_or(0) == 0 || !g.last().is_some_and(One::is_one) {
            return Err(Error::Invalid("defining polynomial must be monic of degree ≥ 1".into()));
        }
        let mut f = NumberField { g, conj: None };
        f.conj = conj.map(|c| f.reduce(c));
        Ok(f)
    }

    pub fn degree(&self) -> usize {
        self.g.len() - 1
    }

    pub fn is_cm(&self) -> bool {
        self.conj.is_some()
    }

    pub fn reduce(&self, a: Elem) -> Elem {
        let mut r = rpoly::rem(&a, &self.g);
        r.resize(self.degree(), BigRational::zero());
        r
    }

    pub fn from_i64(&self, a: &[i64]) -> Elem {
        self.reduce(q_vec(a))
    }

    pub fn one(&self) -> Elem {
        self.from_i64(&[1])
    }

    pub fn zero(&self) -> Elem {
        vec![BigRational::zero(); self.degree()]
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        a.iter().map(|x| -x).collect()
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let mut prod = vec![BigRational::zero(); a.len() + b.len()];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] = &prod[i + j] + x * y;
            }
        }
        self.reduce(prod)
    }

    /// Matrix of multiplication by `a`.
    pub fn mult_matrix(&self, a: &Elem) -> QMat {
        let e = self.degree();
        let mut m = QMat::zeros(e, e);
        let mut xj = self.one();
        let x = self.from_i64(&[0, 1]);
        for j in 0..e {
            let col = self.mul(a, &xj);
            for i in 0..e {
                m[(i, j)] = col[i].clone();
            }
            xj = self.mul(&xj, &x);
        }
        m
    }

    pub fn inv(&self, a: &Elem) -> Option<Elem> {
        let minv = self.mult_matrix(a).inverse()?;
        Some(minv.column(0))
    }

    pub fn trace(&self, a: &Elem) -> BigRational {
        self.mult_matrix(a).trace()
    }

    /// Complex conjugation; the identity for totally real fields.
    pub fn conj(&self, a: &Elem) -> Elem {
        match &self.conj {
            None => a.clone(),
            Some(c) => {
                let mut acc = self.zero();
                for coef in a.iter().rev() {
                    acc = self.mul(&acc, c);
                    acc[0] = &acc[0] + coef;
                }
                acc
            }
        }
    }

    pub fn eval_complex(&self, a: &Elem, z: Complex64) -> Complex64 {
        a.iter()
            .rev()
            .fold(Complex64::zero(), |acc, c| acc * z + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn complex_roots(&self) -> Vec<Complex64> {
        let f: Vec<f64> = self.g.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
        roots::aberth(&f)
    }
}

/// Irreducibility over ℚ of a monic integer polynomial: no monic integer
/// factor of degree `≤ deg/2`, searched over products of numerical roots.
pub fn is_irreducible_over_q(g: &[BigInt]) -> bool {
    let d = match poly::degree(g) {
        Some(d) => d,
        None => return false,
    };
    if d <= 1 {
        return d == 1;
    }
    let f: Vec<f64> = g.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
    let rts = roots::aberth(&f);
    for k in 1..=d / 2 {
        for subset in subsets(d, k) {
            let mut prod = vec![Complex64::new(1.0, 0.0)];
            for &i in &subset {
                let mut next = vec![Complex64::zero(); prod.len() + 1];
                for (j, c) in prod.iter().enumerate() {
                    next[j + 1] += c;
                    next[j] -= c * rts[i];
                }
                prod = next;
            }
            if prod
                .iter()
                .any(|c| c.im.abs() > 1e-6 || (c.re - c.re.round()).abs() > 1e-6)
            {
                continue;
            }
            let cand: Vec<BigInt> = prod.iter().map(|c| BigInt::from(c.re.round() as i64)).collect();
            if poly::div_exact(g, &cand).is_some() {
                return false;
            }
        }
    }
    true
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    TotallyReal,
    Cm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndoFieldModel {
    pub name: String,
    pub g: Vec<BigInt>,
    pub kind: FieldKind,
    pub r: usize,
    pub phi_diag: Vec<Elem>,
    pub field: NumberField,
    /// Require signature `(2, e·r - 2)`.
    pub k3_signature: bool,
}

impl EndoFieldModel {
    /// Validated model. `conj` is the image of `x` under complex
    /// conjugation and must be given exactly for CM fields.
    pub fn new(
        name: &str,
        g: &[i64],
        kind: FieldKind,
        r: usize,
        phi_diag: &[&[i64]],
        conj: Option<&[i64]>,
        k3_signature: bool,
    ) -> Result<Self> {
        let gz = poly::from_i64(g);
        let field = NumberField::new(&gz, conj.map(q_vec))?;
        let phi: Vec<Elem> = phi_diag.iter().map(|a| field.from_i64(a)).collect();
        let model = EndoFieldModel {
            name: name.to_string(),
            g: gz,
            kind,
            r,
            phi_diag: phi,
            field,
            k3_signature,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn degree(&self) -> usize {
        self.field.degree()
    }

    pub fn dim(&self) -> usize {
        self.degree() * self.r
    }

    fn validate(&self) -> Result<()> {
        if self.r == 0 {
            return Err(Error::Invalid("r must be at least 1".into()));
        }
        if self.phi_diag.len() != self.r {
            return Err(Error::Invalid(format!(
                "need {} diagonal entries, got {}",
                self.r,
                self.phi_diag.len()
            )));
        }
        if !is_irreducible_over_q(&self.g) {
            return Err(Error::Invalid("defining polynomial is reducible".into()));
        }
        if self.phi_diag.iter().any(|a| a.iter().all(Zero::is_zero)) {
            return Err(Error::Invalid("a diagonal entry of φ is zero".into()));
        }
        let f = &self.field;
        let rts = f.complex_roots();
        match self.kind {
            FieldKind::TotallyReal => {
                if f.is_cm() {
                    return Err(Error::Invalid("totally real model given a conjugation".into()));
                }
                if rts.iter().any(|z| z.im.abs() > NUMERIC_TOLERANCE) {
                    return Err(Error::Invalid("field is not totally real".into()));
                }
            }
            FieldKind::Cm => {
                let c = f
                    .conj
                    .as_ref()
                    .ok_or_else(|| Error::Invalid("CM model needs a conjugation".into()))?;
                let x = f.from_i64(&[0, 1]);
                if *c == x || f.conj(c) != x {
                    return Err(Error::Invalid(
                        "conjugation must be an involution other than the identity".into(),
                    ));
                }
                // g(c(x)) = 0 in E
                if f.conj(&f.reduce(self.g.iter().map(|a| BigRational::from_integer(a.clone())).collect()))
                    .iter()
                    .any(|v| !v.is_zero())
                {
                    return Err(Error::Invalid("conjugation is not a field automorphism".into()));
                }
                for z in &rts {
                    if z.im.abs() <= NUMERIC_TOLERANCE || (f.eval_complex(c, *z) - z.conj()).norm() > NUMERIC_TOLERANCE
                    {
                        return Err(Error::Invalid("conjugation does not act as complex conjugation".into()));
                    }
                }
                if self.phi_diag.iter().any(|a| f.conj(a) != *a) {
                    return Err(Error::Invalid(
                        "φ must be hermitian: diagonal entries in the real subfield".into(),
                    ));
                }
            }
        }
        if self.k3_signature {
            let sig = signature(&build_trace_form(self));
            let expect = (2, self.dim() - 2, 0);
            if sig != expect {
                return Err(Error::Invalid(format!("signature {sig:?} is not {expect:?}")));
            }
        }
        Ok(())
    }

    /// Matrix of the action of `a ∈ E` on `T = E^r`.
    pub fn action(&self, a: &Elem) -> QMat {
        let m = self.field.mult_matrix(a);
        Mat::block_diag(&vec![m; self.r])
    }

    /// Expands an `r × r` matrix over `E` to a rational matrix on `ℚ^{e r}`.
    pub fn expand(&self, a: &[Vec<Elem>]) -> QMat {
        let e = self.degree();
        let n = self.dim();
        let mut out = QMat::zeros(n, n);
        for (i, row) in a.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let m = self.field.mult_matrix(x);
                for a in 0..e {
                    for b in 0..e {
                        out[(i * e + a, j * e + b)] = m[(a, b)].clone();
                    }
                }
            }
        }
        out
    }
}

/// Preset models with K3-type signatures.
pub fn preset(name: &str) -> Result<EndoFieldModel> {
    match name {
        "rational" => {
            let mut phi: Vec<&[i64]> = vec![&[1], &[1]];
            phi.extend(std::iter::repeat_n(&[-1i64][..], 19));
            EndoFieldModel::new(name, &[0, 1], FieldKind::TotallyReal, 21, &phi, None, true)
        }
        "real-quadratic" => EndoFieldModel::new(
            name,
            &[-2, 0, 1],
            FieldKind::TotallyReal,
            3,
            &[&[0, 1], &[0, 1], &[-1]],
            None,
            true,
        ),
        "real-quartic" => EndoFieldModel::new(
            name,
            &[1, 0, -10, 0, 1],
            FieldKind::TotallyReal,
            3,
            &[&[-3, 1], &[-3, 1], &[-1]],
            None,
            true,
        ),
        "cm-quartic" => EndoFieldModel::new(
            name,
            &[1, 0, 0, 0, 1],
            FieldKind::Cm,
            2,
            &[&[0, 1, 0, -1], &[-1]],
            Some(&[0, 0, 0, -1]),
            true,
        ),
        _ => Err(Error::Invalid(format!(
            "unknown preset {name:?} (expected one of {})",
            PRESETS.join(", ")
        ))),
    }
}

pub const PRESETS: [&str; 4] = ["rational", "real-quadratic", "real-quartic", "cm-quartic"];

/// Gram matrix of `ψ(u, v) = Tr_{E/ℚ} φ(u, v)` on `ℚ^{e r}`, where
/// `φ(u, v) = Σ φ_i u_i v̄_i`.
pub fn build_trace_form(model: &EndoFieldModel) -> QMat {
    let f = &model.field;
    let e = f.degree();
    let n = model.dim();
    let basis: Vec<Elem> = (0..e)
        .map(|j| {
            let mut v = vec![0i64; j + 1];
            v[j] = 1;
            f.from_i64(&v)
        })
        .collect();
    let conj_basis: Vec<Elem> = basis.iter().map(|b| f.conj(b)).collect();
    let mut g = QMat::zeros(n, n);
    for (i, phi) in model.phi_diag.iter().enumerate() {
        for a in 0..e {
            let pa = f.mul(phi, &basis[a]);
            for b in 0..e {
                g[(i * e + a, i * e + b)] = f.trace(&f.mul(&pa, &conj_basis[b]));
            }
        }
    }
    g
}

/// `(positive, negative, zero)` eigenvalue counts of a symmetric matrix,
/// from sign changes of its characteristic polynomial.
pub fn signature(g: &QMat) -> (usize, usize, usize) {
    let cp = g.charpoly();
    let zero = cp.iter().position(|c| !c.is_zero()).unwrap_or(cp.len());
    let changes = |coeffs: Vec<BigRational>| {
        let signs: Vec<bool> = coeffs
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| c.is_positive())
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    };
    let pos = changes(cp.clone());
    let neg = changes(
        cp.iter()
            .enumerate()
            .map(|(i, c)| if i % 2 == 1 { -c.clone() } else { c.clone() })
            .collect(),
    );
    (pos, neg, zero)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralizerElement {
    pub h: QMat,
    pub seed: u64,
    pub attempts: usize,
}

fn random_elem(f: &NumberField, rng: &mut ChaCha8Rng, height: i64) -> Elem {
    (0..f.degree()).map(|_| q(rng.gen_range(-height..=height))).collect()
}

/// `(I + A)(I - A)^{-1}`, if `I - A` is invertible.
pub fn cayley(a: &QMat) -> Option<QMat> {
    let id = QMat::identity(a.rows());
    Some(id.add(a).mul(&id.sub(a).inverse()?))
}

/// `A = Φ^{-1} B` for `B` skew-hermitian over `E`: skew-adjoint for `φ`.
pub fn skew_adjoint(model: &EndoFieldModel, b: &[Vec<Elem>]) -> Result<QMat> {
    let f = &model.field;
    let mut a = b.to_vec();
    for (i, row) in a.iter_mut().enumerate() {
        let inv = f
            .inv(&model.phi_diag[i])
            .ok_or_else(|| Error::Invalid("φ entry not invertible".into()))?;
        for x in row.iter_mut() {
            *x = f.mul(&inv, x);
        }
    }
    Ok(model.expand(&a))
}

pub fn sample_centralizer(model: &EndoFieldModel, seed: u64) -> Result<CentralizerElement> {
    sample_centralizer_with_height(model, seed, DEFAULT_HEIGHT)
}

pub fn sample_centralizer_with_height(model: &EndoFieldModel, seed: u64, height: i64) -> Result<CentralizerElement> {
    let f = &model.field;
    let r = model.r;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=MAX_RESAMPLES {
        let mut b = vec![vec![f.zero(); r]; r];
        for i in 0..r {
            if f.is_cm() {
                let t = random_elem(f, &mut rng, height);
                b[i][i] = f.sub(&t, &f.conj(&t));
            }
            for j in i + 1..r {
                let x = random_elem(f, &mut rng, height);
                b[j][i] = f.neg(&f.conj(&x));
                b[i][j] = x;
            }
        }
        let a = skew_adjoint(model, &b)?;
        if let Some(h) = cayley(&a) {
            return Ok(CentralizerElement {
                h,
                seed,
                attempts: attempt,
            });
        }
    }
    Err(Error::Invalid(format!(
        "I - A singular in {MAX_RESAMPLES} consecutive samples (seed {seed})"
    )))
}

pub fn eigenvalue_one_multiplicity(h: &QMat) -> usize {
    h.rows() - h.sub(&QMat::identity(h.rows())).rank()
}

/// Whether `charpoly(h)` shares a factor with some `Φ_m`, `m ≤ order_bound`,
/// `φ(m) ≤ dim`.
pub fn has_root_of_unity_eigenvalue(h: &QMat, order_bound: u64) -> bool {
    root_of_unity_orders(h, order_bound).next().is_some()
}

/// Orders `m` of roots of unity that are eigenvalues of `h`.
pub fn root_of_unity_orders(h: &QMat, order_bound: u64) -> impl Iterator<Item = u64> {
    let cp = h.charpoly();
    let n = h.rows() as u64;
    (1..=order_bound)
        .filter(move |&m| poly::euler_phi(m) <= n)
        .filter(move |&m| {
            let phi = rpoly::from_int(&poly::cyclotomic(m));
            poly::degree(&rpoly::gcd(&cp, &phi)).unwrap_or(0) > 0
        })
}

/// Largest order worth testing in dimension `n`: every `m` with `φ(m) ≤ n`.
pub fn order_bound_for_dim(n: usize) -> u64 {
    poly::orders_with_phi_at_most(n as u64).last().copied().unwrap_or(1)
}

/// `hᵀ G h = G`, `det h = 1` and commutation with the action of `x`.
pub fn in_centralizer(model: &EndoFieldModel, g: &QMat, h: &QMat) -> bool {
    let x = model.action(&model.field.from_i64(&[0, 1]));
    h.transpose().mul(g).mul(h) == *g && h.det().is_one() && h.mul(&x) == x.mul(h)
}

/// The fixed space of `h` is stable under the action of `E`.
pub fn fixed_space_is_e_stable(model: &EndoFieldModel, h: &QMat) -> bool {
    let n = h.rows();
    let k = h.sub(&QMat::identity(n)).kernel();
    if k.is_empty() {
        return true;
    }
    let x = model.action(&model.field.from_i64(&[0, 1]));
    let mut rows: Vec<Vec<BigRational>> = k.clone();
    rows.extend(k.iter().map(|v| x.mul_vec(v)));
    QMat::from_rows(rows).rank() == k.len()
}

/// Block rotation of infinite order: `E = ℚ(√2)`, `r = 2`, `φ = diag(1, -1)`,
/// Cayley transform of `A = Φ^{-1} [[0, √2/2], [-√2/2, 0]]`. Its eigenvalues
/// are the conjugates of `(1 + √2)^{±2}`.
pub fn block_rotation_witness() -> Result<(EndoFieldModel, QMat)> {
    let model = EndoFieldModel::new(
        "real-quadratic-r2",
        &[-2, 0, 1],
        FieldKind::TotallyReal,
        2,
        &[&[1], &[-1]],
        None,
        true,
    )?;
    let f = &model.field;
    let beta = f.mul(&f.from_i64(&[0, 1]), &vec![q(1) / q(2), q(0)]);
    let b = vec![vec![f.zero(), beta.clone()], vec![f.neg(&beta), f.zero()]];
    let a = skew_adjoint(&model, &b)?;
    let h = cayley(&a).ok_or_else(|| Error::Internal("block rotation: I - A singular".into()))?;
    Ok((model, h))
}

/// Multiplication by `e = α / ᾱ` on the CM preset, with `α = 2 + i`,
/// `i = x²` in `ℚ(ζ_8) = ℚ[x]/(x⁴ + 1)`. `e ē = 1`, and `e` is not a root
/// of unity: `(2 + i)/(2 - i) = (3 + 4i)/5` is not an algebraic integer.
pub fn cm_norm_one_witness() -> Result<(EndoFieldModel, QMat, Elem)> {
    let model = preset("cm-quartic")?;
    let f = &model.field;
    let alpha = f.from_i64(&[2, 0, 1]);
    let abar = f.conj(&alpha);
    let e = f.mul(
        &alpha,
        &f.inv(&abar).ok_or_else(|| Error::Internal("ᾱ not invertible".into()))?,
    );
    let h = model.action(&e);
    Ok((model, h, e))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub seed: u64,
    pub multiplicity: usize,
    pub attempts: usize,
    pub in_group: bool,
    pub e_stable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabReport {
    pub preset: String,
    pub degree: usize,
    pub r: usize,
    pub signature: (usize, usize),
    pub base_seed: u64,
    pub samples: usize,
    pub height: i64,
    /// Eigenvalue-1 multiplicity → number of samples.
    pub histogram: BTreeMap<usize, usize>,
    pub min_multiplicity: usize,
    /// Seeds whose multiplicity equals `[E:ℚ]`.
    pub minimal_seeds: Vec<u64>,
    pub all_in_group: bool,
    pub all_e_stable: bool,
}

/// Samples `count` elements with seeds `base_seed, base_seed + 1, …`.
pub fn sample_records(model: &EndoFieldModel, base_seed: u64, count: usize, height: i64) -> Result<Vec<SampleRecord>> {
    let g = build_trace_form(model);
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let seed = base_seed.wrapping_add(i);
            let el = sample_centralizer_with_height(model, seed, height)?;
            Ok(SampleRecord {
                seed,
                multiplicity: eigenvalue_one_multiplicity(&el.h),
                attempts: el.attempts,
                in_group: in_centralizer(model, &g, &el.h),
                e_stable: fixed_space_is_e_stable(model, &el.h),
            })
        })
        .collect()
}

pub fn run_experiment(model: &EndoFieldModel, base_seed: u64, count: usize) -> Result<LabReport> {
    let records = sample_records(model, base_seed, count, DEFAULT_HEIGHT)?;
    let mut histogram = BTreeMap::new();
    for r in &records {
        *histogram.entry(r.multiplicity).or_insert(0) += 1;
    }
    let e = model.degree();
    let (pos, neg, _) = signature(&build_trace_form(model));
    Ok(LabReport {
        preset: model.name.clone(),
        degree: e,
        r: model.r,
        signature: (pos, neg),
        base_seed,
        samples: count,
        height: DEFAULT_HEIGHT,
        min_multiplicity: records.iter().map(|r| r.multiplicity).min().unwrap_or(0),
        minimal_seeds: records
            .iter()
            .filter(|r| r.multiplicity == e)
            .map(|r| r.seed)
            .take(10)
            .collect(),
        all_in_group: records.iter().all(|r| r.in_group),
        all_e_stable: records.iter().all(|r| r.e_stable),
        histogram,
    })
}

// ---------------------------------------------------------------------------
// Eigenspace congruence

fn zmat_i64(rows: &[Vec<i64>]) -> ZMat {
    Mat::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect(),
    )
}

fn is_semisimple(m: &QMat) -> bool {
    let cp = m.charpoly();
    let sf = rpoly::squarefree_part(&rpoly::to_primitive_int(&cp));
    linalg::eval_poly(&rpoly::from_int(&sf), m) == QMat::zeros(m.rows(), m.cols())
}

fn fixed_multiplicity(g: &ZMat) -> usize {
    eigenvalue_one_multiplicity(&QMat::from_int(g))
}

/// `true` if the column spans of `a` and `b` agree modulo `modulus`, given
/// left inverses `la`, `lb` (`la · a = I`).
fn same_mod(a: &ZMat, la: &ZMat, b: &ZMat, lb: &ZMat, modulus: &BigInt) -> bool {
    let inside = |x: &ZMat, basis: &ZMat, left: &ZMat| {
        (0..x.cols()).all(|k| {
            let v = x.column(k);
            let coords = left.mul_vec(&v);
            let proj = basis.mul_vec(&coords);
            v.iter().zip(&proj).all(|(s, t)| ((s - t) % modulus).is_zero())
        })
    };
    a.cols() == b.cols() && inside(b, a, la) && inside(a, b, lb)
}

/// A random integer matrix `S · diag(I_{r0}, C) · S^{-1}` with `S`
/// unimodular and `C` semisimple without eigenvalue 1.
pub fn random_test_matrix(dim: usize, r0: usize, seed: u64) -> ZMat {
    assert!(r0 <= dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = dim - r0;
    let c = loop {
        let c = ZMat::from_fn(k, k, |_, _| BigInt::from(rng.gen_range(-3i64..=3)));
        let cq = QMat::from_int(&c);
        if k == 0 || (!cq.sub(&QMat::identity(k)).det().is_zero() && is_semisimple(&cq)) {
            break c;
        }
    };
    let mut blocks = vec![ZMat::identity(r0)];
    if k > 0 {
        blocks.push(c);
    }
    let d = Mat::block_diag(&blocks);
    // S: product of elementary matrices with small multipliers.
    let mut s = ZMat::identity(dim);
    for _ in 0..2 * dim {
        let i = rng.gen_range(0..dim);
        let j = rng.gen_range(0..dim);
        if i == j {
            continue;
        }
        let t = BigInt::from(rng.gen_range(-1i64..=1));
        let mut e = ZMat::identity(dim);
        e[(i, j)] = t;
        s = s.mul(&e);
    }
    let sinv = QMat::from_int(&s)
        .inverse()
        .and_then(|x| x.to_int())
        .expect("unimodular");
    s.mul(&d).mul(&sinv)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CongruenceOutcome {
    Pass,
    Fail { trial: usize },
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceRun {
    pub ell: u64,
    pub n: u32,
    pub d: u32,
    pub seed: u64,
    pub trials: usize,
    pub passed: usize,
    pub outcome: CongruenceOutcome,
}

const PERTURBATION_RETRIES: usize = 200;

/// A perturbation `h = g + ℓ^N E` whose fixed lattice has the same rank as
/// that of `g` and which is semisimple over ℚ.
///
/// The fixed lattice `W'` of `h` is drawn from the solutions of
/// `(g - I) x ≡ 0 (mod ℓ^N)`; `E` is then any integer matrix with
/// `(g - I + ℓ^N E) W' = 0`, random on a complement of `W'`.
fn perturb(g: &ZMat, ell_n: &BigInt, r0: usize, rng: &mut ChaCha8Rng) -> Option<ZMat> {
    let n = g.rows();
    let m = g.sub(&ZMat::identity(n));
    let s = linalg::smith(&m);
    let diag = s.diagonal();
    for _ in 0..PERTURBATION_RETRIES {
        let mut cols = Vec::with_capacity(r0);
        for _ in 0..r0 {
            let y: Vec<BigInt> = (0..n)
                .map(|i| {
                    let t = BigInt::from(rng.gen_range(-5i64..=5));
                    match diag.get(i) {
                        Some(di) if !di.is_zero() => {
                            let step = ell_n / num_integer::Integer::gcd(di, ell_n);
                            t * step
                        }
                        _ => t,
                    }
                })
                .collect();
            cols.push(s.v.mul_vec(&y));
        }
        let x = Mat::from_fn(n, r0, |i, k| cols[k][i].clone());
        let sx = linalg::smith(&x);
        if sx.diagonal().iter().any(|d| !d.is_one()) {
            continue;
        }
        // x · V_x = U_x^{-1} [I; 0]: the first r0 columns of U_x^{-1} span W'.
        let basis = QMat::from_int(&sx.u).inverse()?.to_int()?;
        let mut target = Mat::from_fn(n, n, |_, k| {
            if k < r0 {
                BigInt::zero()
            } else {
                BigInt::from(rng.gen_range(-2i64..=2))
            }
        });
        for k in 0..r0 {
            let mv = m.mul_vec(&basis.column(k));
            for i in 0..n {
                let v = -mv[i].clone();
                if !(&v % ell_n).is_zero() {
                    return None;
                }
                target[(i, k)] = v / ell_n;
            }
        }
        let binv = QMat::from_int(&basis).inverse()?.to_int()?;
        let e = target.mul(&binv);
        let h = g.add(&e.scale(ell_n));
        let hq = QMat::from_int(&h);
        if eigenvalue_one_multiplicity(&hq) == r0 && is_semisimple(&hq) {
            return Some(h);
        }
    }
    None
}

/// Checks `trials` admissible perturbations `h ≡ g (mod ℓ^N)` for equality of
/// the saturated fixed lattices of `g` and `h` modulo `ℓ^d`.
pub fn eigenspace_congruence_test(g: &ZMat, ell: u64, n: u32, d: u32, trials: usize, seed: u64) -> CongruenceRun {
    let mut run = CongruenceRun {
        ell,
        n,
        d,
        seed,
        trials,
        passed: 0,
        outcome: CongruenceOutcome::Pass,
    };
    let gq = QMat::from_int(g);
    if !is_semisimple(&gq) {
        run.outcome = CongruenceOutcome::Inconclusive;
        return run;
    }
    let r0 = fixed_multiplicity(g);
    let dim = g.rows();
    let (wg, lg) = linalg::integer_kernel(&g.sub(&ZMat::identity(dim)));
    let ell_n = BigInt::from(ell).pow(n);
    let ell_d = BigInt::from(ell).pow(d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let Some(h) = perturb(g, &ell_n, r0, &mut rng) else {
            run.outcome = CongruenceOutcome::Inconclusive;
            return run;
        };
        let (wh, lh) = linalg::integer_kernel(&h.sub(&ZMat::identity(dim)));
        if same_mod(&wg, &lg, &wh, &lh, &ell_d) {
            run.passed += 1;
        } else {
            run.outcome = CongruenceOutcome::Fail { trial };
            return run;
        }
    }
    run
}

/// Smallest `N ≤ max_n` at which every trial passes, with the log of all runs.
pub fn find_congruence_level(
    g: &ZMat,
    ell: u64,
    d: u32,
    max_n: u32,
    trials: usize,
    seed: u64,
) -> (Option<u32>, Vec<CongruenceRun>) {
    let mut log = Vec::new();
    for n in 1..=max_n {
        let run = eigenspace_congruence_test(g, ell, n, d, trials, seed.wrapping_add(n as u64));
        let ok = run.outcome == CongruenceOutcome::Pass;
        log.push(run);
        if ok {
            return (Some(n), log);
        }
    }
    (None, log)
}

/// `diag(1, 1 + ℓ^k)`.
pub fn diagonal_example(ell: u64, k: u32) -> ZMat {
    let big = 1 + ell.pow(k) as i64;
    zmat_i64(&[vec![1, 0], vec![0, big]])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_form_examples() {
        let m = EndoFieldModel::new(
            "q",
            &[0, 1],
            FieldKind::TotallyReal,
            3,
            &[&[1], &[1], &[-1]],
            None,
            false,
        )
        .unwrap();
        assert_eq!(
            build_trace_form(&m),
            QMat::from_i64_rows(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, -1]])
        );
        let m = EndoFieldModel::new("s2", &[-2, 0, 1], FieldKind::TotallyReal, 1, &[&[1]], None, false).unwrap();
        assert_eq!(build_trace_form(&m), QMat::from_i64_rows(&[vec![2, 0], vec![0, 4]]));
    }

    #[test]
    fn presets_are_valid() {
        for name in PRESETS {
            let m = preset(name).unwrap();
            let (pos, neg, zero) = signature(&build_trace_form(&m));
            assert_eq!((pos, neg, zero), (2, m.dim() - 2, 0), "{name}");
        }
        assert!(preset("nope").is_err());
    }

    #[test]
    fn invalid_models_rejected() {
        // x^2 - 1 is reducible
        assert!(EndoFieldModel::new("bad", &[-1, 0, 1], FieldKind::TotallyReal, 1, &[&[1]], None, false).is_err());
        // x^2 + 1 is not totally real
        assert!(EndoFieldModel::new("bad", &[1, 0, 1], FieldKind::TotallyReal, 1, &[&[1]], None, false).is_err());
        // zero φ entry
        assert!(EndoFieldModel::new("bad", &[-2, 0, 1], FieldKind::TotallyReal, 1, &[&[0]], None, false).is_err());
        // wrong conjugation on ℚ(i)
        assert!(EndoFieldModel::new("bad", &[1, 0, 1], FieldKind::Cm, 1, &[&[1]], Some(&[0, 1]), false).is_err());
        assert!(EndoFieldModel::new("ok", &[1, 0, 1], FieldKind::Cm, 1, &[&[1]], Some(&[0, -1]), false).is_ok());
    }

    #[test]
    fn cayley_in_two_dimensions() {
        let m = EndoFieldModel::new("q2", &[0, 1], FieldKind::TotallyReal, 2, &[&[1], &[1]], None, false).unwrap();
        let f = &m.field;
        let a = f.from_i64(&[3]);
        let b = vec![vec![f.zero(), a.clone()], vec![f.neg(&a), f.zero()]];
        let h = cayley(&skew_adjoint(&m, &b).unwrap()).unwrap();
        // (I + A)(I - A)^{-1} with a = 3: [[-8, 6], [-6, -8]] / 10
        let expect = QMat::from_i64_rows(&[vec![-8, 6], vec![-6, -8]]).scale(&(q(1) / q(10)));
        assert_eq!(h, expect);
        assert!(in_centralizer(&m, &build_trace_form(&m), &h));
        let zero = vec![vec![f.zero(); 2]; 2];
        assert_eq!(cayley(&skew_adjoint(&m, &zero).unwrap()).unwrap(), QMat::identity(2));
    }

    #[test]
    fn samples_lie_in_the_centralizer() {
        for name in PRESETS {
            let m = preset(name).unwrap();
            let g = build_trace_form(&m);
            for seed in 0..3 {
                let el = sample_centralizer(&m, seed).unwrap();
                assert!(in_centralizer(&m, &g, &el.h), "{name} seed {seed}");
                assert!(fixed_space_is_e_stable(&m, &el.h));
            }
        }
    }

    #[test]
    fn root_of_unity_examples() {
        let id = QMat::identity(4);
        assert!(has_root_of_unity_eigenvalue(&id, 1));
        assert!(has_root_of_unity_eigenvalue(&id.scale(&q(-1)), 2));
        assert!(!root_of_unity_orders(&id.scale(&q(-1)), 2).any(|m| m == 1));
        assert_eq!(eigenvalue_one_multiplicity(&id), 4);
    }

    #[test]
    fn witnesses_have_no_roots_of_unity() {
        let (m, h) = block_rotation_witness().unwrap();
        assert!(in_centralizer(&m, &build_trace_form(&m), &h));
        assert!(!has_root_of_unity_eigenvalue(&h, order_bound_for_dim(h.rows())));
        let (m, h, e) = cm_norm_one_witness().unwrap();
        let f = &m.field;
        assert_eq!(f.mul(&e, &f.conj(&e)), f.one());
        assert!(in_centralizer(&m, &build_trace_form(&m), &h));
        assert!(!has_root_of_unity_eigenvalue(&h, order_bound_for_dim(h.rows())));
    }

    #[test]
    fn diagonal_congruence_example() {
        for k in 1..4 {
            let g = diagonal_example(3, k);
            // Below N = k every vector is fixed mod 3^N, so W' is arbitrary.
            let run = eigenspace_congruence_test(&g, 3, k, 2, 10, 7);
            assert!(matches!(run.outcome, CongruenceOutcome::Fail { .. }), "{run:?}");
            let run = eigenspace_congruence_test(&g, 3, k + 2, 2, 20, 7);
            assert_eq!(run.outcome, CongruenceOutcome::Pass, "{run:?}");
            let (level, _) = find_congruence_level(&g, 3, 2, 12, 20, 7);
            assert!(level.is_some_and(|n| n <= k + 2));
        }
        let run = eigenspace_congruence_test(&ZMat::identity(3), 3, 2, 2, 5, 1);
        assert_eq!(run.outcome, CongruenceOutcome::Pass);
    }

    #[test]
    fn random_test_matrices_have_requested_fixed_rank() {
        for seed in 0..5 {
            let g = random_test_matrix(6, 2, seed);
            assert_eq!(fixed_multiplicity(&g), 2);
            assert!(is_semisimple(&QMat::from_int(&g)));
        }
    }
}
