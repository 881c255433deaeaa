//! Reconstruction of the characteristic polynomial of Frobenius on H²,
//! `P(T) = ∏ (1 - λ_i T)` of degree 22 with `|λ_i| = p`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::counter::PointCountRecord;
use crate::error::{Error, Result};
use crate::poly;
use crate::roots;

pub const H2_RANK: usize = 22;

/// Numerical tolerance on root moduli.
pub const ROOT_TOLERANCE: f64 = 1e-6;

/// Power sums `s_1..s_k` to coefficients `c_0 = 1, c_1..c_k`.
pub fn newton_coefficients(s: &[BigInt]) -> Result<Vec<BigInt>> {
    newton_coefficients_bounded(s, H2_RANK)
}

pub fn newton_coefficients_bounded(s: &[BigInt], max: usize) -> Result<Vec<BigInt>> {
    if s.len() > max {
        return Err(Error::TooManyTraces { got: s.len(), max });
    }
    let mut c = vec![BigInt::one()];
    for n in 1..=s.len() {
        // n c_n = -(s_n + c_1 s_{n-1} + ... + c_{n-1} s_1)
        let mut acc = s[n - 1].clone();
        for i in 1..n {
            acc += &c[i] * &s[n - 1 - i];
        }
        let (q, r) = (-acc).div_rem(&BigInt::from(n));
        if !r.is_zero() {
            return Err(Error::NonIntegral(n));
        }
        c.push(q);
    }
    Ok(c)
}

/// Power sums `s_1..s_k` of the reciprocal roots of `c` (with `c_0 = 1`).
pub fn power_sums(c: &[BigInt], k: usize) -> Vec<BigInt> {
    let coef = |i: usize| c.get(i).cloned().unwrap_or_default();
    let mut s: Vec<BigInt> = Vec::with_capacity(k);
    for n in 1..=k {
        let mut acc = coef(n) * BigInt::from(n);
        for i in 1..n {
            acc += coef(i) * &s[n - 1 - i];
        }
        s.push(-acc);
    }
    s
}

/// Exact division of a whole polynomial by `factor^multiplicity`.
pub fn divide_known_factor(coeffs: &[BigInt], factor: &[BigInt], multiplicity: u32) -> Result<Vec<BigInt>> {
    let mut cur = coeffs.to_vec();
    for _ in 0..multiplicity {
        cur = poly::div_exact(&cur, factor).ok_or(Error::InexactDivision)?;
    }
    Ok(cur)
}

/// Division of a truncated power series `c_0..c_m` (with `c_0 = 1`) by
/// `factor^multiplicity` (with constant term 1). The quotient is determined
/// to the same precision.
pub fn divide_known_factor_prefix(prefix: &[BigInt], factor: &[BigInt], multiplicity: u32) -> Result<Vec<BigInt>> {
    if factor.first().map(|c| c.is_one()) != Some(true) {
        return Err(Error::Invalid("known factor must have constant term 1".into()));
    }
    let mut cur = prefix.to_vec();
    for _ in 0..multiplicity {
        let mut q: Vec<BigInt> = Vec::with_capacity(cur.len());
        for k in 0..cur.len() {
            let mut v = cur[k].clone();
            for j in 1..=k.min(factor.len() - 1) {
                v -= &factor[j] * &q[k - j];
            }
            q.push(v);
        }
        cur = q;
    }
    Ok(cur)
}

/// Number of leading coefficients `c_1, c_2, …` that a degree-`d`
/// polynomial with sign `eps` needs before the functional equation
/// determines the rest.
pub fn free_coefficients(d: usize, eps: i8) -> usize {
    if d % 2 == 1 {
        (d - 1) / 2
    } else if eps > 0 {
        d / 2
    } else {
        (d / 2).saturating_sub(1)
    }
}

/// Completes `c_0..c_m` to degree `d` by `c_{d-i} = ε q^{d-2i} c_i`.
pub fn complete_by_functional_equation(prefix: &[BigInt], d: usize, q: &BigInt, eps: i8) -> Result<Vec<BigInt>> {
    if eps != 1 && eps != -1 {
        return Err(Error::Invalid(format!("sign must be ±1, got {eps}")));
    }
    let need = free_coefficients(d, eps) + 1;
    if prefix.len() < need {
        return Err(Error::Invalid(format!(
            "prefix of length {} cannot determine a degree-{d} polynomial with sign {eps}",
            prefix.len()
        )));
    }
    if prefix.len() > d + 1 {
        return Err(Error::Invalid(format!("prefix longer than degree {d}")));
    }
    let mut out = vec![BigInt::zero(); d + 1];
    let mut known = vec![false; d + 1];
    for (i, c) in prefix.iter().enumerate() {
        out[i] = c.clone();
        known[i] = true;
    }
    let sign = BigInt::from(eps);
    for i in 0..=d / 2 {
        let j = d - i;
        let factor = &sign * q.pow((j - i) as u32);
        if i == j {
            if eps < 0 {
                if known[i] && !out[i].is_zero() {
                    return Err(Error::FunctionalEquation(format!(
                        "sign -1 forces c_{i} = 0 but the prefix has {}",
                        out[i]
                    )));
                }
                out[i] = BigInt::zero();
                known[i] = true;
            }
            continue;
        }
        match (known[i], known[j]) {
            (true, true) => {
                if out[j] != &factor * &out[i] {
                    return Err(Error::FunctionalEquation(format!(
                        "c_{j} = {} disagrees with the mirror of c_{i} = {}",
                        out[j], out[i]
                    )));
                }
            }
            (true, false) => {
                out[j] = &factor * &out[i];
                known[j] = true;
            }
            (false, _) => unreachable!("prefix covers the lower half"),
        }
    }
    Ok(out)
}

/// Sign `ε` for which `c_{d-i} = ε q^{d-2i} c_i` holds exactly, if any.
pub fn functional_equation_sign(coeffs: &[BigInt], q: &BigInt) -> Option<i8> {
    let d = poly::degree(coeffs)?;
    [1i8, -1].into_iter().find(|&eps| {
        let sign = BigInt::from(eps);
        (0..=d / 2).all(|i| coeffs[d - i] == &sign * q.pow((d - 2 * i) as u32) * &coeffs[i])
    })
}

/// A factor `∏ (1 - p ζ T)` over the primitive `m`-th roots of unity,
/// asserted to divide `P` with the given multiplicity. `m = 1` is the
/// hyperplane factor `1 - pT`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownFactor {
    pub order: u64,
    pub multiplicity: u32,
}

impl KnownFactor {
    pub fn hyperplane() -> Self {
        KnownFactor {
            order: 1,
            multiplicity: 1,
        }
    }

    pub fn polynomial(&self, p: u64) -> Vec<BigInt> {
        poly::scaled_cyclotomic_factor(self.order, &BigInt::from(p))
    }

    pub fn degree(&self) -> usize {
        poly::euler_phi(self.order) as usize * self.multiplicity as usize
    }

    /// Functional-equation sign of the factor.
    pub fn sign(&self) -> i8 {
        if self.order == 1 && self.multiplicity % 2 == 1 {
            -1
        } else {
            1
        }
    }
}

/// Known factors with the hyperplane class always present.
pub fn normalize_known_factors(known: &[KnownFactor]) -> Vec<KnownFactor> {
    let mut out: Vec<KnownFactor> = Vec::new();
    for k in known.iter().filter(|k| k.multiplicity > 0) {
        match out.iter_mut().find(|o| o.order == k.order) {
            Some(o) => o.multiplicity += k.multiplicity,
            None => out.push(*k),
        }
    }
    if !out.iter().any(|k| k.order == 1) {
        out.push(KnownFactor::hyperplane());
    }
    out.sort_by_key(|k| k.order);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SignPolicy {
    #[default]
    Both,
    Plus,
    Minus,
}

impl SignPolicy {
    pub fn signs(self) -> &'static [i8] {
        match self {
            SignPolicy::Both => &[1, -1],
            SignPolicy::Plus => &[1],
            SignPolicy::Minus => &[-1],
        }
    }
}

impl std::str::FromStr for SignPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "both" => Ok(SignPolicy::Both),
            "+" | "plus" | "+1" => Ok(SignPolicy::Plus),
            "-" | "minus" | "-1" => Ok(SignPolicy::Minus),
            _ => Err(Error::Invalid(format!(
                "unknown sign policy {s:?} (expected both, plus, minus)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeilCandidate {
    pub p: u64,
    /// `c_0..c_22`.
    pub coeffs: Vec<BigInt>,
    pub sign: i8,
    pub traces_used: u32,
    pub known_factors: Vec<KnownFactor>,
}

impl WeilCandidate {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reconstruction {
    Candidates(Vec<WeilCandidate>),
    NeedMoreTraces { required: u32, available: u32 },
}

/// Number of traces `reconstruct` needs for the given known factors and signs.
pub fn required_traces(known: &[KnownFactor], policy: SignPolicy) -> usize {
    let known = normalize_known_factors(known);
    let k: usize = known.iter().map(KnownFactor::degree).sum();
    let d = H2_RANK.saturating_sub(k);
    let eps_k: i8 = known.iter().map(KnownFactor::sign).product();
    policy
        .signs()
        .iter()
        .map(|&eps| free_coefficients(d, eps * eps_k))
        .max()
        .unwrap_or(0)
}

pub fn reconstruct(record: &PointCountRecord, known: &[KnownFactor], policy: SignPolicy) -> Result<Reconstruction> {
    reconstruct_traces(record.p, &record.trace_vector(), known, policy)
}

/// Candidates from traces `t_1, t_2, …` at `p`.
pub fn reconstruct_traces(
    p: u64,
    traces: &[BigInt],
    known: &[KnownFactor],
    policy: SignPolicy,
) -> Result<Reconstruction> {
    let known = normalize_known_factors(known);
    let k: usize = known.iter().map(KnownFactor::degree).sum();
    if k > H2_RANK {
        return Err(Error::Invalid(format!(
            "known factors have total degree {k} > {H2_RANK}"
        )));
    }
    let d = H2_RANK - k;
    let required = required_traces(&known, policy);
    if traces.len() < required {
        return Ok(Reconstruction::NeedMoreTraces {
            required: required as u32,
            available: traces.len() as u32,
        });
    }
    let used = &traces[..required.min(H2_RANK)];
    let prefix = newton_coefficients(used)?;

    let mut known_poly = vec![BigInt::one()];
    let mut q_prefix = prefix.clone();
    for f in &known {
        let fp = f.polynomial(p);
        q_prefix = divide_known_factor_prefix(&q_prefix, &fp, f.multiplicity)?;
        known_poly = poly::mul(&known_poly, &poly::pow(&fp, f.multiplicity));
    }
    let eps_k: i8 = known.iter().map(KnownFactor::sign).product();
    let pb = BigInt::from(p);

    let mut out = Vec::new();
    for &eps in policy.signs() {
        let eps_q = eps * eps_k;
        let need = free_coefficients(d, eps_q) + 1;
        let q_full = match complete_by_functional_equation(&q_prefix[..need.min(q_prefix.len())], d, &pb, eps_q) {
            Ok(c) => c,
            Err(Error::FunctionalEquation(_)) => continue,
            Err(e) => return Err(e),
        };
        // Coefficients of Q beyond the ones used must agree with the prefix.
        if q_prefix.iter().zip(&q_full).any(|(a, b)| a != b) {
            continue;
        }
        let mut coeffs = poly::mul(&known_poly, &q_full);
        coeffs.resize(H2_RANK + 1, BigInt::zero());
        let cand = WeilCandidate {
            p,
            coeffs,
            sign: eps,
            traces_used: used.len() as u32,
            known_factors: known.clone(),
        };
        if candidate_defect_traces(&cand, traces).is_none() {
            out.push(cand);
        }
    }
    if out.len() == 2 && out[0].coeffs == out[1].coeffs {
        return Err(Error::Internal("both signs produced the same polynomial".into()));
    }
    if out.is_empty() {
        return Err(Error::Inconsistent(format!(
            "no Weil polynomial at p = {p} is consistent with {} traces and known factors {:?}; \
             the reduction may be singular or a count may be wrong",
            traces.len(),
            known
        )));
    }
    Ok(Reconstruction::Candidates(out))
}

/// Largest deviation of `|λ_i|` from `p` over the reciprocal roots of `P`.
///
/// Cyclotomic-type factors `∏ (1 - p ζ T)` are removed exactly first; the
/// squarefree part of what remains is solved numerically.
pub fn max_root_deviation(coeffs: &[BigInt], p: u64) -> f64 {
    let pb = BigInt::from(p);
    let d = match poly::degree(coeffs) {
        Some(d) => d,
        None => return f64::INFINITY,
    };
    let mut rest = coeffs[..=d].to_vec();
    for m in poly::orders_with_phi_at_most(d as u64) {
        let f = poly::scaled_cyclotomic_factor(m, &pb);
        rest = poly::divide_out(&rest, &f).1;
    }
    if poly::degree(&rest).unwrap_or(0) == 0 {
        return 0.0;
    }
    let sf = poly::rational::squarefree_part(&rest);
    // Roots of sf are 1/λ; roots of sf(T/p) are p/λ, of modulus one.
    roots::scaled_roots(&sf, &pb)
        .iter()
        .map(|z| {
            let lambda = p as f64 / z.norm();
            (lambda - p as f64).abs()
        })
        .fold(0.0, f64::max)
}

/// Why a candidate was rejected, or `None` if it passes.
pub fn candidate_defect(cand: &WeilCandidate, record: &PointCountRecord) -> Option<String> {
    candidate_defect_traces(cand, &record.trace_vector())
}

pub fn candidate_defect_traces(cand: &WeilCandidate, traces: &[BigInt]) -> Option<String> {
    if cand.coeffs.len() != H2_RANK + 1 || !cand.coeffs[0].is_one() {
        return Some("not a degree-22 polynomial with constant term 1".into());
    }
    let pb = BigInt::from(cand.p);
    let eps = BigInt::from(cand.sign);
    for i in 0..=H2_RANK / 2 {
        let j = H2_RANK - i;
        if cand.coeffs[j] != &eps * pb.pow((j - i) as u32) * &cand.coeffs[i] {
            return Some(format!("functional equation fails at c_{j}"));
        }
    }
    let sums = power_sums(&cand.coeffs, traces.len());
    if let Some(n) = sums.iter().zip(traces).position(|(a, b)| a != b) {
        return Some(format!("trace t_{} not reproduced", n + 1));
    }
    let dev = max_root_deviation(&cand.coeffs, cand.p);
    if !(dev <= ROOT_TOLERANCE) {
        return Some(format!("root modulus off by {dev:e}"));
    }
    None
}

/// Integer coefficients (by type), exact functional equation, all traces
/// reproduced, and every `|λ_i|` within tolerance of `p`.
pub fn candidate_filter(cand: &WeilCandidate, record: &PointCountRecord) -> bool {
    candidate_defect(cand, record).is_none()
}

/// `|t_n| ≤ 22 p^n` sanity helper for synthetic data.
pub fn within_weil_bound(t: &BigInt, p: u64, n: u32) -> bool {
    t.abs() <= BigInt::from(p).pow(n) * 22u32
}
