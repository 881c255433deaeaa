//! Upper bounds on the geometric Picard number from a Weil polynomial,
//! Artin–Tate discriminant square classes, and the combined verdict.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::counter::PointCountRecord;
use crate::error::{Error, Result};
use crate::linalg::ZMat;
use crate::poly;
use crate::surface::SmoothnessStatus;
use crate::weil::{KnownFactor, WeilCandidate};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclotomicProfile {
    /// `(m, multiplicity)` of the factors `∏_{ord ζ = m} (1 - s ζ T)`.
    pub factors: Vec<(u64, u32)>,
    pub remainder_degree: usize,
    pub rho_upper: usize,
    pub m_lcm: u64,
}

/// Profile of `P` relative to the scale `s`: trial division by
/// `∏ (1 - s ζ T)` for every order `m` with `φ(m) ≤ deg P`.
pub fn cyclotomic_profile_scaled(coeffs: &[BigInt], s: &BigInt) -> Result<(CyclotomicProfile, Vec<BigInt>)> {
    let d = poly::degree(coeffs).ok_or_else(|| Error::Invalid("zero polynomial".into()))?;
    let mut rest = coeffs[..=d].to_vec();
    let mut factors = Vec::new();
    let mut rho = 0usize;
    let mut m_lcm = 1u64;
    for m in poly::orders_with_phi_at_most(d as u64) {
        let f = poly::scaled_cyclotomic_factor(m, s);
        let (k, q) = poly::divide_out(&rest, &f);
        if k > 0 {
            rest = q;
            factors.push((m, k));
            rho += k as usize * poly::euler_phi(m) as usize;
            m_lcm = m_lcm.lcm(&m);
        }
    }
    let remainder_degree = poly::degree(&rest).unwrap_or(0);
    if rho + remainder_degree != d {
        return Err(Error::Internal(format!(
            "profile degrees do not add up: {rho} + {remainder_degree} != {d}"
        )));
    }
    if rho == 0 || rho % 2 == 1 {
        return Err(Error::Internal(format!(
            "cyclotomic part has degree {rho}; it must be even and at least 1"
        )));
    }
    Ok((
        CyclotomicProfile {
            factors,
            remainder_degree,
            rho_upper: rho,
            m_lcm,
        },
        rest,
    ))
}

pub fn cyclotomic_profile(cand: &WeilCandidate) -> Result<CyclotomicProfile> {
    Ok(cyclotomic_profile_scaled(&cand.coeffs, &BigInt::from(cand.p))?.0)
}

/// Integer companion matrix of `T^d P(1/T) = ∏ (T - λ_i)`.
fn companion(coeffs: &[BigInt]) -> ZMat {
    let d = coeffs.len() - 1;
    let mut c = ZMat::zeros(d, d);
    for i in 1..d {
        c[(i, i - 1)] = BigInt::one();
    }
    // Monic reversed polynomial: X^d + c_1 X^{d-1} + ... + c_d.
    for i in 0..d {
        c[(i, d - 1)] = -coeffs[d - i].clone();
    }
    c
}

/// `∏ (1 - λ_i^m T)` from `P = ∏ (1 - λ_i T)` with `c_0 = 1`.
pub fn power_char_poly(coeffs: &[BigInt], m: u64) -> Vec<BigInt> {
    assert!(m >= 1);
    let d = poly::degree(coeffs).unwrap_or(0);
    if d == 0 || m == 1 {
        return coeffs[..=d].to_vec();
    }
    let cm = companion(&coeffs[..=d]).pow(m);
    let mut cp = cm.charpoly();
    cp.reverse();
    cp
}

/// A class in ℚ*/(ℚ*)², represented by its squarefree integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SquareClass(BigInt);

impl SquareClass {
    pub fn of_integer(n: &BigInt) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::Invalid("zero has no square class".into()));
        }
        Ok(SquareClass(arith::squarefree_part(n)?))
    }

    /// `a / b ≡ a · b`.
    pub fn of_rational(x: &BigRational) -> Result<Self> {
        Self::of_integer(&(x.numer() * x.denom()))
    }

    pub fn value(&self) -> &BigInt {
        &self.0
    }

    pub fn same_class(a: &BigRational, b: &BigRational) -> bool {
        let prod = a * b;
        !prod.is_zero() && arith::is_perfect_square(&(prod.numer() * prod.denom()))
    }
}

impl std::fmt::Display for SquareClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivisionMethod {
    /// Long division from the leading coefficient.
    Long,
    /// Power-series division from the constant term.
    Series,
}

/// `δ ≡ (-1)^{ρ-1} q R(1/q)` where `P_m = (1 - qT)^ρ R`.
///
/// `R(1/q)` is positive once every cyclotomic eigenvalue has become `q`,
/// so the sign is that of a discriminant of signature `(1, ρ - 1)`.
pub fn artin_tate_squareclass(pm: &[BigInt], qm: &BigInt, rho: usize) -> Result<SquareClass> {
    artin_tate_squareclass_with(pm, qm, rho, DivisionMethod::Long)
}

pub fn artin_tate_squareclass_with(
    pm: &[BigInt],
    qm: &BigInt,
    rho: usize,
    method: DivisionMethod,
) -> Result<SquareClass> {
    let d = poly::degree(pm).ok_or_else(|| Error::Invalid("zero polynomial".into()))?;
    if rho > d {
        return Err(Error::InexactDivision);
    }
    let lin = vec![BigInt::one(), -qm.clone()];
    let r = match method {
        DivisionMethod::Long => crate::weil::divide_known_factor(&pm[..=d], &lin, rho as u32)?,
        DivisionMethod::Series => {
            let q = crate::weil::divide_known_factor_prefix(&pm[..=d], &lin, rho as u32)?;
            if q[d - rho + 1..].iter().any(|c| !c.is_zero()) {
                return Err(Error::InexactDivision);
            }
            q[..=d - rho].to_vec()
        }
    };
    let dr = r.len() - 1;
    // q^D R(1/q) = Σ r_i q^{D-i}
    let v = r
        .iter()
        .enumerate()
        .fold(BigInt::zero(), |acc, (i, c)| acc + c * qm.pow((dr - i) as u32));
    if v.is_zero() {
        return Err(Error::Inconsistent(format!(
            "R(1/{qm}) = 0: the factor (1 - {qm}T)^{rho} is not maximal"
        )));
    }
    // q R(1/q) = V q^{1-D}; q^{1-D} is a square when D is odd.
    let n = if dr % 2 == 1 { v } else { v * qm };
    let n = if rho.is_multiple_of(2) { -n } else { n };
    SquareClass::of_integer(&n)
}

/// Vertices `(i, v_p(c_i))` of the lower convex hull of the finite points.
pub fn newton_polygon(coeffs: &[BigInt], p: u64) -> Vec<(usize, u32)> {
    let pts: Vec<(usize, u32)> = coeffs
        .iter()
        .enumerate()
        .filter_map(|(i, c)| arith::valuation(c, p).map(|v| (i, v)))
        .collect();
    let mut hull: Vec<(usize, u32)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // Drop b if it lies on or above segment a → pt.
            let cross = (b.0 as i64 - a.0 as i64) * (pt.1 as i64 - a.1 as i64)
                - (b.1 as i64 - a.1 as i64) * (pt.0 as i64 - a.0 as i64);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    hull
}

/// Horizontal length of the slope-0 part of the Newton polygon.
pub fn slope_zero_length(coeffs: &[BigInt], p: u64) -> usize {
    let hull = newton_polygon(coeffs, p);
    match hull.as_slice() {
        [(0, 0), (i, 0), ..] => *i,
        _ => 0,
    }
}

pub fn ordinarity_check(cand: &WeilCandidate) -> bool {
    slope_zero_length(&cand.coeffs, cand.p) == 1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateEvidence {
    pub candidate: WeilCandidate,
    pub profile: CyclotomicProfile,
    pub ordinary: bool,
    pub delta: Option<SquareClass>,
    /// Why `delta` is missing, if it is.
    pub delta_note: Option<String>,
}

pub fn evaluate_candidate(cand: &WeilCandidate) -> Result<CandidateEvidence> {
    let profile = cyclotomic_profile(cand)?;
    let ordinary = ordinarity_check(cand);
    let m = profile.m_lcm;
    let pm = power_char_poly(&cand.coeffs, m);
    let qm = BigInt::from(cand.p).pow(m as u32);
    let (delta, delta_note) = match artin_tate_squareclass(&pm, &qm, profile.rho_upper) {
        Ok(d) => (Some(d), None),
        Err(e @ (Error::InexactDivision | Error::Inconsistent(_))) => return Err(e),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(CandidateEvidence {
        candidate: cand.clone(),
        profile,
        ordinary,
        delta,
        delta_note,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeEvidence {
    pub p: u64,
    pub smoothness: SmoothnessStatus,
    pub counts: PointCountRecord,
    pub candidates: Vec<CandidateEvidence>,
    /// Set when the counts do not yet determine any candidate.
    pub need_traces: Option<u32>,
}

impl PrimeEvidence {
    /// The weakest upper bound over this prime's candidates.
    pub fn rho_upper(&self) -> Option<usize> {
        self.candidates.iter().map(|c| c.profile.rho_upper).max()
    }

    /// The common `rho_upper` if every candidate agrees.
    fn uniform_rho(&self) -> Option<usize> {
        let first = self.candidates.first()?.profile.rho_upper;
        self.candidates
            .iter()
            .all(|c| c.profile.rho_upper == first)
            .then_some(first)
    }

    fn deltas(&self) -> Option<Vec<&SquareClass>> {
        self.candidates.iter().map(|c| c.delta.as_ref()).collect()
    }

    pub fn ordinary(&self) -> bool {
        !self.candidates.is_empty() && self.candidates.iter().all(|c| c.ordinary)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerBound {
    pub value: usize,
    pub justification: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PicardVerdict {
    pub rho_low: LowerBound,
    pub d_low: LowerBound,
    pub evidence: Vec<PrimeEvidence>,
    pub rho_high: usize,
    pub exact: bool,
    /// Primes whose discriminant mismatch lowered the bound.
    pub mismatch: Option<(u64, u64)>,
    pub assumptions: Vec<String>,
}

pub const TATE_ASSUMPTION: &str = "upper bounds take the geometric Picard number of each reduction used \
to equal the number of Frobenius eigenvalues of the form p times a root of unity (Tate conjecture)";
pub const ARTIN_TATE_ASSUMPTION: &str = "discriminant square classes come from the Artin-Tate formula \
for a K3 surface, with the Brauer group order discarded as a square";
pub const GOOD_REDUCTION_ASSUMPTION: &str = "good reduction at each prime used is taken to be smooth \
reduction of the given quartic model";

fn assumptions_for(evidence: &[PrimeEvidence]) -> Vec<String> {
    let mut out = vec![
        TATE_ASSUMPTION.to_string(),
        ARTIN_TATE_ASSUMPTION.to_string(),
        GOOD_REDUCTION_ASSUMPTION.to_string(),
    ];
    for e in evidence.iter().filter(|e| !e.candidates.is_empty()) {
        out.push(if e.ordinary() {
            format!(
                "p = {}: reduction is ordinary, so the Tate conjecture holds for it",
                e.p
            )
        } else {
            format!("p = {}: reduction is not ordinary; the Tate conjecture is assumed", e.p)
        });
        if let SmoothnessStatus::NoSingularPointUpToDegree { degree, caveat } = &e.smoothness {
            out.push(format!(
                "p = {}: searched extensions up to degree {degree}: {caveat}",
                e.p
            ));
        }
        let extra: Vec<KnownFactor> = e.candidates[0]
            .candidate
            .known_factors
            .iter()
            .filter(|k| *k != &KnownFactor::hyperplane())
            .copied()
            .collect();
        if !extra.is_empty() {
            let list: Vec<String> = extra
                .iter()
                .map(|k| format!("(m={}, k={})", k.order, k.multiplicity))
                .collect();
            out.push(format!(
                "p = {}: user-asserted algebraic factors {} were imposed without internal justification",
                e.p,
                list.join(", ")
            ));
        }
    }
    out
}

/// The combined interval `[rho_low, rho_high]`.
///
/// `rho_high` is the smallest per-prime bound (each prime contributing the
/// largest bound over its candidates). Two primes whose candidates all give
/// the same bound `r` and whose discriminant classes are disjoint show that
/// neither specialization is surjective, which lowers the bound to
/// `r - d_low`.
pub fn combine_verdict(rho_low: LowerBound, d_low: LowerBound, evidence: Vec<PrimeEvidence>) -> Result<PicardVerdict> {
    if rho_low.value < 1 {
        return Err(Error::Invalid("rho_low must be at least 1".into()));
    }
    if d_low.value < 1 {
        return Err(Error::Invalid("d_low must be at least 1".into()));
    }
    let mut rho_high = crate::weil::H2_RANK;
    for e in &evidence {
        if let Some(r) = e.rho_upper() {
            rho_high = rho_high.min(r);
        }
    }
    let mut mismatch = None;
    for (i, a) in evidence.iter().enumerate() {
        for b in &evidence[i + 1..] {
            let (Some(ra), Some(rb)) = (a.uniform_rho(), b.uniform_rho()) else {
                continue;
            };
            let (Some(da), Some(db)) = (a.deltas(), b.deltas()) else {
                continue;
            };
            if ra != rb || da.iter().any(|x| db.contains(x)) {
                continue;
            }
            let bound = ra.saturating_sub(d_low.value);
            if bound < rho_high {
                rho_high = bound;
                mismatch = Some((a.p, b.p));
            }
        }
    }
    if rho_low.value > rho_high {
        return Err(Error::Inconsistent(format!(
            "lower bound {} exceeds the upper bound {rho_high}; a lower bound or an assumption is wrong",
            rho_low.value
        )));
    }
    let assumptions = assumptions_for(&evidence);
    Ok(PicardVerdict {
        exact: rho_low.value == rho_high,
        rho_low,
        d_low,
        evidence,
        rho_high,
        mismatch,
        assumptions,
    })
}
