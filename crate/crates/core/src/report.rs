//! The JSON report: schema, emission, and re-derivation from stored counts.

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bounds::{combine_verdict, evaluate_candidate, CandidateEvidence, LowerBound, PicardVerdict, PrimeEvidence};
use crate::counter::traces;
use crate::error::Result;
use crate::surface::{QuarticSurface, SmoothnessStatus};
use crate::weil::{reconstruct, KnownFactor, Reconstruction, SignPolicy};

/// An integer written as a JSON number when it fits in `i64` and as a
/// decimal string otherwise.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactInt(pub BigInt);

impl From<BigInt> for ExactInt {
    fn from(n: BigInt) -> Self {
        ExactInt(n)
    }
}

impl From<&BigInt> for ExactInt {
    fn from(n: &BigInt) -> Self {
        ExactInt(n.clone())
    }
}

impl From<i64> for ExactInt {
    fn from(n: i64) -> Self {
        ExactInt(BigInt::from(n))
    }
}

impl fmt::Display for ExactInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for ExactInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for ExactInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = ExactInt;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a decimal string")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ExactInt, E> {
                Ok(ExactInt(v.into()))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ExactInt, E> {
                Ok(ExactInt(v.into()))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ExactInt, E> {
                v.parse().map(ExactInt).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceInfo {
    pub id: String,
    pub hash: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateReport {
    pub coeffs: Vec<ExactInt>,
    pub sign: i8,
    pub rho_upper: usize,
    pub cyclotomic: Vec<(u64, u32)>,
    pub ordinary: bool,
    pub m_lcm: u64,
    pub delta: Option<ExactInt>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeReport {
    pub p: u64,
    pub smoothness: SmoothnessStatus,
    /// `[n, N_n, t_n]`.
    pub counts: Vec<(u32, u64, i64)>,
    pub candidates: Vec<CandidateReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Justifications {
    pub rho_low: String,
    pub d_low: String,
}

/// A known factor asserted at one prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AssertedFactor {
    pub p: u64,
    pub order: u64,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inputs {
    pub rho_low: usize,
    pub d_low: usize,
    pub justifications: Justifications,
    /// Sign policy used for reconstruction.
    pub sign: SignPolicy,
    /// Factors beyond the hyperplane class, asserted by the user.
    pub known_factors: Vec<AssertedFactor>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub rho_low: usize,
    pub rho_high: usize,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub surface: SurfaceInfo,
    pub assumptions: Vec<String>,
    pub primes: Vec<PrimeReport>,
    pub inputs: Inputs,
    pub verdict: VerdictReport,
}

impl Report {
    /// Pretty JSON with a trailing newline; stable for a given report.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn known_factors_at(&self, p: u64) -> Vec<KnownFactor> {
        known_factors_at(&self.inputs.known_factors, p)
    }
}

pub fn known_factors_at(asserted: &[AssertedFactor], p: u64) -> Vec<KnownFactor> {
    asserted
        .iter()
        .filter(|a| a.p == p)
        .map(|a| KnownFactor {
            order: a.order,
            multiplicity: a.multiplicity,
        })
        .collect()
}

fn candidate_report(c: &CandidateEvidence) -> CandidateReport {
    CandidateReport {
        coeffs: c.candidate.coeffs.iter().map(ExactInt::from).collect(),
        sign: c.candidate.sign,
        rho_upper: c.profile.rho_upper,
        cyclotomic: c.profile.factors.clone(),
        ordinary: c.ordinary,
        m_lcm: c.profile.m_lcm,
        delta: c.delta.as_ref().map(|d| ExactInt::from(d.value())),
    }
}

pub fn prime_report(e: &PrimeEvidence) -> PrimeReport {
    PrimeReport {
        p: e.p,
        smoothness: e.smoothness.clone(),
        counts: e.counts.entries.iter().map(|c| (c.n, c.count, c.trace)).collect(),
        candidates: e.candidates.iter().map(candidate_report).collect(),
    }
}

pub fn emit_report(
    verdict: &PicardVerdict,
    surface: &SurfaceInfo,
    sign: SignPolicy,
    known_factors: &[AssertedFactor],
) -> Report {
    let primes = verdict.evidence.iter().map(prime_report).collect();
    let mut known_factors = known_factors.to_vec();
    known_factors.sort();
    Report {
        surface: surface.clone(),
        assumptions: verdict.assumptions.clone(),
        primes,
        inputs: Inputs {
            rho_low: verdict.rho_low.value,
            d_low: verdict.d_low.value,
            justifications: Justifications {
                rho_low: verdict.rho_low.justification.clone(),
                d_low: verdict.d_low.justification.clone(),
            },
            sign,
            known_factors,
        },
        verdict: VerdictReport {
            rho_low: verdict.rho_low.value,
            rho_high: verdict.rho_high,
            exact: verdict.exact,
        },
    }
}

impl SurfaceInfo {
    pub fn of(surface: &QuarticSurface) -> Self {
        SurfaceInfo {
            id: surface.id.clone(),
            hash: surface.content_hash(),
        }
    }
}

/// Evidence for one prime from its counts alone.
pub fn prime_evidence(
    p: u64,
    surface_id: &str,
    smoothness: SmoothnessStatus,
    counts: &[(u32, u64)],
    known: &[KnownFactor],
    sign: SignPolicy,
) -> Result<PrimeEvidence> {
    if smoothness.is_singular() || counts.is_empty() {
        return Ok(PrimeEvidence {
            p,
            smoothness,
            counts: traces(p, surface_id, counts)?,
            candidates: Vec::new(),
            need_traces: None,
        });
    }
    let record = traces(p, surface_id, counts)?;
    let (candidates, need_traces) = match reconstruct(&record, known, sign)? {
        Reconstruction::Candidates(cands) => (cands.iter().map(evaluate_candidate).collect::<Result<Vec<_>>>()?, None),
        Reconstruction::NeedMoreTraces { required, .. } => (Vec::new(), Some(required)),
    };
    Ok(PrimeEvidence {
        p,
        smoothness,
        counts: record,
        candidates,
        need_traces,
    })
}

/// Rebuilds the evidence of `report` from its stored counts.
pub fn evidence_from_report(report: &Report) -> Result<Vec<PrimeEvidence>> {
    report
        .primes
        .iter()
        .map(|pr| {
            let counts: Vec<(u32, u64)> = pr.counts.iter().map(|&(n, c, _)| (n, c)).collect();
            prime_evidence(
                pr.p,
                &report.surface.id,
                pr.smoothness.clone(),
                &counts,
                &report.known_factors_at(pr.p),
                report.inputs.sign,
            )
        })
        .collect()
}

/// Recombines the evidence of `report` under new lower bounds.
pub fn recombine(report: &Report, rho_low: LowerBound, d_low: LowerBound) -> Result<Report> {
    let evidence = evidence_from_report(report)?;
    let verdict = combine_verdict(rho_low, d_low, evidence)?;
    Ok(emit_report(
        &verdict,
        &report.surface,
        report.inputs.sign,
        &report.inputs.known_factors,
    ))
}

/// Differences between `report` and what its counts imply; empty when the
/// report checks out.
pub fn verify_report(report: &Report) -> Result<Vec<String>> {
    let rho_low = LowerBound {
        value: report.inputs.rho_low,
        justification: report.inputs.justifications.rho_low.clone(),
    };
    let d_low = LowerBound {
        value: report.inputs.d_low,
        justification: report.inputs.justifications.d_low.clone(),
    };
    let fresh = match recombine(report, rho_low, d_low) {
        Ok(r) => r,
        Err(e) => return Ok(vec![format!("re-derivation failed: {e}")]),
    };
    let mut diffs = Vec::new();
    if fresh.primes.len() != report.primes.len() {
        diffs.push("prime list differs".to_string());
    }
    for (a, b) in report.primes.iter().zip(&fresh.primes) {
        if a.counts != b.counts {
            diffs.push(format!("p = {}: stored traces disagree with stored counts", a.p));
        }
        if a.candidates.len() != b.candidates.len() {
            diffs.push(format!(
                "p = {}: {} candidates stored, {} re-derived",
                a.p,
                a.candidates.len(),
                b.candidates.len()
            ));
            continue;
        }
        for (i, (ca, cb)) in a.candidates.iter().zip(&b.candidates).enumerate() {
            let fields = [
                ("coeffs", ca.coeffs != cb.coeffs),
                ("sign", ca.sign != cb.sign),
                ("rho_upper", ca.rho_upper != cb.rho_upper),
                ("cyclotomic", ca.cyclotomic != cb.cyclotomic),
                ("ordinary", ca.ordinary != cb.ordinary),
                ("m_lcm", ca.m_lcm != cb.m_lcm),
                ("delta", ca.delta != cb.delta),
            ];
            for (name, differs) in fields {
                if differs {
                    diffs.push(format!("p = {}: candidate {i}: {name} differs", a.p));
                }
            }
        }
    }
    if fresh.assumptions != report.assumptions {
        diffs.push("assumptions differ".to_string());
    }
    if fresh.verdict != report.verdict {
        diffs.push(format!(
            "verdict differs: stored [{}, {}], re-derived [{}, {}]",
            report.verdict.rho_low, report.verdict.rho_high, fresh.verdict.rho_low, fresh.verdict.rho_high
        ));
    }
    Ok(diffs)
}

/// Plain-text summary of a report.
pub fn summary(report: &Report) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let id = if report.surface.id.is_empty() {
        "(unnamed)"
    } else {
        &report.surface.id
    };
    writeln!(out, "surface {id}  sha256 {}", report.surface.hash).unwrap();
    for pr in &report.primes {
        let n = pr.counts.len();
        if pr.smoothness.is_singular() {
            writeln!(out, "  p = {:>3}: singular reduction, dropped", pr.p).unwrap();
            continue;
        }
        if pr.candidates.is_empty() {
            writeln!(
                out,
                "  p = {:>3}: {n} counts, not enough traces for a Weil polynomial",
                pr.p
            )
            .unwrap();
            continue;
        }
        let cands: Vec<String> = pr
            .candidates
            .iter()
            .map(|c| {
                let delta = c.delta.as_ref().map_or("?".to_string(), |d| d.to_string());
                format!(
                    "sign {:+}: rho <= {}, delta {delta}{}",
                    c.sign,
                    c.rho_upper,
                    if c.ordinary { ", ordinary" } else { "" }
                )
            })
            .collect();
        writeln!(out, "  p = {:>3}: {n} counts; {}", pr.p, cands.join("; ")).unwrap();
    }
    let v = &report.verdict;
    if v.exact {
        writeln!(out, "geometric Picard number = {}", v.rho_low).unwrap();
    } else {
        writeln!(out, "{} <= geometric Picard number <= {}", v.rho_low, v.rho_high).unwrap();
    }
    writeln!(out, "conditional on:").unwrap();
    for a in &report.assumptions {
        writeln!(out, "  - {a}").unwrap();
    }
    out
}
