//! Quartic surfaces in P³ over ℚ and their reductions modulo primes.
//!
//! Monomials `x^a y^b z^c w^d` with `a + b + c + d = 4` are kept in a fixed
//! graded reverse lexicographic order ([`monomials`]); coefficient vectors are
//! indexed by position in that list.

use std::fmt::Write as _;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gf::{is_prime, FieldTable, LogElem};
use crate::upoly::{self, UPoly};

pub type Exponent = [u8; 4];

/// Number of degree-4 monomials in four variables.
pub const MONOMIAL_COUNT: usize = 35;

/// Attached to every smoothness verdict that is not a singularity certificate.
pub const SMOOTHNESS_CAVEAT: &str = "no singular point found over the searched extensions; \
this is a bounded search, not a proof of smoothness";

/// All degree-`deg` monomials in grevlex order, largest first.
pub fn monomials_of_degree(deg: u8) -> Vec<Exponent> {
    let mut out = Vec::new();
    for a in 0..=deg {
        for b in 0..=deg - a {
            for c in 0..=deg - a - b {
                out.push([a, b, c, deg - a - b - c]);
            }
        }
    }
    out.sort_by(|u, v| grevlex_cmp(v, u));
    out
}

/// Graded reverse lexicographic comparison of exponent vectors.
pub fn grevlex_cmp(u: &Exponent, v: &Exponent) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    let du: u32 = u.iter().map(|&e| e as u32).sum();
    let dv: u32 = v.iter().map(|&e| e as u32).sum();
    if du != dv {
        return du.cmp(&dv);
    }
    for i in (0..4).rev() {
        if u[i] != v[i] {
            // The monomial with the smaller exponent in the last differing
            // variable is the larger one.
            return if u[i] < v[i] { Ordering::Greater } else { Ordering::Less };
        }
    }
    Ordering::Equal
}

pub fn monomials() -> &'static [Exponent] {
    static CELL: OnceLock<Vec<Exponent>> = OnceLock::new();
    CELL.get_or_init(|| monomials_of_degree(4))
}

pub fn monomial_index(e: &Exponent) -> Option<usize> {
    monomials().iter().position(|m| m == e)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuarticSurface {
    pub id: String,
    coeffs: Vec<BigInt>,
}

impl QuarticSurface {
    /// Builds a normalized surface from `(exponent, coefficient)` pairs.
    pub fn from_terms<I>(id: impl Into<String>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponent, BigInt)>,
    {
        let mut coeffs = vec![BigInt::zero(); MONOMIAL_COUNT];
        for (e, c) in terms {
            let idx = monomial_index(&e).ok_or_else(|| Error::Invalid(format!("{e:?} is not a quartic monomial")))?;
            coeffs[idx] += c;
        }
        Self::from_coeffs(id, coeffs)
    }

    /// Builds a normalized surface from the 35 coefficients in grevlex order.
    pub fn from_coeffs(id: impl Into<String>, mut coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.len() != MONOMIAL_COUNT {
            return Err(Error::Invalid(format!(
                "expected {MONOMIAL_COUNT} coefficients, got {}",
                coeffs.len()
            )));
        }
        let content = coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if content.is_zero() {
            return Err(Error::ZeroSurface);
        }
        let first = coeffs.iter().find(|c| !c.is_zero()).unwrap();
        let divisor = if first.is_negative() { -content } else { content };
        for c in coeffs.iter_mut() {
            *c = &*c / &divisor;
        }
        Ok(QuarticSurface { id: id.into(), coeffs })
    }

    pub fn fermat() -> Self {
        let one = BigInt::from(1);
        Self::from_terms(
            "fermat",
            [[4, 0, 0, 0], [0, 4, 0, 0], [0, 0, 4, 0], [0, 0, 0, 4]].map(|e| (e, one.clone())),
        )
        .expect("Fermat quartic is nonzero")
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, e: &Exponent) -> BigInt {
        monomial_index(e).map(|i| self.coeffs[i].clone()).unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exponent, &BigInt)> {
        monomials()
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (*e, c))
    }

    /// Text form: optional `id:` line, then `a b c d : coeff` per nonzero
    /// monomial in grevlex order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.id.is_empty() {
            writeln!(out, "id: {}", self.id).unwrap();
        }
        out.push_str(&self.body_text());
        out
    }

    fn body_text(&self) -> String {
        let mut out = String::new();
        for (e, c) in self.terms() {
            writeln!(out, "{} {} {} {} : {}", e[0], e[1], e[2], e[3], c).unwrap();
        }
        out
    }

    /// SHA-256 of the monomial lines (the id is not part of the content).
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.body_text().as_bytes()))
    }

    pub fn reduce_mod_p(&self, p: u64) -> Result<SurfaceModP> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let pb = BigInt::from(p);
        let coeffs: Vec<u64> = self.coeffs.iter().map(|c| c.mod_floor(&pb).to_u64().unwrap()).collect();
        // Content normalization makes this unreachable.
        if coeffs.iter().all(|&c| c == 0) {
            return Err(Error::ZeroReduction(p));
        }
        Ok(SurfaceModP {
            p,
            coeffs,
            smoothness: SmoothnessStatus::Unchecked,
        })
    }
}

impl std::str::FromStr for QuarticSurface {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_surface(s)
    }
}

pub fn parse_surface(text: &str) -> Result<QuarticSurface> {
    let mut id = String::new();
    let mut coeffs = vec![BigInt::zero(); MONOMIAL_COUNT];
    let mut seen = [false; MONOMIAL_COUNT];
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |msg: String| Error::Parse { line: lineno + 1, msg };
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("id:") {
            id = rest.trim().to_string();
            continue;
        }
        let (lhs, rhs) = line
            .split_once(':')
            .ok_or_else(|| err("expected `a b c d : coefficient`".into()))?;
        let exps: Vec<u8> = lhs
            .split_whitespace()
            .map(|t| t.parse::<u8>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| err(format!("bad exponent: {e}")))?;
        if exps.len() != 4 {
            return Err(err(format!("expected 4 exponents, got {}", exps.len())));
        }
        let sum: u32 = exps.iter().map(|&e| e as u32).sum();
        if sum != 4 {
            return Err(err(format!("exponents sum to {sum}, not 4")));
        }
        let e: Exponent = [exps[0], exps[1], exps[2], exps[3]];
        let c: BigInt = rhs.trim().parse().map_err(|e| err(format!("bad coefficient: {e}")))?;
        let idx = monomial_index(&e).unwrap();
        if seen[idx] {
            return Err(err(format!("duplicate monomial {e:?}")));
        }
        seen[idx] = true;
        coeffs[idx] = c;
    }
    QuarticSurface::from_coeffs(id, coeffs)
}

/// A projective point with coordinates in `F_{p^degree}` (integer encoding).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldPoint {
    pub degree: u32,
    pub coords: [u32; 4],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SmoothnessStatus {
    CertifiedSingular { witness: FieldPoint },
    NoSingularPointUpToDegree { degree: u32, caveat: String },
    Unchecked,
}

impl SmoothnessStatus {
    pub fn is_singular(&self) -> bool {
        matches!(self, SmoothnessStatus::CertifiedSingular { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceModP {
    pub p: u64,
    coeffs: Vec<u64>,
    pub smoothness: SmoothnessStatus,
}

/// Limits for [`SurfaceModP::check_smooth`].
#[derive(Debug, Clone, Copy)]
pub struct SmoothSearch {
    pub k_max: u32,
    /// Extensions larger than this are not searched.
    pub max_field_size: u64,
}

impl Default for SmoothSearch {
    fn default() -> Self {
        SmoothSearch {
            k_max: 4,
            max_field_size: 1024,
        }
    }
}

impl SurfaceModP {
    /// Builds a reduction directly from 35 residues (grevlex order).
    pub fn from_residues(p: u64, coeffs: Vec<u64>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if coeffs.len() != MONOMIAL_COUNT {
            return Err(Error::Invalid("expected 35 residues".into()));
        }
        let coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % p).collect();
        if coeffs.iter().all(|&c| c == 0) {
            return Err(Error::ZeroReduction(p));
        }
        Ok(SurfaceModP {
            p,
            coeffs,
            smoothness: SmoothnessStatus::Unchecked,
        })
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, e: &Exponent) -> u64 {
        monomial_index(e).map(|i| self.coeffs[i]).unwrap_or(0)
    }

    /// The quartic form over `F_{p^n}` in the log domain.
    pub fn form(&self, field: &FieldTable) -> Form {
        Form::new(
            field,
            monomials()
                .iter()
                .zip(&self.coeffs)
                .filter(|(_, &c)| c != 0)
                .map(|(e, &c)| (*e, c as i64)),
        )
    }

    /// Partial derivative `∂f/∂x_var` as a cubic form.
    pub fn partial(&self, field: &FieldTable, var: usize) -> Form {
        let terms = monomials()
            .iter()
            .zip(&self.coeffs)
            .filter(|(e, &c)| c != 0 && e[var] > 0)
            .map(|(e, &c)| {
                let mut d = *e;
                d[var] -= 1;
                (d, c as i64 * e[var] as i64)
            });
        Form::new(field, terms)
    }

    /// Evaluates `f` at a point with integer-encoded coordinates.
    pub fn eval(&self, field: &FieldTable, point: &[u32; 4]) -> u32 {
        self.form(field).eval(field, point)
    }

    /// Searches for a common zero of `f` and its partials over `F_{p^m}`,
    /// `m = 1..=k_max`. Stores and returns the status.
    pub fn check_smooth(&mut self, search: SmoothSearch) -> Result<SmoothnessStatus> {
        let mut reached = 0;
        for m in 1..=search.k_max {
            let q = match self.p.checked_pow(m) {
                Some(q) if q <= search.max_field_size => q,
                _ => {
                    log::info!(
                        "smoothness search for p = {} stopped before degree {m}: field too large",
                        self.p
                    );
                    break;
                }
            };
            let field = FieldTable::new(self.p, m)?;
            debug_assert_eq!(field.size() as u64, q);
            if let Some(point) = self.find_singular_point(&field) {
                let status = SmoothnessStatus::CertifiedSingular {
                    witness: FieldPoint {
                        degree: m,
                        coords: point,
                    },
                };
                self.smoothness = status.clone();
                return Ok(status);
            }
            reached = m;
        }
        let status = SmoothnessStatus::NoSingularPointUpToDegree {
            degree: reached,
            caveat: SMOOTHNESS_CAVEAT.to_string(),
        };
        self.smoothness = status.clone();
        Ok(status)
    }

    /// Returns a projective point over `field` where `f` and all partials
    /// vanish, if there is one.
    pub fn find_singular_point(&self, field: &FieldTable) -> Option<[u32; 4]> {
        let mut forms = vec![self.form(field)];
        forms.extend((0..4).map(|v| self.partial(field, v)));
        let q = field.size();
        let check = |lead: &[u32; 3], chart: usize| -> Option<u32> {
            let mut g = UPoly::zero(field);
            for form in &forms {
                let r = form.restrict(field, chart, lead);
                g = upoly::gcd(field, &g, &r);
                if g.degree() == Some(0) {
                    return None;
                }
            }
            match g.degree() {
                None => Some(0),
                Some(0) => None,
                Some(_) => (0..q).find(|&w| g.eval(field, field.to_log(w)) == field.zero_log()),
            }
        };
        for y in 0..q {
            for z in 0..q {
                if let Some(w) = check(&[1, y, z], 0) {
                    return Some([1, y, z, w]);
                }
            }
        }
        for z in 0..q {
            if let Some(w) = check(&[0, 1, z], 1) {
                return Some([0, 1, z, w]);
            }
        }
        if let Some(w) = check(&[0, 0, 1], 2) {
            return Some([0, 0, 1, w]);
        }
        let at_w = [0, 0, 0, 1];
        forms.iter().all(|f| f.eval(field, &at_w) == 0).then_some(at_w)
    }
}

/// A homogeneous form over `F_q` with log-domain coefficients.
#[derive(Debug, Clone)]
pub struct Form {
    terms: Vec<(Exponent, LogElem)>,
}

impl Form {
    pub fn new<I>(field: &FieldTable, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponent, i64)>,
    {
        let zero = field.zero_log();
        let terms = terms
            .into_iter()
            .map(|(e, c)| (e, field.log_of_int(c)))
            .filter(|&(_, l)| l != zero)
            .collect();
        Form { terms }
    }

    pub fn terms(&self) -> &[(Exponent, LogElem)] {
        &self.terms
    }

    /// Evaluates at integer-encoded coordinates; returns an integer element.
    pub fn eval(&self, field: &FieldTable, point: &[u32; 4]) -> u32 {
        let logs = point.map(|x| field.to_log(x));
        let mut acc = field.zero_log();
        for (e, c) in &self.terms {
            let mut t = *c;
            for i in 0..4 {
                if e[i] > 0 {
                    t = field.mul_log(t, field.pow_log(logs[i], e[i] as u64));
                }
            }
            acc = field.add_log(acc, t);
        }
        field.from_log(acc)
    }

    /// Univariate polynomial in the last coordinate after fixing the leading
    /// ones. `chart` 0: `x = lead[0] (=1), y, z`; 1: `x = 0, y = 1, z`;
    /// 2: `x = y = 0, z = 1`. `lead` holds integer-encoded `(x, y, z)`.
    pub fn restrict(&self, field: &FieldTable, chart: usize, lead: &[u32; 3]) -> UPoly {
        let logs = lead.map(|x| field.to_log(x));
        let mut coeffs = [field.zero_log(); 5];
        'terms: for (e, c) in &self.terms {
            let mut t = *c;
            for i in 0..3 {
                if e[i] > 0 {
                    let zero_coord = match chart {
                        1 => i == 0,
                        2 => i < 2,
                        _ => false,
                    };
                    if zero_coord {
                        continue 'terms;
                    }
                    t = field.mul_log(t, field.pow_log(logs[i], e[i] as u64));
                }
            }
            let d = e[3] as usize;
            coeffs[d] = field.add_log(coeffs[d], t);
        }
        UPoly::from_logs(field, coeffs)
    }
}
