//! Point counts `N_n = #X(F_{p^n})` and Frobenius traces on H².
//!
//! P³ is split into four affine charts: `x = 1`; `x = 0, y = 1`;
//! `x = y = 0, z = 1`; and the point `(0:0:0:1)`. In each chart the leading
//! coordinates are enumerated and the form becomes a univariate polynomial in
//! `w`, whose roots in `F_q` are counted with [`upoly::count_roots`].

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{FieldTable, LogElem};
use crate::surface::SurfaceModP;
use crate::upoly::{self, UPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CountStats {
    /// Projective points on the surface.
    pub points: u64,
    /// Projective points of P³ accounted for.
    pub scanned: u64,
}

impl std::ops::Add for CountStats {
    type Output = CountStats;

    fn add(self, rhs: CountStats) -> CountStats {
        CountStats {
            points: self.points + rhs.points,
            scanned: self.scanned + rhs.scanned,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CountOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
    /// Number of slices of the leading coordinate; `0` picks a default.
    pub slices: usize,
}

/// The quartic prepared for enumeration over one field.
pub struct ChartForms<'a> {
    field: &'a FieldTable,
    // chart x = 1: coefficient of y^b z^c w^d at [b][c][d]
    affine: [[[LogElem; 5]; 5]; 5],
    // chart x = 0, y = 1: coefficient of z^c w^d at [c][d]
    plane: [[LogElem; 5]; 5],
    // chart x = y = 0, z = 1: coefficient of w^d
    line: [LogElem; 5],
    // f(0, 0, 0, 1)
    corner: LogElem,
}

impl<'a> ChartForms<'a> {
    pub fn new(surface: &SurfaceModP, field: &'a FieldTable) -> Result<Self> {
        if field.p() as u64 != surface.p {
            return Err(Error::Invalid(format!(
                "field characteristic {} does not match p = {}",
                field.p(),
                surface.p
            )));
        }
        let z = field.zero_log();
        let mut forms = ChartForms {
            field,
            affine: [[[z; 5]; 5]; 5],
            plane: [[z; 5]; 5],
            line: [z; 5],
            corner: z,
        };
        for (e, c) in surface.form(field).terms() {
            let [a, b, cz, d] = e.map(|x| x as usize);
            forms.affine[b][cz][d] = *c;
            if a == 0 {
                forms.plane[cz][d] = *c;
                if b == 0 {
                    forms.line[d] = *c;
                    if cz == 0 {
                        forms.corner = *c;
                    }
                }
            }
        }
        Ok(forms)
    }

    fn powers(&self, x: LogElem) -> [LogElem; 5] {
        let f = self.field;
        let mut out = [0; 5];
        for k in 1..5 {
            out[k] = f.mul_log(out[k - 1], x);
        }
        out
    }

    /// Log of the element with enumeration index `i` (0 is zero).
    fn element(&self, i: u32) -> LogElem {
        if i == 0 {
            self.field.zero_log()
        } else {
            i - 1
        }
    }

    /// Chart `x = 1` restricted to leading indices `y_range`.
    fn count_affine(&self, y_range: std::ops::Range<u32>) -> CountStats {
        let f = self.field;
        let q = f.size();
        let z0 = f.zero_log();
        let mut stats = CountStats::default();
        for yi in y_range {
            let ypow = self.powers(self.element(yi));
            // B[c][d] = Σ_b affine[b][c][d] y^b
            let mut bcd = [[z0; 5]; 5];
            for c in 0..5 {
                for d in 0..5 - c {
                    let mut acc = z0;
                    for b in 0..5 - c - d {
                        let coef = self.affine[b][c][d];
                        if coef != z0 {
                            acc = f.add_log(acc, f.mul_log(coef, ypow[b]));
                        }
                    }
                    bcd[c][d] = acc;
                }
            }
            for zi in 0..q {
                let zpow = self.powers(self.element(zi));
                let mut coeffs = [z0; 5];
                for d in 0..5 {
                    let mut acc = z0;
                    for c in 0..5 - d {
                        let coef = bcd[c][d];
                        if coef != z0 {
                            acc = f.add_log(acc, f.mul_log(coef, zpow[c]));
                        }
                    }
                    coeffs[d] = acc;
                }
                stats.points += upoly::count_roots(f, &UPoly::from_logs(f, coeffs));
            }
            stats.scanned += q as u64 * q as u64;
        }
        stats
    }

    /// Charts `x = 0`: the plane `y = 1`, the line `z = 1` and the corner.
    fn count_boundary(&self) -> CountStats {
        let f = self.field;
        let q = f.size();
        let z0 = f.zero_log();
        let mut stats = CountStats::default();
        for zi in 0..q {
            let zpow = self.powers(self.element(zi));
            let mut coeffs = [z0; 5];
            for d in 0..5 {
                let mut acc = z0;
                for c in 0..5 - d {
                    let coef = self.plane[c][d];
                    if coef != z0 {
                        acc = f.add_log(acc, f.mul_log(coef, zpow[c]));
                    }
                }
                coeffs[d] = acc;
            }
            stats.points += upoly::count_roots(f, &UPoly::from_logs(f, coeffs));
        }
        stats.scanned += q as u64 * q as u64;
        stats.points += upoly::count_roots(f, &UPoly::from_logs(f, self.line));
        stats.scanned += q as u64;
        stats.points += u64::from(self.corner == z0);
        stats.scanned += 1;
        stats
    }

    /// Counts slice `index` of `total`: a contiguous range of the leading
    /// affine coordinate; slice 0 also carries the charts at infinity.
    pub fn count_slice(&self, index: usize, total: usize) -> CountStats {
        assert!(total > 0 && index < total);
        let q = self.field.size() as u64;
        let lo = (q * index as u64 / total as u64) as u32;
        let hi = (q * (index as u64 + 1) / total as u64) as u32;
        let mut stats = self.count_affine(lo..hi);
        if index == 0 {
            stats = stats + self.count_boundary();
        }
        stats
    }

    pub fn count(&self, slices: usize) -> CountStats {
        let slices = slices.clamp(1, self.field.size() as usize);
        (0..slices)
            .into_par_iter()
            .map(|i| self.count_slice(i, slices))
            .reduce(CountStats::default, |a, b| a + b)
    }
}

pub fn count_points_in(surface: &SurfaceModP, field: &FieldTable, opts: CountOptions) -> Result<CountStats> {
    let forms = ChartForms::new(surface, field)?;
    let slices = if opts.slices == 0 {
        4 * opts.workers.unwrap_or_else(rayon::current_num_threads)
    } else {
        opts.slices
    };
    match opts.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
            Ok(pool.install(|| forms.count(slices)))
        }
        None => Ok(forms.count(slices)),
    }
}

/// `#X(F_{p^n})`.
pub fn count_points(surface: &SurfaceModP, n: u32) -> Result<u64> {
    let field = FieldTable::new(surface.p, n)?;
    Ok(count_points_in(surface, &field, CountOptions::default())?.points)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountEntry {
    pub n: u32,
    pub count: u64,
    pub trace: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointCountRecord {
    pub p: u64,
    pub surface_id: String,
    pub entries: Vec<CountEntry>,
}

impl PointCountRecord {
    /// Traces `t_1, t_2, …` as far as the counts are contiguous from `n = 1`.
    pub fn trace_vector(&self) -> Vec<BigInt> {
        let mut out = Vec::new();
        for (i, e) in self.entries.iter().enumerate() {
            if e.n as usize != i + 1 {
                break;
            }
            out.push(BigInt::from(e.trace));
        }
        out
    }

    pub fn max_n(&self) -> u32 {
        self.trace_vector().len() as u32
    }
}

/// Fills `t_n = N_n - 1 - p^{2n}` for counts `(n, N_n)` and enforces the
/// Weil bound `|t_n| ≤ 22 p^n`.
pub fn traces(p: u64, surface_id: &str, counts: &[(u32, u64)]) -> Result<PointCountRecord> {
    let mut counts = counts.to_vec();
    counts.sort_unstable_by_key(|&(n, _)| n);
    counts.dedup_by_key(|&mut (n, _)| n);
    for (i, &(n, _)) in counts.iter().enumerate() {
        if n as usize != i + 1 {
            return Err(Error::MissingCount(i as u32 + 1));
        }
    }
    let mut entries = Vec::with_capacity(counts.len());
    for (n, count) in counts {
        let q = BigInt::from(p).pow(n);
        let trace: BigInt = BigInt::from(count) - 1 - &q * &q;
        let bound: BigInt = &q * 22u32;
        if trace.magnitude() > bound.magnitude() {
            return Err(Error::WeilBound {
                n,
                trace: trace.to_string(),
                bound: bound.to_string(),
            });
        }
        let trace = i64::try_from(trace).map_err(|_| Error::Internal("trace exceeds i64".into()))?;
        entries.push(CountEntry { n, count, trace });
    }
    Ok(PointCountRecord {
        p,
        surface_id: surface_id.to_string(),
        entries,
    })
}
