//! End-to-end runs: reduce, check smoothness, count incrementally with a
//! cache, reconstruct, bound, and combine into a report.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{combine_verdict, LowerBound, PrimeEvidence};
use crate::counter::{count_points_in, CountOptions};
use crate::error::{Error, Result};
use crate::gf::{is_prime, FieldTable, DEFAULT_CEILING};
use crate::report::{emit_report, known_factors_at, prime_evidence, AssertedFactor, Report, SurfaceInfo};
use crate::surface::{parse_surface, QuarticSurface, SmoothSearch};
use crate::weil::SignPolicy;

pub const CACHE_ENV: &str = "K3PICARD_CACHE";

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub surface: PathBuf,
    pub primes: Vec<u64>,
    /// Largest extension degree counted, unless overridden per prime.
    pub max_ext: u32,
    pub max_ext_at: BTreeMap<u64, u32>,
    pub sign: SignPolicy,
    pub known_factors: Vec<AssertedFactor>,
    pub rho_low: LowerBound,
    pub d_low: LowerBound,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub cache: Option<PathBuf>,
    pub smooth: SmoothSearch,
}

impl RunConfig {
    pub fn new(surface: impl Into<PathBuf>, primes: Vec<u64>, max_ext: u32) -> Self {
        RunConfig {
            surface: surface.into(),
            primes,
            max_ext,
            max_ext_at: BTreeMap::new(),
            sign: SignPolicy::Both,
            known_factors: Vec::new(),
            rho_low: LowerBound {
                value: 1,
                justification: "hyperplane class".into(),
            },
            d_low: LowerBound {
                value: 1,
                justification: "no discriminant bound supplied".into(),
            },
            out: None,
            workers: None,
            cache: None,
            smooth: SmoothSearch::default(),
        }
    }

    pub fn max_ext_for(&self, p: u64) -> u32 {
        self.max_ext_at.get(&p).copied().unwrap_or(self.max_ext)
    }

    pub fn validate(&self) -> Result<()> {
        if self.primes.is_empty() {
            return Err(Error::Invalid("no primes given".into()));
        }
        let mut seen = self.primes.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != self.primes.len() {
            return Err(Error::Invalid("primes must be distinct".into()));
        }
        for &p in &self.primes {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            let n = self.max_ext_for(p);
            if n == 0 {
                return Err(Error::ZeroDegree);
            }
            match p.checked_pow(n) {
                Some(q) if q <= DEFAULT_CEILING => {}
                _ => {
                    return Err(Error::FieldTooLarge {
                        p,
                        n,
                        ceiling: DEFAULT_CEILING,
                    })
                }
            }
        }
        for &p in self.max_ext_at.keys() {
            if !self.primes.contains(&p) {
                return Err(Error::Invalid(format!("extension degree given for unused prime {p}")));
            }
        }
        for k in &self.known_factors {
            if !self.primes.contains(&k.p) {
                return Err(Error::Invalid(format!("known factor given for unused prime {}", k.p)));
            }
        }
        if self.rho_low.value < 1 {
            return Err(Error::Invalid("rho_low must be at least 1".into()));
        }
        if self.d_low.value < 1 {
            return Err(Error::Invalid("d_low must be at least 1".into()));
        }
        Ok(())
    }

    /// The cache directory, with the environment variable taking precedence.
    pub fn cache_dir(&self) -> Option<PathBuf> {
        resolve_cache_dir(self.cache.as_deref())
    }
}

pub fn resolve_cache_dir(flag: Option<&Path>) -> Option<PathBuf> {
    match std::env::var_os(CACHE_ENV) {
        Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
        _ => flag.map(Path::to_path_buf),
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct CacheFile {
    surface_hash: String,
    /// p -> n -> N_n.
    counts: BTreeMap<u64, BTreeMap<u32, u64>>,
}

/// Point counts on disk, one JSON file per surface content hash.
#[derive(Debug)]
pub struct CountCache {
    path: Option<PathBuf>,
    data: Mutex<CacheFile>,
}

impl CountCache {
    pub fn disabled(hash: &str) -> Self {
        CountCache {
            path: None,
            data: Mutex::new(CacheFile {
                surface_hash: hash.to_string(),
                counts: BTreeMap::new(),
            }),
        }
    }

    pub fn open(dir: Option<&Path>, hash: &str) -> Result<Self> {
        let Some(dir) = dir else {
            return Ok(Self::disabled(hash));
        };
        let path = dir.join(format!("{hash}.json"));
        let data = match std::fs::read_to_string(&path) {
            Ok(text) => {
                let data: CacheFile = serde_json::from_str(&text)?;
                if data.surface_hash != hash {
                    return Err(Error::Invalid(format!(
                        "cache file {} belongs to another surface",
                        path.display()
                    )));
                }
                data
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => CacheFile {
                surface_hash: hash.to_string(),
                counts: BTreeMap::new(),
            },
            Err(source) => {
                return Err(Error::Io {
                    path: path.display().to_string(),
                    source,
                })
            }
        };
        Ok(CountCache {
            path: Some(path),
            data: Mutex::new(data),
        })
    }

    pub fn get(&self, p: u64, n: u32) -> Option<u64> {
        self.data.lock().unwrap().counts.get(&p)?.get(&n).copied()
    }

    pub fn put(&self, p: u64, n: u32, count: u64) -> Result<()> {
        let mut data = self.data.lock().unwrap();
        data.counts.entry(p).or_default().insert(n, count);
        let Some(path) = &self.path else {
            return Ok(());
        };
        let io = |source| Error::Io {
            path: path.display().to_string(),
            source,
        };
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(io)?;
        }
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, serde_json::to_string_pretty(&*data)?).map_err(io)?;
        std::fs::rename(&tmp, path).map_err(io)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CountLog {
    pub cache_hits: usize,
    pub counted: usize,
}

/// Counts `N_n` for `n = 1..=max_n`, reusing and filling the cache.
/// `stop` sees the counts so far and ends the loop early when it returns true.
pub fn count_range(
    surface: &QuarticSurface,
    p: u64,
    max_n: u32,
    cache: &CountCache,
    workers: Option<usize>,
    mut stop: impl FnMut(&[(u32, u64)]) -> Result<bool>,
) -> Result<(Vec<(u32, u64)>, CountLog)> {
    let reduction = surface.reduce_mod_p(p)?;
    let mut counts = Vec::new();
    let mut log = CountLog::default();
    for n in 1..=max_n {
        let count = match cache.get(p, n) {
            Some(c) => {
                log::info!("cache hit: p = {p}, n = {n}");
                log.cache_hits += 1;
                c
            }
            None => {
                let field = FieldTable::new(p, n)?;
                let opts = CountOptions {
                    workers,
                    ..CountOptions::default()
                };
                let c = count_points_in(&reduction, &field, opts)?.points;
                log::info!("counted: p = {p}, n = {n}, N = {c}");
                log.counted += 1;
                cache.put(p, n, c)?;
                c
            }
        };
        counts.push((n, count));
        if stop(&counts)? {
            break;
        }
    }
    Ok((counts, log))
}

fn run_prime(
    surface: &QuarticSurface,
    p: u64,
    config: &RunConfig,
    cache: &CountCache,
) -> Result<(PrimeEvidence, CountLog)> {
    let mut reduction = surface.reduce_mod_p(p)?;
    let smoothness = reduction.check_smooth(config.smooth)?;
    if smoothness.is_singular() {
        log::warn!("p = {p}: reduction is singular ({smoothness:?}); prime dropped");
        let evidence = prime_evidence(p, &surface.id, smoothness, &[], &[], config.sign)?;
        return Ok((evidence, CountLog::default()));
    }
    let known = known_factors_at(&config.known_factors, p);
    let max_n = config.max_ext_for(p);
    // More traces only help while two signs are still in play.
    let stop = |counts: &[(u32, u64)]| -> Result<bool> {
        let e = prime_evidence(p, &surface.id, smoothness.clone(), counts, &known, config.sign)?;
        Ok(e.candidates.len() == 1)
    };
    let (counts, log) = count_range(surface, p, max_n, cache, config.workers, stop)?;
    let evidence = prime_evidence(p, &surface.id, smoothness, &counts, &known, config.sign)?;
    if let Some(required) = evidence.need_traces {
        log::warn!("p = {p}: {} traces available, {required} needed", counts.len());
    }
    Ok((evidence, log))
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: Report,
    pub log: CountLog,
}

/// Runs the whole pipeline on an already parsed surface. Writes nothing.
pub fn run_surface(surface: &QuarticSurface, config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let cache = CountCache::open(config.cache_dir().as_deref(), &surface.content_hash())?;
    let work = || -> Result<Vec<(PrimeEvidence, CountLog)>> {
        config
            .primes
            .par_iter()
            .map(|&p| run_prime(surface, p, config, &cache))
            .collect()
    };
    let results = match config.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Internal(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let mut log = CountLog::default();
    let mut evidence = Vec::with_capacity(results.len());
    for (e, l) in results {
        log.cache_hits += l.cache_hits;
        log.counted += l.counted;
        evidence.push(e);
    }
    let verdict = combine_verdict(config.rho_low.clone(), config.d_low.clone(), evidence)?;
    let report = emit_report(&verdict, &SurfaceInfo::of(surface), config.sign, &config.known_factors);
    Ok(RunOutcome { report, log })
}

pub fn read_surface(path: &Path) -> Result<QuarticSurface> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_surface(&text)
}

/// Parses the surface file, runs, and writes the report and its summary
/// (`<out>.txt`) when an output path is set.
pub fn run_pipeline(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let surface = read_surface(&config.surface)?;
    let outcome = run_surface(&surface, config)?;
    if let Some(out) = &config.out {
        write_file(out, &outcome.report.to_json())?;
        let mut summary_path = out.clone().into_os_string();
        summary_path.push(".txt");
        write_file(Path::new(&summary_path), &crate::report::summary(&outcome.report))?;
    }
    Ok(outcome)
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    let io = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::write(path, text).map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let ok = RunConfig::new("x", vec![5, 13], 3);
        assert!(ok.validate().is_ok());
        assert!(matches!(
            RunConfig::new("x", vec![4], 3).validate(),
            Err(Error::NotPrime(4))
        ));
        assert!(RunConfig::new("x", vec![5, 5], 3).validate().is_err());
        assert!(matches!(
            RunConfig::new("x", vec![2], 23).validate(),
            Err(Error::FieldTooLarge { .. })
        ));
        let mut bad = ok.clone();
        bad.rho_low.value = 0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CountCache::open(Some(dir.path()), "abc").unwrap();
        assert_eq!(cache.get(5, 1), None);
        cache.put(5, 1, 0).unwrap();
        cache.put(5, 2, 800).unwrap();
        let again = CountCache::open(Some(dir.path()), "abc").unwrap();
        assert_eq!(again.get(5, 2), Some(800));
        assert!(CountCache::open(Some(dir.path()), "abd").unwrap().get(5, 2).is_none());
    }
}
