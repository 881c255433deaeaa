use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use k3picard::bounds::LowerBound;
use k3picard::lab;
use k3picard::pipeline::{
    count_range, read_surface, resolve_cache_dir, run_pipeline, write_file, CountCache, RunConfig,
};
use k3picard::report::{self, prime_evidence, AssertedFactor, ExactInt, Report};
use k3picard::surface::{QuarticSurface, SmoothSearch, SmoothnessStatus};
use k3picard::weil::SignPolicy;
use k3picard::{Error, Result};

#[derive(Parser)]
#[command(
    name = "k3picard",
    version,
    about = "Bounds on the geometric Picard number of quartic K3 surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count points over F_{p^n}, n = 1..max-ext.
    Count(CountArgs),
    /// Reconstruct Weil polynomial candidates from point counts.
    Weil(WeilArgs),
    /// Cyclotomic upper bounds, ordinarity and discriminant classes per prime.
    Bound(WeilArgs),
    /// Recombine the evidence of a stored report under new lower bounds.
    Verdict(VerdictArgs),
    /// Full run: counts, candidates, bounds and a verdict, written as a report.
    Run(RunArgs),
    /// Re-derive a report from its stored counts and list differences.
    Verify(VerifyArgs),
    /// Orthogonal-group experiments on endomorphism-field models.
    Lab(LabArgs),
}

#[derive(Args, Clone)]
struct CountArgs {
    #[arg(long)]
    surface: PathBuf,
    /// Repeatable.
    #[arg(long = "prime", required = true)]
    primes: Vec<u64>,
    /// `N` for every prime, or `P=N` for one prime. Repeatable.
    #[arg(long = "max-ext", default_value = "3")]
    max_ext: Vec<String>,
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WeilArgs {
    #[command(flatten)]
    count: CountArgs,
    /// both, plus or minus.
    #[arg(long, default_value = "both")]
    sign: SignPolicy,
    /// Asserted factor `P:M:K`: (Φ_M(pT))^K divides P at the prime P. Repeatable.
    #[arg(long = "known")]
    known: Vec<String>,
}

#[derive(Args)]
struct LowerArgs {
    #[arg(long = "rho-lower", default_value_t = 1)]
    rho_lower: usize,
    #[arg(long = "rho-justification", default_value = "hyperplane class")]
    rho_justification: String,
    #[arg(long = "d-lower", default_value_t = 1)]
    d_lower: usize,
    #[arg(long = "d-justification", default_value = "no discriminant bound supplied")]
    d_justification: String,
}

impl LowerArgs {
    fn bounds(&self) -> (LowerBound, LowerBound) {
        (
            LowerBound {
                value: self.rho_lower,
                justification: self.rho_justification.clone(),
            },
            LowerBound {
                value: self.d_lower,
                justification: self.d_justification.clone(),
            },
        )
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    weil: WeilArgs,
    #[command(flatten)]
    lower: LowerArgs,
    /// Largest extension degree searched for singular points.
    #[arg(long = "smooth-degree", default_value_t = 4)]
    smooth_degree: u32,
}

#[derive(Args)]
struct VerdictArgs {
    #[arg(long)]
    report: PathBuf,
    #[command(flatten)]
    lower: LowerArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    report: PathBuf,
}

#[derive(Args)]
struct LabArgs {
    /// One of rational, real-quadratic, real-quartic, cm-quartic.
    #[arg(long, default_value = "real-quadratic")]
    preset: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_max_ext(specs: &[String]) -> Result<(u32, Vec<(u64, u32)>)> {
    let mut global = None;
    let mut per_prime = Vec::new();
    for s in specs {
        let bad = || Error::Invalid(format!("bad --max-ext {s:?}: expected N or P=N"));
        match s.split_once('=') {
            Some((p, n)) => per_prime.push((
                p.trim().parse().map_err(|_| bad())?,
                n.trim().parse().map_err(|_| bad())?,
            )),
            None => global = Some(s.trim().parse().map_err(|_| bad())?),
        }
    }
    Ok((global.unwrap_or(3), per_prime))
}

fn parse_known(specs: &[String]) -> Result<Vec<AssertedFactor>> {
    specs
        .iter()
        .map(|s| {
            let parts: Vec<&str> = s.split(':').collect();
            let nums: Option<Vec<u64>> = parts.iter().map(|t| t.trim().parse().ok()).collect();
            match nums.as_deref() {
                Some(&[p, order, k]) if order >= 1 && k <= u32::MAX as u64 => Ok(AssertedFactor {
                    p,
                    order,
                    multiplicity: k as u32,
                }),
                _ => Err(Error::Invalid(format!("bad --known {s:?}: expected P:M:K"))),
            }
        })
        .collect()
}

fn config_from(weil: &WeilArgs) -> Result<RunConfig> {
    let c = &weil.count;
    let (max_ext, per_prime) = parse_max_ext(&c.max_ext)?;
    let mut config = RunConfig::new(&c.surface, c.primes.clone(), max_ext);
    config.max_ext_at = per_prime.into_iter().collect();
    config.sign = weil.sign;
    config.known_factors = parse_known(&weil.known)?;
    config.out = c.out.clone();
    config.workers = c.workers;
    config.cache = c.cache.clone();
    Ok(config)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn counts_for(surface: &QuarticSurface, config: &RunConfig) -> Result<Vec<(u64, Vec<(u32, u64)>)>> {
    let cache = CountCache::open(
        resolve_cache_dir(config.cache.as_deref()).as_deref(),
        &surface.content_hash(),
    )?;
    config
        .primes
        .iter()
        .map(|&p| {
            let (counts, _) = count_range(surface, p, config.max_ext_for(p), &cache, config.workers, |_| Ok(false))?;
            Ok((p, counts))
        })
        .collect()
}

#[derive(Serialize)]
struct CountOut {
    p: u64,
    /// `[n, N_n, t_n]`.
    counts: Vec<(u32, u64, i64)>,
}

#[derive(Serialize)]
struct WeilOut {
    p: u64,
    need_traces: Option<u32>,
    candidates: Vec<CandidateOut>,
}

#[derive(Serialize)]
struct CandidateOut {
    sign: i8,
    traces_used: u32,
    coeffs: Vec<ExactInt>,
}

fn cmd_count(args: &CountArgs) -> Result<()> {
    let weil = WeilArgs {
        count: args.clone(),
        sign: SignPolicy::Both,
        known: Vec::new(),
    };
    let config = config_from(&weil)?;
    config.validate()?;
    let surface = read_surface(&config.surface)?;
    let mut out = Vec::new();
    for (p, counts) in counts_for(&surface, &config)? {
        let record = k3picard::counter::traces(p, &surface.id, &counts)?;
        out.push(CountOut {
            p,
            counts: record.entries.iter().map(|e| (e.n, e.count, e.trace)).collect(),
        });
    }
    emit(config.out.as_deref(), &to_json(&out)?)
}

fn cmd_weil(args: &WeilArgs, with_bounds: bool) -> Result<()> {
    let config = config_from(args)?;
    config.validate()?;
    let surface = read_surface(&config.surface)?;
    let mut weil_out = Vec::new();
    let mut evidence = Vec::new();
    for (p, counts) in counts_for(&surface, &config)? {
        let known = report::known_factors_at(&config.known_factors, p);
        let smoothness = if with_bounds {
            surface.reduce_mod_p(p)?.check_smooth(config.smooth)?
        } else {
            SmoothnessStatus::Unchecked
        };
        let e = prime_evidence(p, &surface.id, smoothness, &counts, &known, config.sign)?;
        weil_out.push(WeilOut {
            p,
            need_traces: e.need_traces,
            candidates: e
                .candidates
                .iter()
                .map(|c| CandidateOut {
                    sign: c.candidate.sign,
                    traces_used: c.candidate.traces_used,
                    coeffs: c.candidate.coeffs.iter().map(ExactInt::from).collect(),
                })
                .collect(),
        });
        evidence.push(e);
    }
    if with_bounds {
        let primes: Vec<report::PrimeReport> = evidence.iter().map(report::prime_report).collect();
        emit(config.out.as_deref(), &to_json(&primes)?)
    } else {
        emit(config.out.as_deref(), &to_json(&weil_out)?)
    }
}

fn read_report(path: &Path) -> Result<Report> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    Report::from_json(&text)
}

fn cmd_verdict(args: &VerdictArgs) -> Result<()> {
    let stored = read_report(&args.report)?;
    let (rho_low, d_low) = args.lower.bounds();
    let fresh = report::recombine(&stored, rho_low, d_low)?;
    eprint!("{}", report::summary(&fresh));
    emit(args.out.as_deref(), &fresh.to_json())
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let mut config = config_from(&args.weil)?;
    let (rho_low, d_low) = args.lower.bounds();
    config.rho_low = rho_low;
    config.d_low = d_low;
    config.smooth = SmoothSearch {
        k_max: args.smooth_degree,
        ..SmoothSearch::default()
    };
    let outcome = run_pipeline(&config)?;
    log::info!(
        "{} counts from cache, {} counted",
        outcome.log.cache_hits,
        outcome.log.counted
    );
    print!("{}", report::summary(&outcome.report));
    if config.out.is_none() {
        print!("{}", outcome.report.to_json());
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<bool> {
    let stored = read_report(&args.report)?;
    let diffs = report::verify_report(&stored)?;
    if diffs.is_empty() {
        println!("report verified: every candidate and the verdict follow from the stored counts");
        return Ok(true);
    }
    for d in &diffs {
        println!("{d}");
    }
    Ok(false)
}

fn cmd_lab(args: &LabArgs) -> Result<()> {
    let model = lab::preset(&args.preset)?;
    let work = || lab::run_experiment(&model, args.seed, args.samples);
    let report = match args.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Internal(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    emit(args.out.as_deref(), &to_json(&report)?)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Count(a) => cmd_count(a).map(|_| true),
        Command::Weil(a) => cmd_weil(a, false).map(|_| true),
        Command::Bound(a) => cmd_weil(a, true).map(|_| true),
        Command::Verdict(a) => cmd_verdict(a).map(|_| true),
        Command::Run(a) => cmd_run(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
        Command::Lab(a) => cmd_lab(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
