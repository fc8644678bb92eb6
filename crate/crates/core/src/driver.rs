//! Orchestration shared by the command-line tool and the examples: solving with a
//! named algorithm, estimating the LP threshold, generating, verifying and
//! benchmarking. Reports are plain serde structs.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::model::{self, Allocation, Epsilon, Instance, LatticeValue, ModelError, Violation};
use crate::{clp, exact, flowkit, gen, lazysearch, treesearch};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Exact,
    Baseline,
    Quasi,
    Poly,
    Auto,
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Algo::Exact => "exact",
            Algo::Baseline => "baseline",
            Algo::Quasi => "quasi",
            Algo::Poly => "poly",
            Algo::Auto => "auto",
        };
        f.write_str(s)
    }
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Algo as clap::ValueEnum>::from_str(s.trim(), true)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub exact_cap: usize,
    pub budget: usize,
    pub mu: f64,
    pub p_sweep: bool,
    pub tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            exact_cap: exact::DEFAULT_ITEM_CAP,
            budget: treesearch::DEFAULT_BUDGET,
            mu: lazysearch::DEFAULT_MU,
            p_sweep: false,
            tol: clp::DEFAULT_TOL,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DriverError {
    #[error("{0}")]
    Parse(#[from] ModelError),
    #[error("{0}")]
    Exact(#[from] exact::ExactError),
    #[error("{0}")]
    Clp(#[from] clp::ClpError),
    #[error("{0}")]
    Search(#[from] gen::SearchError),
    #[error("{0}")]
    Params(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl DriverError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            DriverError::Exact(exact::ExactError::TooLarge { .. }) => 3,
            DriverError::Parse(_) | DriverError::Params(_) | DriverError::Io { .. } => 2,
            _ => 1,
        }
    }
}

pub fn read_instance(path: &Path) -> Result<Instance, DriverError> {
    let text = std::fs::read(path).map_err(|source| DriverError::Io {
        path: path.to_owned(),
        source,
    })?;
    Ok(model::parse_instance(&text)?)
}

pub fn read_allocation(path: &Path) -> Result<Allocation, DriverError> {
    let text = std::fs::read(path).map_err(|source| DriverError::Io {
        path: path.to_owned(),
        source,
    })?;
    Ok(model::parse_allocation(&text)?)
}

/// A non-negative fraction, used for thresholds and ratio bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fraction {
    pub num: u128,
    pub den: u128,
}

impl Fraction {
    pub fn new(num: u128, den: u128) -> Self {
        assert!(den > 0, "zero denominator");
        let g = gcd(num, den).max(1);
        Fraction {
            num: num / g,
            den: den / g,
        }
    }

    pub fn of_value(eps: Epsilon, v: LatticeValue) -> Self {
        let (num, den) = eps.fraction(v);
        Fraction::new(num, den)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn max(self, other: Fraction) -> Fraction {
        if self.num * other.den >= other.num * self.den {
            self
        } else {
            other
        }
    }

    pub fn le(self, other: Fraction) -> bool {
        self.num * other.den <= other.num * self.den
    }
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Fraction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("expected a fraction p/q, got {s:?}");
        let (p, q) = match s.trim().split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s.trim(), "1"),
        };
        let num: u128 = p.parse().map_err(|_| bad())?;
        let den: u128 = q.parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        Ok(Fraction::new(num, den))
    }
}

/// Worst-case ratio between the solver's value and the optimum.
pub fn ratio_bound(algo: Algo, eps: Epsilon) -> Fraction {
    let (p, q) = (eps.num() as u128, eps.den() as u128);
    let baseline = Fraction::new(p, q);
    match algo {
        Algo::Exact => Fraction::new(1, 1),
        Algo::Baseline => baseline,
        Algo::Quasi => baseline.max(Fraction::new(q, 3 * q + 4 * p)),
        Algo::Poly => baseline.max(Fraction::new(1, 9)),
        Algo::Auto => ratio_bound(Algo::Quasi, eps).max(ratio_bound(Algo::Poly, eps)),
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Timings {
    pub total_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub value: String,
    pub algo: Algo,
    /// Which solver produced the allocation; differs from `algo` under `auto`.
    pub chosen: Algo,
    pub certified_ratio_bound: String,
    /// The search certified its largest target, so the optimum may lie above
    /// the searched range and only the baseline ratio is guaranteed.
    pub baseline_only: bool,
    pub timings: Timings,
    #[serde(rename = "certified_T", skip_serializing_if = "Option::is_none")]
    pub certified_t: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layers_peak: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collapses: Option<usize>,
    pub iterations: usize,
    pub audit_violations: usize,
}

#[derive(Clone, Debug)]
pub struct Solved {
    pub value: LatticeValue,
    pub allocation: Allocation,
    pub report: SolveReport,
}

fn report(inst: &Instance, algo: Algo, value: LatticeValue, started: Instant) -> SolveReport {
    let eps = inst.epsilon();
    SolveReport {
        value: eps.format(value),
        algo,
        chosen: algo,
        certified_ratio_bound: ratio_bound(algo, eps).to_string(),
        baseline_only: false,
        timings: Timings {
            total_ms: started.elapsed().as_secs_f64() * 1e3,
        },
        certified_t: None,
        r: None,
        p: None,
        layers_peak: None,
        collapses: None,
        iterations: 0,
        audit_violations: 0,
    }
}

fn flag_open_top(inst: &Instance, certified: Option<LatticeValue>, rep: &mut SolveReport) {
    let eps = inst.epsilon();
    rep.certified_t = certified.map(|t| eps.format(t));
    let top = treesearch::probe_targets(inst).last().copied();
    if let (Some(c), Some(top)) = (certified, top) {
        if eps.eq_value(c, top) {
            rep.baseline_only = true;
            rep.certified_ratio_bound = ratio_bound(Algo::Baseline, eps).to_string();
        }
    }
}

pub fn solve(inst: &Instance, algo: Algo, opts: &SolveOptions) -> Result<Solved, DriverError> {
    let started = Instant::now();
    let eps = inst.epsilon();
    let solved = match algo {
        Algo::Exact => {
            let solver = exact::ExactSolver {
                item_cap: opts.exact_cap,
            };
            let (value, allocation) = solver.opt(inst)?;
            Solved {
                value,
                allocation,
                report: report(inst, algo, value, started),
            }
        }
        Algo::Baseline => {
            let (value, allocation) = flowkit::baseline_solve(inst);
            Solved {
                value,
                allocation,
                report: report(inst, algo, value, started),
            }
        }
        Algo::Quasi => {
            let res = treesearch::quasi_solve(inst, opts.budget);
            let mut rep = report(inst, algo, res.value, started);
            flag_open_top(inst, res.certified_t, &mut rep);
            rep.r = res.r;
            rep.iterations = res.stats.iterations;
            rep.collapses = Some(res.stats.contractions);
            rep.audit_violations = res.stats.audit.total();
            Solved {
                value: res.value,
                allocation: res.allocation,
                report: rep,
            }
        }
        Algo::Poly => {
            let res = lazysearch::poly_solve(
                inst,
                lazysearch::PolyOptions {
                    mu: opts.mu,
                    p_sweep: opts.p_sweep,
                    budget: opts.budget,
                },
            );
            let mut rep = report(inst, algo, res.value, started);
            flag_open_top(inst, res.certified_t, &mut rep);
            rep.r = res.r;
            rep.p = res.p;
            rep.layers_peak = Some(res.stats.layers_peak);
            rep.collapses = Some(res.stats.collapses);
            rep.iterations = res.stats.iterations;
            rep.audit_violations = res.stats.audit.total();
            Solved {
                value: res.value,
                allocation: res.allocation,
                report: rep,
            }
        }
        Algo::Auto => {
            let mut best: Option<Solved> = None;
            let mut iterations = 0;
            let mut audit = 0;
            let mut bound = Fraction::new(0, 1);
            for a in [Algo::Exact, Algo::Baseline, Algo::Quasi, Algo::Poly] {
                let s = match solve(inst, a, opts) {
                    Err(DriverError::Exact(exact::ExactError::TooLarge { .. })) => continue,
                    other => other?,
                };
                iterations += s.report.iterations;
                audit += s.report.audit_violations;
                let b: Fraction = s.report.certified_ratio_bound.parse().expect("own format");
                bound = bound.max(b);
                let better = best
                    .as_ref()
                    .is_none_or(|b| eps.cmp(s.value, b.value).is_gt());
                if better {
                    best = Some(s);
                }
            }
            let mut best = best.expect("baseline always runs");
            best.report.chosen = best.report.algo;
            best.report.algo = Algo::Auto;
            best.report.certified_ratio_bound = bound.to_string();
            best.report.baseline_only = false;
            best.report.iterations = iterations;
            best.report.audit_violations = audit;
            best.report.timings.total_ms = started.elapsed().as_secs_f64() * 1e3;
            best
        }
    };
    Ok(solved)
}

#[derive(Clone, Debug, Serialize)]
pub struct EstimateReport {
    #[serde(rename = "T_star")]
    pub tstar: String,
    pub lambda: f64,
    pub near_boundary: bool,
    pub probes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opt: Option<String>,
    /// `T*/OPT`, when the exact solver applies and `OPT > 0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<String>,
}

pub fn estimate(inst: &Instance, opts: &SolveOptions) -> Result<EstimateReport, DriverError> {
    let eps = inst.epsilon();
    let est = clp::estimate_tstar(inst, opts.tol)?;
    let solver = exact::ExactSolver {
        item_cap: opts.exact_cap,
    };
    let opt = solver.opt(inst).ok().map(|(v, _)| v);
    let ratio = opt.filter(|v| !v.is_zero()).map(|v| {
        let (a, b) = eps.fraction(est.tstar);
        let (c, d) = eps.fraction(v);
        Fraction::new(a * d, b * c).to_string()
    });
    Ok(EstimateReport {
        tstar: eps.format(est.tstar),
        lambda: est.lambda,
        near_boundary: est.near_boundary,
        probes: est.probes,
        opt: opt.map(|v| eps.format(v)),
        ratio,
    })
}

/// What to generate, with every parameter explicit.
#[derive(Clone, Debug)]
pub enum GenerateSpec {
    Random {
        n: usize,
        m_heavy: usize,
        m_light: usize,
        density: f64,
        eps: Epsilon,
        seed: u64,
    },
    ThreeDmYes {
        size: usize,
        extra: usize,
        eps: Epsilon,
        seed: u64,
    },
    ThreeDmNo {
        size: usize,
        extra: usize,
        eps: Epsilon,
        seed: u64,
    },
    GapSearch {
        n_max: usize,
        m_max: usize,
        eps: Epsilon,
        budget: usize,
        seed: u64,
    },
}

pub fn generate(spec: &GenerateSpec) -> Result<Instance, DriverError> {
    let params = |msg: &str| Err(DriverError::Params(msg.to_string()));
    match *spec {
        GenerateSpec::Random {
            n,
            m_heavy,
            m_light,
            density,
            eps,
            seed,
        } => {
            if n == 0 {
                return params("random instances need at least one agent");
            }
            if !(0.0..=1.0).contains(&density) {
                return params("density must lie in [0, 1]");
            }
            Ok(gen::gen_random(n, m_heavy, m_light, density, eps, seed))
        }
        GenerateSpec::ThreeDmYes {
            size,
            extra,
            eps,
            seed,
        } => {
            if size == 0 {
                return params("3dm size must be positive");
            }
            let (h, _) = gen::gen_3dm_yes(size, extra, seed);
            Ok(gen::reduce_3dm(&h, eps))
        }
        GenerateSpec::ThreeDmNo {
            size,
            extra,
            eps,
            seed,
        } => {
            if size < 2 {
                return params("a 3dm no-instance needs size at least 2");
            }
            let h = gen::gen_3dm_no(size, extra, seed);
            Ok(gen::reduce_3dm(&h, eps))
        }
        GenerateSpec::GapSearch {
            n_max,
            m_max,
            eps,
            budget,
            seed,
        } => {
            let w = gen::GapSearch::new(n_max, m_max, eps, budget, seed)
                .stop_at(2, 1)
                .run()?;
            Ok(w.instance)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    pub violations: Vec<String>,
    pub meets_threshold: bool,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.valid && self.meets_threshold
    }
}

pub fn verify(inst: &Instance, alloc: &Allocation, min_value: Option<Fraction>) -> VerifyReport {
    let eps = inst.epsilon();
    let violations: Vec<Violation> = alloc.verify(inst);
    if !violations.is_empty() {
        return VerifyReport {
            valid: false,
            value: None,
            violations: violations.iter().map(|v| v.to_string()).collect(),
            meets_threshold: false,
        };
    }
    let value = alloc.min_value(inst).expect("verified allocation");
    let meets = min_value.is_none_or(|t| t.le(Fraction::of_value(eps, value)));
    VerifyReport {
        valid: true,
        value: Some(eps.format(value)),
        violations: Vec::new(),
        meets_threshold: meets,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub n: usize,
    pub m_heavy: usize,
    pub m_light: usize,
    pub epsilon: String,
    pub algo: Algo,
    pub value: String,
    pub opt: String,
    /// `OPT / value`; empty without an optimum, `inf` when the value is zero.
    pub ratio: String,
    pub iterations: usize,
    pub wall_ms: f64,
}

/// Instance files (`*.json`) in `dir`, sorted by name.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>, DriverError> {
    let io = |source| DriverError::Io {
        path: dir.to_owned(),
        source,
    };
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

/// Runs every algorithm on every instance; rows come out in corpus order,
/// then algorithm order, whatever the thread count.
pub fn bench(
    files: &[PathBuf],
    algos: &[Algo],
    opts: &SolveOptions,
) -> Result<Vec<BenchRow>, DriverError> {
    let instances: Vec<(String, Instance)> = files
        .iter()
        .map(|p| {
            let name = p
                .file_name()
                .map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into());
            read_instance(p).map(|i| (name, i))
        })
        .collect::<Result<_, _>>()?;
    let optima: Vec<Option<LatticeValue>> = instances
        .par_iter()
        .map(|(_, inst)| {
            exact::ExactSolver {
                item_cap: opts.exact_cap,
            }
            .opt(inst)
            .ok()
            .map(|(v, _)| v)
        })
        .collect();
    let jobs: Vec<(usize, Algo)> = (0..instances.len())
        .flat_map(|i| algos.iter().map(move |&a| (i, a)))
        .collect();
    jobs.par_iter()
        .map(|&(i, algo)| {
            let (name, inst) = &instances[i];
            let eps = inst.epsilon();
            let started = Instant::now();
            let s = solve(inst, algo, opts)?;
            let wall_ms = (started.elapsed().as_secs_f64() * 1e6).round() / 1e3;
            let opt = optima[i];
            let ratio = match opt {
                None => String::new(),
                Some(o) if o.is_zero() => "1".into(),
                Some(_) if s.value.is_zero() => "inf".into(),
                Some(o) => format!("{:.6}", eps.to_f64(o) / eps.to_f64(s.value)),
            };
            Ok(BenchRow {
                instance: name.clone(),
                n: inst.n(),
                m_heavy: inst.heavy_count(),
                m_light: inst.light_count(),
                epsilon: eps.to_string(),
                algo,
                value: eps.format(s.value),
                opt: opt.map_or_else(String::new, |o| eps.format(o)),
                ratio,
                iterations: s.report.iterations,
                wall_ms,
            })
        })
        .collect()
}

pub fn write_csv<W: std::io::Write>(rows: &[BenchRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
