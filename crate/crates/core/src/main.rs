use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fairalloc::driver::{self, Algo, DriverError, Fraction, GenerateSpec, SolveOptions};
use fairalloc::model::{self, Epsilon};

#[derive(Parser)]
#[command(name = "fairalloc", version, about = "Max-min fair allocation with heavy and light items")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Tuning {
    /// Size cap (item count) for the exact solver.
    #[arg(long, default_value_t = fairalloc::exact::DEFAULT_ITEM_CAP)]
    exact_cap: usize,
    /// Iteration budget per root agent for the local searches.
    #[arg(long, default_value_t = fairalloc::treesearch::DEFAULT_BUDGET)]
    budget: usize,
    /// Collapse threshold of the layered search.
    #[arg(long, default_value_t = fairalloc::lazysearch::DEFAULT_MU)]
    mu: f64,
    /// Try every p in (r, k) instead of the two default choices.
    #[arg(long)]
    p_sweep: bool,
    /// LP feasibility tolerance.
    #[arg(long, default_value_t = fairalloc::clp::DEFAULT_TOL)]
    tol: f64,
}

impl Tuning {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            exact_cap: self.exact_cap,
            budget: self.budget,
            mu: self.mu,
            p_sweep: self.p_sweep,
            tol: self.tol,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance; writes the allocation and prints a JSON report.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Algo::Auto)]
        algo: Algo,
        /// Allocation output file (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Accepted for symmetry with `generate`; every solver is deterministic.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Estimate the configuration-LP threshold.
    Estimate {
        instance: PathBuf,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Generate an instance file.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
        #[arg(long, global = true, default_value = "1/2")]
        epsilon: Epsilon,
        #[arg(long, global = true, default_value_t = 0)]
        seed: u64,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Check an allocation against an instance.
    Verify {
        instance: PathBuf,
        allocation: PathBuf,
        /// Required minimum value, as p/q.
        #[arg(long)]
        min_value: Option<Fraction>,
    },
    /// Run algorithms over a directory of instances and write CSV.
    Bench {
        corpus: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "baseline,quasi,poly")]
        algos: Vec<Algo>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tuning: Tuning,
    },
}

#[derive(Subcommand)]
enum GenerateKind {
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        m_heavy: usize,
        #[arg(long)]
        m_light: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
    },
    #[command(name = "3dm-yes")]
    ThreeDmYes {
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        extra: usize,
    },
    #[command(name = "3dm-no")]
    ThreeDmNo {
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        extra: usize,
    },
    GapSearch {
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        #[arg(long, default_value_t = 6)]
        m_max: usize,
        #[arg(long, default_value_t = 200_000)]
        budget: usize,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), DriverError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| DriverError::Io {
            path: path.to_owned(),
            source,
        }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

fn run(cli: Cli) -> Result<ExitCode, DriverError> {
    match cli.command {
        Command::Solve {
            instance,
            algo,
            out,
            seed: _,
            tuning,
        } => {
            let inst = driver::read_instance(&instance)?;
            let solved = driver::solve(&inst, algo, &tuning.options())?;
            let alloc = model::serialize_allocation(&solved.allocation);
            match &out {
                Some(_) => {
                    emit(out.as_deref(), &alloc)?;
                    println!("{}", json(&solved.report));
                }
                None => {
                    println!("{alloc}");
                    eprintln!("{}", json(&solved.report));
                }
            }
        }
        Command::Estimate { instance, tuning } => {
            let inst = driver::read_instance(&instance)?;
            println!("{}", json(&driver::estimate(&inst, &tuning.options())?));
        }
        Command::Generate {
            kind,
            epsilon: eps,
            seed,
            out,
        } => {
            let spec = match kind {
                GenerateKind::Random {
                    n,
                    m_heavy,
                    m_light,
                    density,
                } => GenerateSpec::Random {
                    n,
                    m_heavy,
                    m_light,
                    density,
                    eps,
                    seed,
                },
                GenerateKind::ThreeDmYes { size, extra } => GenerateSpec::ThreeDmYes {
                    size,
                    extra,
                    eps,
                    seed,
                },
                GenerateKind::ThreeDmNo { size, extra } => GenerateSpec::ThreeDmNo {
                    size,
                    extra,
                    eps,
                    seed,
                },
                GenerateKind::GapSearch {
                    n_max,
                    m_max,
                    budget,
                } => GenerateSpec::GapSearch {
                    n_max,
                    m_max,
                    eps,
                    budget,
                    seed,
                },
            };
            let inst = driver::generate(&spec)?;
            emit(out.as_deref(), &model::serialize_instance(&inst))?;
        }
        Command::Verify {
            instance,
            allocation,
            min_value,
        } => {
            let inst = driver::read_instance(&instance)?;
            let alloc = driver::read_allocation(&allocation)?;
            let rep = driver::verify(&inst, &alloc, min_value);
            for v in &rep.violations {
                eprintln!("{v}");
            }
            if rep.valid && !rep.meets_threshold {
                eprintln!(
                    "value {} is below the required {}",
                    rep.value.as_deref().unwrap_or("?"),
                    min_value.map(|f| f.to_string()).unwrap_or_default()
                );
            }
            println!("{}", json(&rep));
            if !rep.passed() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Bench {
            corpus,
            algos,
            out,
            tuning,
        } => {
            let files = driver::corpus_files(&corpus)?;
            let rows = driver::bench(&files, &algos, &tuning.options())?;
            let mut buf = Vec::new();
            driver::write_csv(&rows, &mut buf).expect("in-memory CSV");
            match out {
                Some(path) => fs::write(&path, &buf).map_err(|source| DriverError::Io {
                    path: path.clone(),
                    source,
                })?,
                None => std::io::stdout().write_all(&buf).map_err(|source| DriverError::Io {
                    path: "<stdout>".into(),
                    source,
                })?,
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
