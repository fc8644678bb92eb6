//! Writes a small random corpus and benchmarks every heuristic on it as CSV.

use fairalloc::driver::{self, Algo, GenerateSpec, SolveOptions};
use fairalloc::model::serialize_instance;

fn main() {
    let dir = std::env::temp_dir().join("fairalloc-bench-corpus");
    std::fs::create_dir_all(&dir).unwrap();
    for seed in 0..10u64 {
        let spec = GenerateSpec::Random {
            n: 3 + seed as usize % 3,
            m_heavy: seed as usize % 3,
            m_light: 6 + seed as usize,
            density: 0.6,
            eps: "1/3".parse().unwrap(),
            seed,
        };
        let inst = driver::generate(&spec).unwrap();
        std::fs::write(dir.join(format!("r{seed:02}.json")), serialize_instance(&inst)).unwrap();
    }
    let files = driver::corpus_files(&dir).unwrap();
    let algos = [Algo::Baseline, Algo::Quasi, Algo::Poly];
    let rows = driver::bench(&files, &algos, &SolveOptions::default()).unwrap();
    driver::write_csv(&rows, std::io::stdout()).unwrap();
}
