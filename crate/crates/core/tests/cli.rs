use std::path::Path;
use std::process::{Command, Output};

use fairalloc::driver::{ratio_bound, Algo, Fraction};
use fairalloc::model::{parse_instance, Epsilon};

fn fairalloc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fairalloc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn report(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout));
    })
}

fn generate(dir: &Path, name: &str, args: &[&str]) -> std::path::PathBuf {
    let file = dir.join(name);
    let mut full = vec!["generate"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", path(&file)]);
    let out = fairalloc(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    file
}

fn solve(instance: &Path, algo: &str, alloc: &Path) -> serde_json::Value {
    let out = fairalloc(&["solve", path(instance), "--algo", algo, "--out", path(alloc)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    report(&out)
}

#[test]
fn reduction_values_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let yes = generate(dir.path(), "yes.json", &["3dm-yes", "--size", "2", "--seed", "1", "--epsilon", "1/3"]);
    let no = generate(dir.path(), "no.json", &["3dm-no", "--size", "2", "--seed", "1", "--epsilon", "1/3"]);
    let alloc = dir.path().join("a.json");
    assert_eq!(solve(&yes, "exact", &alloc)["value"], "2/3");
    assert_eq!(solve(&no, "exact", &alloc)["value"], "1/3");

    let poly = solve(&yes, "poly", &alloc);
    let v: Fraction = poly["value"].as_str().unwrap().parse().unwrap();
    assert!(Fraction::new(2, 27).le(v));
    let ok = fairalloc(&["verify", path(&yes), path(&alloc), "--min-value", poly["value"].as_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn zero_density_gives_zero() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(
        dir.path(),
        "z.json",
        &["random", "--n", "3", "--m-light", "4", "--density", "0", "--seed", "5"],
    );
    let alloc = dir.path().join("a.json");
    assert_eq!(solve(&inst, "exact", &alloc)["value"], "0/1");
}

#[test]
fn verify_catches_tampering_and_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("i.json");
    std::fs::write(
        &inst,
        r#"{"epsilon": "1/2", "items": [{"id": 0, "kind": "heavy"}, {"id": 1, "kind": "light"}],
            "agents": [{"id": 0, "interests": [0, 1]}, {"id": 1, "interests": [0, 1]}]}"#,
    )
    .unwrap();
    let alloc = dir.path().join("a.json");
    let rep = solve(&inst, "auto", &alloc);
    assert_eq!(rep["value"], "1/2");
    assert_eq!(rep["chosen"], "exact");

    let above = fairalloc(&["verify", path(&inst), path(&alloc), "--min-value", "1/1"]);
    assert_eq!(above.status.code(), Some(1));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"assignment": {"0": [0], "1": [0, 1]}}"#).unwrap();
    let out = fairalloc(&["verify", path(&inst), path(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("duplicate item"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, r#"{"epsilon": "3/2", "items": [], "agents": [{"id": 0, "interests": []}]}"#).unwrap();
    let out = fairalloc(&["solve", path(&broken)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("epsilon out of range"));

    let big = generate(dir.path(), "big.json", &["random", "--n", "2", "--m-light", "30", "--seed", "1"]);
    let out = fairalloc(&["solve", path(&big), "--algo", "exact"]);
    assert_eq!(out.status.code(), Some(3));
    let out = fairalloc(&["solve", path(&big), "--algo", "exact", "--exact-cap", "31"]);
    assert_eq!(out.status.code(), Some(0));
    let out = fairalloc(&["solve", path(&big), "--algo", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn estimate_reports_gap_and_single_agent() {
    let dir = tempfile::tempdir().unwrap();
    let gap = dir.path().join("gap.json");
    std::fs::write(
        &gap,
        r#"{"epsilon": "1/2",
            "items": [{"id": 0, "kind": "heavy"}, {"id": 1, "kind": "heavy"},
                      {"id": 2, "kind": "light"}, {"id": 3, "kind": "light"},
                      {"id": 4, "kind": "light"}, {"id": 5, "kind": "light"}],
            "agents": [{"id": 0, "interests": [0, 2, 3]}, {"id": 1, "interests": [0, 4, 5]},
                       {"id": 2, "interests": [1, 2, 4]}, {"id": 3, "interests": [1, 3, 5]}]}"#,
    )
    .unwrap();
    let rep = report(&fairalloc(&["estimate", path(&gap)]));
    assert_eq!(rep["T_star"], "1/1");
    assert_eq!(rep["ratio"], "2/1");

    let single = generate(dir.path(), "one.json", &["random", "--n", "1", "--m-heavy", "1", "--m-light", "3", "--density", "1"]);
    let rep = report(&fairalloc(&["estimate", path(&single)]));
    assert_eq!(rep["ratio"], "1/1");
}

#[test]
fn bench_rows_are_complete_bounded_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    std::fs::create_dir(&corpus).unwrap();
    for seed in 0..50 {
        let eps = ["1/2", "1/3", "1/4"][seed % 3];
        let name = format!("r{seed:02}.json");
        let n = (2 + seed % 4).to_string();
        let mh = (seed % 3).to_string();
        let ml = (4 + seed % 6).to_string();
        let seed = seed.to_string();
        generate(
            &corpus,
            &name,
            &["random", "--n", &n, "--m-heavy", &mh, "--m-light", &ml, "--density", "0.6", "--seed", &seed, "--epsilon", eps],
        );
    }
    let run = |out: &Path| {
        let o = fairalloc(&["bench", path(&corpus), "--algos", "baseline,quasi,poly", "--out", path(out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let mut rd = csv::Reader::from_path(out).unwrap();
        let headers = rd.headers().unwrap().clone();
        let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
        (headers, rows)
    };
    let (headers, first) = run(&dir.path().join("a.csv"));
    let (_, second) = run(&dir.path().join("b.csv"));
    let cols: Vec<&str> = headers.iter().collect();
    assert_eq!(
        cols,
        ["instance", "n", "m_heavy", "m_light", "epsilon", "algo", "value", "opt", "ratio", "iterations", "wall_ms"]
    );
    assert_eq!(first.len(), 150);
    let strip = |r: &csv::StringRecord| r.iter().take(10).map(str::to_string).collect::<Vec<_>>();
    assert_eq!(first.iter().map(strip).collect::<Vec<_>>(), second.iter().map(strip).collect::<Vec<_>>());

    for row in &first {
        let eps: Epsilon = row[4].parse().unwrap();
        let algo: Algo = row[5].parse().unwrap();
        let value: Fraction = row[6].parse().unwrap();
        let opt: Fraction = row[7].parse().unwrap();
        let bound = ratio_bound(algo, eps);
        // value ≥ bound · opt
        assert!(
            opt.num * bound.num * value.den <= value.num * opt.den * bound.den,
            "{row:?}"
        );
        let inst = parse_instance(&std::fs::read(corpus.join(&row[0])).unwrap()).unwrap();
        assert_eq!(inst.n().to_string(), row[1]);
    }
}
