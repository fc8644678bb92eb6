//! End-to-end checks of every headline guarantee, one line per criterion.

mod common;

use std::time::{Duration, Instant};

use fairalloc::flowkit::{self, disjoint_paths, PathFlow, ResidualDigraph};
use fairalloc::lazysearch::{self, LazyStats, PolyOptions};
use fairalloc::model::{Allocation, Epsilon, Instance, ItemKind, LatticeValue};
use fairalloc::treesearch::{self, TreeStats};
use fairalloc::{clp, exact, gen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CORPUS: usize = 240;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        ok,
        detail: detail.into(),
    }
}

/// Searcher runs collected by criteria 3 to 5, audited by criterion 7.
#[derive(Default)]
struct Runs {
    tree: TreeStats,
    lazy: LazyStats,
    allocations: usize,
    invalid_allocations: usize,
    /// Closest-edge runs whose deepest pick exceeded the distance bound.
    distance_overruns: usize,
}

impl Runs {
    fn allocation(&mut self, inst: &Instance, a: &Allocation) {
        self.allocations += 1;
        if !a.verify(inst).is_empty() {
            self.invalid_allocations += 1;
        }
    }
}

struct Corpus {
    instances: Vec<Instance>,
    optima: Vec<LatticeValue>,
}

fn corpus() -> Corpus {
    let instances = common::random_corpus(CORPUS);
    let optima = instances.iter().map(|i| exact::opt(i).unwrap().0).collect();
    Corpus { instances, optima }
}

fn hardness() -> Verdict {
    let mut worst = Duration::ZERO;
    let (mut yes, mut no) = (0, 0);
    for eps in ["1/2", "1/3"].map(|s| s.parse::<Epsilon>().unwrap()) {
        let two_eps = LatticeValue::new(0, 2);
        let one_eps = LatticeValue::new(0, 1);
        for size in 1..=4 {
            for extra in 0..=3 {
                for seed in 0..3 {
                    let (h, planted) = gen::gen_3dm_yes(size, extra, seed);
                    if !h.is_perfect_matching(&planted) {
                        return verdict(false, format!("planted matching invalid, size {size} seed {seed}"));
                    }
                    let started = Instant::now();
                    let inst = gen::reduce_3dm(&h, eps);
                    let (opt, _) = exact::opt(&inst).unwrap();
                    worst = worst.max(started.elapsed());
                    if !eps.eq_value(opt, two_eps) {
                        return verdict(false, format!("yes case OPT {} at size {size}", eps.format(opt)));
                    }
                    yes += 1;
                    if size < 2 {
                        continue;
                    }
                    let h = gen::gen_3dm_no(size, extra, seed);
                    if h.has_perfect_matching() {
                        return verdict(false, "no-instance has a perfect matching");
                    }
                    let started = Instant::now();
                    let inst = gen::reduce_3dm(&h, eps);
                    let (opt, _) = exact::opt(&inst).unwrap();
                    worst = worst.max(started.elapsed());
                    if eps.cmp(opt, one_eps).is_gt() {
                        return verdict(false, format!("no case OPT {} at size {size}", eps.format(opt)));
                    }
                    no += 1;
                }
            }
        }
    }
    verdict(
        worst < Duration::from_secs(10),
        format!("{yes} yes-instances at 2ε, {no} no-instances at most ε, slowest {worst:.2?}"),
    )
}

fn gap_two() -> Verdict {
    let started = Instant::now();
    let eps: Epsilon = "1/2".parse().unwrap();
    let w = match gen::search_gap_witness(4, 6, eps, 100_000, 1) {
        Ok(w) => w,
        Err(e) => return verdict(false, e.to_string()),
    };
    let inst = &w.instance;
    let (opt, _) = exact::opt(inst).unwrap();
    let tstar = clp::estimate_tstar(inst, clp::DEFAULT_TOL).unwrap().tstar;
    let exact_two = !opt.is_zero() && eps.key(tstar) == 2 * eps.key(opt);
    let elapsed = started.elapsed();
    verdict(
        exact_two && eps.eq_value(opt, w.opt) && elapsed < Duration::from_secs(300),
        format!(
            "n = {}, m = {}, T* = {}, OPT = {}, {} probes, {elapsed:.2?}",
            inst.n(),
            inst.m(),
            eps.format(tstar),
            eps.format(opt),
            w.probes
        ),
    )
}

fn gap_three(c: &Corpus, runs: &mut Runs) -> Verdict {
    let started = Instant::now();
    let (mut certified, mut above_three, mut failures) = (0, 0, Vec::new());
    for (k, (inst, &opt)) in c.instances.iter().zip(&c.optima).enumerate() {
        let eps = inst.epsilon();
        let est = clp::estimate_tstar(inst, clp::DEFAULT_TOL).unwrap();
        if 3 * eps.key(opt) < eps.key(est.tstar) {
            failures.push(format!("#{k}: OPT {} < T*/3", eps.format(opt)));
            continue;
        }
        if eps.key(est.tstar) > 3 * eps.den() as u128 {
            above_three += 1;
            continue;
        }
        let res = clp::solve_clp(inst, est.tstar, clp::DEFAULT_TOL).unwrap();
        match treesearch::gap3_certify(inst, &res, est.tstar) {
            Ok((a, stats)) => {
                runs.tree.absorb(&stats);
                runs.allocation(inst, &a);
                let v = a.min_value(inst).unwrap();
                if 3 * eps.key(v) < eps.key(est.tstar) {
                    failures.push(format!("#{k}: certified {} < T*/3", eps.format(v)));
                }
                certified += 1;
            }
            Err(e) => failures.push(format!("#{k}: {e}")),
        }
    }
    let elapsed = started.elapsed();
    verdict(
        failures.is_empty() && elapsed < Duration::from_secs(600),
        format!(
            "{} instances, {certified} certified at T*, {above_three} with T* > 3, {elapsed:.2?}{}",
            c.instances.len(),
            failures.first().map(|f| format!("; first failure {f}")).unwrap_or_default()
        ),
    )
}

fn quasi_ratio(c: &Corpus, runs: &mut Runs) -> Verdict {
    let started = Instant::now();
    let mut failures = Vec::new();
    for (k, (inst, &opt)) in c.instances.iter().zip(&c.optima).enumerate() {
        let eps = inst.epsilon();
        let (p, q) = (eps.num() as u128, eps.den() as u128);
        let res = treesearch::quasi_solve(inst, treesearch::DEFAULT_BUDGET);
        runs.tree.absorb(&res.stats);
        if res.stats.max_distance > treesearch::distance_bound(eps.as_f64(), inst.n()) {
            runs.distance_overruns += 1;
        }
        runs.allocation(inst, &res.allocation);
        let (v, o) = (eps.key(res.value), eps.key(opt));
        if v * (3 * q + 4 * p) < o * q {
            failures.push(format!("#{k}: {} below OPT/(3+4ε)", eps.format(res.value)));
        }
        if 4 * v < o {
            failures.push(format!("#{k}: {} below OPT/4", eps.format(res.value)));
        }
        let reachable = treesearch::probe_targets(inst)
            .into_iter()
            .rfind(|&t| eps.le(t, opt));
        if let Some(t) = reachable {
            if res.certified_t.is_none_or(|c| eps.cmp(c, t).is_lt()) {
                failures.push(format!("#{k}: search failed below OPT"));
            }
        }
    }
    let elapsed = started.elapsed();
    verdict(
        failures.is_empty() && elapsed < Duration::from_secs(600),
        format!(
            "{} instances, {elapsed:.2?}{}",
            c.instances.len(),
            failures.first().map(|f| format!("; first failure {f}")).unwrap_or_default()
        ),
    )
}

/// Instances with `ε = 1/100` where every agent can reach `3/2`: a private block
/// of lights, a share of a common pool, and contested heavy items.
fn wide_instance(seed: u64) -> (Instance, Allocation) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 3 + seed as usize % 3;
    let private: Vec<usize> = (0..n).map(|_| rng.gen_range(0..130)).collect();
    let pool: usize = private.iter().map(|p| 150 - p).sum::<usize>() + rng.gen_range(0..20);
    let heavy = n / 2 + 1;
    let mut kinds = vec![ItemKind::Heavy; heavy];
    let mut interests = vec![Vec::new(); n];
    let mut planted = vec![Vec::new(); n];
    for (i, &size) in private.iter().enumerate() {
        let start = kinds.len();
        kinds.extend(std::iter::repeat_n(ItemKind::Light, size));
        interests[i].extend(start..start + size);
        planted[i].extend(start..start + size);
    }
    let pool_start = kinds.len();
    kinds.extend(std::iter::repeat_n(ItemKind::Light, pool));
    let mut next = pool_start;
    for i in 0..n {
        interests[i].extend(pool_start..pool_start + pool);
        let need = 150 - private[i];
        planted[i].extend(next..next + need);
        next += need;
        for h in 0..heavy {
            if rng.gen_bool(0.6) {
                interests[i].push(h);
            }
        }
    }
    let inst = Instance::new("1/100".parse().unwrap(), kinds, interests).unwrap();
    (inst, Allocation::from_bundles(planted))
}

fn poly_ratio(c: &Corpus, runs: &mut Runs) -> Verdict {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut completeness_checks = 0;
    for (k, (inst, &opt)) in c.instances.iter().zip(&c.optima).enumerate() {
        let eps = inst.epsilon();
        let res = lazysearch::poly_solve(inst, PolyOptions::default());
        runs.lazy.absorb(&res.stats);
        runs.allocation(inst, &res.allocation);
        if 9 * eps.key(res.value) < eps.key(opt) {
            failures.push(format!("#{k}: {} below OPT/9", eps.format(res.value)));
        }
        // every target up to OPT must succeed wherever the growth inequality holds
        let pre = lazysearch::preprocess(inst);
        for t in treesearch::probe_targets(inst).into_iter().filter(|&t| eps.le(t, opt)) {
            let kk = eps.k_of(t).unwrap();
            let r = lazysearch::poly_r(kk);
            for p in lazysearch::p_candidates(kk, r, false) {
                if !lazysearch::growth_guaranteed(kk, r, p, lazysearch::DEFAULT_MU) {
                    continue;
                }
                let params = lazysearch::Params {
                    r: r as usize,
                    p: p as usize,
                    mu: lazysearch::DEFAULT_MU,
                };
                let rep = lazysearch::probe(inst, &pre, params, treesearch::DEFAULT_BUDGET);
                runs.lazy.absorb(&rep.stats);
                completeness_checks += 1;
                match rep.allocation {
                    Some(a) => runs.allocation(inst, &a),
                    None => failures.push(format!("#{k}: stalled at T = {} ≤ OPT", eps.format(t))),
                }
            }
        }
    }
    let mut worst_kr = 0.0f64;
    let wide = 6;
    for seed in 0..wide {
        let (inst, planted) = wide_instance(seed);
        let eps = inst.epsilon();
        let planted_value = planted.min_value(&inst).unwrap();
        if !planted.verify(&inst).is_empty() || eps.cmp(planted_value, LatticeValue::new(1, 50)).is_lt() {
            failures.push(format!("wide #{seed}: planted allocation below 3/2"));
            continue;
        }
        let res = lazysearch::poly_solve(&inst, PolyOptions::default());
        runs.lazy.absorb(&res.stats);
        runs.allocation(&inst, &res.allocation);
        match (res.k, res.r) {
            (Some(k), Some(r)) if k >= 100 => {
                let kr = k as f64 / r as f64;
                worst_kr = worst_kr.max(kr);
                if k as u128 > 6 * r as u128 {
                    failures.push(format!("wide #{seed}: k/r = {kr:.3}"));
                }
            }
            (k, _) => failures.push(format!("wide #{seed}: certified k = {k:?}")),
        }
    }
    let elapsed = started.elapsed();
    verdict(
        failures.is_empty() && elapsed < Duration::from_secs(900),
        format!(
            "{} instances, {completeness_checks} probes at T ≤ OPT, {wide} wide instances with k/r ≤ {worst_kr:.3}, {elapsed:.2?}{}",
            c.instances.len(),
            failures.first().map(|f| format!("; first failure {f}")).unwrap_or_default()
        ),
    )
}

fn baseline_ratio(c: &Corpus) -> Verdict {
    let mut failures = 0;
    for (inst, &opt) in c.instances.iter().zip(&c.optima) {
        let eps = inst.epsilon();
        let (v, a) = flowkit::baseline_solve(inst);
        let valid = a.verify(inst).is_empty() && eps.eq_value(a.min_value(inst).unwrap(), v);
        if !valid || eps.key(v) * (eps.den() as u128) < eps.key(opt) * eps.num() as u128 {
            failures += 1;
        }
    }
    verdict(failures == 0, format!("{} instances, {failures} below ε·OPT", c.instances.len()))
}

fn invariants(runs: &Runs) -> Verdict {
    let tree = &runs.tree.audit;
    let lazy = &runs.lazy.audit;
    let budget = runs.tree.budget_exhausted + runs.lazy.budget_exhausted;
    let ok = tree.total() == 0
        && lazy.total() == 0
        && runs.invalid_allocations == 0
        && runs.distance_overruns == 0
        && budget == 0;
    verdict(
        ok,
        format!(
            "{} tree iterations, {} layered iterations, {} collapses, {} allocations; \
             tree audit {tree:?}; layered audit {lazy:?}; invalid allocations {}; distance overruns {}; budgets exhausted {budget}",
            runs.tree.iterations,
            runs.lazy.iterations,
            runs.lazy.collapses,
            runs.allocations,
            runs.invalid_allocations,
            runs.distance_overruns
        ),
    )
}

fn oracles() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut mismatches = [0usize; 3];

    let mut duals = 0;
    while duals < 1000 {
        let eps = Epsilon::new(1, rng.gen_range(2..6)).unwrap();
        let m = rng.gen_range(1..=12);
        let kinds = (0..m)
            .map(|_| if rng.gen_bool(0.3) { ItemKind::Heavy } else { ItemKind::Light })
            .collect();
        let interests = vec![(0..m).filter(|_| rng.gen_bool(0.8)).collect()];
        let inst = Instance::new(eps, kinds, interests).unwrap();
        let values = inst.lattice_values();
        let t = values[rng.gen_range(1..values.len())];
        let z: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..2.0)).collect();
        let naive = common::naive_separation(&inst, 0, t, &z);
        let agree = match clp::separate(&inst, 0, t, &z) {
            Ok((cost, items)) => {
                naive.is_some_and(|b| (b - cost).abs() < 1e-9) && eps.le(t, inst.weight(&items))
            }
            Err(_) => naive.is_none(),
        };
        mismatches[0] += usize::from(!agree);
        duals += 1;
    }

    for _ in 0..1000 {
        let nodes = rng.gen_range(2..=10);
        let agents = rng.gen_range(1..=nodes);
        let arcs: Vec<(usize, usize)> = (0..rng.gen_range(0..2 * nodes))
            .map(|_| (rng.gen_range(0..nodes), rng.gen_range(0..nodes)))
            .filter(|(u, w)| u != w)
            .collect();
        let g = ResidualDigraph::from_arcs(agents, nodes, &arcs);
        let sources: Vec<bool> = (0..nodes).map(|v| v < agents && rng.gen_bool(0.5)).collect();
        let sinks: Vec<bool> = (0..nodes).map(|v| v < agents && rng.gen_bool(0.5)).collect();
        let f = disjoint_paths(&g, &sources, &sinks, &PathFlow::new(nodes));
        let naive = common::naive_disjoint_paths(&g, &sources, &sinks);
        mismatches[1] += usize::from(!f.is_valid(&g, &sources, &sinks) || f.value() != naive);
    }

    let mut exact_cases = 0;
    for seed in 0..600u64 {
        let n = 1 + seed as usize % 4;
        let m = (12 / n).min(1 + seed as usize % 6);
        let heavy = seed as usize % (m + 1);
        let eps = Epsilon::new(1, 2 + seed % 3).unwrap();
        let inst = gen::gen_random(n, heavy, m - heavy, 0.6, eps, seed);
        let (v, a) = exact::opt(&inst).unwrap();
        let ok = eps.eq_value(v, common::naive_opt(&inst))
            && a.verify(&inst).is_empty()
            && eps.eq_value(a.min_value(&inst).unwrap(), v);
        mismatches[2] += usize::from(!ok);
        exact_cases += 1;
    }
    verdict(
        mismatches == [0, 0, 0],
        format!(
            "separation {}/{duals}, disjoint paths {}/1000, exact {}/{exact_cases} mismatches",
            mismatches[0], mismatches[1], mismatches[2]
        ),
    )
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let c = corpus();
    let mut runs = Runs::default();
    let results = [
        ("hardness dichotomy", hardness()),
        ("integrality gap 2", gap_two()),
        ("integrality gap at most 3", gap_three(&c, &mut runs)),
        ("quasi-polynomial ratio", quasi_ratio(&c, &mut runs)),
        ("polynomial ratio", poly_ratio(&c, &mut runs)),
        ("baseline ratio", baseline_ratio(&c)),
        ("invariant audits", invariants(&runs)),
        ("oracle equivalences", oracles()),
    ];
    let mut failed = 0;
    for (k, (name, v)) in results.iter().enumerate() {
        println!(
            "criterion {} {}: {} ({})",
            k + 1,
            name,
            if v.ok { "PASS" } else { "FAIL" },
            v.detail
        );
        failed += usize::from(!v.ok);
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
