//! Brute-force oracles and corpora shared by the integration tests.
#![allow(dead_code)]

use fairalloc::flowkit::ResidualDigraph;
use fairalloc::gen;
use fairalloc::model::{Epsilon, Instance, LatticeValue};

/// Optimum by trying every owner (or none) for every item.
pub fn naive_opt(inst: &Instance) -> LatticeValue {
    let eps = inst.epsilon();
    let (n, m) = (inst.n(), inst.m());
    let mut owner = vec![0usize; m];
    let mut best = LatticeValue::ZERO;
    loop {
        let mut bundles = vec![Vec::new(); n];
        let mut ok = true;
        for (j, &o) in owner.iter().enumerate() {
            if o > 0 {
                if !inst.is_interested(o - 1, j) {
                    ok = false;
                    break;
                }
                bundles[o - 1].push(j);
            }
        }
        if ok {
            let v = bundles
                .iter()
                .map(|b| inst.weight(b))
                .reduce(|a, b| eps.min(a, b))
                .unwrap();
            best = eps.max(best, v);
        }
        let mut j = 0;
        while j < m && owner[j] == n {
            owner[j] = 0;
            j += 1;
        }
        if j == m {
            return best;
        }
        owner[j] += 1;
    }
}

/// Cheapest subset of the agent's interests worth at least `t`, by enumeration.
pub fn naive_separation(inst: &Instance, agent: usize, t: LatticeValue, z: &[f64]) -> Option<f64> {
    let eps = inst.epsilon();
    let b = inst.interests(agent);
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << b.len()) {
        let s: Vec<usize> = (0..b.len()).filter(|k| mask >> k & 1 == 1).map(|k| b[k]).collect();
        if eps.le(t, inst.weight(&s)) {
            let c: f64 = s.iter().map(|&j| z[j]).sum();
            if best.is_none_or(|x| c < x) {
                best = Some(c);
            }
        }
    }
    best
}

/// Largest number of node-disjoint paths from `sources` to `sinks`, by exhaustive search.
pub fn naive_disjoint_paths(g: &ResidualDigraph, sources: &[bool], sinks: &[bool]) -> usize {
    fn route(
        g: &ResidualDigraph,
        v: usize,
        sinks: &[bool],
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
        path: &mut Vec<usize>,
    ) {
        if sinks[v] {
            out.push(path.clone());
        }
        for &w in g.out_arcs(v) {
            if !used[w] {
                used[w] = true;
                path.push(w);
                route(g, w, sinks, used, out, path);
                path.pop();
                used[w] = false;
            }
        }
    }
    fn best(
        g: &ResidualDigraph,
        from: usize,
        sources: &[bool],
        sinks: &[bool],
        used: &mut Vec<bool>,
    ) -> usize {
        let Some(s) = (from..g.node_count()).find(|&v| sources[v]) else {
            return 0;
        };
        let mut top = best(g, s + 1, sources, sinks, used);
        if !used[s] {
            used[s] = true;
            let mut paths = Vec::new();
            route(g, s, sinks, used, &mut paths, &mut vec![s]);
            for p in paths {
                for &v in &p {
                    used[v] = true;
                }
                top = top.max(1 + best(g, s + 1, sources, sinks, used));
                for &v in &p[1..] {
                    used[v] = false;
                }
            }
            used[s] = false;
        }
        top
    }
    best(g, 0, sources, sinks, &mut vec![false; g.node_count()])
}

/// The shared random corpus: small enough for the exact solver.
pub fn random_corpus(count: usize) -> Vec<Instance> {
    let epsilons: [Epsilon; 3] = ["1/2", "1/3", "1/4"].map(|s| s.parse().unwrap());
    let densities = [0.3, 0.6, 1.0];
    (0..count as u64)
        .map(|seed| {
            let s = seed as usize;
            let eps = epsilons[s % 3];
            let density = densities[(s / 3) % 3];
            let n = 2 + (s / 9) % 4;
            let m_heavy = (s * 7) % 5;
            let m_light = 3 + (s * 5) % (10 - m_heavy);
            gen::gen_random(n, m_heavy, m_light, density, eps, seed)
        })
        .collect()
}
