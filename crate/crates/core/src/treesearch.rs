//! Alternating-tree local search for "one heavy item or `r` light items" matchings.
//!
//! From an unmatched root the search grows a tree of addable edges (fresh
//! bundles for tree agents) and the matching edges blocking them. An addable
//! edge with no blocker is contracted: its agent swaps to it, freeing the
//! blocking edge that brought the agent into the tree, possibly cascading down
//! to the root.

use std::cmp::Ordering;

use thiserror::Error;

use crate::clp::{self, ClpError, ClpResult, SupportHypergraph};
use crate::flowkit;
use crate::model::{Allocation, Bundle, Instance, LatticeValue, Matching};

pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Policy {
    /// Take the first addable edge found.
    Arbitrary,
    /// Take an addable edge with the fewest light edges on its root path.
    Closest,
}

#[derive(Clone, Copy, Debug)]
pub enum Source<'a> {
    /// Every heavy item and every `r` fresh lights an agent likes.
    Full,
    /// Only edges of a fractional solution's support.
    Support(&'a SupportHypergraph),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Matched,
    Stalled,
    BudgetExceeded,
}

/// Invariant violations observed during a search; all zero on a correct run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Audit {
    pub signature_not_decreasing: usize,
    pub signature_out_of_bounds: usize,
    pub parity: usize,
    pub stale_blocker: usize,
    pub invalid_matching: usize,
}

impl Audit {
    pub fn total(&self) -> usize {
        self.signature_not_decreasing
            + self.signature_out_of_bounds
            + self.parity
            + self.stale_blocker
            + self.invalid_matching
    }

    pub fn absorb(&mut self, other: &Audit) {
        self.signature_not_decreasing += other.signature_not_decreasing;
        self.signature_out_of_bounds += other.signature_out_of_bounds;
        self.parity += other.parity;
        self.stale_blocker += other.stale_blocker;
        self.invalid_matching += other.invalid_matching;
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TreeStats {
    pub iterations: usize,
    pub contractions: usize,
    /// Largest distance of an edge picked by the search.
    pub max_distance: usize,
    /// Roots abandoned because the iteration budget ran out.
    pub budget_exhausted: usize,
    pub audit: Audit,
}

impl TreeStats {
    pub fn absorb(&mut self, other: &TreeStats) {
        self.iterations += other.iterations;
        self.contractions += other.contractions;
        self.max_distance = self.max_distance.max(other.max_distance);
        self.budget_exhausted += other.budget_exhausted;
        self.audit.absorb(&other.audit);
    }
}

/// `2L + 1` with `L = ⌈log_{1+ε/10} n⌉`: the distance within which the closest
/// policy always finds an addable edge when the target is attainable.
pub fn distance_bound(eps: f64, n: usize) -> usize {
    let l = ((n as f64).ln() / (1.0 + eps / 10.0).ln()).ceil().max(0.0);
    2 * l as usize + 1
}

#[derive(Clone, Debug)]
struct TreeEdge {
    agent: usize,
    bundle: Bundle,
    blockers: Vec<usize>,
    dist: usize,
}

struct Tree {
    root: usize,
    edges: Vec<TreeEdge>,
    introducer: Vec<Option<usize>>,
    agent_dist: Vec<Option<usize>>,
    agents: Vec<usize>,
}

/// Lexicographic signature; an implicit infinity follows the last coordinate.
type Signature = Vec<i64>;

pub(crate) fn sig_cmp(a: &[i64], b: &[i64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    // the shorter one carries infinity at the first differing position
    b.len().cmp(&a.len())
}

impl Tree {
    fn new(root: usize, n: usize) -> Self {
        let mut t = Tree {
            root,
            edges: Vec::new(),
            introducer: vec![None; n],
            agent_dist: vec![None; n],
            agents: Vec::new(),
        };
        t.rebuild();
        t
    }

    fn rebuild(&mut self) {
        self.introducer.fill(None);
        self.agent_dist.fill(None);
        self.agents.clear();
        self.agents.push(self.root);
        self.agent_dist[self.root] = Some(0);
        for (k, e) in self.edges.iter().enumerate() {
            let d = e.dist + usize::from(!e.bundle.is_heavy());
            for &b in &e.blockers {
                self.introducer[b] = Some(k);
                self.agent_dist[b] = Some(d);
                self.agents.push(b);
            }
        }
    }

    fn in_tree_items(&self, inst: &Instance, m: &Matching) -> Vec<bool> {
        let mut used = vec![false; inst.m()];
        for e in &self.edges {
            for &j in e.bundle.items() {
                used[j] = true;
            }
            for &b in &e.blockers {
                for &j in m.bundle(b).map(Bundle::items).unwrap_or(&[]) {
                    used[j] = true;
                }
            }
        }
        used
    }

    fn signature(&self, policy: Policy, m: &Matching) -> Signature {
        match policy {
            Policy::Arbitrary => self.edges.iter().map(|e| e.blockers.len() as i64).collect(),
            Policy::Closest => {
                let top = self
                    .edges
                    .iter()
                    .map(|e| e.dist + 1)
                    .max()
                    .unwrap_or(0);
                let mut a = vec![0i64; top + 2];
                let mut b = vec![0i64; top + 2];
                for e in &self.edges {
                    a[e.dist] -= 1;
                    for &f in &e.blockers {
                        let d = self.agent_dist[f].unwrap_or(0);
                        match m.bundle(f) {
                            Some(Bundle::Heavy(_)) => b[d] += 1,
                            _ => b[d - 1] += 1,
                        }
                    }
                }
                let mut s: Signature = a.into_iter().zip(b).flat_map(|(x, y)| [x, y]).collect();
                while s.last() == Some(&0) {
                    s.pop();
                }
                s
            }
        }
    }
}

/// Grows matchings for a fixed light-bundle size `r`.
#[derive(Clone, Copy, Debug)]
pub struct Searcher<'a> {
    pub inst: &'a Instance,
    pub r: usize,
    pub policy: Policy,
    pub source: Source<'a>,
    pub budget: usize,
}

impl<'a> Searcher<'a> {
    pub fn new(inst: &'a Instance, r: usize, policy: Policy, source: Source<'a>) -> Self {
        Searcher {
            inst,
            r,
            policy,
            source,
            budget: DEFAULT_BUDGET,
        }
    }

    fn heavy_options(&self, agent: usize) -> &[usize] {
        match self.source {
            Source::Full => self.inst.heavy_interests(agent),
            Source::Support(h) => &h.heavy[agent],
        }
    }

    /// `r` fresh items from `pool`, unmatched ones first, then by id.
    fn pick_light<'b>(
        &self,
        pool: impl Iterator<Item = &'b usize>,
        fresh: &[bool],
        m: &Matching,
    ) -> Option<Vec<usize>> {
        let mut cand: Vec<usize> = pool.copied().filter(|&j| fresh[j]).collect();
        if cand.len() < self.r || self.r == 0 {
            return None;
        }
        cand.sort_by_key(|&j| (m.owner(j).is_some(), j));
        cand.truncate(self.r);
        cand.sort_unstable();
        Some(cand)
    }

    fn light_options(&self, agent: usize, fresh: &[bool], m: &Matching) -> Vec<Vec<usize>> {
        match self.source {
            Source::Full => self
                .pick_light(self.inst.light_interests(agent).iter(), fresh, m)
                .into_iter()
                .collect(),
            Source::Support(h) => h.light[agent]
                .iter()
                .filter_map(|c| self.pick_light(c.iter(), fresh, m))
                .collect(),
        }
    }

    fn find_addable(&self, tree: &Tree, m: &Matching) -> Option<(usize, Bundle, usize)> {
        let fresh: Vec<bool> = tree
            .in_tree_items(self.inst, m)
            .into_iter()
            .map(|u| !u)
            .collect();
        let mut best: Option<(usize, Bundle, usize)> = None;
        for &a in &tree.agents {
            let ad = tree.agent_dist[a].expect("tree agent has a distance");
            let heavy = self
                .heavy_options(a)
                .iter()
                .filter(|&&j| fresh[j])
                .map(|&j| (Bundle::Heavy(j), ad));
            let light = self
                .light_options(a, &fresh, m)
                .into_iter()
                .map(|s| (Bundle::Light(s), ad + 1));
            for (bundle, d) in heavy.chain(light) {
                if self.policy == Policy::Arbitrary {
                    return Some((a, bundle, d));
                }
                let better = match &best {
                    None => true,
                    Some((ba, bb, bd)) => (d, a, bundle.items()) < (*bd, *ba, bb.items()),
                };
                if better {
                    best = Some((a, bundle, d));
                }
            }
        }
        best
    }

    fn blockers_of(&self, bundle: &Bundle, m: &Matching) -> Vec<usize> {
        let mut b: Vec<usize> = bundle.items().iter().filter_map(|&j| m.owner(j)).collect();
        b.sort_unstable();
        b.dedup();
        b
    }

    /// Contracts `edge`; true when the root ends up matched.
    fn contract(
        &self,
        tree: &mut Tree,
        m: &mut Matching,
        mut edge: TreeEdge,
        stats: &mut TreeStats,
    ) -> bool {
        loop {
            stats.contractions += 1;
            let a = edge.agent;
            m.release(a);
            m.assign(a, edge.bundle);
            if a == tree.root {
                return true;
            }
            let k = tree.introducer[a].expect("non-root tree agent has an introducer");
            tree.edges.truncate(k + 1);
            tree.edges[k].blockers.retain(|&b| b != a);
            if tree.edges[k].blockers.is_empty() {
                edge = tree.edges.pop().expect("edge k exists");
                continue;
            }
            tree.rebuild();
            return false;
        }
    }

    fn audit_structure(&self, tree: &Tree, m: &Matching, audit: &mut Audit) {
        for e in &tree.edges {
            if self.policy == Policy::Closest && e.bundle.is_heavy() != (e.dist % 2 == 0) {
                audit.parity += 1;
            }
            for &b in &e.blockers {
                let hits = m
                    .bundle(b)
                    .is_some_and(|f| f.items().iter().any(|j| e.bundle.items().contains(j)));
                if !hits {
                    audit.stale_blocker += 1;
                }
                if self.policy == Policy::Closest && tree.agent_dist[b].is_some_and(|d| d % 2 == 1)
                {
                    audit.parity += 1;
                }
            }
        }
        if self.policy == Policy::Arbitrary {
            let n = self.inst.n();
            let sum: usize = tree.edges.iter().map(|e| e.blockers.len()).sum();
            if sum > n || tree.edges.len() > n {
                audit.signature_out_of_bounds += 1;
            }
        }
        if !m.is_consistent(self.inst) {
            audit.invalid_matching += 1;
        }
    }

    /// Tries to match `root` while keeping every matched agent matched.
    pub fn extend(&self, m: &mut Matching, root: usize, stats: &mut TreeStats) -> Outcome {
        assert!(!m.is_matched(root), "root {root} is already matched");
        let mut tree = Tree::new(root, self.inst.n());
        let mut prev = tree.signature(self.policy, m);
        let mut spent = 0;
        loop {
            if spent == self.budget {
                return Outcome::BudgetExceeded;
            }
            spent += 1;
            stats.iterations += 1;
            let Some((agent, bundle, dist)) = self.find_addable(&tree, m) else {
                return Outcome::Stalled;
            };
            stats.max_distance = stats.max_distance.max(dist);
            let blockers = self.blockers_of(&bundle, m);
            let edge = TreeEdge {
                agent,
                bundle,
                blockers,
                dist,
            };
            if edge.blockers.is_empty() {
                if self.contract(&mut tree, m, edge, stats) {
                    if !m.is_consistent(self.inst) {
                        stats.audit.invalid_matching += 1;
                    }
                    return Outcome::Matched;
                }
            } else {
                tree.edges.push(edge);
                tree.rebuild();
            }
            let sig = tree.signature(self.policy, m);
            if sig_cmp(&sig, &prev) != Ordering::Less {
                stats.audit.signature_not_decreasing += 1;
            }
            prev = sig;
            self.audit_structure(&tree, m, &mut stats.audit);
        }
    }

    /// Matches every agent, starting from `m`. On failure reports the stuck agent.
    pub fn match_all(
        &self,
        m: &mut Matching,
        stats: &mut TreeStats,
    ) -> Result<(), (usize, Outcome)> {
        for i in 0..self.inst.n() {
            if m.is_matched(i) {
                continue;
            }
            let before = m.matched_count();
            match self.extend(m, i, stats) {
                Outcome::Matched => {
                    if m.matched_count() != before + 1 {
                        stats.audit.invalid_matching += 1;
                    }
                }
                other => {
                    if other == Outcome::BudgetExceeded {
                        stats.budget_exhausted += 1;
                    }
                    return Err((i, other));
                }
            }
        }
        Ok(())
    }
}

/// `r = ⌈k/(3+4ε)⌉` computed exactly: `⌈k·q/(3q+4p)⌉`.
pub fn quasi_r(k: u64, eps_num: u64, eps_den: u64) -> u64 {
    (k * eps_den).div_ceil(3 * eps_den + 4 * eps_num)
}

/// Every lattice value in `(0, 3/2]`, ascending.
pub fn probe_targets(inst: &Instance) -> Vec<LatticeValue> {
    let eps = inst.epsilon();
    let cap = 3 * eps.den() as u128;
    inst.lattice_values()
        .into_iter()
        .filter(|&v| !v.is_zero() && 2 * eps.key(v) <= cap)
        .collect()
}

#[derive(Clone, Debug)]
pub struct QuasiResult {
    pub value: LatticeValue,
    pub allocation: Allocation,
    /// Largest target whose probe matched every agent.
    pub certified_t: Option<LatticeValue>,
    pub r: Option<u64>,
    pub used_baseline: bool,
    pub stats: TreeStats,
}

/// Binary search over targets `T ≤ 3/2` with the closest-edge search, combined
/// with the item-count baseline.
pub fn quasi_solve(inst: &Instance, budget: usize) -> QuasiResult {
    let eps = inst.epsilon();
    let targets = probe_targets(inst);
    let mut stats = TreeStats::default();
    let mut best: Option<(LatticeValue, u64, Matching)> = None;
    let (mut lo, mut hi) = (0usize, targets.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        let t = targets[mid];
        let k = eps.k_of(t).expect("targets are positive");
        let r = quasi_r(k, eps.num(), eps.den()) as usize;
        let mut s = Searcher::new(inst, r, Policy::Closest, Source::Full);
        s.budget = budget;
        let mut m = Matching::new(inst.n(), inst.m());
        let mut probe_stats = TreeStats::default();
        let ok = s.match_all(&mut m, &mut probe_stats).is_ok();
        stats.absorb(&probe_stats);
        if ok {
            best = Some((t, r as u64, m));
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    let (base_value, base_alloc) = flowkit::baseline_solve(inst);
    let (certified_t, r, searched) = match best {
        Some((t, r, m)) => {
            let a = m.to_allocation();
            let v = a.min_value(inst).expect("search keeps the matching valid");
            (Some(t), Some(r), Some((v, a)))
        }
        None => (None, None, None),
    };
    let (value, allocation, used_baseline) = match searched {
        Some((v, a)) if !eps.cmp(v, base_value).is_lt() => (v, a, false),
        _ => (base_value, base_alloc, true),
    };
    QuasiResult {
        value,
        allocation,
        certified_t,
        r,
        used_baseline,
        stats,
    }
}

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error("configuration LP is not feasible at the target")]
    Infeasible,
    #[error("targets above 3 cannot be certified by heavy-or-light patterns")]
    OutOfRange,
    #[error(transparent)]
    Clp(#[from] ClpError),
    #[error("search stalled at agent {agent} ({outcome:?})")]
    Stalled { agent: usize, outcome: Outcome },
}

/// Rounds a feasible fractional solution at `t` to an allocation worth `t/3`.
pub fn gap3_certify(
    inst: &Instance,
    res: &ClpResult,
    t: LatticeValue,
) -> Result<(Allocation, TreeStats), CertifyError> {
    let eps = inst.epsilon();
    if !res.feasible {
        return Err(CertifyError::Infeasible);
    }
    if eps.key(t) > 3 * eps.den() as u128 {
        return Err(CertifyError::OutOfRange);
    }
    let mut stats = TreeStats::default();
    if t.is_zero() {
        return Ok((Allocation::empty(inst.n()), stats));
    }
    let sol = clp::minimalize(inst, res, t)?;
    let r = sol.k.div_ceil(3) as usize;
    let support = clp::build_support_hypergraph(&sol, r)?;
    let s = Searcher::new(inst, r, Policy::Arbitrary, Source::Support(&support));
    let mut m = Matching::new(inst.n(), inst.m());
    s.match_all(&mut m, &mut stats)
        .map_err(|(agent, outcome)| CertifyError::Stalled { agent, outcome })?;
    Ok((m.to_allocation(), stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Epsilon, ItemKind};

    fn inst(eps: (u64, u64), kinds: &str, interests: Vec<Vec<usize>>) -> Instance {
        let kinds = kinds
            .chars()
            .map(|c| if c == 'H' { ItemKind::Heavy } else { ItemKind::Light })
            .collect();
        Instance::new(Epsilon::new(eps.0, eps.1).unwrap(), kinds, interests).unwrap()
    }

    #[test]
    fn private_items_need_one_iteration_each() {
        let i = inst((1, 2), "HHH", vec![vec![0], vec![1], vec![2]]);
        let s = Searcher::new(&i, 2, Policy::Closest, Source::Full);
        let mut m = Matching::new(3, 3);
        let mut st = TreeStats::default();
        s.match_all(&mut m, &mut st).unwrap();
        assert_eq!(st.iterations, 3);
        assert_eq!(st.audit.total(), 0);
    }

    #[test]
    fn swap_heavy_for_lights() {
        // a0 likes h; a1 likes h and two lights; a1 starts on h
        let i = inst((1, 2), "HLL", vec![vec![0], vec![0, 1, 2]]);
        let mut m = Matching::new(2, 3);
        m.assign(1, Bundle::Heavy(0));
        let s = Searcher::new(&i, 2, Policy::Arbitrary, Source::Full);
        let mut st = TreeStats::default();
        assert_eq!(s.extend(&mut m, 0, &mut st), Outcome::Matched);
        assert_eq!(m.bundle(0), Some(&Bundle::Heavy(0)));
        assert_eq!(m.bundle(1), Some(&Bundle::Light(vec![1, 2])));
        assert_eq!(st.audit.total(), 0);
    }

    #[test]
    fn chained_contraction() {
        // a0 -> h0 held by a1; a1 -> h1 held by a2; a2 has free lights
        let i = inst(
            (1, 2),
            "HHLL",
            vec![vec![0], vec![0, 1], vec![1, 2, 3]],
        );
        let mut m = Matching::new(3, 4);
        m.assign(1, Bundle::Heavy(0));
        m.assign(2, Bundle::Heavy(1));
        let s = Searcher::new(&i, 2, Policy::Closest, Source::Full);
        let mut st = TreeStats::default();
        assert_eq!(s.extend(&mut m, 0, &mut st), Outcome::Matched);
        assert_eq!(m.bundle(0), Some(&Bundle::Heavy(0)));
        assert_eq!(m.bundle(1), Some(&Bundle::Heavy(1)));
        assert_eq!(m.bundle(2), Some(&Bundle::Light(vec![2, 3])));
        assert!(st.contractions >= 3);
        assert_eq!(st.audit.total(), 0);
    }

    #[test]
    fn stalls_without_enough_items() {
        let i = inst((1, 2), "LLL", vec![vec![0, 1, 2], vec![0, 1, 2]]);
        let s = Searcher::new(&i, 2, Policy::Closest, Source::Full);
        let mut m = Matching::new(2, 3);
        let mut st = TreeStats::default();
        assert_eq!(s.match_all(&mut m, &mut st), Err((1, Outcome::Stalled)));
    }

    #[test]
    fn quasi_r_formula() {
        // k = 100, ε = 1/100: ⌈100/3.04⌉ = 33
        assert_eq!(quasi_r(100, 1, 100), 33);
        assert_eq!(quasi_r(2, 1, 2), 1);
    }

    #[test]
    fn quasi_empty_agent() {
        let i = inst((1, 4), "LL", vec![vec![0, 1], vec![]]);
        let r = quasi_solve(&i, DEFAULT_BUDGET);
        assert_eq!(r.value, LatticeValue::ZERO);
    }

    #[test]
    fn quasi_all_light_shared() {
        let all: Vec<usize> = (0..8).collect();
        let i = inst((1, 4), "LLLLLLLL", vec![all.clone(), all]);
        let r = quasi_solve(&i, DEFAULT_BUDGET);
        assert!(r.allocation.verify(&i).is_empty());
        assert_eq!(r.value, LatticeValue::new(0, 4));
    }

    #[test]
    fn distance_bound_values() {
        assert_eq!(distance_bound(0.5, 1), 1);
        assert!(distance_bound(0.1, 10) > 200);
    }

    #[test]
    fn signature_order() {
        assert_eq!(sig_cmp(&[1, 2], &[1]), Ordering::Less);
        assert_eq!(sig_cmp(&[0], &[1]), Ordering::Less);
        assert_eq!(sig_cmp(&[1], &[1]), Ordering::Equal);
    }
}
