//! Layered search with lazy updates.
//!
//! Heavy items never enter the alternating structure. They live in the residual
//! digraph of the heavy matching, where node-disjoint paths connect blocking
//! light edges to addable light edges. A layer is built from every addable edge
//! found at once; a layer whose blocking edges reach enough unblocked edges is
//! collapsed in one batch by re-routing heavy items along those paths.

use std::cmp::Ordering;

use crate::flowkit::{self, disjoint_paths, PathFlow, ResidualDigraph};
use crate::model::{Allocation, Bundle, Instance, LatticeValue, Matching};
use crate::treesearch::{probe_targets, sig_cmp, Outcome, DEFAULT_BUDGET};

pub const DEFAULT_MU: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Params {
    /// Light items per blocking (matching) edge.
    pub r: usize,
    /// Light items per addable edge.
    pub p: usize,
    /// Collapse threshold.
    pub mu: f64,
}

/// `r = max(⌈k/9⌉, ⌈(k−10)/(3+2√2)⌉)`.
pub fn poly_r(k: u64) -> u64 {
    let by_nine = k.div_ceil(9);
    let asymptotic = if k > 10 {
        ((k - 10) as f64 / (3.0 + 2.0 * 2f64.sqrt())).ceil() as u64
    } else {
        0
    };
    by_nine.max(asymptotic)
}

/// The two analysed choices of `p` for a given `r`, restricted to `r < p < k`.
pub fn p_candidates(k: u64, r: u64, sweep: bool) -> Vec<u64> {
    let mut ps = vec![3 * r - 1, ((2.0 + 2f64.sqrt()) * r as f64).ceil() as u64 - 1];
    if sweep {
        ps.extend(r + 1..k);
    }
    let mut seen = Vec::new();
    for p in ps {
        if p > r && p < k && !seen.contains(&p) {
            seen.push(p);
        }
    }
    seen
}

/// Whether the growth inequality fails for `(k, r, p, μ)`, which is what rules
/// out stalls when the target is attainable.
pub fn growth_guaranteed(k: u64, r: u64, p: u64, mu: f64) -> bool {
    let (k, r, p) = (k as f64, r as f64, p as f64);
    let lhs = r / (p - r + 1.0);
    let rhs = (k - p - r + 1.0 - mu * (2.0 * k - (1.0 + mu * mu) * p + (2.0 + mu) * r))
        / (k - p + r);
    lhs <= rhs
}

/// Result of removing heavy items that only one agent wants.
#[derive(Clone, Debug)]
pub struct Preprocessed {
    /// Remaining instance, absent when every agent was served.
    pub sub: Option<Instance>,
    /// Original id of every remaining agent.
    pub agents: Vec<usize>,
    /// Original id of every remaining item.
    pub items: Vec<usize>,
    /// `(agent, heavy item)` pairs fixed up front, in original ids.
    pub forced: Vec<(usize, usize)>,
    /// Maximum heavy matching of the remaining instance.
    pub heavy: flowkit::HeavyMatching,
}

pub fn preprocess(inst: &Instance) -> Preprocessed {
    let mut agent_alive = vec![true; inst.n()];
    let mut item_alive = vec![true; inst.m()];
    let mut forced = Vec::new();
    loop {
        let single = (0..inst.m())
            .filter(|&j| item_alive[j] && inst.is_heavy(j))
            .find_map(|j| {
                let mut fans = (0..inst.n()).filter(|&i| agent_alive[i] && inst.is_interested(i, j));
                match (fans.next(), fans.next()) {
                    (Some(i), None) => Some((i, j)),
                    _ => None,
                }
            });
        let Some((i, j)) = single else { break };
        forced.push((i, j));
        agent_alive[i] = false;
        item_alive[j] = false;
    }
    let agents: Vec<usize> = (0..inst.n()).filter(|&i| agent_alive[i]).collect();
    let items: Vec<usize> = (0..inst.m()).filter(|&j| item_alive[j]).collect();
    let (sub, heavy) = if agents.is_empty() {
        (None, flowkit::HeavyMatching::empty(0, 0))
    } else {
        let (sub, _) = inst.restrict(&agents, &items);
        let heavy = flowkit::max_heavy_matching(&sub);
        (Some(sub), heavy)
    };
    Preprocessed {
        sub,
        agents,
        items,
        forced,
        heavy,
    }
}

/// Invariant violations; all zero on a correct run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LazyAudit {
    pub signature_not_decreasing: usize,
    /// Layers whose blockers below cannot route to every addable edge up to them.
    pub path_deficit: usize,
    pub counting_bound: usize,
    pub heavy_count_changed: usize,
    pub invalid_matching: usize,
    pub flow_mismatch: usize,
    pub weak_unblocked: usize,
    /// Layer edges of the wrong size or kind, or overlapping each other.
    pub layer_structure: usize,
}

impl LazyAudit {
    pub fn total(&self) -> usize {
        self.signature_not_decreasing
            + self.path_deficit
            + self.counting_bound
            + self.heavy_count_changed
            + self.invalid_matching
            + self.flow_mismatch
            + self.weak_unblocked
            + self.layer_structure
    }

    pub fn absorb(&mut self, o: &LazyAudit) {
        self.signature_not_decreasing += o.signature_not_decreasing;
        self.path_deficit += o.path_deficit;
        self.counting_bound += o.counting_bound;
        self.heavy_count_changed += o.heavy_count_changed;
        self.invalid_matching += o.invalid_matching;
        self.flow_mismatch += o.flow_mismatch;
        self.weak_unblocked += o.weak_unblocked;
        self.layer_structure += o.layer_structure;
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LazyStats {
    pub iterations: usize,
    pub collapses: usize,
    pub layers_peak: usize,
    /// New layers smaller than `μ²` times everything below them.
    pub growth_shortfalls: usize,
    /// Signatures, right after a layer is built, with a coordinate below its predecessor.
    pub coordinate_drops: usize,
    /// Roots abandoned because the iteration budget ran out.
    pub budget_exhausted: usize,
    pub audit: LazyAudit,
}

impl LazyStats {
    pub fn absorb(&mut self, o: &LazyStats) {
        self.iterations += o.iterations;
        self.collapses += o.collapses;
        self.layers_peak = self.layers_peak.max(o.layers_peak);
        self.growth_shortfalls += o.growth_shortfalls;
        self.coordinate_drops += o.coordinate_drops;
        self.budget_exhausted += o.budget_exhausted;
        self.audit.absorb(&o.audit);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct AddEdge {
    agent: usize,
    items: Vec<usize>,
}

#[derive(Clone, Debug, Default)]
struct Layer {
    x: Vec<AddEdge>,
    y: Vec<usize>,
}

struct LazyState<'a> {
    inst: &'a Instance,
    params: Params,
    root: usize,
    layers: Vec<Layer>,
    unblocked: Vec<AddEdge>,
}

/// The node-disjoint paths of `W` split by the layer of their start agent.
struct Routing {
    paths: Vec<(usize, Vec<usize>)>,
    graph: ResidualDigraph,
}

impl<'a> LazyState<'a> {
    fn new(inst: &'a Instance, params: Params, root: usize) -> Self {
        LazyState {
            inst,
            params,
            root,
            layers: vec![Layer {
                x: Vec::new(),
                y: vec![root],
            }],
            unblocked: Vec::new(),
        }
    }

    fn top(&self) -> usize {
        self.layers.len() - 1
    }

    fn graph(&self, m: &Matching) -> ResidualDigraph {
        let heavy_of: Vec<Option<usize>> = (0..self.inst.n())
            .map(|i| match m.bundle(i) {
                Some(Bundle::Heavy(j)) => Some(*j),
                _ => None,
            })
            .collect();
        ResidualDigraph::build(self.inst, &heavy_of).expect("matching yields a valid digraph")
    }

    fn sources(&self, upto: usize) -> Vec<bool> {
        flowkit::mask(
            self.inst.n(),
            self.layers[..=upto].iter().flat_map(|l| l.y.iter().copied()),
        )
    }

    fn sinks(&self, x_upto: usize, extra: &[AddEdge]) -> Vec<bool> {
        flowkit::mask(
            self.inst.n(),
            self.layers[..=x_upto.min(self.top())]
                .iter()
                .flat_map(|l| l.x.iter())
                .chain(&self.unblocked)
                .chain(extra)
                .map(|e| e.agent),
        )
    }

    fn reserved(&self, m: &Matching, pending: &[AddEdge]) -> Vec<bool> {
        let mut used = vec![false; self.inst.m()];
        for layer in &self.layers {
            for e in &layer.x {
                e.items.iter().for_each(|&j| used[j] = true);
            }
            for &a in &layer.y {
                if let Some(b) = m.bundle(a) {
                    b.items().iter().for_each(|&j| used[j] = true);
                }
            }
        }
        for e in self.unblocked.iter().chain(pending) {
            e.items.iter().for_each(|&j| used[j] = true);
        }
        used
    }

    fn free_count(e: &AddEdge, m: &Matching) -> usize {
        e.items.iter().filter(|&&j| m.owner(j).is_none()).count()
    }

    fn signature(&self) -> Vec<i64> {
        let mu = self.params.mu;
        let unit = -(-mu).ln_1p();
        (1..self.layers.len())
            .map(|i| {
                let y = self.layers[i].y.len();
                if y == 0 {
                    i64::MIN
                } else {
                    (((y as f64).ln() - 2.0 * i as f64 * mu.ln()) / unit).floor() as i64
                }
            })
            .collect()
    }

    /// Adds every addable edge; returns (new layer built, unblocked set grew).
    fn build_layer(&mut self, m: &Matching, stats: &mut LazyStats) -> (bool, bool) {
        let Params { r, p, mu } = self.params;
        let g = self.graph(m);
        let l = self.top();
        let sources = self.sources(l);
        let mut pending: Vec<AddEdge> = Vec::new();
        let mut sinks = self.sinks(l, &[]);
        let mut flow = disjoint_paths(&g, &sources, &sinks, &PathFlow::new(g.node_count()));
        let mut grew = false;
        loop {
            let reach = flow.residual_reachable(&g, &sources);
            let reserved = self.reserved(m, &pending);
            let found = (0..self.inst.n()).find_map(|i| {
                if sinks[i] || !reach[i] {
                    return None;
                }
                let mut fresh: Vec<usize> = self
                    .inst
                    .light_interests(i)
                    .iter()
                    .copied()
                    .filter(|&j| !reserved[j])
                    .collect();
                if fresh.len() < p {
                    return None;
                }
                fresh.sort_by_key(|&j| (m.owner(j).is_some(), j));
                fresh.truncate(p);
                fresh.sort_unstable();
                Some(AddEdge { agent: i, items: fresh })
            });
            let Some(edge) = found else { break };
            sinks[edge.agent] = true;
            let augmented = flow.augment(&g, &sources, &sinks);
            debug_assert!(augmented, "reachable sink must raise the flow");
            if Self::free_count(&edge, m) >= r {
                self.unblocked.push(edge);
                grew = true;
            } else {
                pending.push(edge);
            }
        }
        if pending.is_empty() {
            return (false, grew);
        }
        let mut y: Vec<usize> = pending
            .iter()
            .flat_map(|e| e.items.iter().filter_map(|&j| m.owner(j)))
            .collect();
        y.sort_unstable();
        y.dedup();
        let below: usize = self.layers.iter().map(|l| l.y.len()).sum();
        if (y.len() as f64) < mu * mu * below as f64 {
            stats.growth_shortfalls += 1;
        }
        self.layers.push(Layer { x: pending, y });
        stats.layers_peak = stats.layers_peak.max(self.top());
        let sig = self.signature();
        if sig.windows(2).any(|w| w[1] < w[0]) {
            stats.coordinate_drops += 1;
        }
        (true, grew)
    }

    /// Layer-ordered augmentation from `Y_{≤0}, Y_{≤1}, …` into the unblocked agents.
    fn compute_w(&self, m: &Matching, audit: &mut LazyAudit) -> Routing {
        let g = self.graph(m);
        let sinks = flowkit::mask(self.inst.n(), self.unblocked.iter().map(|e| e.agent));
        let mut layer_of = vec![usize::MAX; self.inst.n()];
        for (i, l) in self.layers.iter().enumerate() {
            for &a in &l.y {
                layer_of[a] = i;
            }
        }
        let mut w = PathFlow::new(g.node_count());
        for i in 0..self.layers.len() {
            let src = self.sources(i);
            w = disjoint_paths(&g, &src, &sinks, &w);
            let scratch = disjoint_paths(&g, &src, &sinks, &PathFlow::new(g.node_count()));
            if scratch.value() != w.value() {
                audit.flow_mismatch += 1;
            }
        }
        let paths = w
            .paths()
            .into_iter()
            .map(|path| (layer_of[path[0]], path))
            .collect();
        Routing { paths, graph: g }
    }

    fn edge_at(&self, agent: usize) -> Option<usize> {
        self.unblocked.iter().position(|e| e.agent == agent)
    }

    /// Earliest layer whose paths reach at least `max(1, μ|Y_t|)` unblocked edges.
    fn collapsible(&self, routing: &Routing) -> Option<usize> {
        (0..self.layers.len()).find(|&t| {
            let reached = routing.paths.iter().filter(|(l, _)| *l == t).count();
            reached >= 1 && reached as f64 >= self.params.mu * self.layers[t].y.len() as f64
        })
    }

    /// Collapses layer `t`; true when the root got matched.
    fn collapse(
        &mut self,
        m: &mut Matching,
        t: usize,
        routing: Routing,
        stats: &mut LazyStats,
    ) -> bool {
        stats.collapses += 1;
        let r = self.params.r;
        let heavy_before = m.heavy_count();
        let g = &routing.graph;
        let keep: Vec<usize> = routing
            .paths
            .iter()
            .filter(|(l, _)| *l < t)
            .map(|(_, p)| *p.last().unwrap())
            .collect();
        for (_, path) in routing.paths.iter().filter(|(l, _)| *l == t) {
            let (u, v) = (path[0], *path.last().unwrap());
            let k = self.edge_at(v).expect("path ends at an unblocked edge");
            let e2 = self.unblocked.remove(k);
            let free: Vec<usize> = e2
                .items
                .iter()
                .copied()
                .filter(|&j| m.owner(j).is_none())
                .take(r)
                .collect();
            if free.len() < r {
                stats.audit.weak_unblocked += 1;
                continue;
            }
            for &a in path.iter().step_by(2) {
                m.release(a);
            }
            for pair in path.chunks(2) {
                if let [a, item_node] = pair {
                    m.assign(*a, Bundle::Heavy(g.item_at(*item_node)));
                }
            }
            m.assign(v, Bundle::Light(free));
            self.layers[t].y.retain(|&a| a != u);
        }
        if m.heavy_count() != heavy_before {
            stats.audit.heavy_count_changed += 1;
        }
        if !m.is_consistent(self.inst) {
            stats.audit.invalid_matching += 1;
        }
        if t == 0 {
            return m.is_matched(self.root);
        }
        self.unblocked.retain(|e| keep.contains(&e.agent));
        self.layers.truncate(t + 1);
        let (still, freed): (Vec<AddEdge>, Vec<AddEdge>) = std::mem::take(&mut self.layers[t].x)
            .into_iter()
            .partition(|e| Self::free_count(e, m) < r);
        let owners: Vec<usize> = still
            .iter()
            .flat_map(|e| e.items.iter().filter_map(|&j| m.owner(j)))
            .collect();
        self.layers[t].y.retain(|a| owners.contains(a));
        self.layers[t].x = still;
        let g = self.graph(m);
        let sources = self.sources(t - 1);
        let mut sinks = self.sinks(t, &[]);
        let mut flow = disjoint_paths(&g, &sources, &sinks, &PathFlow::new(g.node_count()));
        for e in freed {
            if sinks[e.agent] {
                continue;
            }
            let reach = flow.residual_reachable(&g, &sources);
            if reach[e.agent] {
                sinks[e.agent] = true;
                flow.augment(&g, &sources, &sinks);
                self.unblocked.push(e);
            }
        }
        false
    }

    /// Addable edges hold `p` distinct wanted lights, disjoint from each other;
    /// every blocker above layer 0 holds `r` lights touching its layer.
    fn well_formed(&self, m: &Matching) -> bool {
        let Params { r, p, .. } = self.params;
        let mut seen = vec![false; self.inst.m()];
        let edges = self.layers.iter().flat_map(|l| &l.x).chain(&self.unblocked);
        for e in edges {
            if e.items.len() != p {
                return false;
            }
            for &j in &e.items {
                if seen[j] || self.inst.is_heavy(j) || !self.inst.is_interested(e.agent, j) {
                    return false;
                }
                seen[j] = true;
            }
        }
        self.layers.iter().skip(1).all(|layer| {
            layer.y.iter().all(|&a| match m.bundle(a) {
                Some(Bundle::Light(items)) => {
                    items.len() == r
                        && items
                            .iter()
                            .any(|j| layer.x.iter().any(|e| e.items.contains(j)))
                }
                _ => false,
            })
        })
    }

    fn audit(&self, m: &Matching, audit: &mut LazyAudit) {
        let Params { r, p, .. } = self.params;
        let g = self.graph(m);
        let mut x_total = 0;
        let mut y_total = self.layers[0].y.len();
        for t in 1..self.layers.len() {
            x_total += self.layers[t].x.len();
            y_total += self.layers[t].y.len();
            let f = disjoint_paths(
                &g,
                &self.sources(t - 1),
                &self.sinks(t, &[]),
                &PathFlow::new(g.node_count()),
            )
            .value();
            if f < x_total {
                audit.path_deficit += 1;
            }
            if (p - r + 1) * x_total > r * y_total {
                audit.counting_bound += 1;
            }
        }
        if self
            .unblocked
            .iter()
            .any(|e| Self::free_count(e, m) < r)
        {
            audit.weak_unblocked += 1;
        }
        if !self.well_formed(m) {
            audit.layer_structure += 1;
        }
        if !m.is_consistent(self.inst) {
            audit.invalid_matching += 1;
        }
    }
}

/// Tries to match `root`, keeping every matched agent matched.
pub fn extend_matching_poly(
    inst: &Instance,
    m: &mut Matching,
    root: usize,
    params: Params,
    budget: usize,
    stats: &mut LazyStats,
) -> Outcome {
    assert!(!m.is_matched(root), "root {root} is already matched");
    assert!(params.r < params.p, "addable edges must be larger than blocking ones");
    let mut st = LazyState::new(inst, params, root);
    let mut prev = st.signature();
    let mut spent = 0;
    loop {
        if spent == budget {
            return Outcome::BudgetExceeded;
        }
        spent += 1;
        stats.iterations += 1;
        let routing = st.compute_w(m, &mut stats.audit);
        if let Some(t) = st.collapsible(&routing) {
            if st.collapse(m, t, routing, stats) {
                return Outcome::Matched;
            }
        } else {
            match st.build_layer(m, stats) {
                (false, false) => return Outcome::Stalled,
                (false, true) => continue,
                (true, _) => {}
            }
        }
        let sig = st.signature();
        if sig_cmp(&sig, &prev) != Ordering::Less {
            stats.audit.signature_not_decreasing += 1;
        }
        prev = sig;
        st.audit(m, &mut stats.audit);
    }
}

/// Outcome of one target probe.
#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub allocation: Option<Allocation>,
    pub stats: LazyStats,
}

/// Matches every agent of `inst` with a heavy item or `params.r` lights.
pub fn probe(inst: &Instance, pre: &Preprocessed, params: Params, budget: usize) -> ProbeReport {
    let mut stats = LazyStats::default();
    let mut alloc = Allocation::empty(inst.n());
    for &(i, j) in &pre.forced {
        alloc.give(i, j);
    }
    if let Some(sub) = &pre.sub {
        let mut m = Matching::new(sub.n(), sub.m());
        for (i, j) in pre.heavy.pairs() {
            m.assign(i, Bundle::Heavy(j));
        }
        for i in 0..sub.n() {
            if m.is_matched(i) {
                continue;
            }
            let before = m.matched_count();
            match extend_matching_poly(sub, &mut m, i, params, budget, &mut stats) {
                Outcome::Matched if m.matched_count() == before + 1 => {}
                Outcome::Matched => {
                    stats.audit.invalid_matching += 1;
                    return ProbeReport {
                        allocation: None,
                        stats,
                    };
                }
                other => {
                    if other == Outcome::BudgetExceeded {
                        stats.budget_exhausted += 1;
                    }
                    return ProbeReport {
                        allocation: None,
                        stats,
                    }
                }
            }
        }
        for (k, bundle) in m.to_allocation().bundles().iter().enumerate() {
            for &j in bundle {
                alloc.give(pre.agents[k], pre.items[j]);
            }
        }
    }
    ProbeReport {
        allocation: Some(alloc),
        stats,
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PolyOptions {
    pub mu: f64,
    pub p_sweep: bool,
    pub budget: usize,
}

impl Default for PolyOptions {
    fn default() -> Self {
        PolyOptions {
            mu: DEFAULT_MU,
            p_sweep: false,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PolyResult {
    pub value: LatticeValue,
    pub allocation: Allocation,
    pub certified_t: Option<LatticeValue>,
    pub k: Option<u64>,
    pub r: Option<u64>,
    pub p: Option<u64>,
    pub used_baseline: bool,
    pub stats: LazyStats,
}

/// Binary search over targets `T ≤ 3/2` with the layered search, combined with
/// the item-count baseline.
pub fn poly_solve(inst: &Instance, opts: PolyOptions) -> PolyResult {
    let eps = inst.epsilon();
    let pre = preprocess(inst);
    let targets = probe_targets(inst);
    let mut stats = LazyStats::default();
    let mut best = None;
    let (mut lo, mut hi) = (0usize, targets.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        let t = targets[mid];
        let k = eps.k_of(t).expect("targets are positive");
        let r = poly_r(k);
        let mut found = None;
        for p in p_candidates(k, r, opts.p_sweep) {
            let params = Params {
                r: r as usize,
                p: p as usize,
                mu: opts.mu,
            };
            let rep = probe(inst, &pre, params, opts.budget);
            stats.absorb(&rep.stats);
            if let Some(a) = rep.allocation {
                found = Some((p, a));
                break;
            }
        }
        match found {
            Some((p, a)) => {
                best = Some((t, k, r, p, a));
                lo = mid + 1;
            }
            None => hi = mid,
        }
    }
    let (base_value, base_alloc) = flowkit::baseline_solve(inst);
    let mut out = PolyResult {
        value: base_value,
        allocation: base_alloc,
        certified_t: None,
        k: None,
        r: None,
        p: None,
        used_baseline: true,
        stats,
    };
    if let Some((t, k, r, p, a)) = best {
        let v = a.min_value(inst).expect("search keeps the allocation valid");
        out.certified_t = Some(t);
        out.k = Some(k);
        out.r = Some(r);
        out.p = Some(p);
        if !eps.cmp(v, base_value).is_lt() {
            out.value = v;
            out.allocation = a;
            out.used_baseline = false;
        }
    }
    out
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
    fn r_formula() {
        assert_eq!(poly_r(9), 1);
        assert_eq!(poly_r(100), 16);
        assert_eq!(poly_r(150), 25);
        assert_eq!(p_candidates(150, 25, false), vec![74, 85]);
        assert_eq!(p_candidates(3, 1, false), vec![2]);
        assert!(p_candidates(2, 1, false).is_empty());
    }

    #[test]
    fn growth_inequality() {
        for k in 9..200u64 {
            let r = k.div_ceil(9);
            assert!(growth_guaranteed(k, r, 3 * r - 1, DEFAULT_MU), "k = {k}");
        }
    }

    #[test]
    fn preprocess_cascade() {
        // h0 only for a0; after a0 leaves, h1 is only for a1
        let i = inst((1, 2), "HHL", vec![vec![0, 1], vec![1, 2], vec![2]]);
        let pre = preprocess(&i);
        assert_eq!(pre.forced, vec![(0, 0), (1, 1)]);
        assert_eq!(pre.agents, vec![2]);
    }

    #[test]
    fn preprocess_serves_everyone() {
        let i = inst((1, 2), "HH", vec![vec![0], vec![1]]);
        let pre = preprocess(&i);
        assert!(pre.sub.is_none());
        let rep = probe(&i, &pre, Params { r: 1, p: 2, mu: DEFAULT_MU }, 100);
        assert_eq!(rep.allocation.unwrap().min_value(&i).unwrap(), LatticeValue::new(1, 0));
    }

    #[test]
    fn root_swap_through_heavy_path() {
        // a0 and a1 both want h; a1 also has three free lights
        let i = inst((1, 3), "HLLL", vec![vec![0], vec![0, 1, 2, 3], vec![0]]);
        let mut m = Matching::new(3, 4);
        m.assign(1, Bundle::Heavy(0));
        let mut st = LazyStats::default();
        let params = Params { r: 2, p: 3, mu: DEFAULT_MU };
        let out = extend_matching_poly(&i, &mut m, 0, params, 100, &mut st);
        assert_eq!(out, Outcome::Matched);
        assert_eq!(m.bundle(0), Some(&Bundle::Heavy(0)));
        assert_eq!(m.bundle(1), Some(&Bundle::Light(vec![1, 2])));
        assert_eq!(st.audit.total(), 0);
        let out = extend_matching_poly(&i, &mut m, 2, params, 100, &mut st);
        assert_eq!(out, Outcome::Stalled);
    }

    #[test]
    fn poly_all_light() {
        let all: Vec<usize> = (0..8).collect();
        let i = inst((1, 4), "LLLLLLLL", vec![all.clone(), all]);
        let r = poly_solve(&i, PolyOptions::default());
        assert!(r.allocation.verify(&i).is_empty());
        assert!(r.stats.audit.total() == 0);
    }
}
