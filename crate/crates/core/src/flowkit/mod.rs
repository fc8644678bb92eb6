//! Matching and flow primitives.
//!
//! Maximum heavy matchings, the item-count flow behind the baseline solver, the
//! residual agent/heavy-item digraph and incremental node-disjoint paths over it.

mod maxflow;
mod paths;

pub use maxflow::MaxFlow;
pub use paths::{disjoint_paths, mask, DigraphError, PathFlow, ResidualDigraph};

use crate::model::{Allocation, Instance, LatticeValue};

/// A matching between agents and heavy items they like.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeavyMatching {
    item_of: Vec<Option<usize>>,
    agent_of: Vec<Option<usize>>,
}

impl HeavyMatching {
    pub fn empty(n: usize, m: usize) -> Self {
        HeavyMatching {
            item_of: vec![None; n],
            agent_of: vec![None; m],
        }
    }

    pub fn item_of(&self, agent: usize) -> Option<usize> {
        self.item_of[agent]
    }

    pub fn agent_of(&self, item: usize) -> Option<usize> {
        self.agent_of[item]
    }

    /// Agent-indexed view: `items()[i]` is agent `i`'s heavy item.
    pub fn items(&self) -> &[Option<usize>] {
        &self.item_of
    }

    pub fn size(&self) -> usize {
        self.item_of.iter().flatten().count()
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.item_of
            .iter()
            .enumerate()
            .filter_map(|(i, j)| j.map(|j| (i, j)))
            .collect()
    }

    pub fn insert(&mut self, agent: usize, item: usize) {
        assert!(self.item_of[agent].is_none() && self.agent_of[item].is_none());
        self.item_of[agent] = Some(item);
        self.agent_of[item] = Some(agent);
    }

    pub fn is_valid(&self, inst: &Instance) -> bool {
        self.pairs().iter().all(|&(i, j)| {
            inst.is_heavy(j) && inst.is_interested(i, j) && self.agent_of[j] == Some(i)
        }) && self.agent_of.iter().flatten().count() == self.size()
    }

    fn try_kuhn(&mut self, inst: &Instance, agent: usize, seen: &mut [bool]) -> bool {
        for &j in inst.heavy_interests(agent) {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            let free = match self.agent_of[j] {
                None => true,
                Some(other) => self.try_kuhn(inst, other, seen),
            };
            if free {
                self.item_of[agent] = Some(j);
                self.agent_of[j] = Some(agent);
                return true;
            }
        }
        false
    }
}

/// Maximum-cardinality matching of agents to heavy items (Kuhn's augmenting paths).
pub fn max_heavy_matching(inst: &Instance) -> HeavyMatching {
    grow_heavy_matching(inst, HeavyMatching::empty(inst.n(), inst.m()))
}

/// Augments `start` to a maximum heavy matching.
pub fn grow_heavy_matching(inst: &Instance, mut hm: HeavyMatching) -> HeavyMatching {
    for i in 0..inst.n() {
        if hm.item_of[i].is_none() {
            let mut seen = vec![false; inst.m()];
            hm.try_kuhn(inst, i, &mut seen);
        }
    }
    hm
}

/// Residual digraph of the interest network under `hm`.
pub fn residual(inst: &Instance, hm: &HeavyMatching) -> Result<ResidualDigraph, DigraphError> {
    ResidualDigraph::build(inst, hm.items())
}

/// `(agent, item, arc handle)` for every interest arc.
type InterestArcs = Vec<(usize, usize, (usize, usize))>;

fn count_network(inst: &Instance, t: u64) -> (MaxFlow, InterestArcs, u64) {
    let (n, m) = (inst.n(), inst.m());
    let (s, sink) = (n + m, n + m + 1);
    let mut g = MaxFlow::new(n + m + 2);
    let mut arcs = Vec::new();
    for i in 0..n {
        g.add_arc(s, i, t);
        for &j in inst.interests(i) {
            arcs.push((i, j, g.add_arc(i, n + j, 1)));
        }
    }
    for j in 0..m {
        g.add_arc(n + j, sink, 1);
    }
    let flow = g.run(s, sink);
    (g, arcs, flow)
}

/// Whether every agent can receive `t` distinct items it likes.
pub fn count_feasible(inst: &Instance, t: u64) -> bool {
    if t == 0 {
        return true;
    }
    count_network(inst, t).2 == inst.n() as u64 * t
}

/// The item-count allocation: maximise the number of items every agent gets.
///
/// Ignoring weights loses at most a factor `1/ε` against the optimum.
pub fn baseline_solve(inst: &Instance) -> (LatticeValue, Allocation) {
    let upper = (0..inst.n())
        .map(|i| inst.interests(i).len())
        .min()
        .unwrap_or(0)
        .min(inst.m() / inst.n()) as u64;
    let (mut lo, mut hi) = (0u64, upper);
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if count_feasible(inst, mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    let mut alloc = Allocation::empty(inst.n());
    if lo > 0 {
        let (g, arcs, _) = count_network(inst, lo);
        for (i, j, h) in arcs {
            if g.flow_on(h) == 1 {
                alloc.give(i, j);
            }
        }
    }
    let value = alloc
        .min_value(inst)
        .expect("flow allocation respects interests");
    (value, alloc)
}
