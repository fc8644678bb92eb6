use std::collections::VecDeque;

use thiserror::Error;

use crate::model::Instance;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DigraphError {
    #[error("agent {0} has in-degree above 1")]
    AgentInDegree(usize),
    #[error("heavy item {0} has out-degree above 1")]
    ItemOutDegree(usize),
}

/// The residual graph of the agent→heavy-item interest network under a heavy matching.
///
/// Nodes `0..n` are agents, nodes `n..` are heavy items. An agent points at every
/// heavy item it likes but does not hold; a held heavy item points back at its holder.
#[derive(Clone, Debug)]
pub struct ResidualDigraph {
    n_agents: usize,
    items: Vec<usize>,
    node_of_item: Vec<Option<usize>>,
    out: Vec<Vec<usize>>,
}

impl ResidualDigraph {
    /// `heavy_of[i]` is the heavy item agent `i` holds, if any.
    pub fn build(inst: &Instance, heavy_of: &[Option<usize>]) -> Result<Self, DigraphError> {
        let n = inst.n();
        let items: Vec<usize> = (0..inst.m()).filter(|&j| inst.is_heavy(j)).collect();
        let mut node_of_item = vec![None; inst.m()];
        for (k, &j) in items.iter().enumerate() {
            node_of_item[j] = Some(n + k);
        }
        let mut out = vec![Vec::new(); n + items.len()];
        for i in 0..n {
            for &j in inst.heavy_interests(i) {
                let node = node_of_item[j].expect("heavy item has a node");
                if heavy_of[i] == Some(j) {
                    out[node].push(i);
                } else {
                    out[i].push(node);
                }
            }
        }
        let g = ResidualDigraph {
            n_agents: n,
            items,
            node_of_item,
            out,
        };
        g.validate()?;
        Ok(g)
    }

    /// Arbitrary digraph over `nodes` nodes whose first `n_agents` are agents.
    pub fn from_arcs(n_agents: usize, nodes: usize, arcs: &[(usize, usize)]) -> Self {
        let mut out = vec![Vec::new(); nodes];
        for &(u, w) in arcs {
            if !out[u].contains(&w) {
                out[u].push(w);
            }
        }
        ResidualDigraph {
            n_agents,
            items: (n_agents..nodes).collect(),
            node_of_item: Vec::new(),
            out,
        }
    }

    /// Checks the in/out-degree properties a matching-derived residual graph must have.
    pub fn validate(&self) -> Result<(), DigraphError> {
        let mut indeg = vec![0usize; self.node_count()];
        for targets in &self.out {
            for &w in targets {
                indeg[w] += 1;
            }
        }
        if let Some(i) = (0..self.n_agents).find(|&i| indeg[i] > 1) {
            return Err(DigraphError::AgentInDegree(i));
        }
        if let Some(v) = (self.n_agents..self.node_count()).find(|&v| self.out[v].len() > 1) {
            return Err(DigraphError::ItemOutDegree(self.items[v - self.n_agents]));
        }
        Ok(())
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn node_count(&self) -> usize {
        self.out.len()
    }

    pub fn is_agent(&self, node: usize) -> bool {
        node < self.n_agents
    }

    /// Item id behind an item node.
    pub fn item_at(&self, node: usize) -> usize {
        self.items[node - self.n_agents]
    }

    pub fn node_of_item(&self, item: usize) -> Option<usize> {
        self.node_of_item.get(item).copied().flatten()
    }

    pub fn out_arcs(&self, node: usize) -> &[usize] {
        &self.out[node]
    }

    pub fn in_degree(&self, node: usize) -> usize {
        self.out.iter().filter(|t| t.contains(&node)).count()
    }
}

#[derive(Clone, Copy, Debug)]
enum Move {
    FromSource(usize),
    NodeFwd,
    NodeBack,
    ArcFwd(usize, usize),
    ArcBack(usize, usize),
    ToSink(usize),
}

const SINK: usize = usize::MAX;

/// Predecessor state and the move that left it.
type Step = (usize, Move);

/// A set of node-disjoint directed paths from source agents to sink agents.
///
/// Stored as a unit flow on the node-split graph: every node carries at most one
/// path, `start`/`end` mark path endpoints and `succ`/`pred` the arcs in use. A
/// node that is both a start and an end with no successor is a zero-length path.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PathFlow {
    succ: Vec<Option<usize>>,
    pred: Vec<Option<usize>>,
    start: Vec<bool>,
    end: Vec<bool>,
}

fn member(mask: &[bool], v: usize) -> bool {
    mask.get(v).copied().unwrap_or(false)
}

impl PathFlow {
    pub fn new(nodes: usize) -> Self {
        PathFlow {
            succ: vec![None; nodes],
            pred: vec![None; nodes],
            start: vec![false; nodes],
            end: vec![false; nodes],
        }
    }

    /// Number of paths, `f`.
    pub fn value(&self) -> usize {
        self.start.iter().filter(|&&s| s).count()
    }

    pub fn uses(&self, node: usize) -> bool {
        self.start[node] || self.pred[node].is_some()
    }

    pub fn is_start(&self, node: usize) -> bool {
        self.start[node]
    }

    pub fn is_end(&self, node: usize) -> bool {
        self.end[node]
    }

    pub fn path_from(&self, source: usize) -> Option<Vec<usize>> {
        if !self.start[source] {
            return None;
        }
        let mut path = vec![source];
        let mut cur = source;
        while let Some(next) = self.succ[cur] {
            path.push(next);
            cur = next;
        }
        debug_assert!(self.end[cur], "path from {source} does not end at a sink");
        Some(path)
    }

    /// All paths, ordered by their start node.
    pub fn paths(&self) -> Vec<Vec<usize>> {
        (0..self.start.len())
            .filter_map(|v| self.path_from(v))
            .collect()
    }

    pub fn remove_path_from(&mut self, source: usize) {
        let Some(path) = self.path_from(source) else { return };
        self.start[source] = false;
        for &v in &path {
            self.succ[v] = None;
            self.pred[v] = None;
        }
        self.end[*path.last().unwrap()] = false;
    }

    /// Drops every path whose start is no longer a source or whose end is no longer a sink.
    pub fn restrict(&mut self, sources: &[bool], sinks: &[bool]) {
        for path in self.paths() {
            let (s, t) = (path[0], *path.last().unwrap());
            if !member(sources, s) || !member(sinks, t) {
                self.remove_path_from(s);
            }
        }
    }

    fn residual_search(
        &self,
        g: &ResidualDigraph,
        sources: &[bool],
        sinks: &[bool],
    ) -> (Vec<Option<Step>>, Vec<bool>, Option<Step>) {
        let nodes = self.succ.len();
        // state 2v = In(v), 2v+1 = Out(v)
        let mut parent: Vec<Option<(usize, Move)>> = vec![None; 2 * nodes];
        let mut seen = vec![false; 2 * nodes];
        let mut queue = VecDeque::new();
        for v in 0..nodes {
            if member(sources, v) && !self.start[v] {
                seen[2 * v] = true;
                parent[2 * v] = Some((SINK, Move::FromSource(v)));
                queue.push_back(2 * v);
            }
        }
        let mut found = None;
        while let Some(state) = queue.pop_front() {
            let v = state / 2;
            let mut visit = |to: usize, mv: Move, queue: &mut VecDeque<usize>| {
                if !seen[to] {
                    seen[to] = true;
                    parent[to] = Some((state, mv));
                    queue.push_back(to);
                }
            };
            if state % 2 == 0 {
                if !self.uses(v) {
                    visit(2 * v + 1, Move::NodeFwd, &mut queue);
                }
                if let Some(p) = self.pred[v] {
                    visit(2 * p + 1, Move::ArcBack(p, v), &mut queue);
                }
            } else {
                if found.is_none() && member(sinks, v) && !self.end[v] {
                    found = Some((state, Move::ToSink(v)));
                }
                for &w in g.out_arcs(v) {
                    if self.succ[v] != Some(w) {
                        visit(2 * w, Move::ArcFwd(v, w), &mut queue);
                    }
                }
                if self.uses(v) {
                    visit(2 * v, Move::NodeBack, &mut queue);
                }
            }
        }
        let out_reached = (0..nodes).map(|v| seen[2 * v + 1]).collect();
        (parent, out_reached, found)
    }

    fn apply(&mut self, mv: Move) {
        match mv {
            Move::FromSource(v) => self.start[v] = true,
            Move::NodeFwd | Move::NodeBack => {}
            Move::ArcFwd(u, w) => {
                self.succ[u] = Some(w);
                self.pred[w] = Some(u);
            }
            Move::ArcBack(u, w) => {
                self.succ[u] = None;
                if self.pred[w] == Some(u) {
                    self.pred[w] = None;
                }
            }
            Move::ToSink(t) => self.end[t] = true,
        }
    }

    /// Finds and applies one augmenting path. Returns whether `f` grew.
    pub fn augment(&mut self, g: &ResidualDigraph, sources: &[bool], sinks: &[bool]) -> bool {
        let (parent, _, found) = self.residual_search(g, sources, sinks);
        let Some((mut state, last)) = found else { return false };
        let mut moves = vec![last];
        while state != SINK {
            let (prev, mv) = parent[state].expect("search tree is connected");
            moves.push(mv);
            state = prev;
        }
        for mv in moves.into_iter().rev() {
            self.apply(mv);
        }
        true
    }

    /// Augments until maximum; returns the final `f`.
    pub fn maximize(&mut self, g: &ResidualDigraph, sources: &[bool], sinks: &[bool]) -> usize {
        while self.augment(g, sources, sinks) {}
        self.value()
    }

    /// Nodes whose outgoing side is reachable from the free sources in the residual graph.
    ///
    /// Adding a node `v` that is not yet a sink as a new sink raises `f` exactly when
    /// `v` is in this set.
    pub fn residual_reachable(&self, g: &ResidualDigraph, sources: &[bool]) -> Vec<bool> {
        self.residual_search(g, sources, &[]).1
    }

    /// Structural check: disjoint paths over real arcs, from sources to sinks.
    pub fn is_valid(&self, g: &ResidualDigraph, sources: &[bool], sinks: &[bool]) -> bool {
        let mut visits = vec![0usize; self.succ.len()];
        for path in self.paths() {
            if !member(sources, path[0]) || !member(sinks, *path.last().unwrap()) {
                return false;
            }
            for w in path.windows(2) {
                if !g.out_arcs(w[0]).contains(&w[1]) {
                    return false;
                }
            }
            for &v in &path {
                visits[v] += 1;
            }
        }
        let ends = self.end.iter().filter(|&&e| e).count();
        visits.iter().all(|&c| c <= 1) && ends == self.value()
    }
}

/// Grows `base` to a maximum family of node-disjoint paths from `sources` to `sinks`.
///
/// Paths of `base` that no longer run from a source to a sink are dropped first.
pub fn disjoint_paths(
    g: &ResidualDigraph,
    sources: &[bool],
    sinks: &[bool],
    base: &PathFlow,
) -> PathFlow {
    let mut flow = if base.succ.len() == g.node_count() {
        base.clone()
    } else {
        PathFlow::new(g.node_count())
    };
    flow.restrict(sources, sinks);
    flow.maximize(g, sources, sinks);
    flow
}

/// Mask of length `len` with the given members set.
pub fn mask(len: usize, members: impl IntoIterator<Item = usize>) -> Vec<bool> {
    let mut m = vec![false; len];
    for v in members {
        m[v] = true;
    }
    m
}
