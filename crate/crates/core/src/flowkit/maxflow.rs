use std::collections::VecDeque;

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: u64,
    rev: usize,
}

/// Dinic's algorithm on an adjacency-list network.
#[derive(Clone, Debug)]
pub struct MaxFlow {
    graph: Vec<Vec<Arc>>,
    level: Vec<u32>,
    iter: Vec<usize>,
}

impl MaxFlow {
    pub fn new(nodes: usize) -> Self {
        MaxFlow {
            graph: vec![Vec::new(); nodes],
            level: vec![0; nodes],
            iter: vec![0; nodes],
        }
    }

    /// Adds `from → to` with capacity `cap`; returns a handle for [`MaxFlow::flow_on`].
    pub fn add_arc(&mut self, from: usize, to: usize, cap: u64) -> (usize, usize) {
        let rev_from = self.graph[to].len() + usize::from(from == to);
        let rev_to = self.graph[from].len();
        self.graph[from].push(Arc { to, cap, rev: rev_from });
        self.graph[to].push(Arc {
            to: from,
            cap: 0,
            rev: rev_to,
        });
        (from, rev_to)
    }

    /// Flow currently routed on the arc behind `handle`.
    pub fn flow_on(&self, handle: (usize, usize)) -> u64 {
        let a = &self.graph[handle.0][handle.1];
        self.graph[a.to][a.rev].cap
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.fill(u32::MAX);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for a in &self.graph[v] {
                if a.cap > 0 && self.level[a.to] == u32::MAX {
                    self.level[a.to] = self.level[v] + 1;
                    queue.push_back(a.to);
                }
            }
        }
        self.level[t] != u32::MAX
    }

    fn dfs(&mut self, v: usize, t: usize, limit: u64) -> u64 {
        if v == t {
            return limit;
        }
        while self.iter[v] < self.graph[v].len() {
            let i = self.iter[v];
            let Arc { to, cap, rev } = self.graph[v][i];
            if cap > 0 && self.level[v] < self.level[to] {
                let d = self.dfs(to, t, limit.min(cap));
                if d > 0 {
                    self.graph[v][i].cap -= d;
                    self.graph[to][rev].cap += d;
                    return d;
                }
            }
            self.iter[v] += 1;
        }
        0
    }

    pub fn run(&mut self, s: usize, t: usize) -> u64 {
        let mut total = 0;
        while self.bfs(s, t) {
            self.iter.fill(0);
            loop {
                let f = self.dfs(s, t, u64::MAX);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
        total
    }
}
