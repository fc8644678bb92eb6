//! Configuration-LP feasibility by column generation.
//!
//! The master problem maximises a common coverage level `λ ≤ 1` such that each
//! agent's configurations carry total mass `λ` and no item is used more than once.
//! New configurations are priced by an exact two-class knapsack oracle.

mod simplex;

use std::collections::HashSet;

use thiserror::Error;

use crate::model::{Instance, LatticeValue};
use simplex::{SimplexError, Tableau};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const MAX_ROUNDS: usize = 10_000;
const MAX_PIVOTS: usize = 1_000_000;
const NEAR_BOUNDARY: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClpError {
    #[error("column generation did not converge (best lambda {best_lambda})")]
    NonConverged { best_lambda: f64 },
    #[error("master LP failure: {0:?}")]
    Simplex(SimplexError),
    #[error("lambda {lambda} exceeds the Lagrangian bound {bound}")]
    DualityGap { lambda: f64, bound: f64 },
    #[error("support property violated: {0}")]
    Property(String),
    #[error("light configuration of agent {agent} has {size} items, fewer than {r}")]
    ConfigTooSmall { agent: usize, size: usize, r: usize },
}

/// Agent `agent` reaching the target cannot be configured at all.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("agent {0} has no configuration reaching the target")]
pub struct NoConfiguration(pub usize);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Column {
    pub agent: usize,
    pub items: Vec<usize>,
    pub weight: LatticeValue,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DualPrices {
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct ClpResult {
    pub lambda: f64,
    pub feasible: bool,
    /// Columns with positive mass.
    pub columns: Vec<(Column, f64)>,
    pub duals: DualPrices,
    pub rounds: usize,
    /// Smallest Lagrangian upper bound on the master optimum seen.
    pub upper_bound: f64,
}

/// Cheapest configuration of `agent` worth at least `t` under item prices `z`.
pub fn separate(
    inst: &Instance,
    agent: usize,
    t: LatticeValue,
    z: &[f64],
) -> Result<(f64, Vec<usize>), NoConfiguration> {
    let eps = inst.epsilon();
    let by_price = |items: &[usize]| {
        let mut v = items.to_vec();
        v.sort_by(|&a, &b| z[a].total_cmp(&z[b]).then(a.cmp(&b)));
        v
    };
    let heavy = by_price(inst.heavy_interests(agent));
    let light = by_price(inst.light_interests(agent));
    let heavy_cap = eps.key(t).div_ceil(eps.den() as u128) as usize;
    let mut best: Option<(f64, usize, usize)> = None;
    for h in 0..=heavy.len().min(heavy_cap) {
        let l = eps.lights_needed(t, h as u64) as usize;
        if l > light.len() {
            continue;
        }
        let cost: f64 = heavy[..h].iter().chain(&light[..l]).map(|&j| z[j]).sum();
        if best.is_none_or(|(c, _, _)| cost < c) {
            best = Some((cost, h, l));
        }
    }
    let (cost, h, l) = best.ok_or(NoConfiguration(agent))?;
    let mut items: Vec<usize> = heavy[..h].iter().chain(&light[..l]).copied().collect();
    items.sort_unstable();
    Ok((cost, items))
}

/// Columns kept across solves at decreasing targets.
#[derive(Clone, Debug, Default)]
pub struct ColumnPool {
    columns: Vec<Column>,
    seen: HashSet<(usize, Vec<usize>)>,
}

impl ColumnPool {
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    fn insert(&mut self, c: Column) {
        if self.seen.insert((c.agent, c.items.clone())) {
            self.columns.push(c);
        }
    }
}

struct Master {
    tab: Tableau,
    n: usize,
    cols: Vec<(usize, Column)>,
    in_master: HashSet<(usize, Vec<usize>)>,
    lambda_col: usize,
}

impl Master {
    fn new(inst: &Instance) -> Self {
        let (n, m) = (inst.n(), inst.m());
        let mut rhs = vec![0.0; n];
        rhs.extend(std::iter::repeat_n(1.0, m));
        rhs.push(1.0);
        let mut tab = Tableau::new(rhs);
        let mut lambda: Vec<(usize, f64)> = (0..n).map(|i| (i, 1.0)).collect();
        lambda.push((n + m, 1.0));
        let lambda_col = tab.add_column(&lambda, 1.0);
        Master {
            tab,
            n,
            cols: Vec::new(),
            in_master: HashSet::new(),
            lambda_col,
        }
    }

    fn add(&mut self, c: Column) -> bool {
        if !self.in_master.insert((c.agent, c.items.clone())) {
            return false;
        }
        let mut entries = vec![(c.agent, -1.0)];
        entries.extend(c.items.iter().map(|&j| (self.n + j, 1.0)));
        let idx = self.tab.add_column(&entries, 0.0);
        self.cols.push((idx, c));
        true
    }

    fn lambda(&self) -> f64 {
        self.tab.value(self.lambda_col)
    }

    fn duals(&self, m: usize) -> DualPrices {
        DualPrices {
            y: (0..self.n).map(|i| self.tab.dual(i)).collect(),
            z: (0..m).map(|j| self.tab.dual(self.n + j)).collect(),
        }
    }
}

/// Decides feasibility of the configuration LP at `t`.
pub fn solve_clp(inst: &Instance, t: LatticeValue, tol: f64) -> Result<ClpResult, ClpError> {
    solve_clp_pooled(inst, t, tol, &mut ColumnPool::default())
}

/// As [`solve_clp`], seeding the master from `pool` and adding new columns to it.
pub fn solve_clp_pooled(
    inst: &Instance,
    t: LatticeValue,
    tol: f64,
    pool: &mut ColumnPool,
) -> Result<ClpResult, ClpError> {
    let (n, m) = (inst.n(), inst.m());
    let eps = inst.epsilon();
    if t.is_zero() {
        return Ok(ClpResult {
            lambda: 1.0,
            feasible: true,
            columns: Vec::new(),
            duals: DualPrices::default(),
            rounds: 0,
            upper_bound: 1.0,
        });
    }
    let mut master = Master::new(inst);
    for c in &pool.columns {
        if eps.le(t, c.weight) {
            master.add(c.clone());
        }
    }
    let mut upper_bound = f64::INFINITY;
    let mut rounds = 0;
    let infeasible = (0..n).any(|i| separate(inst, i, t, &vec![0.0; m]).is_err());
    if !infeasible {
        loop {
            rounds += 1;
            if rounds > MAX_ROUNDS {
                return Err(ClpError::NonConverged {
                    best_lambda: master.lambda(),
                });
            }
            master.tab.solve(MAX_PIVOTS).map_err(ClpError::Simplex)?;
            let lambda = master.lambda();
            if lambda > upper_bound + 1e-7 {
                return Err(ClpError::DualityGap {
                    lambda,
                    bound: upper_bound,
                });
            }
            if lambda >= 1.0 - tol {
                break;
            }
            let duals = master.duals(m);
            let mut slack_bound = 0.0;
            let mut added = false;
            for i in 0..n {
                let (cost, items) = separate(inst, i, t, &duals.z).expect("checked above");
                let violation = duals.y[i] - cost;
                if violation > simplex::TOL {
                    slack_bound += violation * inst.interests(i).len() as f64;
                    let c = Column {
                        agent: i,
                        weight: inst.weight(&items),
                        items,
                    };
                    pool.insert(c.clone());
                    added |= master.add(c);
                }
            }
            upper_bound = upper_bound.min(lambda + slack_bound);
            if !added {
                break;
            }
        }
    }
    let lambda = if infeasible { 0.0 } else { master.lambda() };
    let columns = master
        .cols
        .iter()
        .filter_map(|(idx, c)| {
            let x = master.tab.value(*idx);
            (x > 1e-12).then(|| (c.clone(), x))
        })
        .collect();
    Ok(ClpResult {
        lambda,
        feasible: lambda >= 1.0 - tol,
        columns,
        duals: master.duals(m),
        rounds,
        upper_bound: upper_bound.min(1.0),
    })
}

#[derive(Clone, Debug)]
pub struct TstarEstimate {
    pub tstar: LatticeValue,
    /// `λ` at the returned value.
    pub lambda: f64,
    /// Some probe ended within `10⁻⁶` of the feasibility threshold.
    pub near_boundary: bool,
    pub probes: usize,
}

/// Largest lattice value at which the configuration LP is feasible.
pub fn estimate_tstar(inst: &Instance, tol: f64) -> Result<TstarEstimate, ClpError> {
    let eps = inst.epsilon();
    let ceiling = (0..inst.n())
        .map(|i| inst.weight(inst.interests(i)))
        .reduce(|a, b| eps.min(a, b))
        .unwrap_or(LatticeValue::ZERO);
    let values: Vec<LatticeValue> = inst
        .lattice_values()
        .into_iter()
        .filter(|&v| eps.le(v, ceiling))
        .collect();
    let near = |res: &ClpResult| {
        (res.lambda - 1.0).abs() < NEAR_BOUNDARY && !res.feasible
            || (res.feasible && res.lambda < 1.0 - tol / 2.0)
    };
    let mut pool = ColumnPool::default();
    let mut near_boundary = false;
    let mut probes = 0;
    let (mut lo, mut hi) = (0, values.len() - 1);
    let mut lambda = 1.0;
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        let res = solve_clp_pooled(inst, values[mid], tol, &mut pool)?;
        probes += 1;
        near_boundary |= near(&res);
        if res.feasible {
            lo = mid;
            lambda = res.lambda;
        } else {
            hi = mid - 1;
        }
    }
    if near_boundary {
        // re-check both sides of the answer from a cold pool
        let below = solve_clp(inst, values[lo], tol)?;
        probes += 1;
        if !below.feasible {
            return Err(ClpError::Property(format!(
                "verdict at {} flipped on re-check",
                eps.format(values[lo])
            )));
        }
        if let Some(&next) = values.get(lo + 1) {
            probes += 1;
            if solve_clp(inst, next, tol)?.feasible {
                return Err(ClpError::Property(format!(
                    "verdict at {} flipped on re-check",
                    eps.format(next)
                )));
            }
        }
    }
    Ok(TstarEstimate {
        tstar: values[lo],
        lambda,
        near_boundary,
        probes,
    })
}

/// A configuration of the transformed solution.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportConfig {
    pub items: Vec<usize>,
    pub heavy: bool,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupportSolution {
    /// Lights needed to reach the target without heavy items.
    pub k: u64,
    pub configs: Vec<Vec<SupportConfig>>,
}

/// Replaces every column touching a heavy item by its heavy part.
///
/// The result uses only all-heavy or all-light configurations, still covers
/// every agent and still packs every item.
pub fn minimalize(
    inst: &Instance,
    res: &ClpResult,
    t: LatticeValue,
) -> Result<SupportSolution, ClpError> {
    let k = inst
        .epsilon()
        .k_of(t)
        .map_err(|e| ClpError::Property(e.to_string()))?;
    let mut configs: Vec<Vec<SupportConfig>> = vec![Vec::new(); inst.n()];
    for (col, mass) in &res.columns {
        let heavy: Vec<usize> = col
            .items
            .iter()
            .copied()
            .filter(|&j| inst.is_heavy(j))
            .collect();
        let (items, is_heavy) = if heavy.is_empty() {
            (col.items.clone(), false)
        } else {
            (heavy, true)
        };
        let list = &mut configs[col.agent];
        match list.iter_mut().find(|c| c.items == items) {
            Some(c) => c.mass += mass,
            None => list.push(SupportConfig {
                items,
                heavy: is_heavy,
                mass: *mass,
            }),
        }
    }
    let sol = SupportSolution { k, configs };
    check_support(inst, &sol, res.lambda)?;
    Ok(sol)
}

fn check_support(inst: &Instance, sol: &SupportSolution, lambda: f64) -> Result<(), ClpError> {
    let mut load = vec![0.0; inst.m()];
    for (i, list) in sol.configs.iter().enumerate() {
        let mut cover = 0.0;
        for c in list {
            let shape_ok = if c.heavy {
                !c.items.is_empty() && c.items.iter().all(|&j| inst.is_heavy(j))
            } else {
                c.items.len() as u64 >= sol.k && c.items.iter().all(|&j| !inst.is_heavy(j))
            };
            if !shape_ok {
                return Err(ClpError::Property(format!(
                    "agent {i} has a mixed or short configuration {:?}",
                    c.items
                )));
            }
            cover += c.mass;
            for &j in &c.items {
                load[j] += c.mass;
            }
        }
        if cover < lambda - 1e-7 {
            return Err(ClpError::Property(format!(
                "agent {i} is covered {cover}, below {lambda}"
            )));
        }
    }
    if let Some(j) = (0..inst.m()).find(|&j| load[j] > 1.0 + 1e-7) {
        return Err(ClpError::Property(format!(
            "item {j} is packed {}",
            load[j]
        )));
    }
    Ok(())
}

/// Heavy edges and light configurations of the transformed solution.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SupportHypergraph {
    pub heavy: Vec<Vec<usize>>,
    pub light: Vec<Vec<Vec<usize>>>,
    pub r: usize,
}

impl SupportHypergraph {
    pub fn light_edge_count(&self, agent: usize) -> usize {
        self.light[agent]
            .iter()
            .map(|c| binomial(c.len(), self.r))
            .sum()
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub fn build_support_hypergraph(
    sol: &SupportSolution,
    r: usize,
) -> Result<SupportHypergraph, ClpError> {
    let n = sol.configs.len();
    let mut h = SupportHypergraph {
        heavy: vec![Vec::new(); n],
        light: vec![Vec::new(); n],
        r,
    };
    for (i, list) in sol.configs.iter().enumerate() {
        assert!(!list.is_empty(), "agent {i} has empty support");
        for c in list {
            if c.heavy {
                h.heavy[i].extend(&c.items);
            } else if c.items.len() < r {
                return Err(ClpError::ConfigTooSmall {
                    agent: i,
                    size: c.items.len(),
                    r,
                });
            } else {
                h.light[i].push(c.items.clone());
            }
        }
        h.heavy[i].sort_unstable();
        h.heavy[i].dedup();
    }
    Ok(h)
}
