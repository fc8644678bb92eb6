//! Instance generators.
//!
//! Seeded random corpora, the reduction from three-dimensional matching, and a
//! search for instances whose configuration-LP value is far above the optimum.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clp::{self, ClpError};
use crate::exact::{self, ExactError};
use crate::model::{Epsilon, Instance, ItemKind, LatticeValue};

/// Random instance: heavy items get ids `0..m_heavy`, light items follow.
pub fn gen_random(
    n: usize,
    m_heavy: usize,
    m_light: usize,
    density: f64,
    eps: Epsilon,
    seed: u64,
) -> Instance {
    assert!((0.0..=1.0).contains(&density), "density must lie in [0, 1]");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = m_heavy + m_light;
    let kinds = (0..m)
        .map(|j| if j < m_heavy { ItemKind::Heavy } else { ItemKind::Light })
        .collect();
    let interests = (0..n)
        .map(|_| (0..m).filter(|_| rng.gen_bool(density)).collect())
        .collect();
    Instance::new(eps, kinds, interests).expect("generated instance is valid")
}

/// A tripartite 3-uniform hypergraph on `X ∪ Y ∪ Z`, each part of size `size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph3DM {
    size: usize,
    edges: Vec<(usize, usize, usize)>,
}

impl Hypergraph3DM {
    /// Rejects out-of-range indices, duplicate edges and uncovered `z` nodes.
    pub fn new(size: usize, edges: Vec<(usize, usize, usize)>) -> Result<Self, String> {
        let mut seen = HashSet::new();
        for &(x, y, z) in &edges {
            if x >= size || y >= size || z >= size {
                return Err(format!("edge ({x}, {y}, {z}) out of range"));
            }
            if !seen.insert((x, y, z)) {
                return Err(format!("duplicate edge ({x}, {y}, {z})"));
            }
        }
        let h = Hypergraph3DM { size, edges };
        if let Some(z) = (0..size).find(|&z| h.degree_z(z) == 0) {
            return Err(format!("node z{z} lies on no edge"));
        }
        Ok(h)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn edges(&self) -> &[(usize, usize, usize)] {
        &self.edges
    }

    pub fn degree_z(&self, z: usize) -> usize {
        self.edges.iter().filter(|e| e.2 == z).count()
    }

    /// Whether the given edges cover every node exactly once.
    pub fn is_perfect_matching(&self, chosen: &[usize]) -> bool {
        let mut used = [
            vec![false; self.size],
            vec![false; self.size],
            vec![false; self.size],
        ];
        for &e in chosen {
            let (x, y, z) = self.edges[e];
            for (part, v) in [(0, x), (1, y), (2, z)] {
                if std::mem::replace(&mut used[part][v], true) {
                    return false;
                }
            }
        }
        chosen.len() == self.size
    }

    /// Exhaustive search for a perfect matching.
    pub fn has_perfect_matching(&self) -> bool {
        fn go(h: &Hypergraph3DM, x: usize, ys: &mut [bool], zs: &mut [bool]) -> bool {
            if x == h.size {
                return true;
            }
            for &(ex, y, z) in &h.edges {
                if ex == x && !ys[y] && !zs[z] {
                    ys[y] = true;
                    zs[z] = true;
                    let ok = go(h, x + 1, ys, zs);
                    ys[y] = false;
                    zs[z] = false;
                    if ok {
                        return true;
                    }
                }
            }
            false
        }
        go(self, 0, &mut vec![false; self.size], &mut vec![false; self.size])
    }
}

/// The allocation instance encoding a 3DM instance.
///
/// One agent per edge. `X` and `Y` become light items `0..size` and
/// `size..2·size`; each `z` becomes `d(z) − 1` heavy copies. The agent of edge
/// `(x, y, z)` likes `x`, `y` and every copy of `z`.
pub fn reduce_3dm(h: &Hypergraph3DM, eps: Epsilon) -> Instance {
    if 2 * eps.num() > eps.den() {
        log::warn!("reduction is only meaningful for epsilon at most 1/2, got {eps}");
    }
    let size = h.size();
    let mut kinds = vec![ItemKind::Light; 2 * size];
    let mut copies: Vec<Vec<usize>> = vec![Vec::new(); size];
    for (z, list) in copies.iter_mut().enumerate() {
        for _ in 1..h.degree_z(z) {
            list.push(kinds.len());
            kinds.push(ItemKind::Heavy);
        }
    }
    let interests = h
        .edges()
        .iter()
        .map(|&(x, y, z)| {
            let mut b = vec![x, size + y];
            b.extend(&copies[z]);
            b
        })
        .collect();
    Instance::new(eps, kinds, interests).expect("reduction is valid")
}

fn add_random_edges(
    rng: &mut ChaCha8Rng,
    size: usize,
    edges: &mut Vec<(usize, usize, usize)>,
    extra: usize,
    avoid_y: Option<usize>,
) {
    let mut seen: HashSet<_> = edges.iter().copied().collect();
    let ys: Vec<usize> = (0..size).filter(|&y| Some(y) != avoid_y).collect();
    let capacity = size * ys.len() * size;
    let mut added = 0;
    while added < extra && seen.len() < capacity {
        let e = (
            rng.gen_range(0..size),
            *ys.choose(rng).unwrap(),
            rng.gen_range(0..size),
        );
        if seen.insert(e) {
            edges.push(e);
            added += 1;
        }
    }
}

/// A hypergraph with a planted perfect matching plus `extra` random edges.
///
/// Returns the hypergraph and the indices of the planted edges.
pub fn gen_3dm_yes(size: usize, extra: usize, seed: u64) -> (Hypergraph3DM, Vec<usize>) {
    assert!(size >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ys: Vec<usize> = (0..size).collect();
    let mut zs: Vec<usize> = (0..size).collect();
    ys.shuffle(&mut rng);
    zs.shuffle(&mut rng);
    let mut edges: Vec<_> = (0..size).map(|x| (x, ys[x], zs[x])).collect();
    add_random_edges(&mut rng, size, &mut edges, extra, None);
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.shuffle(&mut rng);
    let shuffled = order.iter().map(|&i| edges[i]).collect();
    let planted = (0..edges.len()).filter(|&p| order[p] < size).collect();
    let h = Hypergraph3DM::new(size, shuffled).expect("planted hypergraph is valid");
    (h, planted)
}

/// A hypergraph with no perfect matching: one `y` node lies on no edge.
///
/// Every `x` and `z` node is still covered, and `extra` further random edges
/// avoiding the missing `y` are added.
pub fn gen_3dm_no(size: usize, extra: usize, seed: u64) -> Hypergraph3DM {
    assert!(size >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let missing = rng.gen_range(0..size);
    let ys: Vec<usize> = (0..size).filter(|&y| y != missing).collect();
    let mut zs: Vec<usize> = (0..size).collect();
    zs.shuffle(&mut rng);
    let mut edges: Vec<_> = (0..size)
        .map(|x| (x, *ys.choose(&mut rng).unwrap(), zs[x]))
        .collect();
    add_random_edges(&mut rng, size, &mut edges, extra, Some(missing));
    Hypergraph3DM::new(size, edges).expect("unmatchable hypergraph is valid")
}

#[derive(Clone, Debug)]
pub struct GapWitness {
    pub instance: Instance,
    pub tstar: LatticeValue,
    pub opt: LatticeValue,
    pub probes: usize,
}

impl GapWitness {
    /// `T*/OPT` as a float; 1 when both are zero.
    pub fn ratio(&self) -> f64 {
        let eps = self.instance.epsilon();
        let (t, o) = (eps.key(self.tstar), eps.key(self.opt));
        if o == 0 {
            1.0
        } else {
            t as f64 / o as f64
        }
    }

    /// Whether `T*/OPT ≥ num/den`, compared exactly.
    pub fn ratio_at_least(&self, num: u128, den: u128) -> bool {
        let eps = self.instance.epsilon();
        eps.key(self.tstar) * den >= eps.key(self.opt) * num
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Clp(#[from] ClpError),
}

/// Search parameters for [`GapSearch::run`].
#[derive(Clone, Debug)]
pub struct GapSearch {
    pub n_max: usize,
    pub m_max: usize,
    pub eps: Epsilon,
    pub budget: usize,
    pub seed: u64,
    /// Stop as soon as a ratio of at least `num/den` is found.
    pub stop_at: Option<(u128, u128)>,
    pub tol: f64,
}

impl GapSearch {
    pub fn new(n_max: usize, m_max: usize, eps: Epsilon, budget: usize, seed: u64) -> Self {
        GapSearch {
            n_max,
            m_max,
            eps,
            budget,
            seed,
            stop_at: None,
            tol: clp::DEFAULT_TOL,
        }
    }

    pub fn stop_at(mut self, num: u128, den: u128) -> Self {
        self.stop_at = Some((num, den));
        self
    }

    fn probe(&self, inst: Instance, best: &mut Option<GapWitness>) -> Result<bool, SearchError> {
        let eps = inst.epsilon();
        let (opt, _) = exact::opt(&inst)?;
        let values = inst.lattice_values();
        let above = values.iter().copied().find(|&v| eps.cmp(v, opt).is_gt());
        let witness = match above {
            Some(next) if clp::solve_clp(&inst, next, self.tol)?.feasible => {
                let tstar = clp::estimate_tstar(&inst, self.tol)?.tstar;
                GapWitness {
                    instance: inst,
                    tstar,
                    opt,
                    probes: 0,
                }
            }
            _ => GapWitness {
                tstar: opt,
                instance: inst,
                opt,
                probes: 0,
            },
        };
        let better = match best {
            None => true,
            Some(b) => {
                // compare t1/o1 > t2/o2 without division
                let (t1, o1) = (eps.key(witness.tstar), eps.key(witness.opt));
                let e2 = b.instance.epsilon();
                let (t2, o2) = (e2.key(b.tstar), e2.key(b.opt));
                o1 > 0 && (o2 == 0 || t1 * o2 * e2.den() as u128 > t2 * o1 * eps.den() as u128)
            }
        };
        if better {
            *best = Some(witness);
        }
        let done = match (self.stop_at, best.as_ref()) {
            (Some((num, den)), Some(b)) => b.opt.light + b.opt.heavy > 0 && b.ratio_at_least(num, den),
            _ => false,
        };
        Ok(done)
    }

    /// Runs up to `budget` probes and returns the largest ratio found.
    ///
    /// Small bounds are enumerated exhaustively (heavy items first, agents in
    /// non-decreasing interest order); larger ones are sampled at random.
    pub fn run(&self) -> Result<GapWitness, SearchError> {
        let mut best = None;
        let mut probes = 0;
        if self.n_max <= 3 && self.m_max <= 5 {
            'outer: for n in 1..=self.n_max {
                for m in 1..=self.m_max {
                    for heavy in 0..=m {
                        let kinds: Vec<ItemKind> = (0..m)
                            .map(|j| if j < heavy { ItemKind::Heavy } else { ItemKind::Light })
                            .collect();
                        let mut masks = vec![0usize; n];
                        loop {
                            if probes >= self.budget {
                                break 'outer;
                            }
                            probes += 1;
                            let interests = masks
                                .iter()
                                .map(|&s| (0..m).filter(|j| s >> j & 1 == 1).collect())
                                .collect();
                            let inst = Instance::new(self.eps, kinds.clone(), interests)
                                .expect("enumerated instance is valid");
                            if self.probe(inst, &mut best)? {
                                break 'outer;
                            }
                            if !next_multiset(&mut masks, 1 << m) {
                                break;
                            }
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            while probes < self.budget {
                probes += 1;
                let inst = self.sample(&mut rng);
                if self.probe(inst, &mut best)? {
                    break;
                }
            }
        }
        let mut w = best.unwrap_or_else(|| {
            let inst = Instance::new(self.eps, vec![], vec![vec![]]).expect("trivial instance");
            GapWitness {
                instance: inst,
                tstar: LatticeValue::ZERO,
                opt: LatticeValue::ZERO,
                probes: 0,
            }
        });
        w.probes = probes;
        Ok(w)
    }

    /// Sparse random instance: each agent likes a few items, some of them heavy.
    ///
    /// Every other probe is "tight": agents like at most one heavy item plus just
    /// enough lights to match it, the regime where fractional and integral
    /// solutions drift apart.
    fn sample(&self, rng: &mut ChaCha8Rng) -> Instance {
        let n = rng.gen_range(2.min(self.n_max)..=self.n_max);
        let m = rng.gen_range(2.min(self.m_max)..=self.m_max);
        let heavy = rng.gen_range(0..=m / 2);
        let kinds: Vec<ItemKind> = (0..m)
            .map(|j| if j < heavy { ItemKind::Heavy } else { ItemKind::Light })
            .collect();
        let heavies: Vec<usize> = (0..heavy).collect();
        let lights: Vec<usize> = (heavy..m).collect();
        let tight = rng.gen_bool(0.5);
        let per_heavy = self.eps.den().div_ceil(self.eps.num()) as usize;
        let interests = (0..n)
            .map(|_| {
                let h = if tight {
                    usize::from(!heavies.is_empty() && rng.gen_bool(0.75))
                } else {
                    rng.gen_range(0..=heavies.len().min(1))
                };
                let l = if tight {
                    per_heavy.min(lights.len())
                } else {
                    rng.gen_range(1.min(lights.len())..=lights.len().min(3))
                };
                let mut b: Vec<usize> = heavies.choose_multiple(rng, h).copied().collect();
                b.extend(lights.choose_multiple(rng, l));
                b
            })
            .collect();
        Instance::new(self.eps, kinds, interests).expect("sampled instance is valid")
    }
}

/// Advances a non-decreasing sequence over `0..bound`; false after the last one.
fn next_multiset(seq: &mut [usize], bound: usize) -> bool {
    for i in (0..seq.len()).rev() {
        if seq[i] + 1 < bound {
            let v = seq[i] + 1;
            for s in &mut seq[i..] {
                *s = v;
            }
            return true;
        }
    }
    false
}

/// The instance maximising `T*/OPT` found within `budget` probes.
pub fn search_gap_witness(
    n_max: usize,
    m_max: usize,
    eps: Epsilon,
    budget: usize,
    seed: u64,
) -> Result<GapWitness, SearchError> {
    GapSearch::new(n_max, m_max, eps, budget, seed).run()
}
