//! Exact optimum for small instances.
//!
//! A subset dynamic program: layer `i` holds every set of items that can be used
//! up while satisfying agents `0..i`, and each agent extends a set by one of its
//! inclusion-minimal bundles reaching the target.

use itertools::Itertools;
use thiserror::Error;

use crate::model::{Allocation, Instance, LatticeValue};

pub const DEFAULT_ITEM_CAP: usize = 22;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("instance has {m} items, exact mode is capped at {cap}")]
    TooLarge { m: usize, cap: usize },
}

#[derive(Clone, Copy, Debug)]
pub struct ExactSolver {
    pub item_cap: usize,
}

impl Default for ExactSolver {
    fn default() -> Self {
        ExactSolver {
            item_cap: DEFAULT_ITEM_CAP,
        }
    }
}

struct BitSet(Vec<u64>);

impl BitSet {
    fn new(bits: usize) -> Self {
        BitSet(vec![0; bits.div_ceil(64)])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * 64 + b)
            })
        })
    }
}

/// Item masks of every inclusion-minimal bundle worth at least `t` to `agent`.
pub fn minimal_bundles(inst: &Instance, agent: usize, t: LatticeValue) -> Vec<u32> {
    let eps = inst.epsilon();
    let target = eps.key(t);
    let heavy = inst.heavy_interests(agent);
    let light = inst.light_interests(agent);
    let mask = |items: &[&usize]| items.iter().fold(0u32, |acc, &&j| acc | 1 << j);
    let mut out = Vec::new();
    for h in 0..=heavy.len() {
        let l = eps.lights_needed(t, h as u64) as usize;
        if l > light.len() {
            continue;
        }
        if h > 0 && eps.key(LatticeValue::new(h as u64 - 1, l as u64)) >= target {
            continue;
        }
        for hs in heavy.iter().combinations(h) {
            let hm = mask(&hs);
            for ls in light.iter().combinations(l) {
                out.push(hm | mask(&ls));
            }
        }
    }
    out
}

impl ExactSolver {
    fn check(&self, inst: &Instance) -> Result<(), ExactError> {
        let cap = self.item_cap.min(31);
        if inst.m() > cap {
            return Err(ExactError::TooLarge { m: inst.m(), cap });
        }
        Ok(())
    }

    /// A witness allocation giving every agent at least `t`, if one exists.
    pub fn feasible_at(
        &self,
        inst: &Instance,
        t: LatticeValue,
    ) -> Result<Option<Allocation>, ExactError> {
        self.check(inst)?;
        let n = inst.n();
        if t.is_zero() {
            return Ok(Some(Allocation::empty(n)));
        }
        let size = 1usize << inst.m();
        let bundles: Vec<Vec<u32>> = (0..n).map(|i| minimal_bundles(inst, i, t)).collect();
        let mut layers = vec![{
            let mut b = BitSet::new(size);
            b.insert(0);
            b
        }];
        for agent_bundles in &bundles {
            let prev = layers.last().unwrap();
            let mut next = BitSet::new(size);
            let mut any = false;
            for used in prev.iter() {
                for &b in agent_bundles {
                    if used as u32 & b == 0 {
                        next.insert(used | b as usize);
                        any = true;
                    }
                }
            }
            if !any {
                return Ok(None);
            }
            layers.push(next);
        }
        let mut used = layers[n].iter().next().expect("last layer is non-empty");
        let mut alloc = Allocation::empty(n);
        for agent in (0..n).rev() {
            let b = bundles[agent]
                .iter()
                .copied()
                .find(|&b| used as u32 & b == b && layers[agent].contains(used ^ b as usize))
                .expect("backtracking follows a reachable chain");
            used ^= b as usize;
            for j in (0..inst.m()).filter(|j| b >> j & 1 == 1) {
                alloc.give(agent, j);
            }
        }
        Ok(Some(alloc))
    }

    /// The optimum value together with a witness allocation.
    pub fn opt(&self, inst: &Instance) -> Result<(LatticeValue, Allocation), ExactError> {
        self.check(inst)?;
        let values = inst.lattice_values();
        let (mut lo, mut hi) = (0, values.len() - 1);
        let mut best = Allocation::empty(inst.n());
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            match self.feasible_at(inst, values[mid])? {
                Some(a) => {
                    lo = mid;
                    best = a;
                }
                None => hi = mid - 1,
            }
        }
        Ok((values[lo], best))
    }
}

pub fn feasible_at(inst: &Instance, t: LatticeValue) -> Result<Option<Allocation>, ExactError> {
    ExactSolver::default().feasible_at(inst, t)
}

pub fn opt(inst: &Instance) -> Result<(LatticeValue, Allocation), ExactError> {
    ExactSolver::default().opt(inst)
}
