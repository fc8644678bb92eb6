use std::fmt;

use super::{Instance, LatticeValue, ModelError};

/// A (possibly partial) assignment of items to agents.
///
/// `bundles[i]` is the item list of agent `i`; agents past the end of the
/// vector hold nothing.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Allocation {
    bundles: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DuplicateItem { item: usize, agents: Vec<usize> },
    NotInterested { agent: usize, item: usize },
    UnknownAgent { agent: usize },
    UnknownItem { agent: usize, item: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateItem { item, agents } => {
                write!(f, "duplicate item {item} held by agents {agents:?}")
            }
            Violation::NotInterested { agent, item } => {
                write!(f, "not interested: agent {agent} holds item {item}")
            }
            Violation::UnknownAgent { agent } => write!(f, "unknown agent {agent}"),
            Violation::UnknownItem { agent, item } => {
                write!(f, "unknown item {item} held by agent {agent}")
            }
        }
    }
}

impl Allocation {
    pub fn empty(n: usize) -> Self {
        Allocation {
            bundles: vec![Vec::new(); n],
        }
    }

    pub fn from_bundles(mut bundles: Vec<Vec<usize>>) -> Self {
        for b in &mut bundles {
            b.sort_unstable();
        }
        Allocation { bundles }
    }

    pub fn bundle(&self, agent: usize) -> &[usize] {
        self.bundles.get(agent).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn bundles(&self) -> &[Vec<usize>] {
        &self.bundles
    }

    pub fn give(&mut self, agent: usize, item: usize) {
        if self.bundles.len() <= agent {
            self.bundles.resize(agent + 1, Vec::new());
        }
        let b = &mut self.bundles[agent];
        if let Err(pos) = b.binary_search(&item) {
            b.insert(pos, item);
        }
    }

    /// Lists every way this allocation breaks the instance's rules; empty iff valid.
    pub fn verify(&self, inst: &Instance) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut holders: Vec<Vec<usize>> = vec![Vec::new(); inst.m()];
        for (agent, bundle) in self.bundles.iter().enumerate() {
            if agent >= inst.n() {
                if !bundle.is_empty() {
                    out.push(Violation::UnknownAgent { agent });
                }
                continue;
            }
            for &item in bundle {
                if item >= inst.m() {
                    out.push(Violation::UnknownItem { agent, item });
                    continue;
                }
                holders[item].push(agent);
                if !inst.is_interested(agent, item) {
                    out.push(Violation::NotInterested { agent, item });
                }
            }
        }
        for (item, agents) in holders.into_iter().enumerate() {
            if agents.len() > 1 {
                out.push(Violation::DuplicateItem { item, agents });
            }
        }
        out
    }

    /// Smallest utility over all agents of `inst`; agents with no bundle count as zero.
    pub fn min_value(&self, inst: &Instance) -> Result<LatticeValue, ModelError> {
        if let Some(v) = self.verify(inst).into_iter().next() {
            return Err(ModelError::InvalidAllocation(v));
        }
        let eps = inst.epsilon();
        Ok((0..inst.n())
            .map(|i| inst.weight(self.bundle(i)))
            .reduce(|a, b| eps.min(a, b))
            .unwrap_or(LatticeValue::ZERO))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Epsilon, ItemKind};

    fn inst() -> Instance {
        let eps = Epsilon::new(1, 2).unwrap();
        Instance::new(
            eps,
            vec![ItemKind::Heavy, ItemKind::Light, ItemKind::Light],
            vec![vec![0, 1], vec![1, 2]],
        )
        .unwrap()
    }

    #[test]
    fn valid_allocation_has_no_violations() {
        let a = Allocation::from_bundles(vec![vec![0, 1], vec![2]]);
        assert!(a.verify(&inst()).is_empty());
        assert_eq!(a.min_value(&inst()).unwrap(), LatticeValue::new(0, 1));
    }

    #[test]
    fn duplicate_item_reported_once() {
        let a = Allocation::from_bundles(vec![vec![1], vec![1]]);
        let v = a.verify(&inst());
        assert_eq!(
            v,
            vec![Violation::DuplicateItem {
                item: 1,
                agents: vec![0, 1]
            }]
        );
    }

    #[test]
    fn not_interested_reported() {
        let a = Allocation::from_bundles(vec![vec![], vec![0]]);
        assert_eq!(
            a.verify(&inst()),
            vec![Violation::NotInterested { agent: 1, item: 0 }]
        );
        assert!(a.min_value(&inst()).is_err());
    }

    #[test]
    fn unassigned_agent_is_zero() {
        let a = Allocation::from_bundles(vec![vec![0, 1]]);
        assert_eq!(a.min_value(&inst()).unwrap(), LatticeValue::ZERO);
    }

    #[test]
    fn single_agent_heavy_plus_light() {
        let eps = Epsilon::new(1, 2).unwrap();
        let one = Instance::new(eps, vec![ItemKind::Heavy, ItemKind::Light], vec![vec![0, 1]])
            .unwrap();
        let a = Allocation::from_bundles(vec![vec![0, 1]]);
        let v = a.min_value(&one).unwrap();
        assert_eq!(v, LatticeValue::new(1, 1));
        assert_eq!(eps.to_f64(v), 1.5);
    }
}
