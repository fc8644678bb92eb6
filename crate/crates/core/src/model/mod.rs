//! Instances, allocations, exact lattice arithmetic and the on-disk formats.
//!
//! An [`Instance`] has `n` agents and `m` items. Every item is either heavy
//! (weight 1) or light (weight ε), and every agent values exactly the items in
//! its interest set. All utilities are [`LatticeValue`]s `h + l·ε`, compared
//! exactly through [`Epsilon::key`].

mod allocation;
mod io;
mod lattice;
mod matching;

pub use allocation::{Allocation, Violation};
pub use io::{parse_allocation, parse_instance, serialize_allocation, serialize_instance};
pub use lattice::{lattice_values, Epsilon, LatticeValue};
pub use matching::{Bundle, Matching};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("malformed JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("malformed epsilon {0:?}: expected \"p/q\"")]
    MalformedEpsilon(String),
    #[error("epsilon out of range: {0} is not in (0, 1)")]
    EpsilonOutOfRange(String),
    #[error("duplicate item id {0}")]
    DuplicateItemId(usize),
    #[error("item ids must be 0..m without gaps, missing {0}")]
    MissingItemId(usize),
    #[error("duplicate agent id {0}")]
    DuplicateAgentId(usize),
    #[error("agent ids must be 0..n without gaps, missing {0}")]
    MissingAgentId(usize),
    #[error("unknown item id {item} in interests of agent {agent}")]
    UnknownItemId { agent: usize, item: usize },
    #[error("instance has no agents")]
    NoAgents,
    #[error("allocation key {0:?} is not an agent id")]
    BadAgentKey(String),
    #[error("target value must be positive")]
    ZeroTarget,
    #[error("invalid allocation: {0}")]
    InvalidAllocation(Violation),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ItemKind {
    Heavy,
    Light,
}

/// A (1,ε)-restricted allocation instance. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    epsilon: Epsilon,
    kinds: Vec<ItemKind>,
    interests: Vec<Vec<usize>>,
    heavy_interests: Vec<Vec<usize>>,
    light_interests: Vec<Vec<usize>>,
}

impl Instance {
    /// Builds an instance, sorting and deduplicating every interest set.
    pub fn new(
        epsilon: Epsilon,
        kinds: Vec<ItemKind>,
        interests: Vec<Vec<usize>>,
    ) -> Result<Self, ModelError> {
        if interests.is_empty() {
            return Err(ModelError::NoAgents);
        }
        let m = kinds.len();
        let mut cleaned = Vec::with_capacity(interests.len());
        for (agent, mut set) in interests.into_iter().enumerate() {
            set.sort_unstable();
            set.dedup();
            if let Some(&item) = set.iter().find(|&&j| j >= m) {
                return Err(ModelError::UnknownItemId { agent, item });
            }
            cleaned.push(set);
        }
        let split = |kind: ItemKind| -> Vec<Vec<usize>> {
            cleaned
                .iter()
                .map(|s| s.iter().copied().filter(|&j| kinds[j] == kind).collect())
                .collect()
        };
        let heavy_interests = split(ItemKind::Heavy);
        let light_interests = split(ItemKind::Light);
        Ok(Instance {
            epsilon,
            kinds,
            interests: cleaned,
            heavy_interests,
            light_interests,
        })
    }

    pub fn epsilon(&self) -> Epsilon {
        self.epsilon
    }

    pub fn n(&self) -> usize {
        self.interests.len()
    }

    pub fn m(&self) -> usize {
        self.kinds.len()
    }

    pub fn kind(&self, item: usize) -> ItemKind {
        self.kinds[item]
    }

    pub fn kinds(&self) -> &[ItemKind] {
        &self.kinds
    }

    pub fn is_heavy(&self, item: usize) -> bool {
        self.kinds[item] == ItemKind::Heavy
    }

    /// `B_i`, sorted.
    pub fn interests(&self, agent: usize) -> &[usize] {
        &self.interests[agent]
    }

    /// `B¹_i`, sorted.
    pub fn heavy_interests(&self, agent: usize) -> &[usize] {
        &self.heavy_interests[agent]
    }

    /// `B^ε_i`, sorted.
    pub fn light_interests(&self, agent: usize) -> &[usize] {
        &self.light_interests[agent]
    }

    pub fn is_interested(&self, agent: usize, item: usize) -> bool {
        self.interests[agent].binary_search(&item).is_ok()
    }

    pub fn heavy_count(&self) -> usize {
        self.kinds.iter().filter(|k| **k == ItemKind::Heavy).count()
    }

    pub fn light_count(&self) -> usize {
        self.m() - self.heavy_count()
    }

    /// Weight of an item set as a lattice value.
    pub fn weight(&self, items: &[usize]) -> LatticeValue {
        let heavy = items.iter().filter(|&&j| self.is_heavy(j)).count() as u64;
        LatticeValue::new(heavy, items.len() as u64 - heavy)
    }

    /// Every value `h + lε` a bundle drawn from the whole item set can take.
    pub fn lattice_values(&self) -> Vec<LatticeValue> {
        lattice_values(
            self.epsilon,
            self.heavy_count() as u64,
            self.light_count() as u64,
        )
    }

    /// Sub-instance on the given agents and items (both in the given order).
    ///
    /// Returns the sub-instance together with the old→new item map.
    pub fn restrict(&self, agents: &[usize], items: &[usize]) -> (Instance, Vec<Option<usize>>) {
        let mut remap = vec![None; self.m()];
        for (new, &old) in items.iter().enumerate() {
            remap[old] = Some(new);
        }
        let kinds = items.iter().map(|&j| self.kinds[j]).collect();
        let interests = agents
            .iter()
            .map(|&i| {
                self.interests[i]
                    .iter()
                    .filter_map(|&j| remap[j])
                    .collect()
            })
            .collect();
        let sub = Instance::new(self.epsilon, kinds, interests)
            .expect("restriction of a valid instance is valid");
        (sub, remap)
    }
}
