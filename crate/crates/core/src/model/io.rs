use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Allocation, Epsilon, Instance, ItemKind, ModelError};

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    epsilon: String,
    items: Vec<ItemEntry>,
    agents: Vec<AgentEntry>,
}

#[derive(Serialize, Deserialize)]
struct ItemEntry {
    id: usize,
    kind: ItemKind,
}

#[derive(Serialize, Deserialize)]
struct AgentEntry {
    id: usize,
    interests: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct AllocationFile {
    assignment: BTreeMap<String, Vec<usize>>,
}

/// Places `(id, value)` pairs into a dense vector, rejecting duplicate and missing ids.
fn dense<T>(
    entries: impl Iterator<Item = (usize, T)>,
    len: usize,
    dup: fn(usize) -> ModelError,
    missing: fn(usize) -> ModelError,
) -> Result<Vec<T>, ModelError> {
    let mut by_id = BTreeMap::new();
    for (id, v) in entries {
        if by_id.insert(id, v).is_some() {
            return Err(dup(id));
        }
    }
    if let Some(gap) = (0..len).find(|i| !by_id.contains_key(i)) {
        return Err(missing(gap));
    }
    Ok(by_id.into_values().collect())
}

pub fn parse_instance(text: &[u8]) -> Result<Instance, ModelError> {
    let file: InstanceFile = serde_json::from_slice(text)?;
    let epsilon: Epsilon = file.epsilon.parse()?;
    let m = file.items.len();
    let kinds = dense(
        file.items.into_iter().map(|e| (e.id, e.kind)),
        m,
        ModelError::DuplicateItemId,
        ModelError::MissingItemId,
    )?;
    let n = file.agents.len();
    if n == 0 {
        return Err(ModelError::NoAgents);
    }
    let interests = dense(
        file.agents.into_iter().map(|a| (a.id, a.interests)),
        n,
        ModelError::DuplicateAgentId,
        ModelError::MissingAgentId,
    )?;
    Instance::new(epsilon, kinds, interests)
}

pub fn serialize_instance(inst: &Instance) -> String {
    let file = InstanceFile {
        epsilon: inst.epsilon().to_string(),
        items: inst
            .kinds()
            .iter()
            .enumerate()
            .map(|(id, &kind)| ItemEntry { id, kind })
            .collect(),
        agents: (0..inst.n())
            .map(|id| AgentEntry {
                id,
                interests: inst.interests(id).to_vec(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("instance serializes")
}

pub fn parse_allocation(text: &[u8]) -> Result<Allocation, ModelError> {
    let file: AllocationFile = serde_json::from_slice(text)?;
    let mut alloc = Allocation::default();
    for (key, items) in file.assignment {
        let agent: usize = key.parse().map_err(|_| ModelError::BadAgentKey(key.clone()))?;
        for item in items {
            alloc.give(agent, item);
        }
    }
    Ok(alloc)
}

/// Writes every agent with a non-empty bundle.
pub fn serialize_allocation(alloc: &Allocation) -> String {
    let assignment = alloc
        .bundles()
        .iter()
        .enumerate()
        .filter(|(_, b)| !b.is_empty())
        .map(|(i, b)| (i.to_string(), b.clone()))
        .collect();
    serde_json::to_string_pretty(&AllocationFile { assignment }).expect("allocation serializes")
}
