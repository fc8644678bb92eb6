use super::{Allocation, Instance};

/// What a matched agent holds in a "heavy item or r light items" pattern.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Bundle {
    Heavy(usize),
    Light(Vec<usize>),
}

impl Bundle {
    pub fn items(&self) -> &[usize] {
        match self {
            Bundle::Heavy(j) => std::slice::from_ref(j),
            Bundle::Light(s) => s,
        }
    }

    pub fn is_heavy(&self) -> bool {
        matches!(self, Bundle::Heavy(_))
    }
}

/// Partial matching of agents to bundles, with a reverse item→agent index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    bundles: Vec<Option<Bundle>>,
    owner: Vec<Option<usize>>,
}

impl Matching {
    pub fn new(n: usize, m: usize) -> Self {
        Matching {
            bundles: vec![None; n],
            owner: vec![None; m],
        }
    }

    pub fn n(&self) -> usize {
        self.bundles.len()
    }

    pub fn bundle(&self, agent: usize) -> Option<&Bundle> {
        self.bundles[agent].as_ref()
    }

    pub fn owner(&self, item: usize) -> Option<usize> {
        self.owner[item]
    }

    pub fn is_matched(&self, agent: usize) -> bool {
        self.bundles[agent].is_some()
    }

    pub fn matched_count(&self) -> usize {
        self.bundles.iter().filter(|b| b.is_some()).count()
    }

    pub fn heavy_count(&self) -> usize {
        self.bundles
            .iter()
            .filter(|b| matches!(b, Some(Bundle::Heavy(_))))
            .count()
    }

    /// Gives `bundle` to `agent`, replacing whatever it held.
    ///
    /// Panics if an item of `bundle` is held by another agent.
    pub fn assign(&mut self, agent: usize, bundle: Bundle) {
        self.release(agent);
        for &j in bundle.items() {
            assert!(
                self.owner[j].is_none(),
                "item {j} already held by agent {:?}",
                self.owner[j]
            );
            self.owner[j] = Some(agent);
        }
        self.bundles[agent] = Some(bundle);
    }

    pub fn release(&mut self, agent: usize) -> Option<Bundle> {
        let old = self.bundles[agent].take();
        if let Some(b) = &old {
            for &j in b.items() {
                self.owner[j] = None;
            }
        }
        old
    }

    /// Every matched agent holds items it values, and the owner index agrees.
    pub fn is_consistent(&self, inst: &Instance) -> bool {
        let mut seen = vec![None; self.owner.len()];
        for (i, b) in self.bundles.iter().enumerate() {
            let Some(b) = b else { continue };
            for &j in b.items() {
                if seen[j].is_some() || !inst.is_interested(i, j) {
                    return false;
                }
                if b.is_heavy() != inst.is_heavy(j) {
                    return false;
                }
                seen[j] = Some(i);
            }
        }
        seen == self.owner
    }

    pub fn to_allocation(&self) -> Allocation {
        Allocation::from_bundles(
            self.bundles
                .iter()
                .map(|b| b.as_ref().map(|b| b.items().to_vec()).unwrap_or_default())
                .collect(),
        )
    }
}
