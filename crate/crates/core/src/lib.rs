//! Max-min fair allocation where every item is worth either 1 or ε to the
//! agents that want it.
//!
//! - [`model`]: instances, exact `h + lε` values, allocations, JSON formats.
//! - [`exact`]: optimum by dynamic programming over item subsets.
//! - [`flowkit`]: heavy-item matchings, disjoint paths, the flow baseline.
//! - [`clp`]: configuration LP by column generation and its threshold `T*`.
//! - [`treesearch`]: alternating-tree local search.
//! - [`lazysearch`]: layered local search with batched collapses.
//! - [`gen`]: random, 3DM-reduction and gap-witness instances.
//! - [`driver`]: the operations behind the command-line tool.

pub mod clp;
pub mod driver;
pub mod exact;
pub mod flowkit;
pub mod gen;
pub mod lazysearch;
pub mod model;
pub mod treesearch;
