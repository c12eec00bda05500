//! Exact computational group cohomology for finite groups: cochain
//! complexes, factor systems and extensions, automorphism lifting with its
//! obstruction class, crossed modules with characteristic classes and
//! structural cocycles, and the degree-2-to-degree-3 transgression pipeline.

pub mod abelian;
pub mod action;
pub mod basepointed;
pub mod cochain;
pub mod crossed;
pub mod descriptors;
pub mod error;
pub mod extension;
pub mod group;
pub mod intlin;
pub mod lifting;
pub mod oracle;
pub mod transgress;

pub use abelian::{AbelianGroup, Elt};
pub use action::GAction;
pub use cochain::{cohomology, Cochain, CohomologyResult};
pub use error::CoreError;
pub use group::FiniteGroup;

/// Resource limits for the exact algorithms.
#[derive(Debug, Clone)]
pub struct Limits {
    /// highest cochain degree the linear-algebra pipeline will attempt
    pub max_degree: usize,
    /// largest flattened cochain table the pipeline will allocate
    pub max_cells: usize,
    /// cap on |A|^slots for full coboundary enumeration in the oracle
    pub oracle_bound: u128,
    /// node budget for the backtracking cocycle scan
    pub oracle_nodes: u128,
    /// cap on combinatorial searches (sections, lifts, automorphism images)
    pub search_bound: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_degree: 4,
            max_cells: 400_000,
            oracle_bound: 1 << 20,
            oracle_nodes: 200_000_000,
            search_bound: 4_000_000,
        }
    }
}
