//! Directed and undirected graphlet enumeration, orbit counting and network
//! comparison.
//!
//! The pipeline: [`graphlets::generate`] produces the set of non-isomorphic
//! connected graphlets of sizes `2..=k` with a global orbit numbering;
//! [`gtrie::GTrie::build`] folds the set into a graphlet-trie with
//! symmetry-breaking conditions; [`census::gtrie_census`] enumerates every
//! induced occurrence in a network, yielding the per-node orbit frequency
//! matrix; [`compare`] turns matrices into graphlet degree distributions and
//! GDD-agreement similarity, clustered into a dendrogram.
//!
//! An ESU-style enumerator ([`census::esu_census`]) computes the same matrix
//! along an independent path and serves as the correctness oracle.

pub mod census;
pub mod compare;
pub mod error;
pub mod graph;
pub mod graphlets;
pub mod gtrie;
pub mod iso;
pub mod random;

pub use census::{esu_census, gtrie_census, gtrie_census_parallel, OrbitFrequencyMatrix};
pub use compare::{
    cluster, gda, gda_matrix, gda_orbit, gdd, normalize, Dendrogram, GdaMode,
    GraphletDegreeDistribution, MergeStep, NormalizedGdd, SimilarityMatrix,
};
pub use error::{Error, Result};
pub use graph::{ConnectionType, Graph, NodeId};
pub use graphlets::{generate, generate_with_limit, Graphlet, GraphletSet};
pub use gtrie::{symmetry_conditions, Condition, GTrie};
pub use iso::{
    automorphisms, canonical_form, default_max_k, vertex_orbits, CanonicalForm, CanonicalKey,
    OrbitPartition, SmallGraph, MAX_GRAPHLET_NODES,
};
