//! Undirected graphical models of relations: vertex separation, D-/I-/P-map
//! verification against exact CI oracles, graph-driven propagation over
//! single-attribute joins, and the union-graph I-map of a join.

mod graph;
mod maps;
mod pmap;

pub use graph::{EdgeList, UndirectedGraph};
pub use maps::{
    build_minimal_imap, verify_map, verify_map_on, CiOracle, MapCounterexample, MapKind, MapVerdict, MinimalImap,
    StatementOracle, COUNTEREXAMPLE_CAP, MAX_EXHAUSTIVE_VERTICES, MAX_LIMITED_VERTICES,
};
pub use pmap::{either_or, pmap_propagate, union_imap, Branch};
