//! Conditional-independence statement algebra: graphoid axioms, finite
//! closure over a declared attribute universe, derivability with replayable
//! proof traces, and the graph-isomorph axiom check.
//!
//! Closure here means membership in the least fixed point of the axiom
//! schemas over a finite triple space. It is sound but says nothing about
//! semantic implication in general.

mod axioms;
mod closure;
mod enumerate;
mod isomorph;
mod statement;

pub use axioms::{apply_axiom, Axiom, Conclusion};
pub use closure::{closure, derivable, ClosureBounds, Derivation, DerivationTrace, Mode, TraceStep};
pub use enumerate::{empirical_ci_set, enumerate_triples, Triple};
pub use isomorph::{check_graph_isomorph_axioms, IsomorphReport, Violation};
pub use statement::{parse_statements, CiSet, CiStatement, JOIN_CONTEXT};
