//! Carrying conditional independences from base relations over to their
//! natural join: the base join CI, the conditioning- and side-containment
//! rules, foreign-key and one-one specializations, multi-relation chains,
//! and embedded multivalued dependencies.

mod emvd;
mod estimate;
mod infer;
mod spec;

pub use emvd::{emvd_holds, semi_join_reduced, EmvdStatement};
pub use estimate::factorized_count_estimate;
pub use infer::{audit_assertions, infer_join_cis, AssertionCheck, AuditPolicy, DerivedCi, InferOptions, JoinInference};
pub use spec::{base_join_cis, is_key, propagate_ci, validate_key_class, JoinSpec, KeyClass, Propagation, PropagationRule};
