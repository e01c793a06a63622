//! Treatment-effect estimation on (joined) relations: unit construction,
//! interference checks, exact and coarsened matching, the adjusted
//! estimand, covariate-set equivalence, and the join-specific guards
//! (vacuous effects from conditioning on join attributes, and dropping
//! covariates reachable through foreign keys).
//!
//! Potential outcomes are never data. Ignorability is only ever asserted;
//! see [`check_ignorability_asserted`].

mod equivalence;
mod matching;
mod units;

pub use equivalence::{
    check_c_equivalence, check_ignorability_asserted, reduce_covariates_fk, CEquivalence, CiSource,
    CovariateReduction, IgnorabilityStatus, IgnorabilityVerdict, JoinPlacement,
};
pub use matching::{
    cem, estimate_ate, exact_match, AteReport, Coarsening, CoarseningSpec, GroupDetail, MatchGroup, MatchGroups,
};
pub use units::{
    build_unit_table, detect_zero_ate, join_attributes, validate_sutva_units, CompareOp, SutvaReport,
    SutvaViolation, TreatmentSpec, Unit, UnitTable, MAX_UNITS,
};
