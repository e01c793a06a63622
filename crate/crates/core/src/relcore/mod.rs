//! Bag-semantics relational core.
//!
//! Relations are multisets of tuples over named attributes. Every
//! probability here is a frequency ratio inside exactly one relation, and
//! all probability and independence arithmetic is exact.

mod attrs;
mod citest;
mod csvio;
mod measures;
mod relation;

pub use attrs::{Assignment, Attr, AttrSet};
pub use citest::CiTester;
pub use csvio::{read_csv, read_csv_from, write_csv, write_csv_to};
pub use measures::{
    conditional_entropy, count, empirical_ci, entropy, entropy_measures,
    functional_dependency_holds, mutual_information, probability, validate_foreign_key,
    EntropyMeasures, ForeignKey, ENTROPY_TOLERANCE,
};
pub use relation::{natural_join, project, BaseSchema, Relation, Value};
