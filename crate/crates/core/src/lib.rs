//! Conditional independence reasoning over natural joins, undirected
//! graphical maps, and matching-based treatment-effect estimation on
//! multi-relational observational data.

pub mod causal;
pub mod cli;
pub mod error;
pub mod gaxioms;
pub mod joinprop;
pub mod rational;
pub mod relcore;
pub mod synth;
pub mod ugm;

pub use error::{Error, Result};
