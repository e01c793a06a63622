use thiserror::Error;

use crate::relcore::Attr;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("attribute `{attr}` is not in the schema of `{relation}`")]
    UnknownAttribute { attr: Attr, relation: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("conditioning event has zero support in `{relation}`")]
    EmptyCondition { relation: String },

    #[error("relation `{0}` is empty; its frequency distribution is undefined")]
    EmptyRelation(String),

    #[error("resource limit exceeded: {what} is {actual}, bound is {bound}")]
    ResourceLimit {
        what: &'static str,
        actual: usize,
        bound: usize,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("estimation impossible: {0}")]
    Estimation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
