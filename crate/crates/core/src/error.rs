use std::path::PathBuf;

use thiserror::Error;

use crate::scheduler::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} index {index} out of range (limit {limit})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("missing data: {0}")]
    MissingData(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("internal consistency error: {0}")]
    Inconsistent(String),

    #[error("instance exceeds oracle budget: {0}")]
    BudgetExceeded(String),

    #[error("extracted schedule failed validation: {0:?}")]
    InvalidSchedule(Vec<Violation>),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("scheme {scheme} failed on trial with seed {seed:#018x}: {source}")]
    Trial {
        scheme: String,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub(crate) fn check_index(what: &'static str, index: usize, limit: usize) -> Result<()> {
    if index < limit {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { what, index, limit })
    }
}
