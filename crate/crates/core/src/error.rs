use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} out of range: requested {requested}, available {available}")]
    OutOfRange {
        what: &'static str,
        requested: u128,
        available: u128,
    },

    #[error("work budget exceeded: {needed} operations needed, budget is {budget}")]
    Budget { needed: u128, budget: u128 },

    #[error("anchor is not non-dyadic within a horizon of {horizon} symbols")]
    DyadicAnchor { horizon: usize },

    #[error("infeasible construction: {0}")]
    Infeasible(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("counter overflow: {0}")]
    Overflow(&'static str),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("source incompatible with the prescribed bits at position {0}")]
    Incompatible(u64),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
