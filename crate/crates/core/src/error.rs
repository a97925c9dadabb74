use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A sequence or functional is too short for the requested index.
    #[error("insufficient data for {what}: index {needed} requested, {available} available")]
    Depth {
        what: &'static str,
        needed: usize,
        available: usize,
    },
    /// A parameter lies outside the admissible set.
    #[error("domain error: {0}")]
    Domain(String),
    /// The caller violated an operation's contract (wrong case, zero divisor in the data).
    #[error("contract error: {0}")]
    Contract(String),
    /// An identity that must hold by construction failed.
    #[error("consistency failure: {check} at n = {n}")]
    Consistency { check: String, n: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn depth(what: &'static str, needed: usize, available: usize) -> Self {
        Error::Depth {
            what,
            needed,
            available,
        }
    }

    pub(crate) fn consistency(check: impl Into<String>, n: usize) -> Self {
        Error::Consistency {
            check: check.into(),
            n,
        }
    }
}
