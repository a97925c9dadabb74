use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{serde_scalar_vec, Scalar};

/// A finite stretch `x_start, x_{start+1}, ...` of a sequence indexed by `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexedSeq {
    pub start: usize,
    #[serde(with = "serde_scalar_vec")]
    pub values: Vec<Scalar>,
}

impl IndexedSeq {
    pub fn new(start: usize, values: Vec<Scalar>) -> Self {
        IndexedSeq { start, values }
    }

    pub fn from_fn(start: usize, end_inclusive: usize, f: impl FnMut(usize) -> Scalar) -> Self {
        IndexedSeq {
            start,
            values: (start..=end_inclusive).map(f).collect(),
        }
    }

    /// Last stored index, or `None` when empty.
    pub fn last_index(&self) -> Option<usize> {
        (!self.values.is_empty()).then(|| self.start + self.values.len() - 1)
    }

    pub fn get(&self, n: usize) -> Option<&Scalar> {
        n.checked_sub(self.start).and_then(|k| self.values.get(k))
    }

    pub fn at(&self, n: usize, what: &'static str) -> Result<&Scalar> {
        self.get(n).ok_or_else(|| {
            Error::depth(what, n, self.last_index().unwrap_or(self.start.saturating_sub(1)))
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.values.iter().enumerate().map(|(k, v)| (self.start + k, v))
    }
}
