//! Finite logical matrices and atlases: evaluation, validity and consequence, clone
//! generation, Lindenbaum constructions, decision procedures for theorem and logic
//! inclusion, equational logic and a G3 prover for intuitionistic logic.

pub mod algebra;
pub mod cli;
pub mod decide;
pub mod eqlogic;
pub mod error;
pub mod intprover;
pub mod lang;
pub mod lindenbaum;
pub mod matrix;

pub use error::{Error, Result};

use serde::{Deserialize, Serialize};

/// Resource ceilings shared by the enumeration-heavy operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest number of term functions a clone may hold.
    pub max_clone: usize,
    /// Largest number of argument tuples `k^n` scanned at once.
    pub max_tuples: usize,
    /// Largest number of sequents memoized by the prover.
    pub memo_limit: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_clone: 1_000_000,
            max_tuples: 1 << 24,
            memo_limit: 1_000_000,
        }
    }
}

/// `base^exp`, or `None` when it exceeds `limit`.
pub(crate) fn checked_pow(base: usize, exp: usize, limit: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
        if acc > limit {
            return None;
        }
    }
    (acc <= limit).then_some(acc)
}
