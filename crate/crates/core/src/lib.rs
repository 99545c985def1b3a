//! Exact computation with bimodules over rings with local units, generalized crossed
//! products, twisted group cohomology and the associated seven-term exact sequence.

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod error;
pub mod instance;
pub mod bimodule;
pub mod center;
pub mod cohomology;
pub mod crossed;
pub mod picard;
pub mod report;
pub mod ring;
pub mod search;
pub mod sequence;
pub mod similarity;
pub mod tensor;

pub use error::{Error, Result};

use serde::{Deserialize, Serialize};

/// Outcome of a bounded search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decided<T> {
    Found(T),
    /// Proven not to exist.
    Absent,
    /// The search cap was reached without a decision.
    Undecided(String),
}

impl<T> Decided<T> {
    pub fn found(self) -> Option<T> {
        match self {
            Decided::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Decided::Found(_))
    }

    pub fn is_undecided(&self) -> bool {
        matches!(self, Decided::Undecided(_))
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Decided<U> {
        match self {
            Decided::Found(t) => Decided::Found(f(t)),
            Decided::Absent => Decided::Absent,
            Decided::Undecided(s) => Decided::Undecided(s),
        }
    }
}

/// Search and enumeration bounds shared by every module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Caps {
    /// Largest space searched exhaustively.
    pub exhaustive: u64,
    /// Random trials once a space exceeds `exhaustive`.
    pub samples: u64,
    /// Largest ring or group enumerated element by element.
    pub enumeration: u64,
    pub k_max: usize,
    /// Class cap for Picard-type ledgers.
    pub closure: usize,
    /// Class cap for crossed-product ledgers.
    pub c_closure: usize,
    pub seed: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            exhaustive: 1 << 16,
            samples: 100_000,
            enumeration: 1_000_000,
            k_max: 16,
            closure: 64,
            c_closure: 32,
            seed: 0,
        }
    }
}
