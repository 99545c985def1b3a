//! Linear algebra over `F_p` and `Z`, finite abelian groups and finite group tables.

pub mod abelian;
pub mod fp;
pub mod group;
pub mod integer;

pub use abelian::{group_from_relations, present_enumerated, AbelianGroupPresentation, EnumeratedAbelian, RelationQuotient};
pub use fp::{is_prime, solve_linear_system, FpMatrix, SolutionSet, Subspace};
pub use group::FiniteGroupTable;
pub use integer::{smith_normal_form, IntegerMatrix, SmithForm};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("shape mismatch: expected length {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("relation lattice leaves free rank {0}; expected a finite group")]
    FreeRank(usize),
    #[error("invalid group table: {0}")]
    InvalidGroup(String),
}
