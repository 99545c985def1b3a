use thiserror::Error;

use crate::algebra::AlgebraError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("malformed input: {0}")]
    Shape(String),

    #[error("multiplication is not associative on basis triple ({0}, {1}, {2})")]
    NonAssociative(usize, usize, usize),
    #[error("local unit {index} is not idempotent")]
    NotIdempotent { index: usize },
    #[error("basis element {basis} has no absorbing local unit")]
    NoLocalUnit { basis: usize },
    #[error("local units {first} and {second} have no common unit")]
    UnitClosure { first: usize, second: usize },
    #[error("no listed local unit absorbs all given elements")]
    NoCommonUnit,
    #[error("embedding is not multiplicative on basis pair ({0}, {1})")]
    NotMultiplicative(usize, usize),
    #[error("embedding does not map local units onto local units")]
    UnitSetMismatch,
    #[error("embedding is not injective")]
    NotInjective,

    #[error("not a bimodule: {0}")]
    NotBimodule(String),
    #[error("basis vector {basis} has no two-sided local unit")]
    NotUnital { basis: usize },
    #[error("map does not intertwine the actions")]
    NotBimoduleMap,
    #[error("module is not a direct summand of a finite free module")]
    NotSummandOfFreeR,
    #[error("split data does not compose to the identity")]
    InvalidSplitData,
    #[error("tensor map is not balanced: {0}")]
    NotBalanced(String),

    #[error("bimodule is not invertible: {0}")]
    NotInvertible(String),
    #[error("map is not a bimodule automorphism")]
    NotAutomorphism,
    #[error("product {side} is not the base ring (achieved dimension {achieved}, expected {expected})")]
    ProductNotR { side: &'static str, achieved: usize, expected: usize },

    #[error("action is not a group action at ({x}, {y})")]
    NotAnAction { x: usize, y: usize },
    #[error("not a cocycle")]
    NotACocycle,

    #[error("associativity fails at ({x}, {y}, {z})")]
    AssocFail { x: usize, y: usize, z: usize },
    #[error("unit triangle fails at {x}")]
    UnitFail { x: usize },
    #[error("multiplication map ({x}, {y}) is not an isomorphism")]
    NotIso { x: usize, y: usize },
    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("{0} is not an R-ring automorphism")]
    NotRRingAut(String),
    #[error("class is not in the invariant subgroup (witness {x})")]
    NotInSubgroup { x: usize },
    #[error("class is not Z-invariant")]
    NotZInvariant,
    #[error("class is not G-invariant (witness {x})")]
    NotGInvariant { x: usize },
    #[error("ledger incomplete: {0}")]
    LedgerIncomplete(String),
    #[error("cocycle value does not lie in Pic_0")]
    ValueNotInPic0,
    #[error("no representative: {0}")]
    NoRepresentative(String),
    #[error("similarity witness missing for component {x}")]
    SimilarityWitnessMissing { x: usize },

    #[error("size cap exceeded: {0}")]
    SizeCap(String),
    #[error("undecided: {0}")]
    Undecided(String),

    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error at {pointer}: {message}")]
    Validation { pointer: String, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
