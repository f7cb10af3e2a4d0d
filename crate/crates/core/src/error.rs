use thiserror::Error;

/// Errors raised anywhere in the invariant pipeline.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("{field} not a permutation: value {value} repeated at columns {first} and {second}")]
    NotPermutation {
        field: &'static str,
        value: usize,
        first: usize,
        second: usize,
    },

    #[error("{field} out of range: column {column} has row {value} but grid size is {size}")]
    OutOfRange {
        field: &'static str,
        column: usize,
        value: usize,
        size: usize,
    },

    #[error("marker collision at cell (column {column}, row {row})")]
    MarkerCollision { column: usize, row: usize },

    #[error("diagram has {0} components; pass the multi-component flag to accept links")]
    MultiComponent(usize),

    #[error("illegal grid move: {0}")]
    IllegalGridMove(String),

    #[error("invalid front: {0}")]
    InvalidFront(String),

    #[error("disk search exceeded node budget of {budget} (at positive corner {corner})")]
    BudgetExceeded { budget: u64, corner: String },

    #[error("invalid augmentation: epsilon(d {generator}) = 1")]
    InvalidAugmentation { generator: String },

    #[error("crossing not contractible: {0}")]
    NotContractible(String),

    #[error("component is not a tb=-1 unknot: {0}")]
    NotUnknot(String),

    #[error("illegal move: {0}")]
    IllegalMove(String),

    #[error("move {index}: {source}")]
    AtMove { index: usize, source: Box<Error> },

    #[error("invalid invariant record: {0}")]
    InvalidRecord(String),

    #[error("invalid arguments: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
