use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not square: {rows} rows but row {row} has {len} entries")]
    NotSquare { rows: usize, row: usize, len: usize },

    #[error("coefficient at ({i}, {j}) is not finite")]
    NonFinite { i: usize, j: usize },

    #[error("instance must have at least one variable")]
    Empty,

    #[error("entry ({i}, {j}) out of range for n = {n}")]
    IndexOutOfRange { i: usize, j: usize, n: usize },

    #[error("entry ({i}, {j}) has i > j; entries must be upper triangular")]
    LowerTriangleEntry { i: usize, j: usize },

    #[error("a multi-objective set needs at least 2 objectives, got {0}")]
    TooFewObjectives(usize),

    #[error("objective {index} has n = {found}, expected {expected}")]
    MixedSizes { index: usize, expected: usize, found: usize },

    #[error("expected {expected} weights, got {actual}")]
    WeightCount { expected: usize, actual: usize },

    #[error("weight {index} is {value}; weights must be positive and finite")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("objective {index} has zero variance and cannot be standardized")]
    ZeroVariance { index: usize },

    #[error("objective {index} has zero roof-dual width and cannot be normalized")]
    ZeroWidth { index: usize },

    #[error("brute force is limited to n <= {limit} (got n = {n}); use the annealer instead")]
    TooLarge { n: usize, limit: usize },

    #[error("exact hypervolume supports 1 to 4 objectives, got {0}")]
    UnsupportedDimension(usize),

    #[error("no solutions to build a reference box from")]
    EmptyUnion,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid bit string: {0}")]
    InvalidBits(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
