use thiserror::Error;

/// Errors raised while building structures, operators and walks.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("not a partition: {0}")]
    NotAPartition(String),

    #[error("invalid tessellation: {0}")]
    InvalidTessellation(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not unitary: max |U^dagger U - I| = {max_deviation:e}")]
    NotUnitary { max_deviation: f64 },

    #[error("operator couples distinct blocks at ({row}, {col})")]
    BlockViolation { row: usize, col: usize },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("vertices {0} and {1} are not adjacent")]
    NotAdjacent(usize, usize),

    #[error("transform not applicable: {0}")]
    InapplicableTransform(String),

    #[error("unsatisfiable size bounds: {0}")]
    UnsatisfiableBounds(String),

    #[error("unknown operator preset {0:?}")]
    UnknownPreset(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
