use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u32),

    #[error("field order {p}^{e} is outside the supported range 2..=64")]
    UnsupportedOrder { p: u32, e: u32 },

    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("element index {index} does not belong to GF({q})")]
    ForeignElement { index: usize, q: usize },

    #[error("operands live over different fields (GF({left}) vs GF({right}))")]
    FieldMismatch { left: usize, right: usize },

    #[error("dimension mismatch ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not unitriangular")]
    NotUnitriangular,

    #[error("matrix is not invertible")]
    NotInvertible,

    #[error("entry ({row},{col}) is nonzero but lies outside the key space")]
    OutsideKeySpace { row: usize, col: usize },

    #[error("key {key} is out of range for a key space of size {size}")]
    KeyOutOfRange { key: u64, size: u64 },

    #[error("{what} needs {required}, above the limit of {limit}")]
    SizeGuard {
        what: String,
        required: u128,
        limit: u128,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no census value available for |U({n},{q})^{m}|")]
    MissingCensus { n: usize, q: usize, m: u64 },

    #[error("postcondition failed: {0}")]
    Postcondition(String),

    #[error("cache format: {0}")]
    CacheFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn is_size_guard(&self) -> bool {
        matches!(self, Error::SizeGuard { .. })
    }
}
