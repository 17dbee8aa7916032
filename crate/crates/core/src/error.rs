use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point} does not belong to space {space}")]
    SpaceMismatch { space: String, point: String },

    #[error("symbol {symbol} is not in the index set (size {size})")]
    UnknownSymbol { symbol: usize, size: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("space {0} admits no two distinct sample points")]
    NoDistinctSamples(String),

    #[error("inverse fails round trip: distance {distance:e} at {point}")]
    RoundTrip { point: String, distance: f64 },

    #[error("pseudo-orbit is not a {delta}-average pseudo-orbit within its horizon")]
    NotAveragePseudoOrbit { delta: f64 },

    #[error("system {0} has no analytic contraction ratio below one")]
    MissingRatio(String),

    #[error("no preimage available for {point} under symbol {symbol}")]
    PreimageUnavailable { symbol: usize, point: String },

    #[error("search budget exceeded: {needed} words > {limit}")]
    BudgetExceeded { needed: u128, limit: u128 },

    #[error("symbol stream exhausted at index {0}")]
    StreamExhausted(usize),

    #[error("unsupported operation on {space}: {what}")]
    Unsupported { space: String, what: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
