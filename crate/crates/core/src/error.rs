use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vertex label {label} is out of range for a complex on {n} vertices")]
    InvalidVertex { label: usize, n: usize },

    #[error("facet {0:?} repeats a vertex label")]
    MalformedFacet(Vec<usize>),

    #[error("complex is not downward closed: face {0:?} is missing a boundary face")]
    NotDownwardClosed(Vec<usize>),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("every exponent is zero, so the first non-trivial dimension q is undefined")]
    NoPositiveExponent,

    #[error("pattern has {vertices} vertices or too many subcomplexes to enumerate (limit {limit} vertices)")]
    PatternTooLarge { vertices: usize, limit: usize },

    #[error("invalid extremal query: {0}")]
    InvalidQuery(String),

    #[error("floating-point simplex did not converge within {0} pivots")]
    NonconvergentFloat(usize),

    #[error("witness block constant violates the face budget in dimension {dimension}")]
    WitnessBoundViolated { dimension: usize },

    #[error("oracle instance too large: {0}")]
    OracleTooLarge(String),

    #[error("invalid range for the comparison lemma: {0}")]
    InvalidRange(String),

    #[error("not a non-empty subcomplex of the pattern: {0}")]
    InvalidSubcomplex(String),

    #[error("{0} is not a prime field characteristic")]
    InvalidField(u32),

    #[error("expected count is zero, the tail event is degenerate")]
    DegenerateMean,

    #[error("invalid number {0:?}")]
    InvalidNumber(String),

    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed JSON: {0}")]
    Json(String),
}

impl Error {
    /// Whether the error comes from a size guard rather than from bad input.
    pub fn is_guard(&self) -> bool {
        matches!(
            self,
            Error::PatternTooLarge { .. } | Error::OracleTooLarge(_) | Error::NonconvergentFloat(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
