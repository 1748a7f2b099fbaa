use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// The two resonances of the response coincide, so the two-pole
    /// decomposition does not exist.
    #[error("bifurcation: roots coincide (|delta+ - delta-| = {separation:e}); two-resonance decomposition is invalid")]
    Bifurcation { separation: f64 },

    #[error("oracle timeout: {0}")]
    OracleTimeout(String),

    #[error("oracle extraction failed: {0}")]
    OracleExtraction(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
