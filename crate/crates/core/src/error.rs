use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("contour setup failed: {0}")]
    Contour(String),

    #[error("series too short: need at least {required} coefficients, have {actual}")]
    SeriesTooShort { required: usize, actual: usize },

    #[error("dense solver is limited to N <= {limit} (got {n}); use the iterative solver")]
    DenseTooLarge { n: usize, limit: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
