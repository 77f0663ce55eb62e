use thiserror::Error;

/// Errors raised by the engines and the harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("jet shape mismatch: {0}")]
    Shape(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("size {n} outside supported range {min}..={max} for {what}")]
    Size {
        what: &'static str,
        n: usize,
        min: usize,
        max: usize,
    },

    #[error("index {index} out of range for lattice size {n}")]
    Index { index: usize, n: usize },

    #[error("operator not invertible: {0}")]
    Invertibility(String),

    #[error("numerical limit did not settle: {0}")]
    NumericalLimit(String),

    #[error("degenerate expansion point: {0}")]
    Degenerate(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("parameter generator stuck after {attempts} rejections")]
    GeneratorStuck { attempts: usize },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_size(what: &'static str, n: usize, min: usize, max: usize) -> Result<()> {
    if n < min || n > max {
        Err(Error::Size { what, n, min, max })
    } else {
        Ok(())
    }
}
