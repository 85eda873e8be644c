use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed file contents; `field` names the header field or section at fault.
    #[error("decode error in {field}: {reason}")]
    Decode { field: &'static str, reason: String },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    /// A pixel that cannot be stored in an 8-bit file.
    #[error("pixel at row {row}, col {col} has value {value}, expected an integer in [0, 255]")]
    Range { row: usize, col: usize, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The input carries no usable statistics (e.g. every window has zero variance).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn decode(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Decode { field, reason: reason.into() }
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
