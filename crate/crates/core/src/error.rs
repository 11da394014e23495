use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("signal too short: need at least {required} samples, got {actual}")]
    SignalTooShort { required: usize, actual: usize },

    #[error("grid cell (n={n}, tau={tau}) needs {required} samples, series has {actual}")]
    InfeasibleCell {
        n: usize,
        tau: usize,
        required: usize,
        actual: usize,
    },

    #[error("window of length {window} exceeds series of length {series}")]
    WindowExceedsSeries { window: usize, series: usize },

    #[error("window of length {window} too short for (n={n}, tau={tau}); need {required}")]
    WindowTooShort {
        window: usize,
        n: usize,
        tau: usize,
        required: usize,
    },

    #[error("framing error: length {len} is not a multiple of {samples_per_symbol} samples/symbol")]
    Framing { len: usize, samples_per_symbol: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected} features, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("format error: {0}")]
    Format(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
