use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("range error: {0}")]
    Range(String),

    #[error(
        "infeasible time difference {time_difference_s} s: magnitude exceeds the end-to-end travel time {max_s} s"
    )]
    InfeasibleTimeDifference { time_difference_s: f64, max_s: f64 },

    #[error("unknown wavelet `{0}` (expected `haar` or `db4`)")]
    UnknownWavelet(String),

    #[error("{levels} decomposition levels requested but a length-{length} signal supports at most {max}")]
    TooManyLevels {
        levels: usize,
        length: usize,
        max: usize,
    },

    #[error("inconsistent decomposition: {0}")]
    InconsistentCoefficients(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
