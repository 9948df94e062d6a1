use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree sequence is not graphical")]
    NotGraphical,

    #[error("no graphical degree sequence found after {0} attempts")]
    RetriesExhausted(usize),

    #[error("node id {0} does not fit in 28 bits")]
    NodeIdOutOfRange(u64),

    #[error("graph is not simple: {0}")]
    NotSimple(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("instance too large to enumerate: {0}")]
    TooLarge(String),

    #[error("sampled graph is not in the enumerated state space")]
    UnknownState,

    #[error("too few transitions ({0}) for an independence test")]
    InsufficientData(u64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("thread pool: {0}")]
    ThreadPool(String),
}
