use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the forecasting library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("no data rows")]
    NoDataRows,
    #[error("line {line}: {message}")]
    BadRow { line: usize, message: String },
    #[error("line {line}: timestamp {timestamp} does not follow the previous hour (non-hourly gap or out of order)")]
    NonHourlyGap { line: usize, timestamp: String },
    #[error("line {line}: duplicated timestamp {timestamp}")]
    DuplicateTimestamp { line: usize, timestamp: String },
    #[error("series length {len} is not divisible by 24")]
    NotWholeDays { len: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("degenerate normalization range: x_max == x_min == {0}")]
    DegenerateRange(f64),
    #[error("need more than {needed} days of history, got {got}")]
    TooFewDays { needed: usize, got: usize },
    #[error("insufficient extrema: {0}")]
    InsufficientExtrema(String),
    #[error("series too short or too flat to decompose: {0}")]
    NotDecomposable(String),
    #[error("mix index {n} out of range 1..={max}")]
    MixIndexOutOfRange { n: usize, max: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("non-finite gradient in {tensor}; update step skipped")]
    NonFiniteGradient { tensor: String },
    #[error("empty window set")]
    EmptyWindowSet,
    #[error("actual load at hour {hour} is zero; MAPE undefined")]
    ZeroActual { hour: usize },
    #[error("fitness evaluation failed for particle {particle}: {source}")]
    FitnessEvaluation {
        particle: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("component {component}: {source}")]
    Component {
        component: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("model file corrupt or unsupported: {0}")]
    BadModelFile(String),
    #[error("{0}")]
    Other(String),
}

impl Error {
    /// Wraps an error with the index of the pipeline component it came from.
    pub fn in_component(self, component: usize) -> Self {
        Error::Component {
            component,
            source: Box::new(self),
        }
    }
}
