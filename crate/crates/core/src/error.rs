use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: malformed CSV at line {line}: {message}")]
    MalformedCsv {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{path}: cannot parse date {value:?} at line {line}")]
    DateParse {
        path: PathBuf,
        line: u64,
        value: String,
    },

    #[error("non-positive price {value} for {ticker} on {date}")]
    NonPositivePrice {
        ticker: String,
        date: String,
        value: f64,
    },

    #[error("non-positive market cap {value} for {ticker} on {date}")]
    NonPositiveCap {
        ticker: String,
        date: String,
        value: f64,
    },

    #[error("duplicate ticker {0:?}")]
    DuplicateTicker(String),

    #[error("duplicate cell for {ticker} on {date}")]
    DuplicateCell { ticker: String, date: String },

    #[error("ticker {0:?} has no sector label")]
    MissingSector(String),

    #[error("ticker {0:?} is not part of this universe")]
    UnknownTicker(String),

    #[error("ticker {ticker} has a missing price on {date}")]
    MissingPrice { ticker: String, date: String },

    #[error("need at least 3 price rows, got {0}")]
    TooFewRows(usize),

    #[error("window {0:?} drops every ticker")]
    AllTickersDropped(String),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("zero return variance for {0} (frozen or halted series)")]
    ZeroVariance(String),

    #[error("empty universe: no tickers")]
    EmptyUniverse,

    #[error("partition covers {got} nodes, expected {expected}")]
    PartitionSizeMismatch { expected: usize, got: usize },

    #[error("node {node} out of range for a graph of {n} nodes")]
    UnknownNode { node: usize, n: usize },

    #[error("graph has no edges")]
    NoEdges,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no market-cap panel loaded")]
    MissingMarketCaps,

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("window {label}: {source}")]
    Window {
        label: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_window(self, label: &str) -> Self {
        Error::Window {
            label: label.to_string(),
            source: Box::new(self),
        }
    }

    /// Process exit code: 2 input/validation, 3 numerical, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Window { source, .. } => source.exit_code(),
            Error::ZeroVariance(_) => 3,
            Error::Io { .. } => 4,
            _ => 2,
        }
    }
}
