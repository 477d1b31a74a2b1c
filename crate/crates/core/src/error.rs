use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty calibration set")]
    EmptyCalibration,
    #[error("empty test set")]
    EmptyTest,
    #[error("dimension mismatch: expected d={expected}, found d={found} ({what})")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        what: String,
    },
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("empty training data")]
    EmptyTrainingData,
    #[error("singular normal equations; use ridge_lambda > 0")]
    SingularDesign,
    #[error("score requires a {0} predictor that the model does not provide")]
    MissingPredictor(&'static str),
    #[error("spread prediction must be positive, got {0}")]
    NonPositiveSpread(f64),
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("labels must be binary (0/1) with threshold 0")]
    NotBinary,
    #[error("test sample {0} carries no ground truth")]
    MissingGroundTruth(usize),
    #[error("fold too small: {0}")]
    FoldTooSmall(String),
    #[error("training failed when leaving out index {index}: {source}")]
    Refit {
        index: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("replication {rep} (seed {seed}) failed: {source}")]
    Replication {
        rep: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },
    #[error("csv: {0}")]
    Csv(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
