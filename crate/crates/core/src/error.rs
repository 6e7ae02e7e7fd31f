//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, GfError>;

#[derive(Debug, Error)]
pub enum GfError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: malformed record: {message}")]
    Malformed {
        path: String,
        line: usize,
        message: String,
    },

    #[error("duplicate paper id `{0}`")]
    DuplicatePaperId(String),

    #[error("duplicate topic id `{0}`")]
    DuplicateTopicId(String),

    #[error("unknown paper id `{0}`")]
    UnknownPaper(String),

    #[error("unknown author id `{0}`")]
    UnknownAuthor(String),

    #[error("dangling citation {citing} -> {cited}")]
    DanglingCitation { citing: String, cited: String },

    #[error("invalid record: {0}")]
    InvalidRecord(String),

    #[error("topic hierarchy invalid: {0}")]
    InvalidHierarchy(String),

    #[error("embedding dimension {dim} out of range for {nodes} nodes")]
    DimensionOutOfRange { dim: usize, nodes: usize },

    #[error("author `{author}` is not an author of paper `{paper}`")]
    NotAnAuthor { author: String, paper: String },

    #[error("scholar `{0}` has no papers")]
    NoPapers(String),

    #[error("profile probabilities not populated: {0}")]
    Unpopulated(String),

    #[error("training data contains a single class")]
    SingleClass,

    #[error("training data is empty")]
    EmptyTrainingData,

    #[error("feature mask mismatch: model was trained with `{0}` available")]
    MaskMismatch(String),

    #[error("training diverged at step {step}: loss = {loss}")]
    Diverged { step: usize, loss: f64 },

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl GfError {
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        GfError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
