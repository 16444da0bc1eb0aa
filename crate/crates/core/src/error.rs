use std::io;

use thiserror::Error;

/// Failure while reading a TREC-format collection.
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("I/O error while reading collection: {0}")]
    Io(#[from] io::Error),
    #[error("malformed record at byte {offset} (docno context: {context}): {reason}")]
    Malformed {
        offset: u64,
        context: String,
        reason: String,
    },
}

impl IngestError {
    pub(crate) fn malformed(offset: u64, context: Option<&str>, reason: impl Into<String>) -> Self {
        IngestError::Malformed {
            offset,
            context: context.unwrap_or("<none>").to_owned(),
            reason: reason.into(),
        }
    }
}

/// Failure while reading or writing a binary file (index snapshot or neighbor cache).
#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("bad magic bytes: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),
    #[error("corrupt file: {0}")]
    Corrupt(String),
}

/// Failure while loading word vectors.
#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("I/O error at byte {offset}: {source}")]
    Io { offset: u64, source: io::Error },
    #[error("invalid header: {0}")]
    Header(String),
    #[error("truncated stream at byte {offset}: {reason}")]
    Truncated { offset: u64, reason: String },
    #[error("format error: {0}")]
    Format(String),
}

/// Rejected model hyper-parameters.
#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("smoothing parameter mu must be finite and > 0, got {0}")]
    Mu(f64),
    #[error("cosine threshold must lie in (0, 1], got {0}")]
    Threshold(f64),
    #[error("alpha must lie in [0, 1], got {0}")]
    Alpha(f64),
    #[error("top-k must be positive")]
    TopK,
    #[error("model {0} needs a translation source")]
    MissingTranslation(&'static str),
}

/// Failure in qrels/run parsing or metric computation.
#[derive(Debug, Error)]
pub enum EvalError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("no relevance judgments for quer{}: {}", if .0.len() == 1 { "y" } else { "ies" }, .0.join(", "))]
    UnknownQuery(Vec<String>),
    #[error("query {0} has no relevant documents")]
    NoRelevant(String),
    #[error("paired samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("paired t-test needs at least 2 pairs, got {0}")]
    TooFewPairs(usize),
    #[error("precision cutoff must be positive")]
    ZeroCutoff,
    #[error("no query in the run has a relevant document")]
    NothingToEvaluate,
    #[error("runs cover different queries (only in first: [{}], only in second: [{}])", only_a.join(", "), only_b.join(", "))]
    QueryMismatch {
        only_a: Vec<String>,
        only_b: Vec<String>,
    },
}
