use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0} is not valid UTF-8")]
    InvalidEncoding(PathBuf),
    #[error("corpus contains no pre-tokens")]
    EmptyCorpus,
    #[error("record of {len} bytes exceeds the {limit}-byte sequence limit")]
    RecordTooLong { len: usize, limit: usize },
    #[error("corpus contains reserved character {0:?}")]
    ReservedCharacter(char),
    #[error("target vocabulary size {target} is below the minimum {minimum}")]
    InvalidTarget { target: usize, minimum: usize },
    #[error("pair ({left:?}, {right:?}) does not occur in the pair index")]
    InconsistentState { left: String, right: String },
    #[error("token id {0} is not in the vocabulary")]
    InvalidId(u32),
    #[error("invalid vocabulary: {0}")]
    InvalidVocabulary(String),
    #[error("mode mismatch: vocabulary is {vocab}, corpus is {corpus}")]
    ModeMismatch {
        vocab: crate::CorpusMode,
        corpus: crate::CorpusMode,
    },
    #[error("{0} is only defined for text-mode corpora")]
    UnsupportedMode(&'static str),
    #[error("frequency table is empty")]
    EmptyTable,
    #[error("need at least {needed} rank-frequency points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("invalid selector config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
