use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid token `{0}`")]
    InvalidToken(String),

    #[error("invalid ground truth: {0}")]
    InvalidGroundTruth(String),

    #[error("no data: {0}")]
    NoData(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("no healthy reference utterance for word `{0}`")]
    NoHealthyReference(String),

    #[error("speaker `{speaker}` is missing utterances for: {}", words.join(", "))]
    MissingUtterances { speaker: String, words: Vec<String> },

    #[error("unknown VS symbol `{0}`")]
    UnknownSymbol(String),

    #[error("phone `{0}` has no VS mapping")]
    UnmappedPhone(String),

    #[error("invalid ARPABET phone `{0}`")]
    InvalidPhone(String),

    #[error("vowel `{0}` has no formant entry or decomposition")]
    UnknownVowel(String),

    #[error("`{0}` has no vowel phones")]
    NoVowels(String),

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error("invalid alphas: {0}")]
    InvalidAlphas(String),

    #[error("pool of {size} words exceeds the exhaustive limit of {max}; enable the greedy heuristic to search it")]
    PoolTooLarge { size: usize, max: usize },

    #[error("invalid candidate pool: {0}")]
    InvalidPool(String),

    #[error("perceptual scores are required when the correlation weight is nonzero")]
    MissingPerceptual,

    #[error("no `{metric}` score for speaker `{speaker}` on word `{word}`")]
    MissingScore {
        metric: String,
        speaker: String,
        word: String,
    },

    #[error("unknown word `{0}`")]
    UnknownWord(String),

    #[error("unknown speaker `{0}`")]
    UnknownSpeaker(String),

    #[error("duplicate utterance {0}")]
    DuplicateUtterance(String),

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("reference data mismatch: {0}")]
    ReferenceMismatch(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable identifier for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidToken(_) => "invalid_token",
            Error::InvalidGroundTruth(_) => "invalid_ground_truth",
            Error::NoData(_) => "no_data",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NoHealthyReference(_) => "no_healthy_reference",
            Error::MissingUtterances { .. } => "missing_utterances",
            Error::UnknownSymbol(_) => "unknown_symbol",
            Error::UnmappedPhone(_) => "unmapped_phone",
            Error::InvalidPhone(_) => "invalid_phone",
            Error::UnknownVowel(_) => "unknown_vowel",
            Error::NoVowels(_) => "no_vowels",
            Error::UndefinedCorrelation(_) => "undefined_correlation",
            Error::InvalidAlphas(_) => "invalid_alphas",
            Error::PoolTooLarge { .. } => "pool_too_large",
            Error::InvalidPool(_) => "invalid_pool",
            Error::MissingPerceptual => "missing_perceptual",
            Error::MissingScore { .. } => "missing_score",
            Error::UnknownWord(_) => "unknown_word",
            Error::UnknownSpeaker(_) => "unknown_speaker",
            Error::DuplicateUtterance(_) => "duplicate_utterance",
            Error::Parse { .. } => "parse",
            Error::ReferenceMismatch(_) => "reference_mismatch",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
