use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid path `{0}`")]
    InvalidPath(String),

    #[error("malformed action: {0}")]
    MalformedAction(String),

    #[error("path `{0}` is not in the task vocabulary")]
    OutOfVocabulary(String),

    #[error("invalid task: {0}")]
    InvalidTask(String),

    #[error("archive tasks are held out: requested split `{0}`")]
    HeldOutDomain(String),

    #[error("invalid trace: {0}")]
    InvalidTrace(String),

    #[error("segment {0} not found in trace")]
    MissingSegment(u32),

    #[error("no simulation segment for the final action")]
    NoSimulation,

    #[error("batch mixes world-model variants")]
    MixedVariants,

    #[error("batch is empty")]
    EmptyBatch,

    #[error("head `{0}` is not present in this parameter store")]
    MissingHead(&'static str),

    #[error("gradient contains non-finite values")]
    NonFiniteGradient,

    #[error("learning rate must be positive, got {0}")]
    InvalidLearningRate(f64),

    #[error("checkpoint mismatch: {0}")]
    CheckpointMismatch(String),

    #[error("correlation undefined: zero variance")]
    UndefinedCorrelation,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("not enough points: {0}")]
    TooFewPoints(usize),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },

    #[error("malformed record file: {0}")]
    Format(String),

    #[error("missing input: {0}")]
    MissingInput(String),

    #[error("invalid config file: {0}")]
    Toml(#[from] toml::de::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable class for error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config(_) | Error::Toml(_) | Error::InvalidLearningRate(_) | Error::HeldOutDomain(_) => "config",
            Error::MissingInput(_) => "missing_input",
            Error::Format(_) | Error::SchemaVersion { .. } | Error::Json(_) | Error::CheckpointMismatch(_) => "format",
            Error::Io(_) => "io",
            _ => "invalid_data",
        }
    }
}
