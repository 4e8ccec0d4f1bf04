use thiserror::Error;

/// A JSON record that does not conform to the corpus schema.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("schema violation at `{path}`: {message}")]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QualityError {
    #[error("score {0} is outside the 1..=100 scale")]
    ScaleOutOfRange(i64),
    #[error("threshold cuts must be four strictly increasing finite numbers, got {0:?}")]
    InvalidCuts(Vec<f64>),
    #[error("scores and labels differ in length ({scores} vs {labels})")]
    LengthMismatch { scores: usize, labels: usize },
    #[error("threshold fitting needs at least two distinct labels")]
    DegenerateLabels,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("cannot sample from an empty candidate list")]
    NoCandidates,
    #[error("passage {0} has no token log-likelihoods")]
    EmptyPassage(usize),
    #[error("no passages to aggregate")]
    NoPassages,
    #[error("target length must be positive")]
    InvalidTarget,
}
