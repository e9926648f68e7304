use thiserror::Error;

/// Errors raised by the geometric kernel and the pipelines built on it.
#[derive(Debug, Error)]
pub enum GeomError {
    #[error("degenerate incidence: {0}")]
    DegenerateIncidence(String),
    #[error("frame not in general position: {0}")]
    DegenerateFrame(String),
    #[error("matrix is not loxodromic: {0}")]
    NotLoxodromic(String),
    #[error("bending direction invalid: {0}")]
    BadDirection(String),
    #[error("triple entries coincide: {0}")]
    DegenerateTriple(String),
    #[error("apex lies on the carrier plane")]
    DegenerateApex,
    #[error("polygon crosses the chart's line at infinity")]
    UnboundedInChart,
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("no tabulated pairs overlap")]
    NoOverlap,
    #[error("entries not strictly sorted")]
    NotSorted,
    #[error("spectral gap below tolerance: {0}")]
    DegenerateGap(String),
    #[error("not enough samples for fit: have {have}, need {need}")]
    InsufficientSamples { have: usize, need: usize },
    #[error("domain not oriented into the upper half-plane: {0}")]
    OrientationFail(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, GeomError>;
