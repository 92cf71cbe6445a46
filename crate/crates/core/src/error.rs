use thiserror::Error;

/// Errors raised across problem parsing, relaxation assembly and the SDP layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("polynomial is not self-conjugate: term x^{beta:?} conj(x)^{gamma:?} has no matching conjugate term")]
    NotSelfConjugate { beta: Vec<u32>, gamma: Vec<u32> },

    #[error("relaxation order {r} is below the minimal order {d_min}")]
    OrderTooLow { r: usize, d_min: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("constraint {index} has support {support:?} that is not contained in any clique")]
    InvalidCliques { index: usize, support: Vec<usize> },

    #[error("the equality constraints are inconsistent (residual {residual:e})")]
    InconsistentEqualities { residual: f64 },

    #[error("objective is not real after realification (imaginary part {0:e})")]
    NonRealObjective(f64),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("problem file: {0}")]
    ProblemFile(String),

    #[error("matrix is indefinite beyond tolerance (minimum eigenvalue {0:e})")]
    Indefinite(f64),

    #[error("atom extraction not possible: {0}")]
    Extraction(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
