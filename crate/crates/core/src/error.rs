use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Error)]
pub enum EdgeError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The discriminant of the characteristic quadratic went negative at index `i`.
    #[error("shift inside spectrum support at index {i} (discriminant {discriminant:e})")]
    ShiftInsideSpectrum { i: usize, discriminant: f64 },

    #[error("degenerate draw: |1 - alpha_1| = {0:e}")]
    DegenerateDraw(f64),

    #[error("near-singular leading minor at index {index}: |1 - R| = {value:e}")]
    NearSingularMinor { index: usize, value: f64 },

    #[error("eigen oracle failure: {0}")]
    OracleFailure(String),

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("suspicious parameters: {resamples} resamples over {replicas} replicas")]
    SuspiciousParameters { resamples: usize, replicas: usize },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl EdgeError {
    /// True for errors that come from the numerics rather than from bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            EdgeError::ShiftInsideSpectrum { .. }
                | EdgeError::DegenerateDraw(_)
                | EdgeError::NearSingularMinor { .. }
                | EdgeError::OracleFailure(_)
                | EdgeError::Quadrature(_)
                | EdgeError::SuspiciousParameters { .. }
        )
    }

    /// Errors after which a replica should be redrawn with a fresh seed.
    pub fn is_resamplable(&self) -> bool {
        matches!(
            self,
            EdgeError::DegenerateDraw(_) | EdgeError::NearSingularMinor { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, EdgeError>;
