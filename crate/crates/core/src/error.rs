use thiserror::Error;

/// Errors produced by the geometric and spectral routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violates the precondition of the operation it was passed to.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// A numerical routine did not reach its tolerance or broke down.
    #[error("numeric failure in {op}: {detail}")]
    Numeric { op: &'static str, detail: String },

    /// The inertia factorization met a pivot that is zero relative to the matrix scale.
    #[error("pivot breakdown at index {index} (pivot {pivot:e}, scale {scale:e})")]
    PivotBreakdown { index: usize, pivot: f64, scale: f64 },

    /// A structured record (raw link, configuration) could not be decoded.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn numeric(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Numeric {
            op,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
