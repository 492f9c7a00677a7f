use thiserror::Error;

/// Exit status for malformed configuration or input files.
pub const EXIT_PARSE: i32 = 2;
/// Exit status for numerical failures.
pub const EXIT_NUMERIC: i32 = 3;
/// Exit status when `verify` finds a failing identity.
pub const EXIT_VERIFY: i32 = 1;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("config line {line}, column {column}: {reason}")]
    Config { line: usize, column: usize, reason: String },

    #[error("field `{field}`: {reason}")]
    Field { field: &'static str, reason: String },

    #[error("link spec '{spec}': {reason}")]
    LinkSpec { spec: String, reason: String },

    #[error("R ladder '{text}': {reason}")]
    Ladder { text: String, reason: String },

    #[error("{path}: {reason}")]
    File { path: String, reason: String },
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Parse(#[from] ParseError),

    /// The inputs were rejected by a library precondition.
    #[error("{context}: {inner}")]
    Invalid { context: String, inner: cone_index::Error },

    #[error("{context}: {inner}")]
    Numeric { context: String, inner: cone_index::Error },

    #[error("writing {path}: {inner}")]
    Output { path: String, inner: std::io::Error },
}

impl RunError {
    /// Sorts a library error by whether the inputs or the numerics are at fault.
    pub fn from_core(context: impl Into<String>, inner: cone_index::Error) -> Self {
        let context = context.into();
        match inner {
            cone_index::Error::Domain { .. } | cone_index::Error::Parse(_) => RunError::Invalid { context, inner },
            _ => RunError::Numeric { context, inner },
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Parse(_) | RunError::Invalid { .. } => EXIT_PARSE,
            RunError::Numeric { .. } | RunError::Output { .. } => EXIT_NUMERIC,
        }
    }
}
