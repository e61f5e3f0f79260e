use thiserror::Error;

/// Errors produced anywhere in the compiler/verifier stack.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{what}: size {size} exceeds limit {limit}")]
    Resource {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("maximum degree {degree} exceeds the supported bound of 6")]
    UnsupportedDegree { degree: usize },

    #[error("no route for edge ({}, {}) under current obstacles", .edge.0, .edge.1)]
    RoutingFailed { edge: (usize, usize) },

    #[error("embedding failed after {retries} retries: {diagnostics}")]
    EmbeddingFailed { retries: usize, diagnostics: String },

    #[error("time step {dt} too coarse; at most {required} is needed")]
    StepTooCoarse { dt: f64, required: f64 },
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    /// Short machine-readable tag, used for CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Input(_) => "input",
            Error::Parse { .. } => "parse",
            Error::Resource { .. } => "resource",
            Error::UnsupportedDegree { .. } => "unsupported_degree",
            Error::RoutingFailed { .. } => "routing_failed",
            Error::EmbeddingFailed { .. } => "embedding_failed",
            Error::StepTooCoarse { .. } => "step_too_coarse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
