use std::fmt;

/// Pipeline stage an error originated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Parse,
    Normalize,
    Relations,
    Model,
    Solve,
    Extract,
    Validate,
    Evaluate,
    Generate,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Parse => "parse",
            Stage::Normalize => "normalize",
            Stage::Relations => "relations",
            Stage::Model => "model",
            Stage::Solve => "solve",
            Stage::Extract => "extract",
            Stage::Validate => "validate",
            Stage::Evaluate => "evaluate",
            Stage::Generate => "generate",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed XML at line {line}, column {column}: {message}")]
    Xml {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
    #[error("empty trace {0:?}")]
    EmptyTrace(String),
    #[error("log generation failed: {0}")]
    Generation(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("no optimal solution: {0}")]
    Unsolved(crate::solver::SolveStatus),
    #[error("graph extraction refused: {0}")]
    Extraction(String),
    #[error("evaluation error: {0}")]
    Evaluation(String),
    #[error("invalid graph: {0}")]
    Graph(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stage the error is attributed to when surfaced by the discovery pipeline.
    pub fn stage(&self) -> Stage {
        match self {
            Error::Xml { .. }
            | Error::Schema(_)
            | Error::Row { .. }
            | Error::EmptyTrace(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::Csv(_)
            | Error::Config(_) => Stage::Parse,
            Error::Generation(_) => Stage::Generate,
            Error::Model(_) | Error::Internal(_) => Stage::Model,
            Error::Solver(_) | Error::Unsolved(_) => Stage::Solve,
            Error::Extraction(_) => Stage::Extract,
            Error::Graph(_) => Stage::Validate,
            Error::Evaluation(_) => Stage::Evaluate,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
