use thiserror::Error;

/// Errors raised anywhere in the solver pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("flattening map is singular at ({x1}, {x2}): det = {det}")]
    SingularMap { x1: f64, x2: f64, det: f64 },

    #[error("Green's function evaluated at its source point")]
    Singularity,

    #[error("zero pivot in ILU(0) of block {block}, row {row}")]
    ZeroPivot { block: usize, row: usize },

    #[error("diagonal block {block} is singular")]
    SingularBlock { block: usize },

    #[error("explicit coupling needs {needed} stored entries, limit is {limit}; use matrix-free mode")]
    StorageGuard { needed: usize, limit: usize },

    #[error("reference trace has zero norm")]
    DegenerateReference,

    #[error("GMRES did not converge: {reason} after {iterations} iterations, residual {residual:e}")]
    NotConverged {
        reason: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Wraps the error with the name of the pipeline stage that produced it.
    pub fn at(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Name of the outermost pipeline stage, if attributed.
    pub fn stage(&self) -> Option<&'static str> {
        match self {
            Error::Stage { stage, .. } => Some(stage),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
