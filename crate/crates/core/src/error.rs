use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("{routine} did not converge: {detail}")]
    NonConvergence { routine: &'static str, detail: String },

    #[error("unsupported computation: {0}")]
    Unsupported(String),

    #[error("misuse: {0}")]
    Misuse(String),

    #[error("exponent regime violated: {0}")]
    Regime(String),

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("certification failed for {what}: measured {measured:e} exceeds bound {bound:e}")]
    Certification { what: String, measured: f64, bound: f64 },

    #[error("rank precondition violated: numerical rank {rank} exceeds bound {bound}")]
    RankPrecondition { rank: usize, bound: usize },

    #[error("degenerate factorization: {0}")]
    Degenerate(String),

    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Numerical failures (as opposed to verdict failures or bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonConvergence { .. } | Error::Certification { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
