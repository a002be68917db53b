use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("query budget of {budget} exhausted")]
    BudgetExceeded { budget: usize },

    #[error("input norm {norm} exceeds cap {cap}")]
    InputTooLarge { norm: f64, cap: f64 },

    #[error("real-valued session received an input with non-zero imaginary part")]
    ComplexInput,

    #[error("tolerance {requested:e} unreachable; best achievable bound is {achievable:e}")]
    ToleranceUnreachable { requested: f64, achievable: f64 },

    #[error("power iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPsd { eigenvalue: f64 },

    #[error("matrix is singular (smallest eigenvalue {eigenvalue:e})")]
    Singular { eigenvalue: f64 },

    #[error("exponent {exponent} overflows; scale the parameters down")]
    Overflow { exponent: f64 },

    #[error("no data: {0}")]
    EmptyData(&'static str),

    #[error("priors are not separated (gap {gap})")]
    NotSeparated { gap: f64 },

    #[error("instance coverage mismatch, missing: {}", missing.join(", "))]
    CoverageMismatch { missing: Vec<String> },

    #[error("replay diverged at query {t}: {reason}")]
    ReplayDivergence { t: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
