use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invariant violation ({invariant}): {detail}")]
    InvariantViolation { invariant: &'static str, detail: String },

    #[error("not a coisometry: max |dA dA* - I| = {residual:e} at ({row}, {col})")]
    NotCoisometry { residual: f64, row: usize, col: usize },

    #[error("not a unitary involution: max residual {residual:e} at ({row}, {col}) in {check}")]
    NotInvolution {
        check: &'static str,
        residual: f64,
        row: usize,
        col: usize,
    },

    #[error("matrix is not Hermitian: max |A - A*| = {0:e}")]
    NotHermitian(f64),

    #[error("matrix is not unitary: max |A*A - I| = {0:e}")]
    NotUnitary(f64),

    #[error("eigensolver did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("norm drift at step {step}: |psi| = {norm}")]
    NormDrift { step: usize, norm: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
