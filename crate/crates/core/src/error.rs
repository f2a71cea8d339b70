use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not symmetric (residual {residual:.3e})")]
    Asymmetric { residual: f64 },

    #[error("matrix is singular (smallest |eigenvalue| {min_abs_eig:.3e})")]
    Singular { min_abs_eig: f64 },

    #[error("J is not involutory (‖J² − I‖_F = {residual:.3e})")]
    NotInvolutory { residual: f64 },

    #[error(
        "empty manifold: inertia of J ({j_pos}+, {j_neg}−) exceeds inertia of A ({a_pos}+, {a_neg}−)"
    )]
    InertiaViolation {
        a_pos: usize,
        a_neg: usize,
        j_pos: usize,
        j_neg: usize,
    },

    #[error("matrix is not positive definite (smallest eigenvalue {min_eig:.3e})")]
    NotPositiveDefinite { min_eig: f64 },

    #[error("rank-deficient input: {0}")]
    RankDeficient(String),

    #[error("point is infeasible (‖XᵀAX − J‖_F = {residual:.3e}, tol {tol:.3e})")]
    Infeasible { residual: f64, tol: f64 },

    #[error("direction is not tangent (residual {residual:.3e})")]
    NotTangent { residual: f64 },

    #[error("value out of range: {0}")]
    Range(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("line search failed after {backtracks} backtracks (last tau {tau:.3e})")]
    LineSearch { backtracks: usize, tau: f64, evaluations: usize },

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
