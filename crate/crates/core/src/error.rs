use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("subsystem label clash: `{0}` appears in both operands")]
    SubsystemClash(String),

    #[error("unknown subsystem `{0}`")]
    UnknownSubsystem(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("operator is not {kind} (defect {defect:.3e})")]
    Contract { kind: &'static str, defect: f64 },

    #[error("normalization violated: |ψ|² = {0}")]
    NotNormalized(f64),

    #[error("non-finite amplitude or matrix entry")]
    NonFinite,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
