use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported matrix dimension {0} (expected 2 or 4)")]
    Dimension(usize),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian: max |A - A^dagger| = {asymmetry:e}")]
    NotHermitian { asymmetry: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid Bloch vector: {0}")]
    InvalidBloch(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("decay rate is singular at t = {t}")]
    SingularRate { t: f64 },

    #[error("interval map is singular (|G(t)| below floor); skip this record")]
    SingularInterval,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot summarize an empty record list")]
    EmptyRecords,
}

pub type Result<T> = std::result::Result<T, Error>;
