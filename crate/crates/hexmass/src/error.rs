use thiserror::Error;

/// Errors surfaced by rule construction, mesh ingestion and studies.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown rule '{name}'; valid names: {valid}")]
    UnknownRule { name: String, valid: String },

    #[error("cardinal system is singular; point set is not unisolvent for the basis: {points}")]
    Unisolvent { points: String },

    #[error("rule derivation needs as many basis polynomials as points (got {points} points, {basis} basis polynomials)")]
    BasisPointMismatch { points: usize, basis: usize },

    #[error("invalid quadrature rule '{name}': {reason}")]
    InvalidRule { name: String, reason: String },

    #[error("mesh parse error at line {line}: {message}")]
    MeshParse { line: usize, message: String },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid mesh generator parameters: {0}")]
    MeshSpec(String),

    #[error("mesh JSON error: {0}")]
    MeshJson(String),

    #[error("study requires a non-empty mesh")]
    EmptyMesh,

    #[error("all mass-matrix entries were excluded by the near-zero guard; element average is undefined")]
    UndefinedAverage,

    #[error("element index {index} out of range (mesh has {count} elements)")]
    ElementOutOfRange { index: usize, count: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
