use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("function undefined on part of the spectrum (at {0})")]
    Domain(String),
    #[error("resource bound exceeded: {0}")]
    Resource(String),
    #[error("unsupported morphism: {0}")]
    UnsupportedMorphism(String),
    #[error("degenerate lattice: {0}")]
    DegenerateLattice(String),
    #[error("derogatory element: {0}")]
    Derogatory(String),
    #[error("ambiguous evidence: {0}")]
    Ambiguity(String),
    #[error("inconsistent oracle: {0}")]
    Inconsistent(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn input<S: Into<String>>(msg: S) -> Error {
    Error::Input(msg.into())
}
