//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum CrossingError {
    /// A grid, packet or parameter set fails its construction invariants.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// An operation was called outside its physical domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A computed quantity violated a numerical invariant (NaN, tolerance
    /// breach, norm growth).
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// A least-squares fit had too few usable points.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
}

pub type Result<T> = std::result::Result<T, CrossingError>;
