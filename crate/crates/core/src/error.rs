use thiserror::Error;

/// Errors produced by the numerical kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("gamma pole at z = {z}")]
    GammaPole { z: f64 },

    #[error("gamma overflow at z = {z}")]
    GammaOverflow { z: f64 },

    /// Evaluation requested outside the open first quadrant (or other
    /// pointwise domain restriction of a field).
    #[error("domain error: {0}")]
    Domain(String),

    /// A derivative order outside the range an operator accepts.
    #[error("invalid order: {0}")]
    Order(String),

    /// A structural precondition (scalar field, wedge membership, ...)
    /// does not hold at the requested configuration.
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("quadrature error: {0}")]
    Quadrature(String),

    /// Least-squares fit is degenerate or inconsistent.
    #[error("fit error: {0}")]
    Fit(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
