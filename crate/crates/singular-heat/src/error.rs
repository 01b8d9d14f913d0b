use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("exponent pair not admissible: {0}")]
    Admissibility(String),
    #[error("pole of Gamma at {0}")]
    Pole(Complex64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },
    #[error("spectral truncation needs {needed} terms, cap is {cap}")]
    Truncation { needed: usize, cap: usize },
    #[error("least-squares system ill-conditioned (condition {0:e})")]
    IllConditioned(f64),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid input: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
