//! Crate error type.

use std::fmt;

/// Errors from evaluation, quadrature and the solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Series did not meet its tail bound within the term cap.
    NonConvergence { terms: usize, detail: String },
    /// Input outside an operation's domain.
    DomainError(String),
    /// Adaptive quadrature stalled above the requested tolerance.
    QuadratureFailure { estimate: f64, tol: f64 },
    /// Richardson levels for a numerical derivative diverged.
    DifferentiationUnstable(String),
    /// A limit extrapolation failed to settle.
    ExtrapolationDiverged(String),
    /// An image/Neumann sum could not reach its tolerance within the term cap.
    TruncationBudgetExceeded { terms: usize, bound: f64, tol: f64 },
    /// The two-point boundary system is singular (a1 == a2).
    DegenerateCoefficients,
    /// Config text failed to parse.
    ParseError { line: usize, detail: String },
    /// Config parsed but violates a problem invariant.
    ValidationError(String),
    /// File I/O failure (CLI layer).
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonConvergence { terms, detail } => {
                write!(f, "series did not converge after {terms} terms: {detail}")
            }
            Error::DomainError(msg) => write!(f, "domain error: {msg}"),
            Error::QuadratureFailure { estimate, tol } => {
                write!(f, "quadrature error estimate {estimate:e} above tolerance {tol:e}")
            }
            Error::DifferentiationUnstable(msg) => {
                write!(f, "numerical differentiation unstable: {msg}")
            }
            Error::ExtrapolationDiverged(msg) => write!(f, "extrapolation diverged: {msg}"),
            Error::TruncationBudgetExceeded { terms, bound, tol } => write!(
                f,
                "truncation bound {bound:e} still above {tol:e} after {terms} terms"
            ),
            Error::DegenerateCoefficients => write!(f, "a1 == a2"),
            Error::ParseError { line, detail } => write!(f, "parse error at line {line}: {detail}"),
            Error::ValidationError(msg) => write!(f, "validation error: {msg}"),
            Error::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
