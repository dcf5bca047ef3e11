use alloc::string::String;
use thiserror::Error;

/// Errors surfaced by the numerical routines.
///
/// The library never panics on bad numerical input; everything that can fail
/// for a mathematical reason reports which precondition was violated.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// Matrix or subsystem dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    Shape(String),

    /// A mathematical precondition was violated (bad exponent range, invalid
    /// weights, non-Hermitian input, and so on).
    #[error("domain error: {0}")]
    Domain(String),

    /// An operation required one operator's support to contain another's and
    /// the containment fails beyond tolerance.
    #[error("support violation: {0}")]
    Support(String),

    /// An iterative routine failed to reach its accuracy target.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An iterative optimizer hit its iteration cap; the best value found so
    /// far is carried along so callers can decide whether it is usable.
    #[error("iteration limit reached in {context}; best value {best_value}")]
    IterationLimit { context: String, best_value: f64 },

    /// A verification campaign referenced a check name that is not registered.
    #[error("unknown check '{name}'; registry: {registry}")]
    UnknownCheck { name: String, registry: String },

    /// Invalid campaign or check configuration.
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = core::result::Result<T, Error>;
