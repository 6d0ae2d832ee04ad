use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("singular ZF Gram matrix for users {users:?} (condition number {condition:.3e})")]
    Singular { users: Vec<usize>, condition: f64 },

    #[error("exhaustive search over {count} subsets exceeds the cap of {cap}")]
    EnumerationCap { count: u128, cap: u128 },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("gradient descent failed at iteration {iteration}: {reason}")]
    PowerAllocation { iteration: usize, reason: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
