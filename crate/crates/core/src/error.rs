use thiserror::Error;

/// Errors raised by the solvers, generators and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("probability {0} outside (0, 1]")]
    InvalidProbability(f64),

    #[error("channel gain of agent {agent} on subcarrier {subcarrier} is zero or not finite")]
    ZeroChannel { agent: usize, subcarrier: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible pairing: {0}")]
    InfeasiblePairing(String),

    #[error("instance too large for exhaustive enumeration: {0}")]
    GuardExceeded(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("instance file error at line {line}: {message}")]
    InstanceFormat { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
