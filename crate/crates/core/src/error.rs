use thiserror::Error;

/// Errors raised by the auction, combinatorics and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Bidder count / price index combination outside the supported range.
    #[error("invalid auction configuration: {0}")]
    InvalidConfig(String),

    /// Distribution parameters that do not describe a valid density.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// An argument outside the domain of the operation.
    #[error("{name} = {value} is outside {domain}")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        domain: String,
    },

    /// A summand or quotient with a vanishing denominator.
    #[error("singular evaluation: {0}")]
    Singular(String),

    /// Quadrature stopped at its node budget without meeting the tolerance.
    #[error("quadrature did not converge: error estimate {estimate:e} exceeds tolerance {tolerance:e} with {nodes} nodes")]
    NonConvergence {
        estimate: f64,
        tolerance: f64,
        nodes: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
