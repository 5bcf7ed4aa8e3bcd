use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The data admit no estimate (zero variance, too few points, ...).
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// A partition does not tile the data space.
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    /// The optimizer stalled; `best` is the best point found so far.
    #[error("optimizer did not converge: {context}; best point {best:?}, gradient norm {gradient_norm:.3e}")]
    NonConvergence {
        context: String,
        best: Vec<f64>,
        gradient_norm: f64,
    },

    /// Numerical integration failed its own accuracy check.
    #[error("quadrature error: {0}")]
    Quadrature(String),
}

pub type Result<T> = std::result::Result<T, Error>;
