use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("drift matrix is not strictly stable (max Re(eig) = {max_real:.6e} rad/s)")]
    Unstable { max_real: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("fixed point did not converge after {iterations} iterations (last relative change {last_change:.3e})")]
    Convergence { iterations: usize, last_change: f64 },

    #[error("time step too large: step-halving discrepancy {discrepancy:.3e} exceeds {tolerance:.1e}")]
    Accuracy { discrepancy: f64, tolerance: f64 },

    #[error("integration did not converge: {0}")]
    Integration(String),

    #[error("{0}")]
    Usage(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
