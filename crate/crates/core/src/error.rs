use thiserror::Error;

/// Errors raised by the pole solvers and their supporting routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violates the domain of the operation (non-positive hopping,
    /// `z = 0`, `k` outside the open interval, ...).
    #[error("parameter out of domain: {0}")]
    Domain(String),

    /// A device description is structurally invalid.
    #[error("invalid device: {0}")]
    InvalidDevice(String),

    /// Energy sits exactly on a band edge, where `z` is a double root.
    #[error("energy {energy} is at a band edge (|E| = 2t)")]
    BandEdge { energy: f64 },

    /// An iterative method did not reach its tolerance.
    #[error("no convergence after {iterations} iterations (worst residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// A linear system that must be regular turned out singular.
    #[error("singular linear system: {0}")]
    Singular(String),

    /// A root ended up somewhere the model forbids (upper-half k plane off the
    /// symmetry lines). This indicates a solver fault rather than bad input.
    #[error("unphysical pole at z = {re} + {im}i (Im k > 0 off the lines Re k = 0, pi)")]
    Classification { re: f64, im: f64 },

    /// Newton search from every seed failed.
    #[error("no seed converged to a pole")]
    NoPoles,

    /// Numerical fault that should not happen for valid input.
    #[error("internal numerical error: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors caused by bad user input rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::InvalidDevice(_) | Error::BandEdge { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
