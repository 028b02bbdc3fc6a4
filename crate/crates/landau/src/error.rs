//! Error type shared across the crate.

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("invalid configuration:\n{}", .0.iter().map(|v| format!("  - {v}")).collect::<Vec<_>>().join("\n"))]
    Validation(Vec<String>),

    /// The per-species beta values disagree, so the two-species exact solution
    /// does not exist for these parameters.
    #[error("beta mismatch: per-species values {betas:?} have relative spread {spread:.3e}")]
    BetaMismatch { betas: Vec<f64>, spread: f64 },

    #[error("species {label:?} has zero total particle weight")]
    ZeroWeight { label: String },

    #[error(
        "fixed-point iteration did not converge after {iterations} iterations \
         (residual {residual:.3e}); the time step is too large for the contraction"
    )]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("non-finite velocity derivative for species {species}, particle {particle}")]
    NonFinite { species: usize, particle: usize },
}

impl Error {
    /// True for errors raised while loading or validating configuration,
    /// as opposed to failures during a simulation.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Parse(_) | Error::Validation(_) | Error::BetaMismatch { .. }
        )
    }
}
