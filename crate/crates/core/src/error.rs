//! Error type shared by all modules.

use thiserror::Error;

/// Everything that can go wrong in this crate.
///
/// Numeric payloads are carried as `f64` regardless of the scalar type the
/// computation ran in; they are for diagnostics only.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside its documented range.
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: String,
    },

    /// Pump power at or above the oscillation threshold; the below-threshold
    /// noise model does not apply there.
    #[error("pump power {power} W is not below threshold {threshold} W")]
    AboveThreshold { power: f64, threshold: f64 },

    /// Mode index outside the configured eigenvalue-ratio list.
    #[error("mode index {k} out of range: {len} eigenvalue ratio(s) configured")]
    ModeIndexOutOfRange { k: usize, len: usize },

    /// Two mode functions were sampled on different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A grid is too narrow or too coarse for the requested operation.
    #[error("grid unsuitable: {0}")]
    GridUnsuitable(String),

    /// Not enough samples for the requested spectral averaging.
    #[error("insufficient samples: need {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    /// Modulation frequency cannot be represented at the sample rate.
    #[error("sample rate {sample_rate} Hz cannot represent a tone at {frequency} Hz")]
    NyquistViolation { sample_rate: f64, frequency: f64 },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
