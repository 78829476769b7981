//! Analytic and Monte-Carlo model of timing measurements made by balanced
//! homodyne detection of a pulsed frequency comb, optionally with squeezed
//! light in the mode that carries the timing signal.
//!
//! The crate is layered bottom-up:
//!
//! - [`comb`]: Hermite-Gauss pulse modes on a time grid and the mode algebra
//!   that expresses a small delay as a mode-space rotation.
//! - [`squeezing`]: cavity quadrature-noise model per mode versus analysis
//!   frequency, pump rate and detection efficiency, plus dB conversions.
//! - [`metrology`]: closed-form sensitivity limits, homodyne signal
//!   statistics and unit calibrations.
//! - [`montecarlo`]: synthetic homodyne photocurrents, a software spectrum
//!   analyzer and end-to-end experiment reproduction.
//!
//! All quantities are SI unless a field says otherwise. Quadrature variances
//! are shot-noise normalized: vacuum = 1.

// Validation deliberately writes `!(v > 0)` instead of `v <= 0`: the negated
// form also rejects NaN, which every positivity check here must.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod comb;
pub mod constants;
pub mod error;
pub mod metrology;
pub mod montecarlo;
pub mod squeezing;

pub use error::{Error, Result};

use core::fmt;
use num_traits::{Float, FloatConst, NumAssignOps, NumCast};

/// Scalar abstraction used by every numeric routine in the crate.
///
/// Implemented by `f32` and `f64` through the blanket impl below; `f64` is
/// the default type parameter on all domain types and the right choice for
/// experiment-scale inputs, where optical frequencies (1e15 rad/s) sit next
/// to sub-attosecond delays and an `f32` mantissa runs out of room.
pub trait Real:
    Float + FloatConst + NumAssignOps + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Embeds an `f64` literal. Panics only if the value does not fit the
    /// scalar type, which cannot happen for the constants used here.
    fn lit(x: f64) -> Self {
        NumCast::from(x).expect("literal must be representable in the scalar type")
    }

    /// Exact conversion of a sample or bin count.
    fn of_usize(n: usize) -> Self {
        NumCast::from(n).expect("count must be representable in the scalar type")
    }
}

impl<T> Real for T where
    T: Float + FloatConst + NumAssignOps + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

// Concrete aliases for the two supported scalars. The generic types default
// to `f64`, so `CombParams` and `CombParams64` name the same type.
pub type CombParams64 = comb::CombParams<f64>;
pub type CombParams32 = comb::CombParams<f32>;
pub type DerivedSpectral64 = comb::DerivedSpectral<f64>;
pub type DerivedSpectral32 = comb::DerivedSpectral<f32>;
pub type ModeFunction64 = comb::ModeFunction<f64>;
pub type ModeFunction32 = comb::ModeFunction<f32>;
pub type SpopoParams64 = squeezing::SpopoParams<f64>;
pub type SpopoParams32 = squeezing::SpopoParams<f32>;
pub type DetectionChain64 = squeezing::DetectionChain<f64>;
pub type DetectionChain32 = squeezing::DetectionChain<f32>;
pub type QuadraturePair64 = squeezing::QuadraturePair<f64>;
pub type QuadraturePair32 = squeezing::QuadraturePair<f32>;
pub type PhotonBudget64 = metrology::PhotonBudget<f64>;
pub type PhotonBudget32 = metrology::PhotonBudget<f32>;
pub type HomodyneConfig64 = metrology::HomodyneConfig<f64>;
pub type HomodyneConfig32 = metrology::HomodyneConfig<f32>;
pub type TimingResult64 = metrology::TimingResult<f64>;
pub type TimingResult32 = metrology::TimingResult<f32>;
pub type ExperimentScenario64 = montecarlo::ExperimentScenario<f64>;
pub type ExperimentScenario32 = montecarlo::ExperimentScenario<f32>;
pub type SpectrumTrace64 = montecarlo::SpectrumTrace<f64>;
pub type SpectrumTrace32 = montecarlo::SpectrumTrace<f32>;
