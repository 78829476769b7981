//! Closed-form sensitivity layer: quantum-limit formulas for the three
//! timing readouts, homodyne signal statistics, the minimum resolvable
//! delay under squeezing, photon accounting, and the calibrations that
//! convert instrument readings (volts, path length, spectrum-analyzer dB)
//! into delays.
//!
//! Per-root-hertz convention: the analytic path evaluates photon numbers
//! for a 1 s detection time, so every delay it returns is per sqrt(Hz); the
//! experimental path divides an applied delay by sigma*sqrt(RBW). The two
//! meet in the acceptance tests.

use crate::comb::DerivedSpectral;
use crate::constants::{REDUCED_PLANCK, SPEED_OF_LIGHT};
use crate::error::{Error, Result};
use crate::Real;

fn positive<T: Real>(name: &'static str, v: T) -> Result<T> {
    if v > T::zero() && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invalid(name, format!("must be positive, got {v}")))
    }
}

/// Quantum limit of envelope-arrival timing: 1/(2*domega*sqrt(n)).
pub fn sql_tof<T: Real>(n: T, domega: T) -> Result<T> {
    positive("n", n)?;
    positive("domega", domega)?;
    Ok((T::lit(2.0) * domega * n.sqrt()).recip())
}

/// Quantum limit of carrier-phase timing: 1/(2*omega0*sqrt(n)).
pub fn sql_ph<T: Real>(n: T, omega0: T) -> Result<T> {
    positive("n", n)?;
    positive("omega0", omega0)?;
    Ok((T::lit(2.0) * omega0 * n.sqrt()).recip())
}

/// Quantum limit of the combined readout: 1/(2*sqrt(n)*sqrt(omega0^2+domega^2)).
/// Never above either single-readout limit. One of the two frequencies may
/// be zero, in which case this reduces to the other limit.
pub fn sql_combined<T: Real>(n: T, omega0: T, domega: T) -> Result<T> {
    positive("n", n)?;
    for (name, v) in [("omega0", omega0), ("domega", domega)] {
        if !(v >= T::zero()) || !v.is_finite() {
            return Err(Error::invalid(name, format!("must be non-negative, got {v}")));
        }
    }
    let rms = (omega0 * omega0 + domega * domega).sqrt();
    positive("omega0^2 + domega^2", rms)?;
    Ok((T::lit(2.0) * n.sqrt() * rms).recip())
}

/// Photon accounting for a detection interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonBudget<T: Real = f64> {
    /// Effective detected photon number eta_tot * power * time / (hbar*omega0).
    pub n_eff: T,
    /// Mean optical power (W).
    pub power: T,
    /// Detection time (s).
    pub detection_time: T,
    /// Total detection efficiency folded into the count.
    pub eta_tot: T,
}

/// Effective photon number collected in `detection_time` at `power`, after
/// detection losses. Passing 1 s gives the per-sqrt(Hz) photon number used
/// by the analytic sensitivity formulas.
pub fn effective_photons<T: Real>(
    power: T,
    lambda0: T,
    detection_time: T,
    eta_tot: T,
) -> Result<PhotonBudget<T>> {
    if !(power >= T::zero()) || !power.is_finite() {
        return Err(Error::invalid("power", format!("must be non-negative, got {power}")));
    }
    positive("lambda0", lambda0)?;
    positive("detection_time", detection_time)?;
    if !(eta_tot >= T::zero() && eta_tot <= T::one()) {
        return Err(Error::invalid("eta_tot", format!("must be in [0, 1], got {eta_tot}")));
    }
    let omega0 = T::lit(2.0) * T::PI() * T::lit(SPEED_OF_LIGHT) / lambda0;
    let photon_energy = T::lit(REDUCED_PLANCK) * omega0;
    Ok(PhotonBudget {
        n_eff: eta_tot * power * detection_time / photon_energy,
        power,
        detection_time,
        eta_tot,
    })
}

/// Photon numbers and phases entering the homodyne signal model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodyneConfig<T: Real = f64> {
    /// Signal photon number.
    pub n_signal: T,
    /// Local-oscillator photon number.
    pub n_lo: T,
    /// Signal phase (rad).
    pub theta_s: T,
    /// Local-oscillator phase (rad).
    pub theta_lo: T,
}

impl<T: Real> HomodyneConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.n_signal >= T::zero()) || !self.n_signal.is_finite() {
            return Err(Error::invalid("n_signal", "must be non-negative"));
        }
        positive("n_lo", self.n_lo)?;
        Ok(())
    }
}

/// Mean balanced-homodyne signal for a delay `delta_u`, with the fixed
/// proportionality constant 1:
///
///   2*sqrt(n_signal*n_lo) * ((delta_u/u0)*cos(theta_s - theta_lo)
///                            + alpha/sqrt(alpha^2+1)*sin(theta_s - theta_lo))
///
/// At matched phases the signal is linear in the delay with slope
/// 2*sqrt(n_signal*n_lo)/u0.
pub fn homodyne_mean<T: Real>(
    cfg: &HomodyneConfig<T>,
    delta_u: T,
    spectral: &DerivedSpectral<T>,
) -> Result<T> {
    cfg.validate()?;
    let delta = cfg.theta_s - cfg.theta_lo;
    let alpha = spectral.alpha;
    let carrier_frac = alpha / (alpha * alpha + T::one()).sqrt();
    Ok(T::lit(2.0)
        * (cfg.n_signal * cfg.n_lo).sqrt()
        * (delta_u / spectral.u0 * delta.cos() + carrier_frac * delta.sin()))
}

/// Variance mixture seen by the timing readout: (alpha^2*var_p0 + var_q1)
/// / (1 + alpha^2). The phase quadrature of mode 0 dominates for alpha >> 1.
pub fn variance_mixture<T: Real>(alpha: T, var_p0: T, var_q1: T) -> T {
    (alpha * alpha * var_p0 + var_q1) / (T::one() + alpha * alpha)
}

/// Standard deviation of the balanced-homodyne signal, same units and
/// proportionality constant as [`homodyne_mean`]:
/// sqrt(n_lo * (alpha^2*var_p0 + var_q1)/(1 + alpha^2)).
pub fn homodyne_std<T: Real>(n_lo: T, alpha: T, var_p0: T, var_q1: T) -> Result<T> {
    positive("n_lo", n_lo)?;
    positive("var_p0", var_p0)?;
    positive("var_q1", var_q1)?;
    Ok((n_lo * variance_mixture(alpha, var_p0, var_q1)).sqrt())
}

/// Minimum resolvable delay (the delay at unit signal-to-noise):
///
///   sqrt(omega0^2*var_p0 + domega^2*var_q1) / (2*sqrt(n)*(omega0^2+domega^2))
///
/// At unit variances this is exactly [`sql_combined`]; squeezing var_p0
/// lowers it below that limit.
pub fn min_detectable_du<T: Real>(
    n: T,
    spectral: &DerivedSpectral<T>,
    var_p0: T,
    var_q1: T,
) -> Result<T> {
    positive("n", n)?;
    positive("var_p0", var_p0)?;
    positive("var_q1", var_q1)?;
    let w2 = spectral.omega0 * spectral.omega0;
    let d2 = spectral.domega * spectral.domega;
    Ok((w2 * var_p0 + d2 * var_q1).sqrt() / (T::lit(2.0) * n.sqrt() * (w2 + d2)))
}

/// Delay applied by a piezo at `volts`, with `coeff` in s/V.
pub fn pzt_to_delay<T: Real>(volts: T, coeff: T) -> Result<T> {
    positive("coeff", coeff)?;
    Ok(volts * coeff)
}

/// Single-pass delay of a path-length change `dx` (m): dx/c.
pub fn length_to_delay<T: Real>(dx: T) -> T {
    dx / T::lit(SPEED_OF_LIGHT)
}

/// Spectrum-analyzer improvement for an amplitude SNR `sigma`: the measured
/// power at the tone is signal plus noise, so the tone raises the trace by
/// 10*log10(1 + sigma^2) dB above the floor.
pub fn snr_to_sa_improvement<T: Real>(sigma: T) -> Result<T> {
    if !(sigma >= T::zero()) || !sigma.is_finite() {
        return Err(Error::invalid("sigma", format!("must be non-negative, got {sigma}")));
    }
    Ok(T::lit(10.0) * (T::one() + sigma * sigma).log10())
}

/// Amplitude SNR back from a spectrum-analyzer improvement in dB.
/// Round-trips with [`snr_to_sa_improvement`].
pub fn sa_improvement_to_snr<T: Real>(db: T) -> Result<T> {
    if !(db >= T::zero()) || !db.is_finite() {
        return Err(Error::invalid("db", format!("must be non-negative, got {db}")));
    }
    Ok((T::lit(10.0).powf(db / T::lit(10.0)) - T::one()).max(T::zero()).sqrt())
}

/// Minimum resolvable delay per sqrt(Hz) deduced from a measurement: an
/// applied delay, the amplitude SNR it produced, and the resolution
/// bandwidth it was measured in. Satisfies
/// `du_min_from_experiment(du, sigma, rbw) * sigma * sqrt(rbw) == du`.
pub fn du_min_from_experiment<T: Real>(applied_du: T, sigma: T, rbw: T) -> Result<T> {
    positive("applied_du", applied_du)?;
    positive("sigma", sigma)?;
    positive("rbw", rbw)?;
    Ok(applied_du / (sigma * rbw.sqrt()))
}

/// Outcome of one timing measurement, analytic or simulated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingResult<T: Real = f64> {
    /// Minimum resolvable delay per sqrt(Hz); `None` when the tone was not
    /// resolved (no applied delay, or the estimated SNR clamped to zero).
    pub du_min: Option<T>,
    /// Quantum limit at the same photon budget, per sqrt(Hz).
    pub sql_ref: T,
    /// Amplitude SNR at the modulation frequency.
    pub sigma: T,
    /// 10*log10 of the phase-quadrature variance that was in play; negative
    /// when squeezed, zero for a coherent run.
    pub squeezing_db_used: T,
}
