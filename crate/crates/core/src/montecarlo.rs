//! Stochastic reproduction of the timing experiment: synthesize the
//! balanced-homodyne difference current under coherent or squeezed noise
//! with a sinusoidal delay modulation, run a software spectrum analyzer,
//! estimate the amplitude SNR, and recover the delay floor per sqrt(Hz).
//! Also produces variance-versus-phase scan traces.
//!
//! Determinism contract: every random quantity comes from a ChaCha12 stream
//! seeded with the scenario seed (`SeedableRng::seed_from_u64`), and
//! Gaussian draws use the ziggurat-based `StandardNormal` transform. With a
//! locked dependency set, identical scenarios and seeds give bit-identical
//! output on every platform and thread count; no operation here shares
//! mutable state.

use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{FftNum, FftPlanner};

use crate::comb::{derive_spectral, CombParams};
use crate::error::{Error, Result};
use crate::metrology::{
    du_min_from_experiment, effective_photons, min_detectable_du, sql_combined, variance_mixture,
    TimingResult,
};
use crate::squeezing::{rotated_variance, variance_to_db, QuadraturePair};
use crate::Real;

/// Noise state of the mode pair that the timing readout mixes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SqueezeState<T: Real = f64> {
    /// Both variances at shot noise.
    Coherent,
    /// Phase quadrature of mode 0 and amplitude quadrature of mode 1,
    /// shot-noise normalized.
    Squeezed { var_p0: T, var_q1: T },
}

impl<T: Real> SqueezeState<T> {
    /// (var_p0, var_q1) regardless of variant.
    pub fn variances(&self) -> (T, T) {
        match *self {
            SqueezeState::Coherent => (T::one(), T::one()),
            SqueezeState::Squeezed { var_p0, var_q1 } => (var_p0, var_q1),
        }
    }
}

/// Sinusoidal delay modulation applied to the signal path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulation<T: Real = f64> {
    /// Modulation frequency (Hz).
    pub frequency: T,
    /// Peak applied delay (s). Zero means no tone.
    pub applied_du: T,
}

/// Spectrum-analyzer settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaSettings<T: Real = f64> {
    /// Resolution bandwidth (Hz); one periodogram bin.
    pub rbw: T,
    /// Number of averaged segments.
    pub n_averages: usize,
}

/// Complete description of one synthetic run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentScenario<T: Real = f64> {
    pub comb: CombParams<T>,
    pub chain: crate::squeezing::DetectionChain<T>,
    pub state: SqueezeState<T>,
    pub modulation: Modulation<T>,
    pub sa: SaSettings<T>,
    /// Sample rate of the synthesized difference current (Hz).
    pub sample_rate: T,
    /// Length of the synthesized record (s).
    pub duration: T,
    pub rng_seed: u64,
}

impl<T: Real> ExperimentScenario<T> {
    pub fn validate(&self) -> Result<()> {
        self.comb.validate()?;
        self.chain.validate()?;
        let (vp, vq) = self.state.variances();
        if !(vp > T::zero() && vq > T::zero()) {
            return Err(Error::invalid("state", "variances must be positive"));
        }
        if !(self.modulation.frequency > T::zero()) {
            return Err(Error::invalid("modulation.frequency", "must be positive"));
        }
        if !(self.modulation.applied_du >= T::zero()) {
            return Err(Error::invalid("modulation.applied_du", "must be non-negative"));
        }
        if !(self.sa.rbw > T::zero()) {
            return Err(Error::invalid("sa.rbw", "must be positive"));
        }
        if self.sa.n_averages == 0 {
            return Err(Error::invalid("sa.n_averages", "must be at least 1"));
        }
        if !(self.duration > T::zero()) {
            return Err(Error::invalid("duration", "must be positive"));
        }
        if !(self.sample_rate > T::lit(2.0) * self.modulation.frequency) {
            return Err(Error::NyquistViolation {
                sample_rate: self.sample_rate.to_f64().unwrap_or(f64::NAN),
                frequency: self.modulation.frequency.to_f64().unwrap_or(f64::NAN),
            });
        }
        if self.sample_rate / self.sa.rbw < T::lit(4.0) {
            return Err(Error::invalid(
                "sa.rbw",
                "must be at least 4 bins below the sample rate",
            ));
        }
        // enough record for the requested averaging
        let segments_available = (self.duration * self.sa.rbw).to_f64().unwrap_or(0.0);
        if segments_available + 1e-9 < self.sa.n_averages as f64 {
            return Err(Error::InsufficientSamples {
                needed: self.sa.n_averages,
                got: segments_available.floor() as usize,
            });
        }
        Ok(())
    }

    /// Detected photon flux (photons per second): the effective photon
    /// number for a 1 s detection window.
    pub fn photon_flux(&self) -> Result<T> {
        Ok(effective_photons(
            self.comb.power,
            self.comb.lambda0,
            T::one(),
            self.chain.eta_tot(),
        )?
        .n_eff)
    }

    /// Shot-noise-normalized variance of the synthesized samples: the
    /// readout mixture of the two mode variances.
    pub fn noise_variance(&self) -> Result<T> {
        let spectral = derive_spectral(&self.comb)?;
        let (vp, vq) = self.state.variances();
        Ok(variance_mixture(spectral.alpha, vp, vq))
    }
}

/// One averaged, shot-noise-normalized power spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTrace<T: Real = f64> {
    /// Bin center frequencies (Hz), DC through Nyquist.
    pub frequencies: Vec<T>,
    /// Average power per bin; a unit-variance white input gives 1.0.
    pub power: Vec<T>,
    /// Bin width (Hz).
    pub rbw: T,
}

/// Synthesizes the difference-current record d(t_i) = A*sin(2*pi*f*t_i) + n_i
/// in shot-noise-normalized units.
///
/// The noise samples are independent Gaussians with the scenario's mixture
/// variance, which makes the periodogram floor of [`spectrum`] land on that
/// mixture (1.0 for a coherent run). The tone amplitude is calibrated so the
/// spectrum-analyzer pipeline reproduces the analytic amplitude SNR
/// 2*sqrt(flux/rbw) * applied_du / (u0*sqrt(mixture)): with floor
/// normalization |X|^2/L and a bin-aligned tone peaking at A^2*L/4, that
/// requires A = 4*sqrt(flux/sample_rate) * applied_du/u0, i.e. the homodyne
/// slope 2*sqrt(N)/u0 evaluated with a per-sample photon number of
/// 4*flux/sample_rate.
pub fn synthesize_trace<T>(scenario: &ExperimentScenario<T>) -> Result<Vec<T>>
where
    T: Real,
    StandardNormal: Distribution<T>,
{
    scenario.validate()?;
    let spectral = derive_spectral(&scenario.comb)?;
    let flux = scenario.photon_flux()?;
    let fs = scenario.sample_rate;
    let amplitude = T::lit(4.0) * (flux / fs).sqrt() * scenario.modulation.applied_du / spectral.u0;
    let sd = scenario.noise_variance()?.sqrt();

    let n = (scenario.duration * fs)
        .round()
        .to_usize()
        .ok_or_else(|| Error::invalid("duration", "record does not fit in memory"))?;
    let two_pi_f = T::lit(2.0) * T::PI() * scenario.modulation.frequency;
    let mut rng = ChaCha12Rng::seed_from_u64(scenario.rng_seed);
    let mut trace = Vec::with_capacity(n);
    for i in 0..n {
        let t = T::of_usize(i) / fs;
        let noise: T = rng.sample(StandardNormal);
        trace.push(amplitude * (two_pi_f * t).sin() + sd * noise);
    }
    Ok(trace)
}

/// Averaged periodogram of `trace`: rectangular window, non-overlapping
/// segments of length sample_rate/rbw, one-sided bins from DC to Nyquist.
/// Normalized per bin as |X|^2/L so a unit-variance white input averages
/// to a floor of 1.0.
pub fn spectrum<T>(
    trace: &[T],
    sample_rate: T,
    rbw: T,
    n_averages: usize,
) -> Result<SpectrumTrace<T>>
where
    T: Real + FftNum,
{
    if !(sample_rate > T::zero()) || !(rbw > T::zero()) {
        return Err(Error::invalid("rbw", "sample rate and rbw must be positive"));
    }
    if n_averages == 0 {
        return Err(Error::invalid("n_averages", "must be at least 1"));
    }
    let seg_len = (sample_rate / rbw)
        .round()
        .to_usize()
        .filter(|&l| l >= 4)
        .ok_or_else(|| Error::invalid("rbw", "segment length must be at least 4 samples"))?;
    let needed = seg_len
        .checked_mul(n_averages)
        .ok_or_else(|| Error::invalid("n_averages", "segment count overflow"))?;
    if trace.len() < needed {
        return Err(Error::InsufficientSamples {
            needed,
            got: trace.len(),
        });
    }
    // the bin grid is set by the actual segment length
    let rbw_eff = sample_rate / T::of_usize(seg_len);

    let fft = FftPlanner::<T>::new().plan_fft_forward(seg_len);
    let n_bins = seg_len / 2 + 1;
    let mut acc = vec![T::zero(); n_bins];
    let mut buf = vec![Complex::new(T::zero(), T::zero()); seg_len];
    for seg in 0..n_averages {
        let offset = seg * seg_len;
        for (b, x) in buf.iter_mut().zip(&trace[offset..offset + seg_len]) {
            *b = Complex::new(*x, T::zero());
        }
        fft.process(&mut buf);
        for (a, b) in acc.iter_mut().zip(buf.iter().take(n_bins)) {
            *a += b.norm_sqr();
        }
    }
    let scale = (T::of_usize(seg_len) * T::of_usize(n_averages)).recip();
    for a in &mut acc {
        *a *= scale;
    }
    let frequencies = (0..n_bins).map(|k| rbw_eff * T::of_usize(k)).collect();
    Ok(SpectrumTrace {
        frequencies,
        power: acc,
        rbw: rbw_eff,
    })
}

/// Mean power of the noise floor: all bins except DC, Nyquist, and (when
/// `exclude_tone` names a frequency) the tone bin and its two neighbors.
pub fn noise_floor<T: Real>(ps: &SpectrumTrace<T>, exclude_tone: Option<T>) -> Result<T> {
    let n = ps.power.len();
    if n < 4 {
        return Err(Error::invalid("spectrum", "too few bins for a floor estimate"));
    }
    let tone_bin = match exclude_tone {
        Some(f) => Some(tone_bin_index(ps, f)?),
        None => None,
    };
    let mut sum = T::zero();
    let mut count = 0usize;
    for (k, p) in ps.power.iter().enumerate() {
        if k == 0 || k + 1 == n {
            continue;
        }
        if let Some(k0) = tone_bin {
            if k + 1 >= k0 && k <= k0 + 1 {
                continue;
            }
        }
        sum += *p;
        count += 1;
    }
    if count == 0 {
        return Err(Error::invalid("spectrum", "no floor bins left after exclusions"));
    }
    Ok(sum / T::of_usize(count))
}

fn tone_bin_index<T: Real>(ps: &SpectrumTrace<T>, f_mod: T) -> Result<usize> {
    let n = ps.power.len();
    let k0 = (f_mod / ps.rbw)
        .round()
        .to_usize()
        .ok_or_else(|| Error::invalid("f_mod", "not representable as a bin index"))?;
    if k0 == 0 || k0 + 1 >= n {
        return Err(Error::invalid(
            "f_mod",
            format!("bin {k0} is outside the usable spectrum (1..{})", n - 1),
        ));
    }
    Ok(k0)
}

/// Amplitude SNR at the modulation frequency: sqrt(P(f_mod)/floor - 1),
/// clamped at zero when the tone bin does not rise above the floor.
pub fn estimate_sigma<T: Real>(ps: &SpectrumTrace<T>, f_mod: T) -> Result<T> {
    let k0 = tone_bin_index(ps, f_mod)?;
    let floor = noise_floor(ps, Some(f_mod))?;
    if !(floor > T::zero()) {
        return Err(Error::invalid("spectrum", "noise floor is not positive"));
    }
    Ok((ps.power[k0] / floor - T::one()).max(T::zero()).sqrt())
}

/// Analytic amplitude SNR the spectrum-analyzer pipeline should report for
/// a scenario: 2*sqrt(flux/rbw)*applied_du/(u0*sqrt(mixture)).
pub fn predicted_sigma<T: Real>(scenario: &ExperimentScenario<T>) -> Result<T> {
    scenario.validate()?;
    let spectral = derive_spectral(&scenario.comb)?;
    let flux = scenario.photon_flux()?;
    let mix = scenario.noise_variance()?;
    Ok(T::lit(2.0) * (flux / scenario.sa.rbw).sqrt() * scenario.modulation.applied_du
        / (spectral.u0 * mix.sqrt()))
}

/// Everything a full synthetic run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingExperiment<T: Real = f64> {
    /// Measured outcome (delay floor from the estimated SNR).
    pub timing: TimingResult<T>,
    /// Analytic delay floor for the same scenario, per sqrt(Hz).
    pub du_min_predicted: T,
    /// Analytic amplitude SNR for the same scenario.
    pub sigma_predicted: T,
    /// The averaged spectrum the estimate was read from.
    pub spectrum: SpectrumTrace<T>,
}

/// Runs the full pipeline: synthesize, spectrum-analyze, estimate the SNR,
/// and convert to a delay floor per sqrt(Hz).
pub fn run_timing_experiment<T>(scenario: &ExperimentScenario<T>) -> Result<TimingExperiment<T>>
where
    T: Real + FftNum,
    StandardNormal: Distribution<T>,
{
    let trace = synthesize_trace(scenario)?;
    let ps = spectrum(&trace, scenario.sample_rate, scenario.sa.rbw, scenario.sa.n_averages)?;
    let sigma = estimate_sigma(&ps, scenario.modulation.frequency)?;

    let spectral = derive_spectral(&scenario.comb)?;
    let flux = scenario.photon_flux()?;
    let (vp, vq) = scenario.state.variances();
    let sql_ref = sql_combined(flux, spectral.omega0, spectral.domega)?;
    let du_min = if sigma > T::zero() && scenario.modulation.applied_du > T::zero() {
        Some(du_min_from_experiment(
            scenario.modulation.applied_du,
            sigma,
            scenario.sa.rbw,
        )?)
    } else {
        None
    };
    Ok(TimingExperiment {
        timing: TimingResult {
            du_min,
            sql_ref,
            sigma,
            squeezing_db_used: variance_to_db(vp)?,
        },
        du_min_predicted: min_detectable_du(flux, &spectral, vp, vq)?,
        sigma_predicted: predicted_sigma(scenario)?,
        spectrum: ps,
    })
}

/// Sawtooth readout-phase ramp for a variance scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseScanSpec<T: Real = f64> {
    /// Ramp period (s): the phase sweeps 0..2*pi once per period.
    pub period: T,
    /// Total scan time (s).
    pub duration: T,
    /// Number of trace points, uniform in time, endpoints included.
    pub n_points: usize,
    /// Gaussian draws per point used for the sample variance.
    pub draws_per_point: usize,
    pub rng_seed: u64,
}

/// One point of a phase-scan trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseScanPoint<T: Real = f64> {
    /// Scan time (s).
    pub time: T,
    /// Readout phase (rad).
    pub phase: T,
    /// Sample variance of the draws at this point, shot-noise normalized.
    pub variance: T,
}

/// Simulates a variance-versus-phase scan: at each point the readout angle
/// follows the sawtooth ramp and the measured value is the sample variance
/// of fresh Gaussian draws with the rotated variance. The trace envelope
/// approaches var_q at phase 0 and var_p at phase pi/2.
pub fn phase_scan<T>(pair: &QuadraturePair<T>, scan: &PhaseScanSpec<T>) -> Result<Vec<PhaseScanPoint<T>>>
where
    T: Real,
    StandardNormal: Distribution<T>,
{
    if !(pair.var_p > T::zero() && pair.var_q > T::zero()) {
        return Err(Error::invalid("pair", "variances must be positive"));
    }
    if !(scan.period > T::zero()) || !(scan.duration > T::zero()) {
        return Err(Error::invalid("scan", "period and duration must be positive"));
    }
    if scan.n_points < 2 {
        return Err(Error::invalid("n_points", "need at least 2 points"));
    }
    if scan.draws_per_point < 2 {
        return Err(Error::invalid("draws_per_point", "need at least 2 draws"));
    }

    let mut rng = ChaCha12Rng::seed_from_u64(scan.rng_seed);
    let two_pi = T::lit(2.0) * T::PI();
    let mut out = Vec::with_capacity(scan.n_points);
    let mut draws = vec![T::zero(); scan.draws_per_point];
    for i in 0..scan.n_points {
        let time = scan.duration * T::of_usize(i) / T::of_usize(scan.n_points - 1);
        let phase = two_pi * (time / scan.period).fract();
        let sd = rotated_variance(phase, pair).sqrt();
        for d in &mut draws {
            let x: T = rng.sample(StandardNormal);
            *d = sd * x;
        }
        let m = T::of_usize(scan.draws_per_point);
        let mean = draws.iter().fold(T::zero(), |a, &x| a + x) / m;
        let var = draws
            .iter()
            .fold(T::zero(), |a, &x| a + (x - mean) * (x - mean))
            / (m - T::one());
        out.push(PhaseScanPoint {
            time,
            phase,
            variance: var,
        });
    }
    Ok(out)
}
