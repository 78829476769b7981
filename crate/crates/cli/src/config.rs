//! TOML run configuration. Every physical key carries an explicit unit
//! suffix; sections left out fall back to the reference experiment values.
//! All sections are validated against the core invariants at load time, so
//! commands start from a known-good state.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use combtime_core::comb::CombParams;
use combtime_core::metrology::pzt_to_delay;
use combtime_core::montecarlo::{
    ExperimentScenario, Modulation, PhaseScanSpec, SaSettings, SqueezeState,
};
use combtime_core::squeezing::{db_to_variance, pump_rate, DetectionChain, SpopoParams};

use crate::error::{CliError, Result};
use crate::presets;

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    comb: CombSection,
    #[serde(default)]
    chain: ChainSection,
    #[serde(default)]
    spopo: SpopoSection,
    #[serde(default)]
    squeezing: SqueezingSection,
    #[serde(default)]
    modulation: ModulationSection,
    #[serde(default)]
    sa: SaSection,
    #[serde(default)]
    sim: SimSection,
    #[serde(default)]
    phase_scan: PhaseScanSection,
    #[serde(default)]
    squeeze_spectrum: SqueezeSpectrumSection,
    #[serde(default)]
    sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct CombSection {
    lambda0_nm: f64,
    dt_fwhm_fs: f64,
    rep_rate_mhz: f64,
    power_uw: f64,
}

impl Default for CombSection {
    fn default() -> Self {
        Self {
            lambda0_nm: 815.0,
            dt_fwhm_fs: 130.0,
            rep_rate_mhz: 75.0,
            power_uw: 2.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ChainSection {
    rho: f64,
    eta: f64,
    xi: f64,
    eta_tot_override: Option<f64>,
}

impl Default for ChainSection {
    fn default() -> Self {
        Self {
            rho: 0.93,
            eta: 0.98,
            xi: 0.89,
            eta_tot_override: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SpopoSection {
    zeta: f64,
    /// Cavity bandwidth (HWHM) in MHz; stored as an angular rate internally.
    gamma_s_mhz: f64,
    pump_power_mw: f64,
    threshold_power_mw: f64,
    lambda_ratios: Vec<f64>,
}

impl Default for SpopoSection {
    fn default() -> Self {
        Self {
            zeta: 0.814,
            gamma_s_mhz: 1.5625,
            pump_power_mw: 27.0,
            threshold_power_mw: 55.0,
            lambda_ratios: vec![1.0, -0.7, 0.5, -0.35],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SqueezingSection {
    /// "coherent" or "squeezed".
    state: String,
    /// Squeezing of the readout-mode phase quadrature, positive dB below
    /// shot noise.
    squeeze_db: f64,
    /// Excess noise of the partner amplitude quadrature, positive dB above
    /// shot noise.
    antisqueeze_db: f64,
}

impl Default for SqueezingSection {
    fn default() -> Self {
        Self {
            state: "coherent".to_string(),
            squeeze_db: 1.5,
            antisqueeze_db: 0.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ModulationSection {
    frequency_mhz: f64,
    applied_volts: f64,
    pzt_coeff_s_per_v: f64,
}

impl Default for ModulationSection {
    fn default() -> Self {
        Self {
            frequency_mhz: 2.0,
            applied_volts: 1.7,
            pzt_coeff_s_per_v: 1.65e-20,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SaSection {
    rbw_khz: f64,
    n_averages: usize,
}

impl Default for SaSection {
    fn default() -> Self {
        Self {
            rbw_khz: 100.0,
            n_averages: 64,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SimSection {
    sample_rate_mhz: f64,
    duration_s: f64,
    seed: u64,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            sample_rate_mhz: 10.0,
            duration_s: 0.1,
            seed: 20180815,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct PhaseScanSection {
    period_ms: f64,
    duration_ms: f64,
    n_points: usize,
    draws_per_point: usize,
}

impl Default for PhaseScanSection {
    fn default() -> Self {
        Self {
            period_ms: 20.0,
            duration_ms: 20.0,
            n_points: 361,
            draws_per_point: 40_000,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SqueezeSpectrumSection {
    k_indices: Vec<usize>,
    f_min_hz: f64,
    f_max_hz: f64,
    points: usize,
}

impl Default for SqueezeSpectrumSection {
    fn default() -> Self {
        Self {
            k_indices: vec![0, 1],
            f_min_hz: 1e3,
            f_max_hz: 1e9,
            points: 241,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    axis: String,
    start: f64,
    stop: f64,
    points: usize,
    #[serde(default)]
    log_spacing: bool,
}

/// Fully resolved, SI-unit, validated run configuration, plus the artifact
/// destination and emit flags.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub out: PathBuf,
    pub emit_csv: bool,
    pub emit_svg: bool,
    pub comb: CombParams,
    pub chain: DetectionChain,
    pub spopo: SpopoParams,
    pub state: SqueezeState,
    pub state_name: &'static str,
    pub squeeze_db: f64,
    pub antisqueeze_db: f64,
    pub modulation: Modulation,
    pub pzt_coeff: f64,
    pub sa: SaSettings,
    pub sample_rate: f64,
    pub duration: f64,
    pub seed: u64,
    pub phase_scan: PhaseScanSpec,
    pub spectrum_grid: SpectrumGrid,
    pub sweep: Option<SweepSettings>,
}

#[derive(Debug, Clone)]
pub struct SpectrumGrid {
    pub k_indices: Vec<usize>,
    pub f_min: f64,
    pub f_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone)]
pub struct SweepSettings {
    pub axis: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub log_spacing: bool,
}

impl RunConfig {
    /// The Monte-Carlo scenario this configuration describes.
    pub fn scenario(&self) -> ExperimentScenario {
        ExperimentScenario {
            comb: self.comb,
            chain: self.chain,
            state: self.state,
            modulation: self.modulation,
            sa: self.sa,
            sample_rate: self.sample_rate,
            duration: self.duration,
            rng_seed: self.seed,
        }
    }
}

/// Loads from `--config` or `--preset` (exactly one), applies the seed
/// override, converts to SI, and validates every section.
pub fn load(
    config: Option<&Path>,
    preset: Option<&str>,
    seed: Option<u64>,
    out: PathBuf,
    emit_csv: bool,
    emit_svg: bool,
) -> Result<RunConfig> {
    let text = match (config, preset) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "pass either --config or --preset, not both".to_string(),
            ))
        }
        (Some(path), None) => fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config {}: {e}", path.display()))
        })?,
        (None, Some(name)) => presets::lookup(name)
            .ok_or_else(|| {
                CliError::Config(format!(
                    "unknown preset '{name}'; available: {}",
                    presets::NAMES.join(", ")
                ))
            })?
            .to_string(),
        (None, None) => {
            return Err(CliError::Config(
                "a --config file or a --preset name is required".to_string(),
            ))
        }
    };
    let raw: RawConfig =
        toml::from_str(&text).map_err(|e| CliError::Config(format!("config parse error: {e}")))?;
    resolve(raw, seed, out, emit_csv, emit_svg)
}

fn resolve(
    raw: RawConfig,
    seed_override: Option<u64>,
    out: PathBuf,
    emit_csv: bool,
    emit_svg: bool,
) -> Result<RunConfig> {
    let comb = CombParams {
        lambda0: raw.comb.lambda0_nm * 1e-9,
        dt_fwhm: raw.comb.dt_fwhm_fs * 1e-15,
        rep_rate: raw.comb.rep_rate_mhz * 1e6,
        power: raw.comb.power_uw * 1e-6,
    };
    comb.validate().map_err(CliError::config)?;

    let chain = DetectionChain {
        rho: raw.chain.rho,
        eta: raw.chain.eta,
        xi: raw.chain.xi,
        eta_tot_override: raw.chain.eta_tot_override,
    };
    chain.validate().map_err(CliError::config)?;

    let r = pump_rate(
        raw.spopo.pump_power_mw * 1e-3,
        raw.spopo.threshold_power_mw * 1e-3,
    )
    .map_err(CliError::config)?;
    let spopo = SpopoParams {
        zeta: raw.spopo.zeta,
        gamma_s: 2.0 * std::f64::consts::PI * raw.spopo.gamma_s_mhz * 1e6,
        r,
        lambda_ratios: raw.spopo.lambda_ratios,
    };
    spopo.validate().map_err(CliError::config)?;

    let (state, state_name) = match raw.squeezing.state.as_str() {
        "coherent" => (SqueezeState::Coherent, "coherent"),
        "squeezed" => (
            SqueezeState::Squeezed {
                var_p0: db_to_variance(-raw.squeezing.squeeze_db),
                var_q1: db_to_variance(raw.squeezing.antisqueeze_db),
            },
            "squeezed",
        ),
        other => {
            return Err(CliError::Config(format!(
                "squeezing.state must be \"coherent\" or \"squeezed\", got \"{other}\""
            )))
        }
    };

    let applied_du = pzt_to_delay(
        raw.modulation.applied_volts,
        raw.modulation.pzt_coeff_s_per_v,
    )
    .map_err(CliError::config)?;
    let modulation = Modulation {
        frequency: raw.modulation.frequency_mhz * 1e6,
        applied_du,
    };

    let seed = seed_override.unwrap_or(raw.sim.seed);
    let run = RunConfig {
        out,
        emit_csv,
        emit_svg,
        comb,
        chain,
        spopo,
        state,
        state_name,
        squeeze_db: raw.squeezing.squeeze_db,
        antisqueeze_db: raw.squeezing.antisqueeze_db,
        modulation,
        pzt_coeff: raw.modulation.pzt_coeff_s_per_v,
        sa: SaSettings {
            rbw: raw.sa.rbw_khz * 1e3,
            n_averages: raw.sa.n_averages,
        },
        sample_rate: raw.sim.sample_rate_mhz * 1e6,
        duration: raw.sim.duration_s,
        seed,
        phase_scan: PhaseScanSpec {
            period: raw.phase_scan.period_ms * 1e-3,
            duration: raw.phase_scan.duration_ms * 1e-3,
            n_points: raw.phase_scan.n_points,
            draws_per_point: raw.phase_scan.draws_per_point,
            rng_seed: seed,
        },
        spectrum_grid: SpectrumGrid {
            k_indices: raw.squeeze_spectrum.k_indices,
            f_min: raw.squeeze_spectrum.f_min_hz,
            f_max: raw.squeeze_spectrum.f_max_hz,
            points: raw.squeeze_spectrum.points,
        },
        sweep: raw.sweep.map(|s| SweepSettings {
            axis: s.axis,
            start: s.start,
            stop: s.stop,
            points: s.points,
            log_spacing: s.log_spacing,
        }),
    };

    run.scenario().validate().map_err(CliError::config)?;
    let scan = &run.phase_scan;
    if !(scan.period > 0.0 && scan.duration > 0.0) {
        return Err(CliError::Config(
            "phase_scan period and duration must be positive".to_string(),
        ));
    }
    if scan.n_points < 2 || scan.draws_per_point < 2 {
        return Err(CliError::Config(
            "phase_scan needs at least 2 points and 2 draws per point".to_string(),
        ));
    }
    let grid = &run.spectrum_grid;
    if !(grid.f_min > 0.0 && grid.f_max > grid.f_min) || grid.points < 2 {
        return Err(CliError::Config(
            "squeeze_spectrum needs 0 < f_min_hz < f_max_hz and at least 2 points".to_string(),
        ));
    }
    for &k in &grid.k_indices {
        if k >= run.spopo.lambda_ratios.len() {
            return Err(CliError::Config(format!(
                "squeeze_spectrum mode index {k} out of range: {} eigenvalue ratios configured",
                run.spopo.lambda_ratios.len()
            )));
        }
    }
    Ok(run)
}
