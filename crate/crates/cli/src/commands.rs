//! Subcommand implementations. Each one loads the resolved config, computes
//! through the core crate, prints the CSV table to stdout, and mirrors the
//! requested artifacts into the output directory.

use std::fs;
use std::path::Path;

use combtime_core::comb::derive_spectral;
use combtime_core::metrology::{
    du_min_from_experiment, effective_photons, min_detectable_du, snr_to_sa_improvement,
    variance_mixture,
};
use combtime_core::montecarlo::{phase_scan, run_timing_experiment, SqueezeState};
use combtime_core::squeezing::{
    db_to_variance, quadrature_variances, variance_to_db, QuadraturePair,
};

use crate::config::{self, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{render_csv, Cell};
use crate::svg::{line_plot, Series};
use crate::{Cli, Command, Emit};

pub fn run(cli: Cli) -> Result<()> {
    let cfg = config::load(
        cli.config.as_deref(),
        cli.preset.as_deref(),
        cli.seed,
        cli.out,
        cli.emit.contains(&Emit::Csv),
        cli.emit.contains(&Emit::Svg),
    )?;
    fs::create_dir_all(&cfg.out)?;
    match cli.command {
        Command::Sql {
            power_uw,
            squeeze_db,
        } => cmd_sql(&cfg, &power_uw, &squeeze_db),
        Command::SqueezeSpectrum { k } => cmd_squeeze_spectrum(&cfg, &k),
        Command::PhaseScan {
            n_points,
            draws_per_point,
        } => cmd_phase_scan(&cfg, n_points, draws_per_point),
        Command::Timing { applied_volts } => cmd_timing(&cfg, applied_volts),
        Command::Sweep {
            axis,
            start,
            stop,
            points,
            log,
        } => cmd_sweep(&cfg, axis, start, stop, points, log),
    }
}

fn write_artifact(out: &Path, name: &str, content: &str) -> Result<()> {
    fs::write(out.join(name), content)?;
    Ok(())
}

/// Analytic quantum limits and the projected delay floor over a grid of
/// powers and squeezing levels.
fn cmd_sql(cfg: &RunConfig, power_uw: &[f64], squeeze_db: &[f64]) -> Result<()> {
    let spectral = derive_spectral(&cfg.comb).map_err(CliError::compute)?;
    let eta_tot = cfg.chain.eta_tot();
    let powers = if power_uw.is_empty() {
        vec![cfg.comb.power * 1e6]
    } else {
        power_uw.to_vec()
    };
    let squeezes = if squeeze_db.is_empty() {
        match cfg.state {
            SqueezeState::Coherent => vec![0.0],
            SqueezeState::Squeezed { .. } => vec![cfg.squeeze_db],
        }
    } else {
        squeeze_db.to_vec()
    };

    let columns = [
        "power_uw",
        "squeeze_db",
        "antisqueeze_db",
        "n_eff_1s",
        "sql_tof_s_per_sqrthz",
        "sql_ph_s_per_sqrthz",
        "sql_combined_s_per_sqrthz",
        "min_detectable_du_s_per_sqrthz",
        "du_min_projected_s_per_sqrthz",
    ];
    let mut rows = Vec::new();
    for &p_uw in &powers {
        if !(p_uw > 0.0) {
            return Err(CliError::Config(format!(
                "--power-uw values must be positive, got {p_uw}"
            )));
        }
        let budget = effective_photons(p_uw * 1e-6, cfg.comb.lambda0, 1.0, eta_tot)
            .map_err(CliError::compute)?;
        let n = budget.n_eff;
        for &s_db in &squeezes {
            let var_p0 = db_to_variance(-s_db);
            let var_q1 = if s_db == 0.0 {
                1.0
            } else {
                db_to_variance(cfg.antisqueeze_db)
            };
            let du = min_detectable_du(n, &spectral, var_p0, var_q1).map_err(CliError::compute)?;
            let projected = if cfg.modulation.applied_du > 0.0 {
                let unit_snr_floor =
                    du_min_from_experiment(cfg.modulation.applied_du, 1.0, cfg.sa.rbw)
                        .map_err(CliError::compute)?;
                let mix = variance_mixture(spectral.alpha, var_p0, var_q1);
                Cell::F(unit_snr_floor * mix.sqrt())
            } else {
                Cell::S("unresolved".to_string())
            };
            rows.push(vec![
                Cell::F(p_uw),
                Cell::F(s_db),
                Cell::F(variance_to_db(var_q1).map_err(CliError::compute)?),
                Cell::F(n),
                Cell::F(
                    combtime_core::metrology::sql_tof(n, spectral.domega)
                        .map_err(CliError::compute)?,
                ),
                Cell::F(
                    combtime_core::metrology::sql_ph(n, spectral.omega0)
                        .map_err(CliError::compute)?,
                ),
                Cell::F(
                    combtime_core::metrology::sql_combined(n, spectral.omega0, spectral.domega)
                        .map_err(CliError::compute)?,
                ),
                Cell::F(du),
                projected,
            ]);
        }
    }
    let csv = render_csv("sql", &columns, &rows);
    print!("{csv}");
    if cfg.emit_csv {
        write_artifact(&cfg.out, "sql.csv", &csv)?;
    }
    Ok(())
}

/// Quadrature noise of the cavity output modes against analysis frequency.
fn cmd_squeeze_spectrum(cfg: &RunConfig, k_flag: &[usize]) -> Result<()> {
    let ks: Vec<usize> = if k_flag.is_empty() {
        cfg.spectrum_grid.k_indices.clone()
    } else {
        k_flag.to_vec()
    };
    for &k in &ks {
        if k >= cfg.spopo.lambda_ratios.len() {
            return Err(CliError::Config(format!(
                "mode index {k} out of range: {} eigenvalue ratios configured",
                cfg.spopo.lambda_ratios.len()
            )));
        }
    }
    let grid = &cfg.spectrum_grid;
    let log_min = grid.f_min.log10();
    let log_max = grid.f_max.log10();

    let columns = [
        "mode_k",
        "f_hz",
        "omega_rad_per_s",
        "var_p",
        "var_q",
        "var_p_db",
        "var_q_db",
        "quadratures_swapped",
    ];
    let mut rows = Vec::new();
    let mut curves: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for &k in &ks {
        let mut points = Vec::with_capacity(grid.points);
        for i in 0..grid.points {
            let frac = i as f64 / (grid.points - 1) as f64;
            let f = 10f64.powf(log_min + frac * (log_max - log_min));
            let omega = 2.0 * std::f64::consts::PI * f;
            let pair = quadrature_variances(k, omega, &cfg.spopo, &cfg.chain)
                .map_err(CliError::compute)?;
            let p_db = variance_to_db(pair.var_p).map_err(CliError::compute)?;
            let q_db = variance_to_db(pair.var_q).map_err(CliError::compute)?;
            rows.push(vec![
                Cell::I(k as u64),
                Cell::F(f),
                Cell::F(omega),
                Cell::F(pair.var_p),
                Cell::F(pair.var_q),
                Cell::F(p_db),
                Cell::F(q_db),
                Cell::S(pair.quadratures_swapped.to_string()),
            ]);
            points.push((f, p_db));
        }
        curves.push((format!("mode {k} squeezed quadrature"), points));
    }
    let csv = render_csv("squeeze-spectrum", &columns, &rows);
    print!("{csv}");
    if cfg.emit_csv {
        write_artifact(&cfg.out, "squeeze_spectrum.csv", &csv)?;
    }
    if cfg.emit_svg {
        let series: Vec<Series<'_>> = curves
            .iter()
            .map(|(label, points)| Series {
                label,
                points: points.clone(),
            })
            .collect();
        let svg = line_plot(
            "Quadrature noise vs analysis frequency",
            "analysis frequency (Hz)",
            "noise relative to shot noise (dB)",
            true,
            &series,
        );
        write_artifact(&cfg.out, "squeeze_spectrum.svg", &svg)?;
    }
    Ok(())
}

/// Monte-Carlo noise variance while the local-oscillator phase ramps
/// linearly through the scan.
fn cmd_phase_scan(
    cfg: &RunConfig,
    n_points: Option<usize>,
    draws_per_point: Option<usize>,
) -> Result<()> {
    let (var_p, var_q) = cfg.state.variances();
    let pair: QuadraturePair = QuadraturePair {
        var_p,
        var_q,
        omega: 2.0 * std::f64::consts::PI * cfg.modulation.frequency,
        k: 0,
        quadratures_swapped: false,
    };
    let mut scan = cfg.phase_scan;
    if let Some(n) = n_points {
        scan.n_points = n;
    }
    if let Some(d) = draws_per_point {
        scan.draws_per_point = d;
    }
    if scan.n_points < 2 || scan.draws_per_point < 2 {
        return Err(CliError::Config(
            "phase scan needs at least 2 points and 2 draws per point".to_string(),
        ));
    }
    let points = phase_scan(&pair, &scan).map_err(CliError::compute)?;

    let columns = ["time_s", "phase_rad", "variance", "variance_db"];
    let mut rows = Vec::with_capacity(points.len());
    let mut curve = Vec::with_capacity(points.len());
    for pt in &points {
        let db = variance_to_db(pt.variance).map_err(CliError::compute)?;
        rows.push(vec![
            Cell::F(pt.time),
            Cell::F(pt.phase),
            Cell::F(pt.variance),
            Cell::F(db),
        ]);
        curve.push((pt.time, db));
    }
    let csv = render_csv("phase-scan", &columns, &rows);
    print!("{csv}");
    if cfg.emit_csv {
        write_artifact(&cfg.out, "phase_scan.csv", &csv)?;
    }
    if cfg.emit_svg {
        let series = [Series {
            label: "measured variance",
            points: curve,
        }];
        let svg = line_plot(
            "Homodyne noise during a local-oscillator phase ramp",
            "time (s)",
            "variance relative to shot noise (dB)",
            false,
            &series,
        );
        write_artifact(&cfg.out, "phase_scan.svg", &svg)?;
    }
    Ok(())
}

/// Full simulated timing measurement: synthesize the homodyne record,
/// average the spectrum, and read the delay floor off the tone.
fn cmd_timing(cfg: &RunConfig, applied_volts: Option<f64>) -> Result<()> {
    let mut scenario = cfg.scenario();
    if let Some(v) = applied_volts {
        scenario.modulation.applied_du =
            combtime_core::metrology::pzt_to_delay(v, cfg.pzt_coeff).map_err(CliError::config)?;
        scenario.validate().map_err(CliError::config)?;
    }
    let result = run_timing_experiment(&scenario).map_err(CliError::compute)?;
    let improvement = snr_to_sa_improvement(result.timing.sigma).map_err(CliError::compute)?;

    let columns = [
        "state",
        "seed",
        "sigma",
        "sigma_predicted",
        "improvement_db",
        "du_min_s_per_sqrthz",
        "du_min_predicted_s_per_sqrthz",
        "sql_ref_s_per_sqrthz",
        "squeezing_db_used",
    ];
    let du_cell = match result.timing.du_min {
        Some(du) => Cell::F(du),
        None => Cell::S("unresolved".to_string()),
    };
    let rows = vec![vec![
        Cell::S(cfg.state_name.to_string()),
        Cell::I(scenario.rng_seed),
        Cell::F(result.timing.sigma),
        Cell::F(result.sigma_predicted),
        Cell::F(improvement),
        du_cell,
        Cell::F(result.du_min_predicted),
        Cell::F(result.timing.sql_ref),
        Cell::F(result.timing.squeezing_db_used),
    ]];
    let csv = render_csv("timing", &columns, &rows);
    print!("{csv}");
    if cfg.emit_csv {
        write_artifact(&cfg.out, "timing.csv", &csv)?;
    }
    if cfg.emit_svg {
        let points: Vec<(f64, f64)> = result
            .spectrum
            .frequencies
            .iter()
            .zip(&result.spectrum.power)
            .skip(1)
            .map(|(&f, &p)| (f, 10.0 * p.max(1e-12).log10()))
            .collect();
        let series = [Series {
            label: "averaged power spectrum",
            points,
        }];
        let svg = line_plot(
            "Homodyne power spectrum",
            "frequency (Hz)",
            "power relative to shot noise (dB)",
            false,
            &series,
        );
        write_artifact(&cfg.out, "timing_spectrum.svg", &svg)?;
    }
    Ok(())
}

/// One-axis parameter sweep of the analytic delay floor.
fn cmd_sweep(
    cfg: &RunConfig,
    axis: Option<String>,
    start: Option<f64>,
    stop: Option<f64>,
    points: Option<usize>,
    log: bool,
) -> Result<()> {
    let file = cfg.sweep.as_ref();
    let axis = axis
        .or_else(|| file.map(|s| s.axis.clone()))
        .ok_or_else(|| CliError::Config("sweep needs an axis (--axis or [sweep])".to_string()))?;
    let start = start
        .or_else(|| file.map(|s| s.start))
        .ok_or_else(|| CliError::Config("sweep needs --start or [sweep] start".to_string()))?;
    let stop = stop
        .or_else(|| file.map(|s| s.stop))
        .ok_or_else(|| CliError::Config("sweep needs --stop or [sweep] stop".to_string()))?;
    let points = points
        .or_else(|| file.map(|s| s.points))
        .ok_or_else(|| CliError::Config("sweep needs --points or [sweep] points".to_string()))?;
    let log = log || file.map(|s| s.log_spacing).unwrap_or(false);
    if points < 2 {
        return Err(CliError::Config("sweep needs at least 2 points".to_string()));
    }
    if log && !(start > 0.0 && stop > 0.0) {
        return Err(CliError::Config(
            "log spacing needs positive start and stop".to_string(),
        ));
    }

    let spectral = derive_spectral(&cfg.comb).map_err(CliError::compute)?;
    let eta_tot = cfg.chain.eta_tot();
    let n_ref = effective_photons(cfg.comb.power, cfg.comb.lambda0, 1.0, eta_tot)
        .map_err(CliError::compute)?
        .n_eff;
    let (state_p, state_q) = cfg.state.variances();
    let omega_mod = 2.0 * std::f64::consts::PI * cfg.modulation.frequency;

    // The squeezed quadrature of mode 0 carries the phase readout; the
    // antisqueezed quadrature of mode 1, when present, carries the
    // time-of-flight readout.
    let readout_variances = |spopo: &combtime_core::squeezing::SpopoParams,
                             omega: f64|
     -> Result<(f64, f64)> {
        let pair0 = quadrature_variances(0, omega, spopo, &cfg.chain).map_err(CliError::compute)?;
        let var_q = if spopo.lambda_ratios.len() > 1 {
            quadrature_variances(1, omega, spopo, &cfg.chain)
                .map_err(CliError::compute)?
                .var_q
        } else {
            1.0
        };
        Ok((pair0.var_p, var_q))
    };

    let key = axis.replace('-', "_");
    let columns = ["axis", "value", "var_p0", "var_q1", "du_min_s_per_sqrthz"];
    let mut rows = Vec::with_capacity(points);
    let mut curve = Vec::with_capacity(points);
    for i in 0..points {
        let frac = i as f64 / (points - 1) as f64;
        let value = if log {
            10f64.powf(start.log10() + frac * (stop.log10() - start.log10()))
        } else {
            start + frac * (stop - start)
        };
        let (n, var_p0, var_q1) = match key.as_str() {
            "power_uw" => {
                if !(value > 0.0) {
                    return Err(CliError::Config(format!(
                        "power sweep values must be positive, got {value}"
                    )));
                }
                let n = effective_photons(value * 1e-6, cfg.comb.lambda0, 1.0, eta_tot)
                    .map_err(CliError::compute)?
                    .n_eff;
                (n, state_p, state_q)
            }
            "squeeze_db" => (
                n_ref,
                db_to_variance(-value),
                db_to_variance(cfg.antisqueeze_db),
            ),
            "pump_rate" => {
                if !(0.0..=1.0).contains(&value) {
                    return Err(CliError::Config(format!(
                        "pump rate sweep values must lie in [0, 1], got {value}"
                    )));
                }
                let mut spopo = cfg.spopo.clone();
                spopo.r = value;
                let (vp, vq) = readout_variances(&spopo, omega_mod)?;
                (n_ref, vp, vq)
            }
            "omega_rad_per_s" => {
                if !(value >= 0.0) {
                    return Err(CliError::Config(format!(
                        "analysis frequency sweep values must be non-negative, got {value}"
                    )));
                }
                let (vp, vq) = readout_variances(&cfg.spopo, value)?;
                (n_ref, vp, vq)
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown sweep axis '{other}'; expected power-uw, squeeze-db, pump-rate, or omega-rad-per-s"
                )))
            }
        };
        let du = min_detectable_du(n, &spectral, var_p0, var_q1).map_err(CliError::compute)?;
        rows.push(vec![
            Cell::S(key.clone()),
            Cell::F(value),
            Cell::F(var_p0),
            Cell::F(var_q1),
            Cell::F(du),
        ]);
        curve.push((value, du));
    }
    let csv = render_csv("sweep", &columns, &rows);
    print!("{csv}");
    if cfg.emit_csv {
        write_artifact(&cfg.out, "sweep.csv", &csv)?;
    }
    if cfg.emit_svg {
        let series = [Series {
            label: "delay floor",
            points: curve,
        }];
        let svg = line_plot(
            "Delay floor sweep",
            &key,
            "minimum resolvable delay (s per sqrt(Hz))",
            log,
            &series,
        );
        write_artifact(&cfg.out, "sweep.svg", &svg)?;
    }
    Ok(())
}
