//! End-to-end acceptance gates. Each test prints one pass/fail line with
//! the measured values so the suite output doubles as a verification
//! report; targets and tolerances are frozen here on purpose.
//!
//! The reference scenario throughout: 130 fs pulses at 815 nm, 75 MHz
//! repetition rate, 2 uW detected, modulated by a piezo driven at 2 MHz
//! with 1.7 V at 1.65e-20 s/V, read on a spectrum analyzer at 100 kHz RBW.

use std::time::{Duration, Instant};

use combtime_core::comb::{derive_spectral, inner_product, supermode, CombParams, TimeGrid};
use combtime_core::comb::shifted_pulse_decomposition;
use combtime_core::metrology::{
    du_min_from_experiment, effective_photons, homodyne_mean, homodyne_std, min_detectable_du,
    snr_to_sa_improvement, sql_combined, variance_mixture, HomodyneConfig,
};
use combtime_core::montecarlo::{
    phase_scan, run_timing_experiment, ExperimentScenario, Modulation, PhaseScanPoint,
    PhaseScanSpec, SaSettings, SqueezeState,
};
use combtime_core::squeezing::{
    db_to_variance, quadrature_variances, variance_to_db, DetectionChain, QuadraturePair,
    SpopoParams,
};

const LAMBDA0: f64 = 815e-9;
const DT_FWHM: f64 = 130e-15;
const REP_RATE: f64 = 75e6;
const POWER: f64 = 2e-6;
const APPLIED_DU: f64 = 1.7 * 1.65e-20;
const RBW: f64 = 1e5;
const F_MOD: f64 = 2e6;
const SEED: u64 = 20180815;

fn reference_comb() -> CombParams {
    CombParams {
        lambda0: LAMBDA0,
        dt_fwhm: DT_FWHM,
        rep_rate: REP_RATE,
        power: POWER,
    }
}

fn reference_chain() -> DetectionChain {
    DetectionChain {
        rho: 0.93,
        eta: 0.98,
        xi: 0.89,
        eta_tot_override: None,
    }
}

fn reference_scenario(state: SqueezeState) -> ExperimentScenario {
    ExperimentScenario {
        comb: reference_comb(),
        chain: reference_chain(),
        state,
        modulation: Modulation {
            frequency: F_MOD,
            applied_du: APPLIED_DU,
        },
        sa: SaSettings {
            rbw: RBW,
            n_averages: 32768,
        },
        sample_rate: 1e7,
        duration: 0.33,
        rng_seed: SEED,
    }
}

fn gate(criterion: &str, ok: bool, detail: &str) {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("[{tag}] {criterion}: {detail}");
    assert!(ok, "{criterion}: {detail}");
}

fn within(value: f64, target: f64, rel_tol: f64) -> bool {
    (value / target - 1.0).abs() <= rel_tol
}

#[test]
fn criterion_1_quantum_limit_value() {
    let start = Instant::now();
    let spectral = derive_spectral(&reference_comb()).unwrap();
    let n = effective_photons(POWER, LAMBDA0, 1.0, 0.68).unwrap().n_eff;
    let sql = sql_combined(n, spectral.omega0, spectral.domega).unwrap();
    let elapsed = start.elapsed();
    let ok = within(sql, 9.15e-23, 0.01) && elapsed < Duration::from_secs(1);
    gate(
        "criterion 1 (combined quantum limit, 2 uW, eta_tot 0.68)",
        ok,
        &format!("sql_combined = {sql:.6e} s/sqrt(Hz), target 9.15e-23 +/- 1%, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_2_coherent_experiment() {
    let start = Instant::now();
    let run = run_timing_experiment(&reference_scenario(SqueezeState::Coherent)).unwrap();
    let sigma = run.timing.sigma;
    let du = run.timing.du_min.expect("tone must be resolved");
    let improvement = snr_to_sa_improvement(sigma).unwrap();
    let elapsed = start.elapsed();
    let ok = within(du, 8.9e-23, 0.05)
        && (sigma - 1.0).abs() <= 0.05
        && (improvement - 3.0).abs() <= 0.2
        && elapsed < Duration::from_secs(60);
    gate(
        "criterion 2 (coherent run)",
        ok,
        &format!(
            "du_min = {du:.4e} s/sqrt(Hz) (target 8.9e-23 +/- 5%), sigma = {sigma:.4} (target 1 +/- 0.05), improvement = {improvement:.3} dB (target 3.0 +/- 0.2), {elapsed:.2?}"
        ),
    );
}

#[test]
fn criterion_3_squeezed_experiment() {
    let start = Instant::now();
    let var_p0 = db_to_variance(-1.5);
    let squeezed = run_timing_experiment(&reference_scenario(SqueezeState::Squeezed {
        var_p0,
        var_q1: 1.0,
    }))
    .unwrap();
    let coherent = run_timing_experiment(&reference_scenario(SqueezeState::Coherent)).unwrap();
    let du_sqz = squeezed.timing.du_min.expect("tone must be resolved");
    let du_coh = coherent.timing.du_min.expect("tone must be resolved");
    let improvement = snr_to_sa_improvement(squeezed.timing.sigma).unwrap();
    let ratio = du_sqz / du_coh;
    let elapsed = start.elapsed();
    let ok = within(du_sqz, 7.5e-23, 0.05)
        && (improvement - 3.8).abs() <= 0.2
        && (ratio - 0.841).abs() <= 0.02
        && elapsed < Duration::from_secs(60);
    gate(
        "criterion 3 (squeezed run, 1.5 dB)",
        ok,
        &format!(
            "du_min = {du_sqz:.4e} s/sqrt(Hz) (target 7.5e-23 +/- 5%), improvement = {improvement:.3} dB (target 3.8 +/- 0.2), seed-paired ratio = {ratio:.4} (target 0.841 +/- 0.02), {elapsed:.2?}"
        ),
    );
}

#[test]
fn criterion_4_ten_db_projection() {
    let start = Instant::now();
    // Project the measured coherent floor (unit SNR at the applied
    // modulation) to 10 dB of squeezing via the readout variance mixture.
    let spectral = derive_spectral(&reference_comb()).unwrap();
    let coherent_floor = du_min_from_experiment(APPLIED_DU, 1.0, RBW).unwrap();
    let projected = coherent_floor * variance_mixture(spectral.alpha, db_to_variance(-10.0), 1.0).sqrt();
    let elapsed = start.elapsed();
    let ok = within(projected, 2.8e-23, 0.02) && elapsed < Duration::from_secs(1);
    gate(
        "criterion 4 (10 dB projection)",
        ok,
        &format!("projected du_min = {projected:.4e} s/sqrt(Hz), target 2.8e-23 +/- 2%, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_5_phase_scan_extrema() {
    let start = Instant::now();
    let pair = QuadraturePair {
        var_p: db_to_variance(-3.0),
        var_q: db_to_variance(6.0),
        omega: 2.0 * std::f64::consts::PI * F_MOD,
        k: 0,
        quadratures_swapped: false,
    };
    let scan = PhaseScanSpec {
        period: 20e-3,
        duration: 20e-3,
        n_points: 361,
        draws_per_point: 100_000,
        rng_seed: SEED,
    };
    let trace = phase_scan(&pair, &scan).unwrap();
    let to_db = |p: &PhaseScanPoint| variance_to_db(p.variance).unwrap();
    let lo = trace.iter().map(to_db).fold(f64::INFINITY, f64::min);
    let hi = trace.iter().map(to_db).fold(f64::NEG_INFINITY, f64::max);
    let elapsed = start.elapsed();
    let ok = (lo + 3.0).abs() <= 0.2 && (hi - 6.0).abs() <= 0.2 && elapsed < Duration::from_secs(30);
    gate(
        "criterion 5 (phase-scan extrema)",
        ok,
        &format!("min = {lo:.3} dB (target -3.0 +/- 0.2), max = {hi:.3} dB (target +6.0 +/- 0.2), {elapsed:.2?}"),
    );
}

#[test]
fn criterion_6a_supermode_orthonormality() {
    let start = Instant::now();
    let comb = reference_comb();
    let grid = TimeGrid::default_for(&derive_spectral(&comb).unwrap());
    let modes: Vec<_> = (0..=6).map(|k| supermode(k, &comb, &grid).unwrap()).collect();
    let mut worst = 0.0f64;
    for (j, a) in modes.iter().enumerate() {
        for (k, b) in modes.iter().enumerate() {
            let delta = if j == k { 1.0 } else { 0.0 };
            let dev = (inner_product(a, b).unwrap().norm() - delta).abs();
            worst = worst.max(dev);
        }
    }
    let elapsed = start.elapsed();
    let ok = worst < 1e-9 && elapsed < Duration::from_secs(10);
    gate(
        "criterion 6a (orthonormality, modes 0..6)",
        ok,
        &format!("worst |<vj|vk> - delta_jk| = {worst:.3e}, bound 1e-9, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_6b_residual_quadratic_scaling() {
    let start = Instant::now();
    let comb = reference_comb();
    let spectral = derive_spectral(&comb).unwrap();
    let grid = TimeGrid::default_for(&spectral);
    let small = 1e-4 * spectral.u0;
    let large = 1e-2 * spectral.u0;
    let r_small = shifted_pulse_decomposition(small, &comb, &grid).unwrap().residual_norm;
    let r_large = shifted_pulse_decomposition(large, &comb, &grid).unwrap().residual_norm;
    let slope = (r_large / r_small).ln() / (large / small).ln();
    let elapsed = start.elapsed();
    let ok = (slope - 2.0).abs() <= 0.1 && elapsed < Duration::from_secs(10);
    gate(
        "criterion 6b (shifted-pulse residual scaling)",
        ok,
        &format!("log-log slope = {slope:.4}, target 2 +/- 0.1, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_6c_floor_reduces_to_quantum_limit() {
    let start = Instant::now();
    let spectral = derive_spectral(&reference_comb()).unwrap();
    let n = effective_photons(POWER, LAMBDA0, 1.0, 0.68).unwrap().n_eff;
    let du = min_detectable_du(n, &spectral, 1.0, 1.0).unwrap();
    let sql = sql_combined(n, spectral.omega0, spectral.domega).unwrap();
    let dev = (du / sql - 1.0).abs();
    let elapsed = start.elapsed();
    let ok = dev < 1e-12 && elapsed < Duration::from_secs(10);
    gate(
        "criterion 6c (unit-variance floor equals the quantum limit)",
        ok,
        &format!("relative deviation = {dev:.3e}, bound 1e-12, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_6d_unit_snr_delay_matches_the_floor() {
    use rand::{Rng, SeedableRng};
    let start = Instant::now();
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
    let log_uniform = |rng: &mut rand_chacha::ChaCha12Rng, lo: f64, hi: f64| {
        (lo.ln() + rng.random_range(0.0..1.0) * (hi / lo).ln()).exp()
    };
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let omega0 = log_uniform(&mut rng, 1e14, 1e16);
        let domega = log_uniform(&mut rng, 1e12, 1e14);
        let spectral = combtime_core::comb::DerivedSpectral {
            omega0,
            domega,
            alpha: omega0 / domega,
            u0: (omega0 * omega0 + domega * domega).sqrt().recip(),
        };
        let n_signal = log_uniform(&mut rng, 1e2, 1e12);
        let n_lo = log_uniform(&mut rng, 1e4, 1e8);
        let var_p0 = rng.random_range(0.05..1.5);
        let var_q1 = rng.random_range(0.5..20.0);
        let cfg = HomodyneConfig {
            n_signal,
            n_lo,
            theta_s: 0.0,
            theta_lo: 0.0,
        };
        let std = homodyne_std(n_lo, spectral.alpha, var_p0, var_q1).unwrap();
        // bisect homodyne_mean(du) = std; the mean is monotone in du
        let (mut lo, mut hi) = (0.0f64, spectral.u0);
        assert!(homodyne_mean(&cfg, hi, &spectral).unwrap() > std);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if homodyne_mean(&cfg, mid, &spectral).unwrap() < std {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let solved = 0.5 * (lo + hi);
        // the local-oscillator photon number cancels between mean and std,
        // so the unit-SNR delay depends on the signal photons alone
        let floor = min_detectable_du(n_signal, &spectral, var_p0, var_q1).unwrap();
        worst = worst.max((solved / floor - 1.0).abs());
    }
    let elapsed = start.elapsed();
    let ok = worst < 1e-10 && elapsed < Duration::from_secs(10);
    gate(
        "criterion 6d (unit-SNR delay vs analytic floor, 100 draws)",
        ok,
        &format!("worst relative deviation = {worst:.3e}, bound 1e-10, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_6e_variance_model_limits() {
    let start = Instant::now();
    let chain = reference_chain();
    let gamma_s = 9.817477042468103e6;

    let vacuum = SpopoParams {
        zeta: 0.814,
        gamma_s,
        r: 0.0,
        lambda_ratios: vec![1.0, -0.7],
    };
    let at_zero_pump = quadrature_variances(0, 2e6, &vacuum, &chain).unwrap();

    let pumped = SpopoParams {
        zeta: 0.814,
        gamma_s,
        r: 0.7,
        lambda_ratios: vec![1.0, -0.7],
    };
    let far = quadrature_variances(0, 1e12, &pumped, &chain).unwrap();

    let boundary = SpopoParams {
        zeta: 0.814,
        gamma_s,
        r: 1.0,
        lambda_ratios: vec![1.0],
    };
    let at_threshold = quadrature_variances(0, 0.0, &boundary, &chain).unwrap();
    let expected = 1.0 - 0.814 * chain.eta_tot();

    let dev_vacuum = (at_zero_pump.var_p - 1.0).abs().max((at_zero_pump.var_q - 1.0).abs());
    let dev_far = (far.var_p - 1.0).abs().max((far.var_q - 1.0).abs());
    let dev_boundary = (at_threshold.var_p / expected - 1.0).abs();
    let elapsed = start.elapsed();
    let ok = dev_vacuum < 1e-12 && dev_far < 1e-6 && dev_boundary < 1e-12
        && elapsed < Duration::from_secs(10);
    gate(
        "criterion 6e (variance model limiting cases)",
        ok,
        &format!(
            "zero pump dev = {dev_vacuum:.2e}, far-detuned dev = {dev_far:.2e}, threshold var_p dev = {dev_boundary:.2e}, {elapsed:.2?}"
        ),
    );
}
