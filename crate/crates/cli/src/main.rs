//! `combtime`: analytic quantum limits and Monte-Carlo homodyne experiments
//! for timing measurements with pulsed light.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 compute or I/O
//! failure.

// Same idiom as the core crate: `!(v > 0)` rejects NaN, `v <= 0` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;
mod presets;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "combtime",
    version,
    about = "Quantum-limited timing toolkit: analytic limits and Monte-Carlo homodyne experiments for pulsed combs"
)]
pub(crate) struct Cli {
    /// TOML run configuration; mutually exclusive with --preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Built-in configuration by name; mutually exclusive with --config.
    #[arg(long, global = true)]
    preset: Option<String>,

    /// Output directory for emitted artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Overrides the RNG seed from the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Artifacts to write next to the stdout table.
    #[arg(long, global = true, value_delimiter = ',', default_value = "csv")]
    emit: Vec<Emit>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum Emit {
    Csv,
    Svg,
}

#[derive(Debug, Subcommand)]
pub(crate) enum Command {
    /// Analytic quantum limits and the projected delay floor.
    Sql {
        /// Mean powers to tabulate (µW, comma separated); defaults to the
        /// configured power.
        #[arg(long = "power-uw", value_delimiter = ',')]
        power_uw: Vec<f64>,

        /// Squeezing levels to tabulate (dB below shot noise, comma
        /// separated); defaults to the configured state.
        #[arg(long = "squeeze-db", value_delimiter = ',')]
        squeeze_db: Vec<f64>,
    },

    /// Quadrature noise spectra of the cavity output modes.
    SqueezeSpectrum {
        /// Mode indices to evaluate (comma separated); defaults to the
        /// configured list.
        #[arg(long, value_delimiter = ',')]
        k: Vec<usize>,
    },

    /// Monte-Carlo noise variance during a local-oscillator phase ramp.
    PhaseScan {
        /// Number of scan points.
        #[arg(long)]
        n_points: Option<usize>,

        /// Noise draws per scan point.
        #[arg(long)]
        draws_per_point: Option<usize>,
    },

    /// Simulated timing measurement: homodyne record, averaged spectrum,
    /// and the delay floor read off the tone.
    Timing {
        /// Overrides the modulation drive amplitude (V).
        #[arg(long)]
        applied_volts: Option<f64>,
    },

    /// Analytic delay floor swept along one parameter axis.
    Sweep {
        /// Axis: power-uw, squeeze-db, pump-rate, or omega-rad-per-s.
        #[arg(long)]
        axis: Option<String>,

        /// First axis value.
        #[arg(long)]
        start: Option<f64>,

        /// Last axis value.
        #[arg(long)]
        stop: Option<f64>,

        /// Number of grid points.
        #[arg(long)]
        points: Option<usize>,

        /// Space the grid logarithmically.
        #[arg(long)]
        log: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
