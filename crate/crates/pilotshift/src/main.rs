use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use pilotshift::config::{OneOrMany, Overrides, RunSettings};
use pilotshift::error::{Error, Result};
use pilotshift::experiments::{
    run_ber, run_ccdf, run_detection_error, run_detection_sweep, run_pilot_power_sweep,
    write_csv, ExperimentResult,
};

/// Baseband OFDM Monte Carlo runs: pilot-shifting PAPR reduction at the
/// transmitter, blind pilot-location detection at the receiver. Results go
/// to CSV, reproducibly for a given seed.
#[derive(Parser)]
#[command(name = "pilotshift", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// PAPR CCDF of the pilot-shift transmitter versus the fixed arrangement.
    Ccdf(RunArgs),
    /// Conventional-OFDM PAPR CCDF for each pilot power in the list.
    PowerSweep(RunArgs),
    /// Blind-detection block error rate per SNR point. With a gamma or
    /// pilot-power list this becomes a fixed-threshold grid sweep.
    DetectError(RunArgs),
    /// BER with known pilot locations versus blindly detected ones.
    Ber(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat key-value config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Total subcarriers per OFDM frame (power of two).
    #[arg(long)]
    ns: Option<usize>,
    /// Pilot subcarriers per frame; must divide the subcarrier count.
    #[arg(long)]
    np: Option<usize>,
    /// Pilot power, linear. Accepts a comma list for sweeps.
    #[arg(long, value_delimiter = ',')]
    pilot_power: Option<Vec<f64>>,
    /// Oversampling factor for the PAPR measurement.
    #[arg(long)]
    oversample: Option<usize>,
    /// SNR points in dB, repeatable or comma-separated; `inf` is noise-free.
    #[arg(long, value_delimiter = ',')]
    snr: Option<Vec<f64>>,
    /// OFDM frames per Monte Carlo point.
    #[arg(long)]
    frames: Option<usize>,
    /// Master seed; all per-trial streams derive from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Detection threshold fraction. Accepts a comma list for sweeps.
    #[arg(long, value_delimiter = ',')]
    gamma: Option<Vec<f64>>,
    /// Soft-threshold decrement.
    #[arg(long)]
    gamma_step: Option<f64>,
    /// Soft-threshold floor.
    #[arg(long)]
    gamma_min: Option<f64>,
    /// Output CSV path; defaults to `<subcommand>.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn settings(&self) -> Result<RunSettings> {
        let file = match &self.config {
            Some(path) => Some(Overrides::from_file(path)?),
            None => None,
        };
        let flags = Overrides {
            ns: self.ns,
            np: self.np,
            pilot_power: self.pilot_power.clone().map(OneOrMany::Many),
            oversample: self.oversample,
            snr: self.snr.clone().map(OneOrMany::Many),
            frames: self.frames,
            seed: self.seed,
            gamma: self.gamma.clone().map(OneOrMany::Many),
            gamma_step: self.gamma_step,
            gamma_min: self.gamma_min,
            out: self.out.clone(),
        };
        Ok(RunSettings::resolve(file, flags))
    }
}

fn require_snr(settings: &RunSettings, what: &str) -> Result<()> {
    if settings.snr_db.is_empty() {
        return Err(Error::InvalidExperiment(format!(
            "{what} needs at least one --snr point (use `inf` for noise-free)"
        )));
    }
    Ok(())
}

fn run(command: &Command) -> Result<()> {
    let (settings, default_out) = match command {
        Command::Ccdf(args) => (args.settings()?, "ccdf.csv"),
        Command::PowerSweep(args) => (args.settings()?, "power_sweep.csv"),
        Command::DetectError(args) => (args.settings()?, "detect_error.csv"),
        Command::Ber(args) => (args.settings()?, "ber.csv"),
    };
    let out = settings
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(default_out));

    let result = match command {
        Command::Ccdf(_) => {
            let config = settings.experiment_config()?;
            let ccdf = run_ccdf(&config)?;
            if config.frames >= 10_000 {
                println!(
                    "ccdf gap: {:.2} dB at 1e-2, {:.2} dB at 1e-3",
                    ccdf.gap_db(1e-2),
                    ccdf.gap_db(1e-3)
                );
            }
            ExperimentResult::Ccdf(ccdf)
        }
        Command::PowerSweep(_) => {
            let config = settings.experiment_config_for_sweep()?;
            ExperimentResult::PowerSweep(run_pilot_power_sweep(
                &config,
                &settings.pilot_powers,
            )?)
        }
        Command::DetectError(_) => {
            if settings.gammas.len() > 1 || settings.pilot_powers.len() > 1 {
                let config = settings.experiment_config_for_sweep()?;
                let sweep =
                    run_detection_sweep(&config, &settings.gammas, &settings.pilot_powers)?;
                for row in sweep.rows() {
                    println!(
                        "P={} gamma={} snr={} dB: {:.4}% of {} frames",
                        row.0, row.1, row.2, row.5, row.6
                    );
                }
                ExperimentResult::DetectionSweep(sweep)
            } else {
                require_snr(&settings, "detect-error")?;
                let config = settings.experiment_config()?;
                let errors = run_detection_error(&config)?;
                for row in errors.rows() {
                    println!("snr={} dB: {:.4}% of {} frames", row.0, row.3, row.4);
                }
                ExperimentResult::DetectionError(errors)
            }
        }
        Command::Ber(_) => {
            require_snr(&settings, "ber")?;
            let config = settings.experiment_config()?;
            let ber = run_ber(&config)?;
            for row in ber.rows() {
                println!(
                    "snr={} dB: known {:.3e}, detected {:.3e} over {} bits",
                    row.0, row.1, row.2, row.3
                );
            }
            ExperimentResult::Ber(ber)
        }
    };

    write_csv(&result, &out)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
