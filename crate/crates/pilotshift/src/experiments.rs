//! Seeded Monte Carlo experiments and CSV emission.
//!
//! Every per-trial random stream is derived from `(master seed, lane, block,
//! trial)`, so trials are order-independent: running them sequentially, in
//! parallel, or in any order produces identical records. Aggregate rows are
//! always recomputable from the stored per-trial records.

use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::Path;

use crate::channel::{awgn, ChannelConfig};
use crate::detector::{detect, detect_fixed_gamma, DetectionConfig};
use crate::error::{Error, Result};
use crate::modem::{qpsk_demap, qpsk_map, random_bits};
use crate::numerics::fft;
use crate::pilot::{disassemble_frame, PilotLayout};
use crate::transmitter::{minimize_papr, transmit};

const LANE_DATA: u64 = 0;
const LANE_NOISE: u64 = 1;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent sub-stream seed for one (lane, block, trial) triple.
fn stream_seed(master: u64, lane: u64, block: u64, trial: u64) -> u64 {
    let mut h = splitmix64(master);
    h = splitmix64(h ^ lane);
    h = splitmix64(h ^ block);
    splitmix64(h ^ trial)
}

/// Shared settings for one Monte Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub subcarriers: usize,
    pub pilots: usize,
    pub pilot_power: f64,
    /// Oversampling factor for the PAPR selection metric.
    pub oversample: usize,
    /// SNR points in dB; `+inf` means noise-free.
    pub snr_db: Vec<f64>,
    pub frames: usize,
    pub seed: u64,
    pub detection: DetectionConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            subcarriers: 64,
            pilots: 4,
            pilot_power: 9.0,
            oversample: 8,
            snr_db: Vec::new(),
            frames: 100_000,
            seed: 1,
            detection: DetectionConfig::default(),
        }
    }
}

impl ExperimentConfig {
    fn layout(&self) -> Result<PilotLayout> {
        PilotLayout::new(self.subcarriers, self.pilots, 1, self.pilot_power)
    }

    fn data_bits(&self) -> usize {
        2 * (self.subcarriers - self.pilots)
    }

    fn validate(&self) -> Result<()> {
        if self.frames == 0 {
            return Err(Error::InvalidExperiment("frame count must be >= 1".into()));
        }
        self.layout()?;
        Ok(())
    }

    fn manifest(&self, experiment: &str, extra: &str) -> String {
        let snr = if self.snr_db.is_empty() {
            "-".to_string()
        } else {
            join_floats(&self.snr_db)
        };
        let mut line = format!(
            "experiment={} ns={} np={} pilot_power={} oversample={} snr={} frames={} seed={} \
             gamma={} gamma_step={} gamma_min={} power_metric={}",
            experiment,
            self.subcarriers,
            self.pilots,
            self.pilot_power,
            self.oversample,
            snr,
            self.frames,
            self.seed,
            self.detection.gamma,
            self.detection.gamma_step,
            self.detection.gamma_min,
            self.detection.use_power_metric,
        );
        if !extra.is_empty() {
            line.push(' ');
            line.push_str(extra);
        }
        line
    }
}

fn join_floats(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn channel_for(snr_db: f64, seed: u64) -> ChannelConfig {
    if snr_db.is_infinite() && snr_db > 0.0 {
        ChannelConfig { snr_db: None, seed }
    } else {
        ChannelConfig::with_snr(snr_db, seed)
    }
}

/// The default CCDF threshold grid: 4.0 to 12.0 dB in 0.1 dB steps.
pub fn threshold_grid() -> Vec<f64> {
    (40..=120).map(|t| t as f64 / 10.0).collect()
}

/// Empirical `Pr(sample > x)` for each grid point.
pub fn ccdf_curve(samples: &[f64], grid: &[f64]) -> Vec<f64> {
    debug_assert!(!samples.is_empty());
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    grid.iter()
        .map(|&x| {
            let above = sorted.len() - sorted.partition_point(|&s| s <= x);
            above as f64 / sorted.len() as f64
        })
        .collect()
}

/// Smallest observed value whose empirical exceedance probability is at most
/// `tail_probability`.
pub fn exceed_quantile(samples: &[f64], tail_probability: f64) -> f64 {
    assert!(!samples.is_empty());
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let allowed = (tail_probability * sorted.len() as f64).floor() as usize;
    sorted[sorted.len() - 1 - allowed.min(sorted.len() - 1)]
}

/// Horizontal distance between two CCDF curves at a tail probability, in dB.
pub fn ccdf_gap_db(baseline: &[f64], proposed: &[f64], tail_probability: f64) -> f64 {
    exceed_quantile(baseline, tail_probability) - exceed_quantile(proposed, tail_probability)
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

/// Per-trial PAPR pairs for the baseline (fixed offset 1) and the
/// pilot-shift transmitter, plus the CCDF grid they are reported on.
#[derive(Debug, Clone, PartialEq)]
pub struct CcdfResult {
    pub manifest: String,
    pub grid_db: Vec<f64>,
    pub baseline_papr_db: Vec<f64>,
    pub proposed_papr_db: Vec<f64>,
}

impl CcdfResult {
    /// `(threshold_db, ccdf_baseline, ccdf_proposed)` rows.
    pub fn rows(&self) -> Vec<(f64, f64, f64)> {
        if self.baseline_papr_db.is_empty() {
            return Vec::new();
        }
        let base = ccdf_curve(&self.baseline_papr_db, &self.grid_db);
        let prop = ccdf_curve(&self.proposed_papr_db, &self.grid_db);
        self.grid_db
            .iter()
            .zip(base)
            .zip(prop)
            .map(|((&x, b), p)| (x, b, p))
            .collect()
    }

    pub fn gap_db(&self, tail_probability: f64) -> f64 {
        ccdf_gap_db(
            &self.baseline_papr_db,
            &self.proposed_papr_db,
            tail_probability,
        )
    }
}

/// One conventional-OFDM CCDF curve per pilot power.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSweepResult {
    pub manifest: String,
    pub grid_db: Vec<f64>,
    pub curves: Vec<PowerCurve>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerCurve {
    pub pilot_power: f64,
    pub papr_db: Vec<f64>,
}

impl PowerSweepResult {
    /// `(pilot_power, threshold_db, ccdf)` rows.
    pub fn rows(&self) -> Vec<(f64, f64, f64)> {
        let mut rows = Vec::new();
        for curve in &self.curves {
            if curve.papr_db.is_empty() {
                continue;
            }
            for (&x, c) in self.grid_db.iter().zip(ccdf_curve(&curve.papr_db, &self.grid_db)) {
                rows.push((curve.pilot_power, x, c));
            }
        }
        rows
    }
}

/// Sent/detected offset per trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetectionTrial {
    pub offset_sent: usize,
    pub offset_detected: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionCell {
    pub snr_db: f64,
    pub trials: Vec<DetectionTrial>,
}

impl DetectionCell {
    pub fn errors(&self) -> usize {
        self.trials
            .iter()
            .filter(|t| t.offset_sent != t.offset_detected)
            .count()
    }

    pub fn error_pct(&self) -> f64 {
        100.0 * self.errors() as f64 / self.trials.len() as f64
    }
}

/// Block detection error per SNR point (soft threshold).
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionErrorResult {
    pub manifest: String,
    pub subcarriers: usize,
    pub spacing: usize,
    pub cells: Vec<DetectionCell>,
}

impl DetectionErrorResult {
    /// `(snr_db, n_s, r_spacing, error_pct, frames)` rows.
    pub fn rows(&self) -> Vec<(f64, usize, usize, f64, usize)> {
        self.cells
            .iter()
            .filter(|c| !c.trials.is_empty())
            .map(|c| {
                (
                    c.snr_db,
                    self.subcarriers,
                    self.spacing,
                    c.error_pct(),
                    c.trials.len(),
                )
            })
            .collect()
    }
}

/// One fixed-threshold sweep cell; a trial with no surviving candidate set
/// has `offset_detected: None` and counts as an error.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub pilot_power: f64,
    pub gamma: f64,
    pub snr_db: f64,
    pub offsets: Vec<(usize, Option<usize>)>,
}

impl SweepCell {
    pub fn errors(&self) -> usize {
        self.offsets
            .iter()
            .filter(|(sent, detected)| *detected != Some(*sent))
            .count()
    }

    pub fn error_pct(&self) -> f64 {
        100.0 * self.errors() as f64 / self.offsets.len() as f64
    }
}

/// Detection error over a (gamma, pilot power) grid at fixed SNR, with a
/// fixed threshold and no soft fallback.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionSweepResult {
    pub manifest: String,
    pub subcarriers: usize,
    pub spacing: usize,
    pub cells: Vec<SweepCell>,
}

impl DetectionSweepResult {
    /// `(pilot_power, gamma, snr_db, n_s, r_spacing, error_pct, frames)` rows.
    pub fn rows(&self) -> Vec<(f64, f64, f64, usize, usize, f64, usize)> {
        self.cells
            .iter()
            .filter(|c| !c.offsets.is_empty())
            .map(|c| {
                (
                    c.pilot_power,
                    c.gamma,
                    c.snr_db,
                    self.subcarriers,
                    self.spacing,
                    c.error_pct(),
                    c.offsets.len(),
                )
            })
            .collect()
    }
}

/// Bit errors for one frame under both receivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BerTrial {
    pub bits: usize,
    pub errors_known: usize,
    pub errors_detected: usize,
    pub offset_sent: usize,
    pub offset_detected: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerPoint {
    pub snr_db: f64,
    pub trials: Vec<BerTrial>,
}

impl BerPoint {
    pub fn total_bits(&self) -> usize {
        self.trials.iter().map(|t| t.bits).sum()
    }

    pub fn ber_known(&self) -> f64 {
        self.trials.iter().map(|t| t.errors_known).sum::<usize>() as f64
            / self.total_bits() as f64
    }

    pub fn ber_detected(&self) -> f64 {
        self.trials.iter().map(|t| t.errors_detected).sum::<usize>() as f64
            / self.total_bits() as f64
    }
}

/// BER with known pilot locations versus blindly detected ones.
#[derive(Debug, Clone, PartialEq)]
pub struct BerResult {
    pub manifest: String,
    pub points: Vec<BerPoint>,
}

impl BerResult {
    /// `(snr_db, ber_known, ber_detected, bits)` rows.
    pub fn rows(&self) -> Vec<(f64, f64, f64, usize)> {
        self.points
            .iter()
            .filter(|p| !p.trials.is_empty())
            .map(|p| (p.snr_db, p.ber_known(), p.ber_detected(), p.total_bits()))
            .collect()
    }
}

/// Tagged result of any experiment, ready for CSV emission.
#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentResult {
    Ccdf(CcdfResult),
    PowerSweep(PowerSweepResult),
    DetectionError(DetectionErrorResult),
    DetectionSweep(DetectionSweepResult),
    Ber(BerResult),
}

// ---------------------------------------------------------------------------
// Runners
// ---------------------------------------------------------------------------

fn collect_trials<T: Send>(
    frames: usize,
    run: impl Fn(usize) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    (0..frames)
        .into_par_iter()
        .map(run)
        .collect::<Vec<Result<T>>>()
        .into_iter()
        .collect()
}

/// Baseline versus pilot-shift PAPR, both measured at the configured
/// oversampling factor, reported as CCDF curves.
pub fn run_ccdf(config: &ExperimentConfig) -> Result<CcdfResult> {
    config.validate()?;
    let layout = config.layout()?;
    let bits_per_frame = config.data_bits();
    let pairs = collect_trials(config.frames, |trial| {
        use crate::numerics::{oversampled_ifft, papr_db};
        use crate::pilot::assemble_frame;
        let bits = random_bits(
            bits_per_frame,
            stream_seed(config.seed, LANE_DATA, 0, trial as u64),
        );
        let data = qpsk_map(&bits)?;
        // conventional system: the pilots stay at the first offset
        let baseline_papr = papr_db(&oversampled_ifft(
            &assemble_frame(&data, &layout)?,
            config.oversample,
        )?)?;
        let best = minimize_papr(&data, &layout, config.oversample, None)?;
        Ok((baseline_papr, best.best_papr_db))
    })?;
    let (baseline_papr_db, proposed_papr_db) = pairs.into_iter().unzip();
    Ok(CcdfResult {
        manifest: config.manifest("ccdf", ""),
        grid_db: threshold_grid(),
        baseline_papr_db,
        proposed_papr_db,
    })
}

/// Conventional OFDM (fixed offset 1) CCDF for each pilot power.
pub fn run_pilot_power_sweep(
    config: &ExperimentConfig,
    powers: &[f64],
) -> Result<PowerSweepResult> {
    config.validate()?;
    if powers.is_empty() {
        return Err(Error::InvalidExperiment(
            "power sweep needs at least one pilot power".into(),
        ));
    }
    let bits_per_frame = config.data_bits();
    let mut curves = Vec::with_capacity(powers.len());
    for (block, &power) in powers.iter().enumerate() {
        let layout = PilotLayout::new(config.subcarriers, config.pilots, 1, power)?;
        let papr_db = collect_trials(config.frames, |trial| {
            use crate::numerics::{oversampled_ifft, papr_db};
            use crate::pilot::assemble_frame;
            // conventional OFDM: fixed first offset, no shift search
            let bits = random_bits(
                bits_per_frame,
                stream_seed(config.seed, LANE_DATA, block as u64, trial as u64),
            );
            let data = qpsk_map(&bits)?;
            papr_db(&oversampled_ifft(
                &assemble_frame(&data, &layout)?,
                config.oversample,
            )?)
        })?;
        curves.push(PowerCurve {
            pilot_power: power,
            papr_db,
        });
    }
    Ok(PowerSweepResult {
        manifest: config.manifest("power-sweep", &format!("powers={}", join_floats(powers))),
        grid_db: threshold_grid(),
        curves,
    })
}

fn transmit_and_receive(
    config: &ExperimentConfig,
    layout: &PilotLayout,
    block: u64,
    trial: u64,
    snr_db: f64,
) -> Result<(Vec<bool>, usize, crate::numerics::FreqFrame)> {
    let bits = random_bits(
        config.data_bits(),
        stream_seed(config.seed, LANE_DATA, block, trial),
    );
    let data = qpsk_map(&bits)?;
    let best = minimize_papr(&data, layout, config.oversample, None)?;
    let tx = transmit(&best, 1)?;
    let rx = awgn(
        &tx,
        &channel_for(snr_db, stream_seed(config.seed, LANE_NOISE, block, trial)),
    );
    Ok((bits, best.best_offset, fft(&rx)?))
}

/// Block detection error per SNR point with the soft threshold.
pub fn run_detection_error(config: &ExperimentConfig) -> Result<DetectionErrorResult> {
    config.validate()?;
    let layout = config.layout()?;
    let mut cells = Vec::with_capacity(config.snr_db.len());
    for (block, &snr_db) in config.snr_db.iter().enumerate() {
        let trials = collect_trials(config.frames, |trial| {
            let (_, offset_sent, received) =
                transmit_and_receive(config, &layout, block as u64, trial as u64, snr_db)?;
            let detected = detect(&received, &layout, &config.detection);
            Ok(DetectionTrial {
                offset_sent,
                offset_detected: detected.offset,
            })
        })?;
        cells.push(DetectionCell { snr_db, trials });
    }
    Ok(DetectionErrorResult {
        manifest: config.manifest("detect-error", ""),
        subcarriers: config.subcarriers,
        spacing: config.subcarriers / config.pilots,
        cells,
    })
}

/// Detection error over a (gamma, pilot power) grid at the first configured
/// SNR (0 dB if none), with a fixed threshold and no soft fallback.
pub fn run_detection_sweep(
    config: &ExperimentConfig,
    gammas: &[f64],
    powers: &[f64],
) -> Result<DetectionSweepResult> {
    config.validate()?;
    if gammas.is_empty() || powers.is_empty() {
        return Err(Error::InvalidExperiment(
            "threshold sweep needs at least one gamma and one pilot power".into(),
        ));
    }
    let snr_db = config.snr_db.first().copied().unwrap_or(0.0);
    let mut cells = Vec::with_capacity(gammas.len() * powers.len());
    for (pi, &power) in powers.iter().enumerate() {
        let layout = PilotLayout::new(config.subcarriers, config.pilots, 1, power)?;
        let sub = ExperimentConfig {
            pilot_power: power,
            ..config.clone()
        };
        for &gamma in gammas {
            let block = pi as u64; // same trials across gammas; only the threshold moves
            let offsets = collect_trials(config.frames, |trial| {
                let (_, offset_sent, received) =
                    transmit_and_receive(&sub, &layout, block, trial as u64, snr_db)?;
                let detected = detect_fixed_gamma(
                    &received,
                    &layout,
                    gamma,
                    config.detection.use_power_metric,
                );
                Ok((offset_sent, detected.map(|d| d.offset)))
            })?;
            cells.push(SweepCell {
                pilot_power: power,
                gamma,
                snr_db,
                offsets,
            });
        }
    }
    Ok(DetectionSweepResult {
        manifest: config.manifest(
            "detect-error-sweep",
            &format!(
                "powers={} gammas={} sweep_snr={}",
                join_floats(powers),
                join_floats(gammas),
                snr_db
            ),
        ),
        subcarriers: config.subcarriers,
        spacing: config.subcarriers / config.pilots,
        cells,
    })
}

/// BER per SNR point for the known-pilot receiver and the blind one.
pub fn run_ber(config: &ExperimentConfig) -> Result<BerResult> {
    config.validate()?;
    let layout = config.layout()?;
    let mut points = Vec::with_capacity(config.snr_db.len());
    for (block, &snr_db) in config.snr_db.iter().enumerate() {
        let trials = collect_trials(config.frames, |trial| {
            let (bits, offset_sent, received) =
                transmit_and_receive(config, &layout, block as u64, trial as u64, snr_db)?;

            let true_positions = layout.with_offset(offset_sent)?.positions();
            let known_bits = qpsk_demap(&disassemble_frame(&received, &true_positions)?);

            let detection = detect(&received, &layout, &config.detection);
            let detected_bits = qpsk_demap(&disassemble_frame(&received, &detection.positions)?);

            let count_errors = |estimate: &[bool]| {
                estimate
                    .iter()
                    .zip(&bits)
                    .filter(|(a, b)| a != b)
                    .count()
            };
            Ok(BerTrial {
                bits: bits.len(),
                errors_known: count_errors(&known_bits),
                errors_detected: count_errors(&detected_bits),
                offset_sent,
                offset_detected: detection.offset,
            })
        })?;
        points.push(BerPoint { snr_db, trials });
    }
    Ok(BerResult {
        manifest: config.manifest("ber", ""),
        points,
    })
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Write an experiment result as CSV: a comment-prefixed manifest line with
/// the resolved configuration and seed, a header, then one row per aggregate
/// point. Output is byte-identical for identical configs and seeds.
pub fn write_csv(result: &ExperimentResult, path: &Path) -> Result<()> {
    let text = render_csv(result);
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// The exact CSV text [`write_csv`] emits.
pub fn render_csv(result: &ExperimentResult) -> String {
    let mut out = String::new();
    match result {
        ExperimentResult::Ccdf(r) => {
            let _ = writeln!(out, "# {}", r.manifest);
            let _ = writeln!(out, "threshold_db,ccdf_baseline,ccdf_proposed");
            for (x, b, p) in r.rows() {
                let _ = writeln!(out, "{x},{b},{p}");
            }
        }
        ExperimentResult::PowerSweep(r) => {
            let _ = writeln!(out, "# {}", r.manifest);
            let _ = writeln!(out, "pilot_power,threshold_db,ccdf");
            for (power, x, c) in r.rows() {
                let _ = writeln!(out, "{power},{x},{c}");
            }
        }
        ExperimentResult::DetectionError(r) => {
            let _ = writeln!(out, "# {}", r.manifest);
            let _ = writeln!(out, "snr_db,n_s,r_spacing,error_pct,frames");
            for (snr, n_s, spacing, pct, frames) in r.rows() {
                let _ = writeln!(out, "{snr},{n_s},{spacing},{pct},{frames}");
            }
        }
        ExperimentResult::DetectionSweep(r) => {
            let _ = writeln!(out, "# {}", r.manifest);
            let _ = writeln!(out, "pilot_power,gamma,snr_db,n_s,r_spacing,error_pct,frames");
            for (power, gamma, snr, n_s, spacing, pct, frames) in r.rows() {
                let _ = writeln!(out, "{power},{gamma},{snr},{n_s},{spacing},{pct},{frames}");
            }
        }
        ExperimentResult::Ber(r) => {
            let _ = writeln!(out, "# {}", r.manifest);
            let _ = writeln!(out, "snr_db,ber_known,ber_detected,bits");
            for (snr, known, detected, bits) in r.rows() {
                let _ = writeln!(out, "{snr},{known},{detected},{bits}");
            }
        }
    }
    out
}
