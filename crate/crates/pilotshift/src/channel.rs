//! Static AWGN channel with calibrated SNR.
//!
//! SNR is referenced to unit data-symbol power: at `snr_db` the per-sample
//! complex noise variance is `sigma^2 = 10^(-snr_db/10)`, split evenly
//! between the real and imaginary axes. Under the unitary FFT the same
//! variance shows up per subcarrier.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::numerics::TimeSignal;

/// Channel settings. `snr_db: None` (or `+inf`) is the noise-free channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    pub snr_db: Option<f64>,
    pub seed: u64,
}

impl ChannelConfig {
    pub fn noise_free() -> Self {
        Self {
            snr_db: None,
            seed: 0,
        }
    }

    pub fn with_snr(snr_db: f64, seed: u64) -> Self {
        Self {
            snr_db: Some(snr_db),
            seed,
        }
    }
}

/// Total complex noise variance at a given SNR.
pub fn noise_variance(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

/// Add circularly symmetric complex Gaussian noise, deterministically for a
/// given seed. The noise-free configuration returns the input unchanged.
pub fn awgn(signal: &TimeSignal, config: &ChannelConfig) -> TimeSignal {
    let snr_db = match config.snr_db {
        Some(snr) if !(snr.is_infinite() && snr > 0.0) => snr,
        _ => return signal.clone(),
    };
    let per_axis_sigma = (noise_variance(snr_db) / 2.0).sqrt();
    let normal = Normal::new(0.0, per_axis_sigma).expect("sigma is finite and non-negative");
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let samples = signal
        .samples
        .iter()
        .map(|s| s + Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng)))
        .collect();
    TimeSignal::new(samples, signal.oversample_factor)
}
