//! Complex FFT/IFFT, oversampled time-domain synthesis and PAPR measurement.
//!
//! Both transform directions use the unitary 1/sqrt(N) convention, so
//! Parseval's identity holds without extra bookkeeping: a frequency frame and
//! its time-domain signal carry the same total power. Transforms are radix-2
//! and accept power-of-two lengths only.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A frequency-domain OFDM frame: one complex symbol per subcarrier.
///
/// Pilot arithmetic elsewhere in the crate addresses subcarriers with
/// 1-based indices; `symbols[0]` is subcarrier 1.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqFrame {
    pub symbols: Vec<Complex64>,
}

impl FreqFrame {
    pub fn new(symbols: Vec<Complex64>) -> Self {
        Self { symbols }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// A complex baseband time-domain signal, possibly oversampled.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSignal {
    pub samples: Vec<Complex64>,
    pub oversample_factor: usize,
}

impl TimeSignal {
    pub fn new(samples: Vec<Complex64>, oversample_factor: usize) -> Self {
        Self {
            samples,
            oversample_factor,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

fn require_power_of_two(len: usize) -> Result<()> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { len });
    }
    Ok(())
}

/// In-place radix-2 decimation-in-time transform, unscaled.
fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());

    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j ^= bit;
        if i < j {
            buf.swap(i, j);
        }
    }

    // Butterfly stages with incrementally updated twiddles.
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = Complex64::from_polar(1.0, sign * 2.0 * PI / len as f64);
        for start in (0..n).step_by(len) {
            let mut w = Complex64::new(1.0, 0.0);
            for k in start..start + half {
                let a = buf[k];
                let b = buf[k + half] * w;
                buf[k] = a + b;
                buf[k + half] = a - b;
                w *= step;
            }
        }
        len <<= 1;
    }
}

/// Unitary inverse transform: `x[n] = (1/sqrt(N)) * sum_k X[k] e^{j2πkn/N}`.
pub fn ifft(frame: &FreqFrame) -> Result<TimeSignal> {
    require_power_of_two(frame.len())?;
    let mut samples = frame.symbols.clone();
    fft_in_place(&mut samples, true);
    let scale = 1.0 / (samples.len() as f64).sqrt();
    for s in &mut samples {
        *s *= scale;
    }
    Ok(TimeSignal::new(samples, 1))
}

/// Unitary forward transform; exact inverse of [`ifft`].
pub fn fft(signal: &TimeSignal) -> Result<FreqFrame> {
    require_power_of_two(signal.len())?;
    let mut symbols = signal.samples.clone();
    fft_in_place(&mut symbols, false);
    let scale = 1.0 / (symbols.len() as f64).sqrt();
    for s in &mut symbols {
        *s *= scale;
    }
    Ok(FreqFrame::new(symbols))
}

/// Inverse transform with `oversample`-times trigonometric interpolation.
///
/// The frequency vector is zero-padded to `N*L` samples by inserting zeros
/// mid-band, between the first N/2 and the last N/2 bins, and the result is
/// rescaled so the average sample power equals that of the critically sampled
/// (`L = 1`) signal. Sampling the output at every L-th point recovers the
/// `L = 1` signal exactly, which is what makes the oversampled PAPR an upper
/// bound on the Nyquist-sampled PAPR.
pub fn oversampled_ifft(frame: &FreqFrame, oversample: usize) -> Result<TimeSignal> {
    let n = frame.len();
    require_power_of_two(n)?;
    if oversample == 0 || (oversample > 1 && n < 2) {
        return Err(Error::InvalidOversample {
            factor: oversample,
            len: n,
        });
    }
    if oversample == 1 {
        return ifft(frame);
    }
    let total = n * oversample;
    // Radix-2 only: the padded length must stay a power of two.
    require_power_of_two(total)?;

    let mut padded = vec![Complex64::default(); total];
    padded[..n / 2].copy_from_slice(&frame.symbols[..n / 2]);
    padded[total - n / 2..].copy_from_slice(&frame.symbols[n / 2..]);
    fft_in_place(&mut padded, true);

    // 1/sqrt(N) = sqrt(L) * (unitary 1/sqrt(N*L)); the sqrt(L) keeps the mean
    // sample power equal to the L = 1 signal.
    let scale = 1.0 / (n as f64).sqrt();
    for s in &mut padded {
        *s *= scale;
    }
    Ok(TimeSignal::new(padded, oversample))
}

/// Peak-to-average power ratio as a linear ratio: `max|x|^2 / mean|x|^2`.
pub fn papr_linear(signal: &TimeSignal) -> Result<f64> {
    if signal.is_empty() {
        return Err(Error::ZeroSignal);
    }
    let mut peak = 0.0f64;
    let mut sum = 0.0f64;
    for s in &signal.samples {
        let p = s.norm_sqr();
        peak = peak.max(p);
        sum += p;
    }
    if sum == 0.0 {
        return Err(Error::ZeroSignal);
    }
    Ok(peak / (sum / signal.len() as f64))
}

/// Peak-to-average power ratio in dB.
pub fn papr_db(signal: &TimeSignal) -> Result<f64> {
    Ok(10.0 * papr_linear(signal)?.log10())
}
