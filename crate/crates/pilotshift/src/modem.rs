//! Bit generation and Gray-coded QPSK mapping.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};

/// Map a bit stream onto unit-power QPSK symbols, two bits per symbol.
///
/// Gray mapping: the first bit selects the sign of the real axis, the second
/// the sign of the imaginary axis, `0` mapping to `+1/sqrt(2)`.
pub fn qpsk_map(bits: &[bool]) -> Result<Vec<Complex64>> {
    if bits.len() % 2 != 0 {
        return Err(Error::OddBitCount { len: bits.len() });
    }
    Ok(bits
        .chunks_exact(2)
        .map(|pair| {
            let re = if pair[0] { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
            let im = if pair[1] { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
            Complex64::new(re, im)
        })
        .collect())
}

/// Hard-decision demapping: an independent sign decision per axis.
pub fn qpsk_demap(symbols: &[Complex64]) -> Vec<bool> {
    symbols
        .iter()
        .flat_map(|s| [s.re < 0.0, s.im < 0.0])
        .collect()
}

/// Deterministic i.i.d. uniform bit stream for a given seed.
pub fn random_bits(count: usize, seed: u64) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.random()).collect()
}
