//! Baseband OFDM link-level simulator built around a peak-to-average power
//! ratio (PAPR) reduction scheme that cyclically shifts the comb of pilot
//! subcarriers and transmits the arrangement with the lowest PAPR, sending no
//! side information. The receiver recovers the pilot locations blindly from
//! the pilots' higher power and their fixed mutual spacing.
//!
//! Module map:
//!
//! - [`numerics`]  - unitary radix-2 FFT/IFFT, oversampled synthesis, PAPR.
//! - [`modem`]     - bit generation and Gray-coded QPSK mapping.
//! - [`pilot`]     - pilot geometry, frame assembly, wrap-around indexing.
//! - [`transmitter`] - the PAPR-minimizing pilot-shift search.
//! - [`channel`]   - seeded complex AWGN.
//! - [`detector`]  - blind pilot-location detection with a soft threshold.
//! - [`experiments`] - seeded Monte Carlo runs (CCDF, detection error, BER)
//!   with CSV output.
//! - [`config`]    - run configuration files and override resolution for the
//!   CLI.

pub mod channel;
pub mod config;
pub mod detector;
pub mod error;
pub mod experiments;
pub mod modem;
pub mod numerics;
pub mod pilot;
pub mod transmitter;

pub use error::{Error, Result};
