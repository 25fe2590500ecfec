//! The pilot-shifting PAPR minimizer: evaluate the cyclic pilot offsets and
//! transmit the arrangement with the lowest PAPR. No side information about
//! the chosen offset is ever attached to the signal.

use num_complex::Complex64;

use crate::error::Result;
use crate::numerics::{oversampled_ifft, papr_db, FreqFrame, TimeSignal};
use crate::pilot::{assemble_frame, PilotLayout};

/// Outcome of the shift search: the winning arrangement and its PAPR.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftSearchResult {
    /// First-pilot offset of the winning arrangement, `1..=spacing`.
    pub best_offset: usize,
    pub best_papr_db: f64,
    /// Frequency-domain frame of the winning arrangement.
    pub frame: FreqFrame,
    /// Number of offsets evaluated before stopping.
    pub candidates_evaluated: usize,
}

/// Search the pilot offsets `1, 2, ..., spacing` for the arrangement with the
/// lowest PAPR, measured on the `oversample`-times interpolated signal.
///
/// With `early_exit_db` set, the search stops at the first arrangement whose
/// PAPR falls below the threshold; otherwise all offsets are evaluated and
/// the global minimum is returned. Ties go to the smallest offset.
pub fn minimize_papr(
    data: &[Complex64],
    layout_base: &PilotLayout,
    oversample: usize,
    early_exit_db: Option<f64>,
) -> Result<ShiftSearchResult> {
    let spacing = layout_base.spacing();
    let mut best: Option<(f64, usize, FreqFrame)> = None;
    let mut evaluated = 0;
    for offset in 1..=spacing {
        let layout = layout_base.with_offset(offset)?;
        let frame = assemble_frame(data, &layout)?;
        let papr = papr_db(&oversampled_ifft(&frame, oversample)?)?;
        evaluated += 1;
        if best.as_ref().is_none_or(|(b, _, _)| papr < *b) {
            best = Some((papr, offset, frame));
        }
        if early_exit_db.is_some_and(|threshold| papr < threshold) {
            break;
        }
    }
    let (best_papr_db, best_offset, frame) = best.expect("spacing is at least 1");
    Ok(ShiftSearchResult {
        best_offset,
        best_papr_db,
        frame,
        candidates_evaluated: evaluated,
    })
}

/// Synthesize the time-domain signal for the winning arrangement.
///
/// The oversampling factor used here is independent of the one used for the
/// PAPR selection metric; detection and BER runs transmit at `l_tx = 1`.
pub fn transmit(result: &ShiftSearchResult, l_tx: usize) -> Result<TimeSignal> {
    oversampled_ifft(&result.frame, l_tx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modem::{qpsk_map, random_bits};
    use crate::numerics::fft;

    fn data_for(layout: &PilotLayout, seed: u64) -> Vec<Complex64> {
        qpsk_map(&random_bits(
            2 * (layout.subcarriers - layout.pilots),
            seed,
        ))
        .unwrap()
    }

    #[test]
    fn all_pilot_frame_has_a_single_candidate() {
        let layout = PilotLayout::new(8, 8, 1, 9.0).unwrap();
        let result = minimize_papr(&[], &layout, 4, None).unwrap();
        assert_eq!(result.best_offset, 1);
        assert_eq!(result.candidates_evaluated, 1);
    }

    #[test]
    fn never_worse_than_the_first_offset() {
        let layout = PilotLayout::new(64, 4, 1, 9.0).unwrap();
        for seed in 0..50u64 {
            let data = data_for(&layout, seed);
            let first = papr_db(
                &oversampled_ifft(&assemble_frame(&data, &layout).unwrap(), 8).unwrap(),
            )
            .unwrap();
            let result = minimize_papr(&data, &layout, 8, None).unwrap();
            assert!(result.best_papr_db <= first + 1e-12, "seed {seed}");
        }
    }

    #[test]
    fn matches_exhaustive_recomputation() {
        let layout = PilotLayout::new(64, 4, 1, 9.0).unwrap();
        for seed in 0..20u64 {
            let data = data_for(&layout, 100 + seed);
            let result = minimize_papr(&data, &layout, 8, None).unwrap();
            assert_eq!(result.candidates_evaluated, layout.spacing());

            let mut best = f64::INFINITY;
            let mut best_offset = 0;
            for offset in 1..=layout.spacing() {
                let frame =
                    assemble_frame(&data, &layout.with_offset(offset).unwrap()).unwrap();
                let papr = papr_db(&oversampled_ifft(&frame, 8).unwrap()).unwrap();
                if papr < best {
                    best = papr;
                    best_offset = offset;
                }
            }
            assert_eq!(result.best_offset, best_offset, "seed {seed}");
            assert!((result.best_papr_db - best).abs() < 1e-12);
        }
    }

    #[test]
    fn search_is_deterministic() {
        let layout = PilotLayout::new(64, 4, 1, 9.0).unwrap();
        let data = data_for(&layout, 3);
        assert_eq!(
            minimize_papr(&data, &layout, 8, None).unwrap(),
            minimize_papr(&data, &layout, 8, None).unwrap()
        );
    }

    #[test]
    fn candidate_count_halves_when_pilots_double() {
        let data4 = data_for(&PilotLayout::new(64, 4, 1, 9.0).unwrap(), 7);
        let data8 = data_for(&PilotLayout::new(64, 8, 1, 9.0).unwrap(), 7);
        let r4 = minimize_papr(&data4, &PilotLayout::new(64, 4, 1, 9.0).unwrap(), 4, None)
            .unwrap()
            .candidates_evaluated;
        let r8 = minimize_papr(&data8, &PilotLayout::new(64, 8, 1, 9.0).unwrap(), 4, None)
            .unwrap()
            .candidates_evaluated;
        assert_eq!(r4, 16);
        assert_eq!(r8, 8);
    }

    #[test]
    fn early_exit_stops_at_first_hit() {
        let layout = PilotLayout::new(64, 4, 1, 9.0).unwrap();
        let data = data_for(&layout, 11);
        // A threshold above any possible PAPR triggers on the first offset.
        let result = minimize_papr(&data, &layout, 8, Some(100.0)).unwrap();
        assert_eq!(result.candidates_evaluated, 1);
        assert_eq!(result.best_offset, 1);
        // An unreachable threshold degenerates to the exhaustive search.
        let exhaustive = minimize_papr(&data, &layout, 8, Some(-100.0)).unwrap();
        assert_eq!(exhaustive, minimize_papr(&data, &layout, 8, None).unwrap());
    }

    #[test]
    fn transmit_round_trips_the_frame() {
        let layout = PilotLayout::new(64, 4, 1, 9.0).unwrap();
        let data = data_for(&layout, 13);
        let result = minimize_papr(&data, &layout, 8, None).unwrap();
        let recovered = fft(&transmit(&result, 1).unwrap()).unwrap();
        let err = recovered
            .symbols
            .iter()
            .zip(&result.frame.symbols)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-9);
    }
}
