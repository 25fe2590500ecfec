//! Pilot geometry: positions, frame assembly and the 1-based wrap-around
//! index arithmetic shared between the transmitter and the detector.
//!
//! Subcarriers are addressed 1-based throughout pilot arithmetic; conversions
//! to 0-based vector indices happen at the boundary of this module.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::FreqFrame;

/// An equispaced, equipowered pilot comb inside an OFDM frame.
///
/// `offset` is the 1-based index of the first pilot and is the single degree
/// of freedom the transmitter searches over; it satisfies
/// `1 <= offset <= spacing` where `spacing = subcarriers / pilots`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PilotLayout {
    pub subcarriers: usize,
    pub pilots: usize,
    pub offset: usize,
    /// Pilot power, linear. Every pilot symbol is `sqrt(pilot_power) + 0j`:
    /// constant, zero phase, known to both ends.
    pub pilot_power: f64,
}

impl PilotLayout {
    pub fn new(subcarriers: usize, pilots: usize, offset: usize, pilot_power: f64) -> Result<Self> {
        if pilots == 0 || subcarriers == 0 {
            return Err(Error::InvalidLayout(
                "subcarrier and pilot counts must be positive".into(),
            ));
        }
        if subcarriers % pilots != 0 {
            return Err(Error::InvalidLayout(format!(
                "pilot count {pilots} does not divide subcarrier count {subcarriers}"
            )));
        }
        let spacing = subcarriers / pilots;
        if offset == 0 || offset > spacing {
            return Err(Error::InvalidLayout(format!(
                "first-pilot offset {offset} outside 1..={spacing}"
            )));
        }
        if !(pilot_power > 0.0) || !pilot_power.is_finite() {
            return Err(Error::InvalidLayout(format!(
                "pilot power {pilot_power} must be positive and finite"
            )));
        }
        Ok(Self {
            subcarriers,
            pilots,
            offset,
            pilot_power,
        })
    }

    /// Distance between consecutive pilots.
    pub fn spacing(&self) -> usize {
        self.subcarriers / self.pilots
    }

    /// Same geometry with a different first-pilot offset.
    pub fn with_offset(&self, offset: usize) -> Result<Self> {
        Self::new(self.subcarriers, self.pilots, offset, self.pilot_power)
    }

    /// 1-based pilot positions `{offset, offset + R, ...}`, strictly
    /// increasing, all within `1..=subcarriers`.
    pub fn positions(&self) -> Vec<usize> {
        let r = self.spacing();
        (0..self.pilots).map(|k| self.offset + k * r).collect()
    }
}

/// 1-based pilot positions of a layout.
pub fn pilot_positions(layout: &PilotLayout) -> Vec<usize> {
    layout.positions()
}

/// Build a frequency frame from data symbols and a pilot layout.
///
/// Pilots of value `sqrt(P) + 0j` go to the layout's positions; data symbols
/// fill the remaining subcarriers in ascending index order.
pub fn assemble_frame(data: &[Complex64], layout: &PilotLayout) -> Result<FreqFrame> {
    let expected = layout.subcarriers - layout.pilots;
    if data.len() != expected {
        return Err(Error::DataLengthMismatch {
            expected,
            got: data.len(),
        });
    }
    let pilot = Complex64::new(layout.pilot_power.sqrt(), 0.0);
    let mut is_pilot = vec![false; layout.subcarriers];
    for p in layout.positions() {
        is_pilot[p - 1] = true;
    }
    let mut data_it = data.iter();
    let symbols = is_pilot
        .iter()
        .map(|&at_pilot| {
            if at_pilot {
                pilot
            } else {
                *data_it.next().expect("data length checked above")
            }
        })
        .collect();
    Ok(FreqFrame::new(symbols))
}

/// Extract the data symbols at non-pilot subcarriers, ascending index order.
///
/// `positions` must be distinct 1-based indices within the frame.
pub fn disassemble_frame(frame: &FreqFrame, positions: &[usize]) -> Result<Vec<Complex64>> {
    let len = frame.len();
    let mut is_pilot = vec![false; len];
    for &p in positions {
        if p < 1 || p > len || is_pilot[p - 1] {
            return Err(Error::InvalidPosition { position: p, len });
        }
        is_pilot[p - 1] = true;
    }
    Ok(frame
        .symbols
        .iter()
        .zip(&is_pilot)
        .filter(|(_, &at_pilot)| !at_pilot)
        .map(|(s, _)| *s)
        .collect())
}

/// Wrap a 1-based index `v` in `[1, 2*n]` back into `[1, n]`.
///
/// Equivalent to `((v - 1) mod n) + 1` on that domain.
pub fn wrap_index(v: usize, n: usize) -> Result<usize> {
    if v < 1 || v > 2 * n {
        return Err(Error::IndexOutOfRange { value: v, max: 2 * n });
    }
    Ok(if v > n { v - n } else { v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modem::{qpsk_map, random_bits};

    #[test]
    fn initial_arrangement_positions() {
        let layout = PilotLayout::new(8, 2, 1, 9.0).unwrap();
        assert_eq!(layout.positions(), vec![1, 5]);
    }

    #[test]
    fn last_admissible_shift() {
        let layout = PilotLayout::new(8, 2, 4, 9.0).unwrap();
        assert_eq!(layout.positions(), vec![4, 8]);
    }

    #[test]
    fn positions_for_offset_three() {
        let layout = PilotLayout::new(64, 4, 3, 9.0).unwrap();
        assert_eq!(layout.positions(), vec![3, 19, 35, 51]);
    }

    #[test]
    fn layout_invariants_are_enforced() {
        assert!(PilotLayout::new(64, 5, 1, 9.0).is_err()); // 5 does not divide 64
        assert!(PilotLayout::new(8, 2, 0, 9.0).is_err()); // offset below range
        assert!(PilotLayout::new(8, 2, 5, 9.0).is_err()); // offset above spacing
        assert!(PilotLayout::new(8, 2, 1, 0.0).is_err()); // non-positive power
        assert!(PilotLayout::new(8, 0, 1, 9.0).is_err());
    }

    #[test]
    fn assemble_places_pilots_and_data() {
        let layout = PilotLayout::new(8, 2, 1, 9.0).unwrap();
        let data: Vec<Complex64> = (0..6).map(|k| Complex64::new(k as f64 + 1.0, 0.0)).collect();
        let frame = assemble_frame(&data, &layout).unwrap();
        let three = Complex64::new(3.0, 0.0);
        assert_eq!(frame.symbols[0], three);
        assert_eq!(frame.symbols[4], three);
        // data goes to 1-based indices {2,3,4,6,7,8} in order
        for (slot, k) in [1usize, 2, 3, 5, 6, 7].iter().zip(1..) {
            assert_eq!(frame.symbols[*slot], Complex64::new(k as f64, 0.0));
        }
    }

    #[test]
    fn assemble_rejects_wrong_data_length() {
        let layout = PilotLayout::new(8, 2, 1, 9.0).unwrap();
        let data = vec![Complex64::default(); 5];
        assert!(matches!(
            assemble_frame(&data, &layout),
            Err(Error::DataLengthMismatch {
                expected: 6,
                got: 5
            })
        ));
    }

    #[test]
    fn disassemble_inverts_assemble() {
        let layout = PilotLayout::new(64, 4, 7, 9.0).unwrap();
        let data = qpsk_map(&random_bits(2 * 60, 8)).unwrap();
        let frame = assemble_frame(&data, &layout).unwrap();
        assert_eq!(disassemble_frame(&frame, &layout.positions()).unwrap(), data);
    }

    #[test]
    fn disassemble_index_arithmetic() {
        let frame = FreqFrame::new((1..=8).map(|k| Complex64::new(k as f64, 0.0)).collect());
        let out = disassemble_frame(&frame, &[1, 5]).unwrap();
        let expect: Vec<Complex64> = [2.0, 3.0, 4.0, 6.0, 7.0, 8.0]
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        assert_eq!(out, expect);
    }

    #[test]
    fn wrong_positions_misalign_extraction() {
        let layout = PilotLayout::new(8, 2, 1, 9.0).unwrap();
        let data: Vec<Complex64> = (0..6).map(|k| Complex64::new(k as f64, 0.0)).collect();
        let frame = assemble_frame(&data, &layout).unwrap();
        let shifted = disassemble_frame(&frame, &[2, 6]).unwrap();
        assert_ne!(shifted, data);
    }

    #[test]
    fn disassemble_rejects_bad_positions() {
        let frame = FreqFrame::new(vec![Complex64::default(); 8]);
        assert!(disassemble_frame(&frame, &[0]).is_err());
        assert!(disassemble_frame(&frame, &[9]).is_err());
        assert!(disassemble_frame(&frame, &[3, 3]).is_err());
    }

    #[test]
    fn average_frame_power_accounts_for_pilot_boost() {
        let layout = PilotLayout::new(64, 4, 1, 9.0).unwrap();
        let data = qpsk_map(&random_bits(2 * 60, 10)).unwrap();
        let frame = assemble_frame(&data, &layout).unwrap();
        let mean = frame.symbols.iter().map(|s| s.norm_sqr()).sum::<f64>() / 64.0;
        assert!((mean - 1.5).abs() < 1e-12); // (60*1 + 4*9)/64
    }

    #[test]
    fn wrap_examples() {
        assert_eq!(wrap_index(5, 8).unwrap(), 5);
        assert_eq!(wrap_index(9, 8).unwrap(), 1);
        assert_eq!(wrap_index(13, 8).unwrap(), 5);
        assert!(wrap_index(0, 8).is_err());
        assert!(wrap_index(17, 8).is_err());
    }

    #[test]
    fn wrap_matches_closed_form_everywhere() {
        for &n in &[8usize, 64, 256] {
            for v in 1..=2 * n {
                assert_eq!(wrap_index(v, n).unwrap(), (v - 1) % n + 1, "v={v} n={n}");
            }
        }
    }

    #[test]
    fn offsets_partition_the_frame() {
        let base = PilotLayout::new(64, 4, 1, 9.0).unwrap();
        let mut hit = vec![0usize; 64];
        for offset in 1..=base.spacing() {
            let positions = base.with_offset(offset).unwrap().positions();
            assert_eq!(positions.len(), 4);
            for p in positions {
                hit[p - 1] += 1;
            }
        }
        assert!(hit.iter().all(|&h| h == 1));
    }

    #[test]
    fn consecutive_pilot_distance_is_spacing() {
        let base = PilotLayout::new(64, 8, 1, 9.0).unwrap();
        for offset in 1..=base.spacing() {
            let positions = base.with_offset(offset).unwrap().positions();
            for pair in positions.windows(2) {
                assert_eq!(pair[1] - pair[0], base.spacing());
            }
        }
    }
}
