//! Blind pilot-location detection.
//!
//! The receiver knows the pilot count, spacing, and power, but not the
//! first-pilot offset the transmitter selected. Detection works on the
//! received frequency frame in four stages:
//!
//! 1. Threshold: keep subcarriers whose magnitude exceeds `gamma * sqrt(P)`
//!    as pilot candidates.
//! 2. Distance voting: for every candidate, count how many of the other
//!    candidates sit at the known pilot distances (multiples of the spacing,
//!    with wrap-around). True pilots see each other; spurious candidates
//!    mostly do not.
//! 3. Keep the `pilots` best-voted candidates as initial estimates.
//! 4. Refine: each estimate nominates its whole residue class; the class
//!    with the largest aggregate magnitude wins and its members are the
//!    detected pilot positions.
//!
//! A fixed threshold can strand fewer candidates than pilots, especially at
//! low SNR, in which case the threshold is softened step by step down to a
//! floor. If even the floor cannot produce enough candidates, the detector
//! falls back to scoring every residue class directly, so it always returns
//! an answer.

use crate::error::{Error, Result};
use crate::numerics::FreqFrame;
use crate::pilot::{wrap_index, PilotLayout};

/// Threshold policy for the detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionConfig {
    /// Candidate threshold as a fraction of the pilot amplitude, in (0, 1].
    pub gamma: f64,
    /// Soft-threshold decrement applied while too few candidates survive.
    pub gamma_step: f64,
    /// Lowest threshold tried before falling back to exhaustive scoring.
    pub gamma_min: f64,
    /// Aggregate `|Y|^2` instead of `|Y|` in the refinement stage. Kept for
    /// sensitivity studies; off by default.
    pub use_power_metric: bool,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            gamma: 0.8,
            gamma_step: 0.05,
            gamma_min: 0.3,
            use_power_metric: false,
        }
    }
}

impl DetectionConfig {
    pub fn new(gamma: f64, gamma_step: f64, gamma_min: f64, use_power_metric: bool) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::InvalidDetectionConfig(format!(
                "gamma {gamma} outside (0, 1]"
            )));
        }
        if !(gamma_step > 0.0) {
            return Err(Error::InvalidDetectionConfig(format!(
                "gamma step {gamma_step} must be positive"
            )));
        }
        if !(0.0..=gamma).contains(&gamma_min) {
            return Err(Error::InvalidDetectionConfig(format!(
                "gamma floor {gamma_min} outside [0, {gamma}]"
            )));
        }
        Ok(Self {
            gamma,
            gamma_step,
            gamma_min,
            use_power_metric,
        })
    }
}

/// Subcarriers that survived the candidate threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    /// Distinct 1-based locations, ascending.
    pub locations: Vec<usize>,
    /// Threshold fraction that produced this set.
    pub gamma_used: f64,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }
}

/// Detected pilot arrangement.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    /// 1-based pilot positions, ascending; one full residue class.
    pub positions: Vec<usize>,
    /// Detected first-pilot offset, `1..=spacing`.
    pub offset: usize,
    /// Winning aggregate magnitude (or power, under the power metric).
    pub score: f64,
}

/// Locations whose magnitude strictly exceeds `gamma * sqrt(pilot_power)`.
pub fn candidate_locations(received: &FreqFrame, pilot_power: f64, gamma: f64) -> CandidateSet {
    let amplitude = gamma * pilot_power.sqrt();
    let locations = received
        .symbols
        .iter()
        .enumerate()
        .filter(|(_, y)| y.norm() - amplitude > 0.0)
        .map(|(i, _)| i + 1)
        .collect();
    CandidateSet {
        locations,
        gamma_used: gamma,
    }
}

/// Pairwise pilot distances `[R, 2R, ..., (pilots - 1) * R]`.
pub fn distance_set(layout: &PilotLayout) -> Vec<usize> {
    let r = layout.spacing();
    (1..layout.pilots).map(|t| t * r).collect()
}

/// One row per candidate: the candidate's location shifted by every pilot
/// distance, wrapped back into the frame.
pub fn build_candidate_matrix(
    candidates: &CandidateSet,
    distances: &[usize],
    subcarriers: usize,
) -> Vec<Vec<usize>> {
    candidates
        .locations
        .iter()
        .map(|&q| {
            distances
                .iter()
                .map(|&s| {
                    wrap_index(q + s, subcarriers)
                        .expect("candidate plus distance stays within [1, 2N]")
                })
                .collect()
        })
        .collect()
}

/// For each matrix row, how many of its entries are themselves candidates.
pub fn count_hits(matrix: &[Vec<usize>], candidates: &CandidateSet, subcarriers: usize) -> Vec<usize> {
    let mut member = vec![false; subcarriers + 1];
    for &q in &candidates.locations {
        member[q] = true;
    }
    matrix
        .iter()
        .map(|row| row.iter().filter(|&&loc| member[loc]).count())
        .collect()
}

/// The `pilots` candidates with the highest hit counts.
///
/// Ties go to the larger received magnitude, then to the smaller location.
pub fn initial_estimates(
    candidates: &CandidateSet,
    counts: &[usize],
    received: &FreqFrame,
    pilots: usize,
) -> Result<Vec<usize>> {
    if candidates.len() < pilots {
        return Err(Error::InsufficientCandidates {
            found: candidates.len(),
            needed: pilots,
        });
    }
    let magnitude = |i: usize| received.symbols[candidates.locations[i] - 1].norm();
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| {
        counts[b]
            .cmp(&counts[a])
            .then(magnitude(b).total_cmp(&magnitude(a)))
            .then(candidates.locations[a].cmp(&candidates.locations[b]))
    });
    Ok(order[..pilots]
        .iter()
        .map(|&i| candidates.locations[i])
        .collect())
}

fn class_score(
    received: &FreqFrame,
    location: usize,
    layout: &PilotLayout,
    use_power_metric: bool,
) -> f64 {
    let r = layout.spacing();
    // n = pilots wraps back to the location's own residue class, so the row
    // is the complete class.
    (1..=layout.pilots)
        .map(|n| {
            let z = wrap_index(location + n * r, layout.subcarriers)
                .expect("location plus n*R stays within [1, 2N]");
            let m = received.symbols[z - 1].norm();
            if use_power_metric {
                m * m
            } else {
                m
            }
        })
        .sum()
}

/// Score the residue class of each initial estimate and return the winner.
///
/// Ties go to the smallest resulting offset.
pub fn refine(
    estimates: &[usize],
    layout: &PilotLayout,
    received: &FreqFrame,
    use_power_metric: bool,
) -> DetectionResult {
    let r = layout.spacing();
    let mut best: Option<(f64, usize)> = None;
    for &u in estimates {
        let offset = (u - 1) % r + 1;
        let score = class_score(received, u, layout, use_power_metric);
        let better = match best {
            None => true,
            Some((s, o)) => score > s || (score == s && offset < o),
        };
        if better {
            best = Some((score, offset));
        }
    }
    let (score, offset) = best.expect("estimates is non-empty");
    DetectionResult {
        positions: (0..layout.pilots).map(|k| offset + k * r).collect(),
        offset,
        score,
    }
}

/// Exhaustive scoring of all residue classes; the detector's terminal
/// fallback and the natural baseline the pipeline approximates.
fn best_residue_class(
    received: &FreqFrame,
    layout: &PilotLayout,
    use_power_metric: bool,
) -> DetectionResult {
    let all: Vec<usize> = (1..=layout.spacing()).collect();
    refine(&all, layout, received, use_power_metric)
}

fn detect_at_gamma(
    received: &FreqFrame,
    layout: &PilotLayout,
    gamma: f64,
    use_power_metric: bool,
) -> Option<DetectionResult> {
    let candidates = candidate_locations(received, layout.pilot_power, gamma);
    if candidates.len() < layout.pilots {
        return None;
    }
    let distances = distance_set(layout);
    let matrix = build_candidate_matrix(&candidates, &distances, layout.subcarriers);
    let counts = count_hits(&matrix, &candidates, layout.subcarriers);
    let estimates = initial_estimates(&candidates, &counts, received, layout.pilots)
        .expect("candidate count checked above");
    Some(refine(&estimates, layout, received, use_power_metric))
}

/// Run the full detection pipeline with the soft threshold.
///
/// The layout's `offset` field is not consulted; it is what the detector
/// estimates. The threshold starts at `config.gamma` and is decremented by
/// `config.gamma_step` while fewer candidates than pilots survive, down to
/// `config.gamma_min`; past the floor the exhaustive residue-class fallback
/// guarantees an answer.
pub fn detect(
    received: &FreqFrame,
    layout: &PilotLayout,
    config: &DetectionConfig,
) -> DetectionResult {
    let mut gamma = config.gamma;
    while gamma >= config.gamma_min - 1e-12 {
        if let Some(result) = detect_at_gamma(received, layout, gamma, config.use_power_metric) {
            return result;
        }
        gamma -= config.gamma_step;
    }
    best_residue_class(received, layout, config.use_power_metric)
}

/// Single-threshold detection without the soft fallback.
///
/// Returns `None` when fewer candidates than pilots survive the threshold;
/// threshold sweeps count that as a detection failure.
pub fn detect_fixed_gamma(
    received: &FreqFrame,
    layout: &PilotLayout,
    gamma: f64,
    use_power_metric: bool,
) -> Option<DetectionResult> {
    detect_at_gamma(received, layout, gamma, use_power_metric)
}
