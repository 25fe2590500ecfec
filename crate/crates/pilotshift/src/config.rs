//! Run configuration resolution for the CLI.
//!
//! Settings come from three layers: built-in defaults, an optional flat
//! key-value config file (TOML), and command-line flags. Later layers win
//! field by field.

use serde::Deserialize;
use std::path::{Path, PathBuf};

use crate::detector::DetectionConfig;
use crate::error::{Error, Result};
use crate::experiments::ExperimentConfig;

/// A scalar or a list; list-valued keys mirror comma-separated flags.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(v) => v,
        }
    }
}

/// One override layer; every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub ns: Option<usize>,
    pub np: Option<usize>,
    pub pilot_power: Option<OneOrMany>,
    pub oversample: Option<usize>,
    pub snr: Option<OneOrMany>,
    pub frames: Option<usize>,
    pub seed: Option<u64>,
    pub gamma: Option<OneOrMany>,
    pub gamma_step: Option<f64>,
    pub gamma_min: Option<f64>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| Error::ConfigFile {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub subcarriers: usize,
    pub pilots: usize,
    pub pilot_powers: Vec<f64>,
    pub oversample: usize,
    pub snr_db: Vec<f64>,
    pub frames: usize,
    pub seed: u64,
    pub gammas: Vec<f64>,
    pub gamma_step: f64,
    pub gamma_min: f64,
    pub out: Option<PathBuf>,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            subcarriers: 64,
            pilots: 4,
            pilot_powers: vec![9.0],
            oversample: 8,
            snr_db: Vec::new(),
            frames: 100_000,
            seed: 1,
            gammas: vec![0.8],
            gamma_step: 0.05,
            gamma_min: 0.3,
            out: None,
        }
    }
}

impl RunSettings {
    fn apply(&mut self, layer: Overrides) {
        if let Some(v) = layer.ns {
            self.subcarriers = v;
        }
        if let Some(v) = layer.np {
            self.pilots = v;
        }
        if let Some(v) = layer.pilot_power {
            self.pilot_powers = v.into_vec();
        }
        if let Some(v) = layer.oversample {
            self.oversample = v;
        }
        if let Some(v) = layer.snr {
            self.snr_db = v.into_vec();
        }
        if let Some(v) = layer.frames {
            self.frames = v;
        }
        if let Some(v) = layer.seed {
            self.seed = v;
        }
        if let Some(v) = layer.gamma {
            self.gammas = v.into_vec();
        }
        if let Some(v) = layer.gamma_step {
            self.gamma_step = v;
        }
        if let Some(v) = layer.gamma_min {
            self.gamma_min = v;
        }
        if let Some(v) = layer.out {
            self.out = Some(v);
        }
    }

    /// Defaults, overlaid with the config file, overlaid with the flags.
    pub fn resolve(file: Option<Overrides>, flags: Overrides) -> Self {
        let mut settings = Self::default();
        if let Some(layer) = file {
            settings.apply(layer);
        }
        settings.apply(flags);
        settings
    }

    pub fn single_pilot_power(&self) -> Result<f64> {
        match self.pilot_powers.as_slice() {
            [p] => Ok(*p),
            other => Err(Error::InvalidExperiment(format!(
                "expected a single pilot power, got {}",
                other.len()
            ))),
        }
    }

    pub fn single_gamma(&self) -> Result<f64> {
        match self.gammas.as_slice() {
            [g] => Ok(*g),
            other => Err(Error::InvalidExperiment(format!(
                "expected a single gamma, got {}",
                other.len()
            ))),
        }
    }

    /// Experiment config using one pilot power and one gamma.
    pub fn experiment_config(&self) -> Result<ExperimentConfig> {
        let detection = DetectionConfig::new(
            self.single_gamma()?,
            self.gamma_step,
            self.gamma_min,
            false,
        )?;
        Ok(ExperimentConfig {
            subcarriers: self.subcarriers,
            pilots: self.pilots,
            pilot_power: self.single_pilot_power()?,
            oversample: self.oversample,
            snr_db: self.snr_db.clone(),
            frames: self.frames,
            seed: self.seed,
            detection,
        })
    }

    /// Like [`Self::experiment_config`] but ignores extra pilot powers and
    /// gammas; sweep runs carry those separately.
    pub fn experiment_config_for_sweep(&self) -> Result<ExperimentConfig> {
        let detection = DetectionConfig::new(
            *self.gammas.first().unwrap_or(&0.8),
            self.gamma_step,
            self.gamma_min,
            false,
        )?;
        Ok(ExperimentConfig {
            subcarriers: self.subcarriers,
            pilots: self.pilots,
            pilot_power: *self.pilot_powers.first().unwrap_or(&9.0),
            oversample: self.oversample,
            snr_db: self.snr_db.clone(),
            frames: self.frames,
            seed: self.seed,
            detection,
        })
    }
}
