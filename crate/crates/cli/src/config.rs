//! Experiment configuration (TOML). Every section and key is optional;
//! unknown keys are rejected with their line and column.

use std::path::{Path, PathBuf};

use photonic_snn::dpe::{BankSpec, LevelSpec};
use photonic_snn::optics::{RingDesign, WaveguideStack};
use photonic_snn::snn::{ConversionConfig, RunConfig, TrainConfig};
use serde::Deserialize;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Master seed; every random purpose derives its own stream from it.
    pub seed: u64,
    pub paths: Paths,
    pub device: Device,
    pub run: Run,
    pub train: Train,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 2024,
            paths: Paths::default(),
            device: Device::default(),
            run: Run::default(),
            train: Train::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Paths {
    /// Directory holding the four MNIST IDX files.
    pub mnist: PathBuf,
    /// Directory receiving artifacts and CSV reports.
    pub out: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        Paths {
            mnist: PathBuf::from("data/mnist"),
            out: PathBuf::from("out"),
        }
    }
}

/// Material stack, base ring geometry, bank layout and level count.
/// Lengths in metres.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Device {
    pub stack: WaveguideStack,
    pub ring: RingDesign,
    pub bank: BankSpec,
    pub levels: LevelSpec,
    /// Photodetector responsivity, A/W.
    pub responsivity: f64,
}

impl Default for Device {
    fn default() -> Self {
        Device {
            stack: WaveguideStack::default(),
            ring: RingDesign::default(),
            bank: BankSpec::default(),
            levels: LevelSpec::default(),
            responsivity: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Run {
    pub time_steps: usize,
    /// Input spike amplitude, W.
    pub amplitude: f64,
    /// Input spike width, s.
    pub pulse_width: f64,
    pub rate_scale: f64,
    /// Test images evaluated by `infer` and `ablate` (all when absent).
    pub images: Option<usize>,
    /// Images used by `energy`.
    pub energy_images: usize,
}

impl Default for Run {
    fn default() -> Self {
        let r = RunConfig::default();
        Run {
            time_steps: r.time_steps,
            amplitude: r.amplitude,
            pulse_width: r.pulse_width,
            rate_scale: r.rate_scale,
            images: None,
            energy_images: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Train {
    /// Hidden layer widths between the 784 inputs and 10 outputs.
    pub hidden: Vec<usize>,
    pub optimizer: TrainConfig,
    pub conversion: ConversionConfig,
    /// Training images used to calibrate thresholds.
    pub calibration_images: usize,
}

impl Default for Train {
    fn default() -> Self {
        Train {
            hidden: vec![100],
            optimizer: TrainConfig::default(),
            conversion: ConversionConfig::default(),
            calibration_images: 10_000,
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            time_steps: self.run.time_steps,
            seed: self.seed,
            amplitude: self.run.amplitude,
            pulse_width: self.run.pulse_width,
            rate_scale: self.run.rate_scale,
            images: self.run.images,
        }
    }

    pub fn topology(&self) -> Vec<usize> {
        let mut sizes = vec![784];
        sizes.extend(&self.train.hidden);
        sizes.push(10);
        sizes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(ExperimentConfig::parse("").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn nested_overrides() {
        let cfg = ExperimentConfig::parse(
            "seed = 5\n[device.bank]\nrings = 4\n[train]\nhidden = [500]\n[train.conversion]\nnormalization = { percentile = 99.9 }\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, 5);
        assert_eq!(cfg.device.bank.rings, 4);
        assert_eq!(cfg.topology(), vec![784, 500, 10]);
    }

    #[test]
    fn unknown_key_reports_location() {
        let err = ExperimentConfig::parse("seed = 1\n[run]\ntime_step = 3\n").unwrap_err();
        assert!(err.contains("line 3"), "{err}");
        assert!(err.contains("time_step"), "{err}");
    }
}
