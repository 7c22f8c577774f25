use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Read-pulse amplitude, W.
pub const DEFAULT_AMPLITUDE: f64 = 0.25e-3;
/// Read-pulse width, s.
pub const DEFAULT_PULSE_WIDTH: f64 = 200e-12;
pub const DEFAULT_TIME_STEPS: usize = 35;

const ENCODE_PURPOSE: &str = "encode";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub time_steps: usize,
    pub seed: u64,
    /// Input spike amplitude, W.
    pub amplitude: f64,
    /// Input spike width, s.
    pub pulse_width: f64,
    /// Spike probability per step at intensity 1.
    pub rate_scale: f64,
    /// Number of test images evaluated; `None` for all.
    pub images: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            time_steps: DEFAULT_TIME_STEPS,
            seed: 0,
            amplitude: DEFAULT_AMPLITUDE,
            pulse_width: DEFAULT_PULSE_WIDTH,
            rate_scale: 1.0,
            images: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.time_steps == 0 {
            return Err(Error::Domain("time_steps must be at least 1".into()));
        }
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(Error::Domain(format!("amplitude {} must be > 0", self.amplitude)));
        }
        if !(self.pulse_width > 0.0 && self.pulse_width.is_finite()) {
            return Err(Error::Domain(format!("pulse width {} must be > 0", self.pulse_width)));
        }
        if !(0.0..=1.0).contains(&self.rate_scale) {
            return Err(Error::Domain(format!("rate_scale {} outside [0, 1]", self.rate_scale)));
        }
        Ok(())
    }
}

/// Binary input spikes, `steps × width`, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpikeEncoding {
    pub steps: usize,
    pub width: usize,
    pub spikes: Vec<u8>,
}

impl SpikeEncoding {
    pub fn step(&self, t: usize) -> &[u8] {
        &self.spikes[t * self.width..(t + 1) * self.width]
    }

    pub fn total(&self) -> usize {
        self.spikes.iter().map(|&s| usize::from(s)).sum()
    }
}

/// Bernoulli spikes with probability `intensity · rate_scale` per pixel and
/// step, drawn pixel-major within each step.
pub fn encode_poisson(
    intensities: &[f64],
    steps: usize,
    rate_scale: f64,
    rng: &mut impl Rng,
) -> Result<SpikeEncoding> {
    if let Some(bad) = intensities.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::Domain(format!("intensity {bad} outside [0, 1]")));
    }
    let width = intensities.len();
    let mut spikes = Vec::with_capacity(steps * width);
    for _ in 0..steps {
        for &x in intensities {
            let rate = x * rate_scale;
            spikes.push(u8::from(rng.random::<f64>() < rate));
        }
    }
    Ok(SpikeEncoding { steps, width, spikes })
}

/// Encodes test image `index` on its own generator stream.
pub fn encode_image(intensities: &[f64], index: usize, config: &RunConfig) -> Result<SpikeEncoding> {
    let mut rng = stream_rng(config.seed, ENCODE_PURPOSE, index as u64);
    encode_poisson(intensities, config.time_steps, config.rate_scale, &mut rng)
}
