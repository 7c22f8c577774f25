//! Event-driven energy accounting.
//!
//! Energies are accumulated as integer zeptojoules (1e-21 J) so ledgers from
//! different images, segments or threads merge exactly in any order. Each
//! synapse's per-event energy is rounded to the zeptojoule once, when the
//! model is built.

use serde::{Deserialize, Serialize};

use crate::dpe::MappedLayer;
use crate::error::{Error, Result};

/// Energy of one neuron read/write cycle, J.
pub const NEURON_ENERGY_PER_STEP: f64 = 5e-12;

const ZJ_PER_J: f64 = 1e21;

pub fn joules_to_zj(j: f64) -> u128 {
    (j * ZJ_PER_J).round() as u128
}

pub fn zj_to_joules(zj: u128) -> f64 {
    zj as f64 / ZJ_PER_J
}

/// Energy absorbed by one synapse for one input spike: `(1 − T)·P·τ`.
pub fn synapse_event_energy(t: f64, amplitude: f64, pulse_width: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("transmission {t} outside [0, 1]")));
    }
    Ok((1.0 - t) * amplitude * pulse_width)
}

/// Per-layer energy costs of a mapped network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyModel {
    /// `column_zj[l][i]`: energy of one spike on input `i` of layer `l`,
    /// summed over every row of both polarity arrays.
    pub column_zj: Vec<Vec<u128>>,
    /// Synapses touched by one spike on each layer's inputs.
    pub synapses_per_event: Vec<u64>,
    pub neurons: Vec<usize>,
    pub neuron_zj_per_step: u128,
}

impl EnergyModel {
    pub fn new(layers: &[MappedLayer], amplitude: f64, pulse_width: f64) -> Result<Self> {
        let mut column_zj = Vec::with_capacity(layers.len());
        for layer in layers {
            let mut cols = vec![0u128; layer.in_dim];
            for (col, total) in cols.iter_mut().enumerate() {
                let tile = &layer.tiles[col / layer.width];
                let ring = col % layer.width;
                for row in 0..layer.out_dim {
                    let k = row * layer.width + ring;
                    for t in [tile.t_pos[k], tile.t_neg[k]] {
                        *total += joules_to_zj(synapse_event_energy(t, amplitude, pulse_width)?);
                    }
                }
            }
            column_zj.push(cols);
        }
        Ok(EnergyModel {
            column_zj,
            synapses_per_event: layers.iter().map(|l| 2 * l.out_dim as u64).collect(),
            neurons: layers.iter().map(|l| l.out_dim).collect(),
            neuron_zj_per_step: joules_to_zj(NEURON_ENERGY_PER_STEP),
        })
    }

    /// Ledger of one image run: `input_counts[l][i]` is the number of spikes
    /// seen on input `i` of layer `l` over `steps` time-steps.
    pub fn image_ledger(&self, input_counts: &[Vec<u32>], steps: usize) -> Result<EnergyLedger> {
        if input_counts.len() != self.column_zj.len() {
            return Err(Error::Shape(format!(
                "{} layers of spike counts for a {}-layer energy model",
                input_counts.len(),
                self.column_zj.len()
            )));
        }
        let mut ledger = EnergyLedger::empty(self.column_zj.len());
        for (l, (counts, cols)) in input_counts.iter().zip(&self.column_zj).enumerate() {
            if counts.len() != cols.len() {
                return Err(Error::Shape(format!("layer {l}: {} spike counts for {} inputs", counts.len(), cols.len())));
            }
            let entry = &mut ledger.layers[l];
            for (&c, &e) in counts.iter().zip(cols) {
                entry.synaptic_zj += u128::from(c) * e;
                entry.input_spikes += u64::from(c);
            }
            entry.synapse_events = entry.input_spikes * self.synapses_per_event[l];
            entry.neuron_steps = (self.neurons[l] * steps) as u64;
            entry.neuron_zj = u128::from(entry.neuron_steps) * self.neuron_zj_per_step;
        }
        ledger.steps = steps as u64;
        ledger.images = 1;
        ledger.per_image_zj.push(ledger.total_zj());
        Ok(ledger)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerEnergy {
    pub synaptic_zj: u128,
    pub neuron_zj: u128,
    pub input_spikes: u64,
    pub synapse_events: u64,
    pub neuron_steps: u64,
}

impl LayerEnergy {
    fn add(&mut self, other: &LayerEnergy) {
        self.synaptic_zj += other.synaptic_zj;
        self.neuron_zj += other.neuron_zj;
        self.input_spikes += other.input_spikes;
        self.synapse_events += other.synapse_events;
        self.neuron_steps += other.neuron_steps;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub layers: Vec<LayerEnergy>,
    pub images: u64,
    /// Time-steps summed over images.
    pub steps: u64,
    pub per_image_zj: Vec<u128>,
}

impl EnergyLedger {
    pub fn empty(layers: usize) -> Self {
        EnergyLedger {
            layers: vec![LayerEnergy::default(); layers],
            ..EnergyLedger::default()
        }
    }

    /// Elementwise sum of counters; per-image totals are concatenated.
    pub fn merge(&mut self, other: &EnergyLedger) {
        if self.layers.len() < other.layers.len() {
            self.layers.resize(other.layers.len(), LayerEnergy::default());
        }
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            a.add(b);
        }
        self.images += other.images;
        self.steps += other.steps;
        self.per_image_zj.extend_from_slice(&other.per_image_zj);
    }

    pub fn synaptic_zj(&self) -> u128 {
        self.layers.iter().map(|l| l.synaptic_zj).sum()
    }

    pub fn neuron_zj(&self) -> u128 {
        self.layers.iter().map(|l| l.neuron_zj).sum()
    }

    pub fn total_zj(&self) -> u128 {
        self.synaptic_zj() + self.neuron_zj()
    }

    /// Mean energy per image, J.
    pub fn per_image(&self) -> (f64, f64) {
        let n = self.images.max(1) as f64;
        (zj_to_joules(self.synaptic_zj()) / n, zj_to_joules(self.neuron_zj()) / n)
    }

    /// Mean synaptic energy per synapse per time-step of layer `l`, J.
    pub fn per_synapse_step(&self, l: usize, synapses: usize) -> f64 {
        let denom = (synapses as u64 * self.steps.max(1)) as f64;
        zj_to_joules(self.layers[l].synaptic_zj) / denom
    }
}
