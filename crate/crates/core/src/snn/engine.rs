use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::convert::SnnModel;
use super::encode::{encode_image, RunConfig, SpikeEncoding};
use super::mlp::argmax;
use crate::dpe::{map_weights, CrosstalkMap, LevelTable, MappedLayer, Readout};
use crate::energy::{EnergyLedger, EnergyModel};
use crate::error::{Error, Result};
use crate::mnist::Dataset;
use crate::neuron::{layer_step_into, NeuronState};
use crate::sum::{from_fixed, to_fixed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Real-valued weights, unit spike amplitude.
    Ideal,
    /// Level-quantized ring transmissions, no crosstalk.
    Quantized,
    /// Quantized transmissions scaled by the crosstalk factors.
    Crosstalk,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Ideal, Mode::Quantized, Mode::Crosstalk];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Ideal => "ideal",
            Mode::Quantized => "quantized",
            Mode::Crosstalk => "crosstalk",
        }
    }
}

/// Programmed hardware shared by every mapped layer.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceContext {
    pub table: LevelTable,
    pub alpha: CrosstalkMap,
    pub readout: Readout,
}

#[derive(Debug, Clone)]
struct Layer {
    in_dim: usize,
    out_dim: usize,
    /// Fixed-point synapse terms, column-major: `col * out_dim + row`.
    pos: Vec<i128>,
    neg: Vec<i128>,
    readout: Readout,
    threshold: f64,
}

/// A converted network bound to one evaluation mode.
#[derive(Debug, Clone)]
pub struct SnnNetwork {
    pub mode: Mode,
    /// Power of an emitted spike, W (1 in ideal mode).
    pub amplitude: f64,
    pub thresholds: Vec<f64>,
    /// Mapped tiles (device modes only).
    pub mapped: Vec<MappedLayer>,
    pub alpha: CrosstalkMap,
    layers: Vec<Layer>,
}

fn fixed(x: f64, layer: usize) -> Result<i128> {
    to_fixed(x).ok_or(Error::NonFinite { layer, step: 0 })
}

impl SnnNetwork {
    /// Binds `snn` to a mode. Device modes map every weight matrix onto the
    /// level table and scale each threshold by the weight-to-power factor
    /// `P·R·k·ΔT / max|w|`, where `ΔT` is the mean transmission range.
    pub fn new(snn: &SnnModel, mode: Mode, device: Option<&DeviceContext>, amplitude: f64) -> Result<Self> {
        let weights = &snn.model.weights;
        if snn.thresholds.len() != weights.len() {
            return Err(Error::Shape(format!(
                "{} thresholds for {} layers",
                snn.thresholds.len(),
                weights.len()
            )));
        }
        let mut layers = Vec::with_capacity(weights.len());
        let mut mapped = Vec::new();
        let mut thresholds = Vec::with_capacity(weights.len());
        let (amp, alpha) = match mode {
            Mode::Ideal => (1.0, CrosstalkMap::ideal(0, 0)),
            _ => {
                let device = device.ok_or_else(|| Error::Domain(format!("{} mode needs a device context", mode.name())))?;
                let alpha = if mode == Mode::Crosstalk {
                    device.alpha.clone()
                } else {
                    CrosstalkMap::ideal(device.table.ring_count(), device.table.level_count())
                };
                (amplitude, alpha)
            }
        };
        for (l, w) in weights.iter().enumerate() {
            let (out_dim, in_dim) = w.dim();
            let mut pos = vec![0i128; in_dim * out_dim];
            let mut neg = vec![0i128; in_dim * out_dim];
            let (readout, threshold) = match mode {
                Mode::Ideal => {
                    for ((row, col), &v) in w.indexed_iter() {
                        let k = col * out_dim + row;
                        pos[k] = fixed(v.max(0.0), l)?;
                        neg[k] = fixed((-v).max(0.0), l)?;
                    }
                    (Readout { responsivity: 1.0, gain_k: 1.0 }, snn.thresholds[l])
                }
                _ => {
                    let device = device.expect("checked above");
                    let layer = map_weights(w, &device.table, device.readout)?;
                    for tile_index in 0..layer.tiles.len() {
                        let tile = &layer.tiles[tile_index];
                        for ring in 0..layer.width {
                            let col = tile_index * layer.width + ring;
                            if col >= in_dim {
                                break;
                            }
                            for row in 0..out_dim {
                                let t = row * layer.width + ring;
                                let k = col * out_dim + row;
                                pos[k] = fixed(alpha.get(ring, tile.level_pos[t] as usize) * tile.t_pos[t] * amp, l)?;
                                neg[k] = fixed(alpha.get(ring, tile.level_neg[t] as usize) * tile.t_neg[t] * amp, l)?;
                            }
                        }
                    }
                    let scale = if layer.weight_scale > 0.0 {
                        amp * device.readout.responsivity * device.readout.gain_k * device.table.nominal_range()
                            / layer.weight_scale
                    } else {
                        1.0
                    };
                    mapped.push(layer);
                    (device.readout, snn.thresholds[l] * scale)
                }
            };
            thresholds.push(threshold);
            layers.push(Layer { in_dim, out_dim, pos, neg, readout, threshold });
        }
        Ok(SnnNetwork { mode, amplitude: amp, thresholds, mapped, alpha, layers })
    }

    /// Replaces every layer threshold, e.g. for homogeneity checks.
    pub fn with_thresholds(mut self, thresholds: &[f64]) -> Result<Self> {
        if thresholds.len() != self.layers.len() {
            return Err(Error::Shape(format!("{} thresholds for {} layers", thresholds.len(), self.layers.len())));
        }
        for (layer, &t) in self.layers.iter_mut().zip(thresholds) {
            layer.threshold = t;
        }
        self.thresholds = thresholds.to_vec();
        Ok(self)
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![self.layers[0].in_dim];
        sizes.extend(self.layers.iter().map(|l| l.out_dim));
        sizes
    }

    fn neurons(&self) -> Result<Vec<Vec<NeuronState>>> {
        self.layers
            .iter()
            .map(|l| Ok(vec![NeuronState::new(l.threshold, 0.0)?; l.out_dim]))
            .collect()
    }
}

/// How the per-step row sums are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evaluation {
    /// Event-driven accumulation over the whole input dimension.
    Monolithic,
    /// Dense evaluation of every time-multiplexed tile, partial sums added
    /// before the neuron. Device modes only.
    Tiled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TraceOptions {
    /// Keep every layer's output spikes.
    pub rasters: bool,
    /// Keep the membrane trace of this layer.
    pub vmem_layer: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InferenceResult {
    pub prediction: usize,
    /// More than one output neuron shares the top spike count.
    pub tied: bool,
    pub counts: Vec<u32>,
    /// Prediction from the cumulative counts after each step.
    pub step_predictions: Vec<usize>,
    /// Spike counts on every input of every layer.
    pub input_counts: Vec<Vec<u32>>,
    /// Per layer, `steps × width` output spikes.
    pub rasters: Vec<Vec<u8>>,
    /// `steps × width` membrane potentials after each update.
    pub vmem: Vec<f64>,
}

fn top(counts: &[u32]) -> (usize, bool) {
    let best = argmax(counts.iter().map(|&c| f64::from(c)));
    let tied = counts.iter().filter(|&&c| c == counts[best]).count() > 1;
    (best, tied)
}

/// Runs one encoded image through the network.
pub fn run_inference(
    net: &SnnNetwork,
    encoding: &SpikeEncoding,
    eval: Evaluation,
    trace: TraceOptions,
) -> Result<InferenceResult> {
    let first = &net.layers[0];
    if encoding.width != first.in_dim {
        return Err(Error::Shape(format!("encoding width {} for {} inputs", encoding.width, first.in_dim)));
    }
    if eval == Evaluation::Tiled && net.mapped.len() != net.layers.len() {
        return Err(Error::Domain("tiled evaluation needs a device-mapped network".into()));
    }
    let mut states = net.neurons()?;
    let n_layers = net.layers.len();
    let mut input_counts: Vec<Vec<u32>> = net.layers.iter().map(|l| vec![0; l.in_dim]).collect();
    let mut spikes: Vec<Vec<u8>> = net.layers.iter().map(|l| vec![0; l.out_dim]).collect();
    let mut o_pos: Vec<Vec<f64>> = net.layers.iter().map(|l| vec![0.0; l.out_dim]).collect();
    let mut o_neg = o_pos.clone();
    let mut acc_pos: Vec<i128> = Vec::new();
    let mut acc_neg: Vec<i128> = Vec::new();
    let mut p_in: Vec<f64> = Vec::new();
    let out_dim = net.layers[n_layers - 1].out_dim;
    let mut counts = vec![0u32; out_dim];
    let mut step_predictions = Vec::with_capacity(encoding.steps);
    let mut rasters: Vec<Vec<u8>> = vec![Vec::new(); if trace.rasters { n_layers } else { 0 }];
    let mut vmem = Vec::new();

    for t in 0..encoding.steps {
        for l in 0..n_layers {
            let layer = &net.layers[l];
            let (before, after) = spikes.split_at_mut(l);
            let input: &[u8] = if l == 0 { encoding.step(t) } else { &before[l - 1] };
            for (c, &s) in input_counts[l].iter_mut().zip(input) {
                *c += u32::from(s);
            }
            match eval {
                Evaluation::Monolithic => {
                    acc_pos.clear();
                    acc_pos.resize(layer.out_dim, 0);
                    acc_neg.clear();
                    acc_neg.resize(layer.out_dim, 0);
                    for (col, &s) in input.iter().enumerate() {
                        if s == 0 {
                            continue;
                        }
                        let range = col * layer.out_dim..(col + 1) * layer.out_dim;
                        for (a, &v) in acc_pos.iter_mut().zip(&layer.pos[range.clone()]) {
                            *a += v;
                        }
                        for (a, &v) in acc_neg.iter_mut().zip(&layer.neg[range]) {
                            *a += v;
                        }
                    }
                    let r = layer.readout;
                    for (o, &a) in o_pos[l].iter_mut().zip(&acc_pos) {
                        *o = r.gain_k * (r.responsivity * from_fixed(a));
                    }
                    for (o, &a) in o_neg[l].iter_mut().zip(&acc_neg) {
                        *o = r.gain_k * (r.responsivity * from_fixed(a));
                    }
                }
                Evaluation::Tiled => {
                    p_in.clear();
                    p_in.extend(input.iter().map(|&s| if s == 1 { net.amplitude } else { 0.0 }));
                    let (pos, neg) = net.mapped[l].forward(&p_in, &net.alpha)?;
                    o_pos[l] = pos;
                    o_neg[l] = neg;
                }
            }
            if o_pos[l].iter().chain(&o_neg[l]).any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { layer: l, step: t });
            }
            layer_step_into(&mut states[l], &o_pos[l], &o_neg[l], &mut after[0])?;
            if states[l].iter().any(|s| !s.v_mem.is_finite()) {
                return Err(Error::NonFinite { layer: l, step: t });
            }
            if trace.rasters {
                rasters[l].extend_from_slice(&after[0]);
            }
            if trace.vmem_layer == Some(l) {
                vmem.extend(states[l].iter().map(|s| s.v_mem));
            }
        }
        for (c, &s) in counts.iter_mut().zip(&spikes[n_layers - 1]) {
            *c += u32::from(s);
        }
        step_predictions.push(top(&counts).0);
    }
    let (prediction, tied) = top(&counts);
    Ok(InferenceResult {
        prediction,
        tied,
        counts,
        step_predictions,
        input_counts,
        rasters,
        vmem,
    })
}

/// Accuracy of a mode over a set of test images.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mode: Mode,
    pub images: usize,
    pub correct: usize,
    pub accuracy: f64,
    /// Accuracy using the counts accumulated up to each step.
    pub step_accuracy: Vec<f64>,
    pub ties: usize,
    pub predictions: Vec<usize>,
    pub energy: Option<EnergyLedger>,
}

/// Evaluates `indices` of `data` in parallel on the current rayon pool.
/// Image `i` always uses encoder stream `i`, and results are gathered in
/// index order, so the report does not depend on the worker count.
pub fn evaluate(
    net: &SnnNetwork,
    data: &Dataset,
    indices: &[usize],
    config: &RunConfig,
    energy: Option<&EnergyModel>,
) -> Result<EvalReport> {
    config.validate()?;
    let results: Vec<Result<(InferenceResult, Option<EnergyLedger>)>> = indices
        .par_iter()
        .map(|&i| {
            let encoding = encode_image(&data.intensities(i), i, config)?;
            let r = run_inference(net, &encoding, Evaluation::Monolithic, TraceOptions::default())?;
            let ledger = energy.map(|m| m.image_ledger(&r.input_counts, config.time_steps)).transpose()?;
            Ok((r, ledger))
        })
        .collect();
    let mut correct = 0;
    let mut ties = 0;
    let mut step_correct = vec![0usize; config.time_steps];
    let mut predictions = Vec::with_capacity(indices.len());
    let mut ledger = energy.map(|m| EnergyLedger::empty(m.neurons.len()));
    for (&i, result) in indices.iter().zip(results) {
        let (r, image_ledger) = result?;
        let label = data.label(i);
        correct += usize::from(r.prediction == label);
        ties += usize::from(r.tied);
        for (c, &p) in step_correct.iter_mut().zip(&r.step_predictions) {
            *c += usize::from(p == label);
        }
        predictions.push(r.prediction);
        if let (Some(total), Some(img)) = (ledger.as_mut(), image_ledger) {
            total.merge(&img);
        }
    }
    let n = indices.len().max(1) as f64;
    Ok(EvalReport {
        mode: net.mode,
        images: indices.len(),
        correct,
        accuracy: correct as f64 / n,
        step_accuracy: step_correct.iter().map(|&c| c as f64 / n).collect(),
        ties,
        predictions,
        energy: ledger,
    })
}

/// Signed drive each synapse adds to its neuron per input spike, in the
/// same units as the layer threshold.
pub fn effective_weights(net: &SnnNetwork, layer: usize) -> Array2<f64> {
    let l = &net.layers[layer];
    let r = l.readout;
    Array2::from_shape_fn((l.out_dim, l.in_dim), |(row, col)| {
        let k = col * l.out_dim + row;
        r.gain_k * (r.responsivity * (from_fixed(l.pos[k]) - from_fixed(l.neg[k])))
    })
}
