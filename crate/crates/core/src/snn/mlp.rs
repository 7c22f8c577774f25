use ndarray::{s, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Binomial, Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::purpose_rng;

/// Bias-free fully connected ReLU network with a linear output layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub sizes: Vec<usize>,
    /// `weights[l]` is `sizes[l+1] × sizes[l]`.
    pub weights: Vec<Array2<f64>>,
    pub seed: u64,
}

fn validate_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.len() < 2 || sizes.contains(&0) {
        return Err(Error::Shape(format!("invalid topology {sizes:?}")));
    }
    Ok(())
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.into_iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

impl MlpModel {
    /// He-normal initialization.
    pub fn new(sizes: &[usize], rng: &mut impl Rng, seed: u64) -> Result<Self> {
        validate_sizes(sizes)?;
        let weights = sizes
            .windows(2)
            .map(|w| {
                let normal = Normal::new(0.0, (2.0 / w[0] as f64).sqrt()).expect("positive std");
                Array2::from_shape_simple_fn((w[1], w[0]), || normal.sample(rng))
            })
            .collect();
        Ok(MlpModel {
            sizes: sizes.to_vec(),
            weights,
            seed,
        })
    }

    pub fn from_weights(weights: Vec<Array2<f64>>, seed: u64) -> Result<Self> {
        let mut sizes = vec![weights.first().map_or(0, |w| w.ncols())];
        for (l, w) in weights.iter().enumerate() {
            if w.ncols() != *sizes.last().unwrap() {
                return Err(Error::Shape(format!(
                    "layer {l} expects {} inputs, previous layer has {}",
                    w.ncols(),
                    sizes.last().unwrap()
                )));
            }
            sizes.push(w.nrows());
        }
        validate_sizes(&sizes)?;
        Ok(MlpModel { sizes, weights, seed })
    }

    pub fn layers(&self) -> usize {
        self.weights.len()
    }

    /// Pre-activations of every layer for a batch (`batch × in`).
    pub fn pre_activations(&self, x: ArrayView2<f64>) -> Vec<Array2<f64>> {
        let mut out = Vec::with_capacity(self.layers());
        let mut a = x.to_owned();
        for (l, w) in self.weights.iter().enumerate() {
            let z = a.dot(&w.t());
            if l + 1 < self.layers() {
                a = z.mapv(|v| v.max(0.0));
            }
            out.push(z);
        }
        out
    }

    pub fn logits(&self, x: ArrayView2<f64>) -> Array2<f64> {
        self.pre_activations(x).pop().expect("at least one layer")
    }

    pub fn predict(&self, x: ArrayView2<f64>) -> Vec<usize> {
        self.logits(x).rows().into_iter().map(|r| argmax(r.iter().copied())).collect()
    }

    /// Fraction of correctly classified rows, evaluated in chunks.
    pub fn accuracy(&self, x: &Array2<f64>, labels: &[usize]) -> f64 {
        let mut correct = 0;
        let n = x.nrows();
        for start in (0..n).step_by(1000) {
            let end = (start + 1000).min(n);
            let pred = self.predict(x.slice(s![start..end, ..]));
            correct += pred.iter().zip(&labels[start..end]).filter(|(p, l)| p == l).count();
        }
        correct as f64 / n as f64
    }
}

/// Mean softmax cross-entropy plus `0.5·weight_decay·Σw²`, and its gradient
/// with respect to every weight matrix.
pub fn loss_and_gradients(
    model: &MlpModel,
    x: ArrayView2<f64>,
    labels: &[usize],
    weight_decay: f64,
) -> (f64, Vec<Array2<f64>>) {
    let batch = x.nrows() as f64;
    let zs = model.pre_activations(x);
    let acts: Vec<Array2<f64>> = zs[..zs.len() - 1].iter().map(|z| z.mapv(|v| v.max(0.0))).collect();

    let logits = zs.last().unwrap();
    let mut delta = logits.clone();
    let mut loss = 0.0;
    for (mut row, &label) in delta.rows_mut().into_iter().zip(labels) {
        let m = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        row.mapv_inplace(|v| (v - m).exp());
        let total = row.sum();
        row /= total;
        loss -= row[label].ln();
        row[label] -= 1.0;
    }
    loss /= batch;
    delta /= batch;

    let mut grads = vec![Array2::zeros((0, 0)); model.layers()];
    for l in (0..model.layers()).rev() {
        let input = if l == 0 { x.to_owned() } else { acts[l - 1].clone() };
        let mut g = delta.t().dot(&input);
        if weight_decay > 0.0 {
            g.scaled_add(weight_decay, &model.weights[l]);
        }
        if l > 0 {
            let mut back = delta.dot(&model.weights[l]);
            back.zip_mut_with(&zs[l - 1], |d, &z| {
                if z <= 0.0 {
                    *d = 0.0;
                }
            });
            delta = back;
        }
        grads[l] = g;
    }
    if weight_decay > 0.0 {
        loss += 0.5 * weight_decay * model.weights.iter().map(|w| w.iter().map(|v| v * v).sum::<f64>()).sum::<f64>();
    }
    (loss, grads)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Multiplier applied to the learning rate after every epoch.
    pub lr_decay: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    /// Minimum final training accuracy; below it training fails.
    pub accuracy_floor: f64,
    /// When set, every minibatch input `x` is replaced by `Binomial(n, x)/n`,
    /// the spike-rate estimate an `n`-step rate code would deliver.
    pub rate_samples: Option<u32>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 15,
            batch_size: 64,
            learning_rate: 0.05,
            lr_decay: 0.85,
            momentum: 0.9,
            weight_decay: 1e-4,
            accuracy_floor: 0.5,
            rate_samples: Some(35),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub loss: f64,
    pub train_accuracy: f64,
}

/// SGD with momentum on minibatches drawn in a seeded random order.
pub fn train_ann(
    x: &Array2<f64>,
    labels: &[usize],
    sizes: &[usize],
    config: &TrainConfig,
    seed: u64,
) -> Result<(MlpModel, Vec<EpochStats>)> {
    validate_sizes(sizes)?;
    if x.nrows() != labels.len() || x.ncols() != sizes[0] {
        return Err(Error::Shape(format!(
            "{}×{} inputs with {} labels for topology {sizes:?}",
            x.nrows(),
            x.ncols(),
            labels.len()
        )));
    }
    let classes = *sizes.last().unwrap();
    if let Some(l) = labels.iter().find(|&&l| l >= classes) {
        return Err(Error::Shape(format!("label {l} exceeds {classes} classes")));
    }
    if x.nrows() == 0 || config.batch_size == 0 {
        return Err(Error::Training("empty training set or zero batch size".into()));
    }
    let mut model = MlpModel::new(sizes, &mut purpose_rng(seed, "init"), seed)?;
    let mut velocity: Vec<Array2<f64>> = model.weights.iter().map(|w| Array2::zeros(w.dim())).collect();
    let mut order_rng = purpose_rng(seed, "train-order");
    let mut noise_rng = purpose_rng(seed, "train-noise");
    let mut order: Vec<usize> = (0..x.nrows()).collect();
    let mut lr = config.learning_rate;
    let mut history = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        order.shuffle(&mut order_rng);
        let mut loss_sum = 0.0;
        let mut batches = 0;
        for chunk in order.chunks(config.batch_size) {
            let mut xb = x.select(Axis(0), chunk);
            if let Some(n) = config.rate_samples {
                xb.mapv_inplace(|p| {
                    if p <= 0.0 || p >= 1.0 {
                        p.clamp(0.0, 1.0)
                    } else {
                        Binomial::new(u64::from(n), p).expect("p in (0, 1)").sample(&mut noise_rng) as f64
                            / f64::from(n)
                    }
                });
            }
            let yb: Vec<usize> = chunk.iter().map(|&i| labels[i]).collect();
            let (loss, grads) = loss_and_gradients(&model, xb.view(), &yb, config.weight_decay);
            if !loss.is_finite() {
                return Err(Error::Training(format!(
                    "loss diverged to {loss} in epoch {epoch} at batch {batches}; lower the learning rate"
                )));
            }
            loss_sum += loss;
            batches += 1;
            for ((w, v), g) in model.weights.iter_mut().zip(&mut velocity).zip(&grads) {
                v.zip_mut_with(g, |v, &g| *v = config.momentum * *v - lr * g);
                *w += &*v;
            }
        }
        history.push(EpochStats {
            epoch,
            loss: loss_sum / batches as f64,
            train_accuracy: f64::NAN,
        });
        lr *= config.lr_decay;
    }
    let train_accuracy = model.accuracy(x, labels);
    if let Some(last) = history.last_mut() {
        last.train_accuracy = train_accuracy;
    }
    if train_accuracy < config.accuracy_floor {
        let losses: Vec<String> = history.iter().map(|h| format!("{:.4}", h.loss)).collect();
        return Err(Error::Training(format!(
            "training accuracy {train_accuracy:.4} below floor {}; epoch losses [{}]",
            config.accuracy_floor,
            losses.join(", ")
        )));
    }
    Ok((model, history))
}
