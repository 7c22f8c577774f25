use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use super::mlp::MlpModel;
use crate::error::{Error, Result};

/// Statistic of the calibration pre-activations that sets a layer's scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    Max,
    /// Percentile in (0, 100] of all pre-activations of the layer.
    Percentile(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConversionConfig {
    pub normalization: Normalization,
    /// Multiplier on the output layer's threshold. Output neurons whose
    /// per-step drive routinely exceeds threshold fire every step and lose
    /// the excess at reset, which collapses the spike-count ranking; a
    /// larger threshold keeps them integrating.
    pub output_headroom: f64,
}

impl Default for ConversionConfig {
    fn default() -> Self {
        ConversionConfig {
            normalization: Normalization::Max,
            output_headroom: 4.0,
        }
    }
}

/// An ANN converted to integrate-and-fire layers. Weights are unchanged;
/// layer `l` fires when its accumulated drive reaches `thresholds[l]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnnModel {
    pub model: MlpModel,
    pub thresholds: Vec<f64>,
    /// Activation scale `λ_l` of each layer on the calibration data.
    pub scales: Vec<f64>,
    pub conversion: ConversionConfig,
}

impl SnnModel {
    pub fn sizes(&self) -> &[usize] {
        &self.model.sizes
    }
}

fn layer_scale(values: &[f64], norm: Normalization) -> Result<f64> {
    let scale = match norm {
        Normalization::Max => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        Normalization::Percentile(q) => {
            if !(q > 0.0 && q <= 100.0) {
                return Err(Error::Domain(format!("percentile {q} outside (0, 100]")));
            }
            let mut sorted: Vec<f64> = values.iter().copied().filter(|v| *v > 0.0).collect();
            if sorted.is_empty() {
                0.0
            } else {
                sorted.sort_by(f64::total_cmp);
                let rank = ((q / 100.0) * sorted.len() as f64).ceil() as usize;
                sorted[rank.clamp(1, sorted.len()) - 1]
            }
        }
    };
    Ok(scale)
}

/// Data-based normalization: `λ_l` is the chosen statistic of layer `l`'s
/// pre-activations when the previous layer's activations are divided by
/// `λ_{l-1}` (with `λ_0 = 1` for inputs in [0, 1]). The threshold of layer
/// `l` is `λ_l / λ_{l-1}`, which is equivalent to rescaling the weights by
/// `λ_{l-1} / λ_l` under a unit threshold. The output threshold is further
/// multiplied by `output_headroom`.
pub fn convert_ann_to_snn(
    model: &MlpModel,
    calibration: ArrayView2<f64>,
    config: &ConversionConfig,
) -> Result<SnnModel> {
    if !(config.output_headroom > 0.0 && config.output_headroom.is_finite()) {
        return Err(Error::Domain(format!("output headroom {} must be > 0", config.output_headroom)));
    }
    let norm = config.normalization;
    if calibration.ncols() != model.sizes[0] || calibration.nrows() == 0 {
        return Err(Error::Shape(format!(
            "calibration data is {}×{}, model expects {} inputs",
            calibration.nrows(),
            calibration.ncols(),
            model.sizes[0]
        )));
    }
    let mut thresholds = Vec::with_capacity(model.layers());
    let mut scales = Vec::with_capacity(model.layers());
    let mut a = calibration.to_owned();
    let mut previous = 1.0;
    for w in &model.weights {
        let z = a.dot(&w.t());
        let values: Vec<f64> = z.iter().copied().collect();
        let lambda = layer_scale(&values, norm)?;
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!(
                "layer {} never activates on the calibration data",
                scales.len()
            )));
        }
        thresholds.push(lambda / previous);
        scales.push(lambda);
        a = z.mapv(|v| v.max(0.0) / lambda);
        previous = lambda;
    }
    if let Some(last) = thresholds.last_mut() {
        *last *= config.output_headroom;
    }
    Ok(SnnModel {
        model: model.clone(),
        thresholds,
        scales,
        conversion: *config,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    const PLAIN: ConversionConfig = ConversionConfig {
        normalization: Normalization::Max,
        output_headroom: 1.0,
    };

    #[test]
    fn identity_layer_gets_unit_threshold() {
        let model = MlpModel::from_weights(vec![Array2::eye(3)], 0).unwrap();
        let calib = array![[0.2, 1.0, 0.0], [0.5, 0.1, 0.3]];
        let snn = convert_ann_to_snn(&model, calib.view(), &PLAIN).unwrap();
        assert_eq!(snn.thresholds, vec![1.0]);
    }

    #[test]
    fn thresholds_are_scale_ratios() {
        let w1 = array![[2.0, 0.0], [0.0, 1.0]];
        let w2 = array![[3.0, 0.0]];
        let model = MlpModel::from_weights(vec![w1, w2], 0).unwrap();
        let calib = array![[1.0, 1.0], [0.5, 0.0]];
        let snn = convert_ann_to_snn(&model, calib.view(), &PLAIN).unwrap();
        assert_eq!(snn.scales, vec![2.0, 3.0]);
        assert_eq!(snn.thresholds, vec![2.0, 1.5]);
        let cfg = ConversionConfig { output_headroom: 4.0, ..PLAIN };
        let snn = convert_ann_to_snn(&model, calib.view(), &cfg).unwrap();
        assert_eq!(snn.thresholds, vec![2.0, 6.0]);
    }

    #[test]
    fn percentile_below_max() {
        let values: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(layer_scale(&values, Normalization::Percentile(99.0)).unwrap(), 990.0);
        assert_eq!(layer_scale(&values, Normalization::Percentile(100.0)).unwrap(), 1000.0);
        assert!(layer_scale(&values, Normalization::Percentile(0.0)).is_err());
    }

    #[test]
    fn dead_layer_is_rejected() {
        let model = MlpModel::from_weights(vec![array![[-1.0, -1.0]]], 0).unwrap();
        let calib = array![[1.0, 1.0]];
        assert!(convert_ann_to_snn(&model, calib.view(), &PLAIN).is_err());
    }
}
