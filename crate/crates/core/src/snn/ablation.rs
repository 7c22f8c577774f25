use serde::{Deserialize, Serialize};

use super::convert::SnnModel;
use super::encode::RunConfig;
use super::engine::{evaluate, DeviceContext, Mode, SnnNetwork};
use crate::error::Result;
use crate::mnist::Dataset;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub mode: Mode,
    pub images: usize,
    pub accuracy: f64,
    /// Ideal accuracy minus this mode's accuracy, percentage points, on the
    /// same images.
    pub degradation_pp: f64,
}

/// Accuracy of every mode on the same images and encoder streams.
pub fn ablation_report(
    snn: &SnnModel,
    device: &DeviceContext,
    data: &Dataset,
    indices: &[usize],
    config: &RunConfig,
) -> Result<Vec<AblationRow>> {
    let mut rows = Vec::with_capacity(Mode::ALL.len());
    let mut ideal = 0.0;
    for mode in Mode::ALL {
        let net = SnnNetwork::new(snn, mode, Some(device), config.amplitude)?;
        let report = evaluate(&net, data, indices, config, None)?;
        if mode == Mode::Ideal {
            ideal = report.accuracy;
        }
        rows.push(AblationRow {
            mode,
            images: report.images,
            accuracy: report.accuracy,
            degradation_pp: 100.0 * (ideal - report.accuracy),
        });
    }
    Ok(rows)
}
