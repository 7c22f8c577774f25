use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::crosstalk::CrosstalkMap;
use super::levels::LevelTable;
use crate::error::{Error, Result};
use crate::sum::ExactSum;

/// Photodetector and laser-driver constants shared by all rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Readout {
    /// Photodetector responsivity, A/W.
    pub responsivity: f64,
    /// Current-to-optical-power conversion of the laser driver, W/A.
    pub gain_k: f64,
}

impl Readout {
    /// Chooses `gain_k` so that a row with every ring at its top level and
    /// every input at amplitude `P` emits exactly `P`.
    pub fn normalized(table: &LevelTable, responsivity: f64) -> Self {
        let full_scale: f64 = (0..table.ring_count()).map(|r| table.t_high(r)).sum();
        Readout {
            responsivity,
            gain_k: 1.0 / (responsivity * full_scale),
        }
    }
}

/// One time-multiplexed slice of a weight matrix on the ring bank:
/// `rows` dot-product rows, each with one ring per WDM channel, in two
/// polarity arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpeTile {
    pub rows: usize,
    /// Channels per row (rings in the bank).
    pub width: usize,
    /// Row-major `rows × width` level indices of the positive array.
    pub level_pos: Vec<u16>,
    pub level_neg: Vec<u16>,
    /// Row-major `rows × width` transmissions of the positive array.
    pub t_pos: Vec<f64>,
    pub t_neg: Vec<f64>,
    pub readout: Readout,
}

/// Exact per-row photocurrent sums before readout scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSums {
    pub pos: Vec<ExactSum>,
    pub neg: Vec<ExactSum>,
}

impl PartialSums {
    pub fn zeros(rows: usize) -> Self {
        PartialSums {
            pos: vec![ExactSum::new(); rows],
            neg: vec![ExactSum::new(); rows],
        }
    }

    pub fn merge(&mut self, other: &PartialSums) {
        for (a, b) in self.pos.iter_mut().zip(&other.pos) {
            a.merge(*b);
        }
        for (a, b) in self.neg.iter_mut().zip(&other.neg) {
            a.merge(*b);
        }
    }

    /// Applies `O = k · R · Σ`.
    pub fn finish(&self, readout: &Readout) -> (Vec<f64>, Vec<f64>) {
        let out = |s: &ExactSum| readout.gain_k * (readout.responsivity * s.value());
        (
            self.pos.iter().map(out).collect(),
            self.neg.iter().map(out).collect(),
        )
    }
}

fn check_inputs(p_in: &[f64], width: usize) -> Result<()> {
    if p_in.len() != width {
        return Err(Error::Shape(format!(
            "input vector has {} channels, tile has {width}",
            p_in.len()
        )));
    }
    if let Some((i, p)) = p_in.iter().enumerate().find(|(_, p)| !(**p >= 0.0 && p.is_finite())) {
        return Err(Error::Domain(format!("input power {p} on channel {i} must be finite and >= 0")));
    }
    Ok(())
}

/// Row sums `Σ_i α_i T_ij P_i` of both arrays, kept exact so partial
/// results from different tiles can be added in any order.
pub fn dpe_partial(tile: &DpeTile, p_in: &[f64], alpha: &CrosstalkMap) -> Result<PartialSums> {
    check_inputs(p_in, tile.width)?;
    let mut sums = PartialSums::zeros(tile.rows);
    for j in 0..tile.rows {
        let base = j * tile.width;
        for (i, &p) in p_in.iter().enumerate() {
            let k = base + i;
            let pos = alpha.get(i, tile.level_pos[k] as usize) * tile.t_pos[k] * p;
            let neg = alpha.get(i, tile.level_neg[k] as usize) * tile.t_neg[k] * p;
            if !(sums.pos[j].add(pos) && sums.neg[j].add(neg)) {
                return Err(Error::Domain(format!(
                    "row {j}: weighted power out of representable range"
                )));
            }
        }
    }
    Ok(sums)
}

/// Positive and negative row outputs of one tile:
/// `O_j = k · R · Σ_i α_i T_ij P_i` for each polarity array.
pub fn dpe_forward(tile: &DpeTile, p_in: &[f64], alpha: &CrosstalkMap) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok(dpe_partial(tile, p_in, alpha)?.finish(&tile.readout))
}

/// A weight matrix mapped onto `ceil(in_dim / width)` tiles.
///
/// Input column `c` is served by tile `c / width` on ring `c % width`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappedLayer {
    pub in_dim: usize,
    pub out_dim: usize,
    pub width: usize,
    pub level_count: usize,
    /// max |w| of the source matrix; maps to the full transmission range.
    pub weight_scale: f64,
    /// Signed level of every weight, row-major `out_dim × in_dim`.
    pub levels: Vec<i32>,
    pub tiles: Vec<DpeTile>,
}

impl MappedLayer {
    pub fn tile_count(&self) -> usize {
        self.tiles.len()
    }

    /// `t_pos - t_neg` for output `row`, input `col`.
    pub fn effective_weight(&self, row: usize, col: usize) -> f64 {
        let tile = &self.tiles[col / self.width];
        let k = row * self.width + col % self.width;
        tile.t_pos[k] - tile.t_neg[k]
    }

    /// Evaluates every tile on its slice of `p_in` and adds the partial sums
    /// before readout.
    pub fn forward(&self, p_in: &[f64], alpha: &CrosstalkMap) -> Result<(Vec<f64>, Vec<f64>)> {
        if p_in.len() != self.in_dim {
            return Err(Error::Shape(format!(
                "layer expects {} inputs, got {}",
                self.in_dim,
                p_in.len()
            )));
        }
        let mut total = PartialSums::zeros(self.out_dim);
        let mut slice = vec![0.0; self.width];
        for (t, tile) in self.tiles.iter().enumerate() {
            slice.fill(0.0);
            let start = t * self.width;
            let end = (start + self.width).min(self.in_dim);
            slice[..end - start].copy_from_slice(&p_in[start..end]);
            total.merge(&dpe_partial(tile, &slice, alpha)?);
        }
        let readout = self.tiles.first().map(|t| t.readout).unwrap_or(Readout {
            responsivity: 1.0,
            gain_k: 1.0,
        });
        Ok(total.finish(&readout))
    }
}

/// Quantizes `|w| / max|w|` onto `levels - 1` equal steps, rounding half
/// away from zero.
pub fn quantize(w: f64, scale: f64, levels: usize) -> i32 {
    if scale == 0.0 {
        return 0;
    }
    let top = (levels - 1) as f64;
    let magnitude = (w.abs() / scale * top).round().min(top);
    (magnitude as i32) * if w < 0.0 { -1 } else { 1 }
}

/// Maps a real `out × in` weight matrix onto positive/negative transmission
/// arrays. A positive weight programs the positive ring to its level and
/// leaves the negative ring at the lowest level; negative weights mirror it.
pub fn map_weights(weights: &Array2<f64>, table: &LevelTable, readout: Readout) -> Result<MappedLayer> {
    let (out_dim, in_dim) = weights.dim();
    if let Some(w) = weights.iter().find(|w| !w.is_finite()) {
        return Err(Error::Domain(format!("weight {w} is not finite")));
    }
    let width = table.ring_count();
    let level_count = table.level_count();
    if width == 0 || level_count < 2 {
        return Err(Error::Shape("level table is empty".into()));
    }
    let scale = weights.iter().fold(0.0_f64, |m, w| m.max(w.abs()));
    let levels: Vec<i32> = weights.iter().map(|&w| quantize(w, scale, level_count)).collect();

    let tile_count = in_dim.div_ceil(width);
    let mut tiles = Vec::with_capacity(tile_count);
    for t in 0..tile_count {
        let n = out_dim * width;
        let mut tile = DpeTile {
            rows: out_dim,
            width,
            level_pos: vec![0; n],
            level_neg: vec![0; n],
            t_pos: vec![0.0; n],
            t_neg: vec![0.0; n],
            readout,
        };
        for j in 0..out_dim {
            for i in 0..width {
                let col = t * width + i;
                let q = if col < in_dim { levels[j * in_dim + col] } else { 0 };
                let (lp, ln) = if q >= 0 { (q as usize, 0) } else { (0, (-q) as usize) };
                let k = j * width + i;
                tile.level_pos[k] = lp as u16;
                tile.level_neg[k] = ln as u16;
                tile.t_pos[k] = table.transmission(i, lp);
                tile.t_neg[k] = table.transmission(i, ln);
            }
        }
        tiles.push(tile);
    }
    Ok(MappedLayer {
        in_dim,
        out_dim,
        width,
        level_count,
        weight_scale: scale,
        levels,
        tiles,
    })
}
