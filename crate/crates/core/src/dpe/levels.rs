use serde::{Deserialize, Serialize};

use super::bank::RingBank;
use crate::error::{Error, Result};
use crate::optics::{GstState, WaveguideStack};

/// Number of programmable states per synapse.
pub const DEFAULT_LEVELS: usize = 16;

/// Quantization contract: level count and, optionally, the transmission
/// range the levels must span. Unset bounds default to the ring's own
/// amorphous and crystalline resonance transmissions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LevelSpec {
    pub count: usize,
    #[serde(default)]
    pub t_low: Option<f64>,
    #[serde(default)]
    pub t_high: Option<f64>,
}

impl Default for LevelSpec {
    fn default() -> Self {
        LevelSpec {
            count: DEFAULT_LEVELS,
            t_low: None,
            t_high: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelEntry {
    pub level: usize,
    /// Degree of crystallization programmed for this level.
    pub p: f64,
    /// Resonance transmission at `p`.
    pub transmission: f64,
}

/// Per-ring table of programmable states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelTable {
    pub rings: Vec<Vec<LevelEntry>>,
}

impl LevelTable {
    pub fn ring_count(&self) -> usize {
        self.rings.len()
    }

    pub fn level_count(&self) -> usize {
        self.rings.first().map_or(0, Vec::len)
    }

    pub fn transmission(&self, ring: usize, level: usize) -> f64 {
        self.rings[ring][level].transmission
    }

    pub fn t_low(&self, ring: usize) -> f64 {
        self.rings[ring][0].transmission
    }

    pub fn t_high(&self, ring: usize) -> f64 {
        self.rings[ring][self.level_count() - 1].transmission
    }

    /// Transmission range averaged over the rings.
    pub fn nominal_range(&self) -> f64 {
        let n = self.ring_count() as f64;
        (0..self.ring_count())
            .map(|r| self.t_high(r) - self.t_low(r))
            .sum::<f64>()
            / n
    }

    /// Coefficient of determination of a straight-line fit of transmission
    /// against level index.
    pub fn linearity_r2(&self, ring: usize) -> f64 {
        let ys: Vec<f64> = self.rings[ring].iter().map(|e| e.transmission).collect();
        let n = ys.len() as f64;
        let mean_x = (n - 1.0) / 2.0;
        let mean_y = ys.iter().sum::<f64>() / n;
        let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
        for (i, y) in ys.iter().enumerate() {
            let dx = i as f64 - mean_x;
            let dy = y - mean_y;
            sxy += dx * dy;
            sxx += dx * dx;
            syy += dy * dy;
        }
        if syy == 0.0 {
            return 0.0;
        }
        sxy * sxy / (sxx * syy)
    }

    /// True if `t` is exactly one of the ring's level transmissions.
    pub fn contains(&self, ring: usize, t: f64) -> bool {
        self.rings[ring].iter().any(|e| e.transmission == t)
    }
}

/// Inverts the monotone resonance transmission curve `T(p)` by bisection.
fn solve_p(curve: impl Fn(f64) -> Result<f64>, target: f64) -> Result<f64> {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if curve(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Builds the level table for every ring in the bank.
///
/// Target transmissions are spaced linearly between the range bounds; the
/// crystallization for each is found on the ring's own `T(p)` curve, so the
/// programmed `p` values come out non-uniform.
pub fn build_level_table(
    bank: &RingBank,
    stack: &WaveguideStack,
    spec: &LevelSpec,
) -> Result<LevelTable> {
    if spec.count < 2 {
        return Err(Error::Domain(format!(
            "a level table needs at least two levels, got {}",
            spec.count
        )));
    }
    let steps = (spec.count - 1) as f64;
    let mut rings = Vec::with_capacity(bank.len());
    for (index, ring) in bank.rings.iter().enumerate() {
        let curve = |p: f64| ring.resonant_transmission(GstState::new(p)?, stack, bank.mode_order);
        let (low, high) = (curve(0.0)?, curve(1.0)?);
        let t_low = spec.t_low.unwrap_or(low);
        let t_high = spec.t_high.unwrap_or(high);
        let slack = 1e-12;
        for target in [t_low, t_high] {
            if !(target >= low - slack && target <= high + slack) {
                return Err(Error::QuantizationRange {
                    ring: index,
                    target,
                    low,
                    high,
                });
            }
        }

        let mut entries = Vec::with_capacity(spec.count);
        for level in 0..spec.count {
            let p = if level == 0 && spec.t_low.is_none() {
                0.0
            } else if level == spec.count - 1 && spec.t_high.is_none() {
                1.0
            } else {
                let target = t_low + (t_high - t_low) * level as f64 / steps;
                solve_p(&curve, target)?
            };
            entries.push(LevelEntry {
                level,
                p,
                transmission: curve(p)?,
            });
        }
        if entries.windows(2).any(|w| w[1].transmission <= w[0].transmission) {
            return Err(Error::Internal(format!(
                "ring {index}: level transmissions are not strictly increasing"
            )));
        }
        rings.push(entries);
    }
    Ok(LevelTable { rings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpe::{design_ring_bank, BankSpec};
    use crate::optics::RingDesign;

    fn bank() -> (RingBank, WaveguideStack) {
        let stack = WaveguideStack::default();
        let bank = design_ring_bank(&RingDesign::default(), &stack, &BankSpec::default()).unwrap();
        (bank, stack)
    }

    #[test]
    fn sixteen_linear_levels_per_ring() {
        let (bank, stack) = bank();
        let table = build_level_table(&bank, &stack, &LevelSpec::default()).unwrap();
        assert_eq!(table.ring_count(), 16);
        assert_eq!(table.level_count(), 16);
        for ring in 0..16 {
            let entries = &table.rings[ring];
            assert_eq!(entries[15].p, 1.0);
            assert_eq!(entries[0].p, 0.0);
            assert!(entries[0].transmission <= 1e-6);
            assert!(table.linearity_r2(ring) >= 0.99);
            assert!(entries.windows(2).all(|w| w[1].p > w[0].p));
        }
    }

    #[test]
    fn recovered_states_reproduce_targets() {
        let (bank, stack) = bank();
        let table = build_level_table(&bank, &stack, &LevelSpec::default()).unwrap();
        for (ring, entries) in table.rings.iter().enumerate() {
            let step = (table.t_high(ring) - table.t_low(ring)) / 15.0;
            for e in entries {
                let target = table.t_low(ring) + step * e.level as f64;
                assert!((e.transmission - target).abs() < 1e-12);
                let forward = bank.rings[ring]
                    .resonant_transmission(GstState::new(e.p).unwrap(), &stack, bank.mode_order)
                    .unwrap();
                assert_eq!(forward, e.transmission);
            }
        }
    }

    #[test]
    fn unreachable_range_is_rejected() {
        let (bank, stack) = bank();
        let spec = LevelSpec { t_high: Some(0.99), ..LevelSpec::default() };
        assert!(matches!(
            build_level_table(&bank, &stack, &spec),
            Err(Error::QuantizationRange { .. })
        ));
        let spec = LevelSpec { count: 1, ..LevelSpec::default() };
        assert!(build_level_table(&bank, &stack, &spec).is_err());
    }
}
