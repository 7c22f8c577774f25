use serde::{Deserialize, Serialize};

use super::bank::RingBank;
use super::levels::LevelTable;
use crate::error::{Error, Result};
use crate::optics::{GstState, WaveguideStack};

/// Adjacent-channel non-ideality factor for every (ring, level) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosstalkMap {
    /// `alpha[ring][level]`
    pub alpha: Vec<Vec<f64>>,
}

impl CrosstalkMap {
    /// All factors equal to one: an interference-free row.
    pub fn ideal(rings: usize, levels: usize) -> Self {
        CrosstalkMap {
            alpha: vec![vec![1.0; levels]; rings],
        }
    }

    #[inline]
    pub fn get(&self, ring: usize, level: usize) -> f64 {
        self.alpha[ring][level]
    }

    /// Smallest factor and its (ring, level) position.
    pub fn min(&self) -> (f64, usize, usize) {
        let mut best = (f64::INFINITY, 0, 0);
        for (ring, row) in self.alpha.iter().enumerate() {
            for (level, &a) in row.iter().enumerate() {
                if a < best.0 {
                    best = (a, ring, level);
                }
            }
        }
        best
    }
}

/// Product of a ring's transmissions at its neighbors' channels.
pub fn neighbor_product(off_channel: &[f64]) -> f64 {
    off_channel.iter().product()
}

/// Evaluates the non-ideality factor of each ring at each programmed level:
/// the ring's own transmission at the adjacent channels' wavelengths,
/// multiplied together. Edge rings have a single neighbor.
pub fn crosstalk_alpha(
    bank: &RingBank,
    table: &LevelTable,
    stack: &WaveguideStack,
) -> Result<CrosstalkMap> {
    if table.ring_count() != bank.len() {
        return Err(Error::Shape(format!(
            "level table has {} rings, bank has {}",
            table.ring_count(),
            bank.len()
        )));
    }
    let n = bank.len();
    let mut alpha = Vec::with_capacity(n);
    for (i, ring) in bank.rings.iter().enumerate() {
        let neighbors: Vec<f64> = [i.checked_sub(1), (i + 1 < n).then_some(i + 1)]
            .into_iter()
            .flatten()
            .map(|j| bank.channel_wavelengths[j])
            .collect();
        let mut row = Vec::with_capacity(table.level_count());
        for entry in &table.rings[i] {
            let p = GstState::new(entry.p)?;
            let off: Vec<f64> = neighbors
                .iter()
                .map(|&lambda| ring.transmission(p, stack, lambda))
                .collect::<Result<_>>()?;
            let a = neighbor_product(&off);
            if !(a > 0.0 && a <= 1.0) {
                return Err(Error::Internal(format!(
                    "ring {i} level {}: crosstalk factor {a} outside (0, 1]",
                    entry.level
                )));
            }
            row.push(a);
        }
        alpha.push(row);
    }
    Ok(CrosstalkMap { alpha })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpe::{build_level_table, design_ring_bank, BankSpec, LevelSpec};
    use crate::optics::RingDesign;

    #[test]
    fn neighbor_product_example() {
        assert!((neighbor_product(&[0.98, 0.98]) - 0.9604).abs() < 1e-15);
        assert_eq!(neighbor_product(&[]), 1.0);
    }

    #[test]
    fn single_ring_has_no_crosstalk() {
        let stack = WaveguideStack::default();
        let spec = BankSpec { rings: 1, ..BankSpec::default() };
        let bank = design_ring_bank(&RingDesign::default(), &stack, &spec).unwrap();
        let table = build_level_table(&bank, &stack, &LevelSpec::default()).unwrap();
        let map = crosstalk_alpha(&bank, &table, &stack).unwrap();
        assert!(map.alpha[0].iter().all(|&a| a == 1.0));
    }

    #[test]
    fn worst_case_sits_at_the_top_level() {
        let stack = WaveguideStack::default();
        let bank = design_ring_bank(&RingDesign::default(), &stack, &BankSpec::default()).unwrap();
        let table = build_level_table(&bank, &stack, &LevelSpec::default()).unwrap();
        let map = crosstalk_alpha(&bank, &table, &stack).unwrap();
        for row in &map.alpha {
            assert!(row.iter().all(|&a| a > 0.0 && a <= 1.0));
            assert!(row.windows(2).all(|w| w[1] <= w[0]));
        }
        let (_, ring, level) = map.min();
        assert_eq!(level, 15);
        // Interior rings see two neighbors.
        assert!(ring > 0 && ring < 15);
    }
}
