//! WDM dot-product engine.
//!
//! A row of rings with increasing radii shares one bus waveguide; each ring
//! weights its own wavelength channel and a photodetector sums the row.
//! Signed weights use two such arrays (positive and negative) per row, and
//! matrices wider than the bank are split into time-multiplexed tiles whose
//! partial sums are added before the neuron.

mod bank;
mod crosstalk;
mod levels;
mod tile;

pub use bank::{design_ring_bank, BankSpec, RingBank};
pub use crosstalk::{crosstalk_alpha, neighbor_product, CrosstalkMap};
pub use levels::{build_level_table, LevelEntry, LevelSpec, LevelTable, DEFAULT_LEVELS};
pub use tile::{
    dpe_forward, dpe_partial, map_weights, quantize, DpeTile, MappedLayer, PartialSums, Readout,
};
