//! Behavioral simulator of a photonic spiking neural network built from
//! phase-change (GST) synapses on silicon microring resonators.
//!
//! * [`optics`]: ring transmission, spectra and GST material mixing.
//! * [`dpe`]: WDM ring banks, level tables, crosstalk and tiled dot products.
//! * [`neuron`]: bipolar integrate-and-fire neurons.
//! * [`snn`]: ANN training, conversion, Poisson encoding and inference.
//! * [`energy`]: read-pulse and neuron energy accounting.

pub mod dpe;
pub mod energy;
pub mod error;
pub mod formats;
pub mod mnist;
pub mod neuron;
pub mod optics;
pub mod rng;
pub mod snn;
pub mod sum;

pub use error::{Error, Result};
