//! Bipolar integrate-and-fire neurons.
//!
//! Each neuron receives the positive and negative array outputs of its row,
//! integrates their difference without leak, and hard-resets to rest after
//! crossing threshold. The membrane may go below rest under net inhibition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeuronState {
    pub v_mem: f64,
    pub v_th: f64,
    pub v_rest: f64,
}

impl NeuronState {
    /// A neuron at rest.
    pub fn new(v_th: f64, v_rest: f64) -> Result<Self> {
        if !(v_th > v_rest) || !v_th.is_finite() || !v_rest.is_finite() {
            return Err(Error::Domain(format!(
                "threshold {v_th} must exceed resting value {v_rest}"
            )));
        }
        Ok(NeuronState {
            v_mem: v_rest,
            v_th,
            v_rest,
        })
    }

    pub fn reset(&mut self) {
        self.v_mem = self.v_rest;
    }
}

/// One integration step. Returns whether the neuron fired.
#[inline]
pub fn if_step(state: &mut NeuronState, o_pos: f64, o_neg: f64) -> bool {
    state.v_mem += o_pos - o_neg;
    if state.v_mem >= state.v_th {
        state.v_mem = state.v_rest;
        true
    } else {
        false
    }
}

/// Steps every neuron of a layer, writing 0/1 into `spikes`.
pub fn layer_step_into(
    states: &mut [NeuronState],
    o_pos: &[f64],
    o_neg: &[f64],
    spikes: &mut [u8],
) -> Result<()> {
    let n = states.len();
    if o_pos.len() != n || o_neg.len() != n || spikes.len() != n {
        return Err(Error::Shape(format!(
            "layer of {n} neurons got {} positive, {} negative inputs and {} spike slots",
            o_pos.len(),
            o_neg.len(),
            spikes.len()
        )));
    }
    for (((state, &p), &q), s) in states.iter_mut().zip(o_pos).zip(o_neg).zip(spikes.iter_mut()) {
        *s = u8::from(if_step(state, p, q));
    }
    Ok(())
}

/// Steps every neuron of a layer and returns the spike vector.
pub fn layer_step(states: &mut [NeuronState], o_pos: &[f64], o_neg: &[f64]) -> Result<Vec<u8>> {
    let mut spikes = vec![0; states.len()];
    layer_step_into(states, o_pos, o_neg, &mut spikes)?;
    Ok(spikes)
}
