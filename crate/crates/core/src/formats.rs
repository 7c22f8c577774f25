//! Artifact files and CSV reports.
//!
//! Artifacts are JSON documents `{"header": {...}, "body": {...}}`. The
//! header names the artifact kind and format version, the ring-bank geometry
//! hash it was produced against, the level count and the main dimensions.
//! Loading checks kind and version before decoding the body.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dpe::{CrosstalkMap, LevelTable, RingBank};
use crate::energy::{zj_to_joules, EnergyLedger};
use crate::error::{Error, Result};
use crate::optics::{GstState, RingDesign, WaveguideStack};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Header {
    pub kind: String,
    pub version: u32,
    /// Hex SHA-256 of the ring geometry, empty when not bound to a bank.
    pub geometry_hash: String,
    pub levels: usize,
    pub dims: Vec<usize>,
    pub seed: Option<u64>,
}

impl Header {
    pub fn new(kind: &str) -> Self {
        Header {
            kind: kind.to_string(),
            version: FORMAT_VERSION,
            geometry_hash: String::new(),
            levels: 0,
            dims: Vec::new(),
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document<T> {
    pub header: Header,
    pub body: T,
}

/// Hash over the exact bit patterns of every ring's geometry and the bank's
/// mode order.
pub fn geometry_hash(bank: &RingBank) -> String {
    let mut h = Sha256::new();
    h.update(u64::from(bank.mode_order).to_le_bytes());
    for r in &bank.rings {
        for v in [r.radius, r.l_gst, r.width_ring, r.width_bus, r.gap, r.r_self, r.t_gst, r.w_gst] {
            h.update(v.to_bits().to_le_bytes());
        }
    }
    h.finalize().iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn save<T: Serialize>(path: &Path, header: Header, body: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let doc = Document { header, body };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn load<T: DeserializeOwned>(path: &Path, kind: &str) -> Result<Document<T>> {
    let text = fs::read_to_string(path)?;
    let err = |reason: String| Error::Format {
        path: path.to_path_buf(),
        reason,
    };
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| err(e.to_string()))?;
    let header: Header = serde_json::from_value(value.get("header").cloned().unwrap_or_default())
        .map_err(|e| err(format!("header: {e}")))?;
    if header.kind != kind {
        return Err(err(format!("expected a {kind} artifact, found {}", header.kind)));
    }
    if header.version != FORMAT_VERSION {
        return Err(err(format!("unsupported format version {}", header.version)));
    }
    serde_json::from_str(&text).map_err(|e| err(e.to_string()))
}

fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out
}

/// Pass-port transmission of `ring` versus wavelength for each state.
pub fn transmission_csv(
    ring: &RingDesign,
    stack: &WaveguideStack,
    states: &[f64],
    band: (f64, f64),
    points: usize,
) -> Result<String> {
    let mut header = String::from("wavelength_nm");
    for p in states {
        let _ = write!(header, ",T_p{p}");
    }
    let mut rows = Vec::with_capacity(points);
    let parsed: Vec<GstState> = states.iter().map(|&p| GstState::new(p)).collect::<Result<_>>()?;
    for k in 0..points {
        let lambda = band.0 + (band.1 - band.0) * k as f64 / (points.max(2) - 1) as f64;
        let mut row = format!("{}", lambda * 1e9);
        for &p in &parsed {
            let _ = write!(row, ",{}", ring.transmission(p, stack, lambda)?);
        }
        rows.push(row);
    }
    Ok(csv(&header, rows))
}

pub fn levels_csv(table: &LevelTable) -> String {
    let rows = table.rings.iter().enumerate().flat_map(|(ring, entries)| {
        entries.iter().map(move |e| format!("{ring},{},{},{}", e.level, e.p, e.transmission))
    });
    csv("ring,level,p,transmission", rows)
}

pub fn bank_csv(bank: &RingBank) -> String {
    let rows = bank.rings.iter().enumerate().map(|(i, r)| {
        format!(
            "{i},{},{},{},{}",
            r.radius * 1e6,
            r.l_gst * 1e9,
            r.r_self,
            bank.channel_wavelengths[i] * 1e9
        )
    });
    csv("ring,radius_um,l_gst_nm,r_self,resonance_nm", rows)
}

pub fn alpha_csv(map: &CrosstalkMap) -> String {
    let rows = map.alpha.iter().enumerate().flat_map(|(ring, row)| {
        row.iter().enumerate().map(move |(level, a)| format!("{ring},{level},{a}"))
    });
    csv("ring,level,alpha", rows)
}

/// `step,neuron,value` rows for a row-major `steps × width` trace.
pub fn trace_csv<T: std::fmt::Display>(values: &[T], width: usize) -> String {
    let rows = values
        .iter()
        .enumerate()
        .map(|(k, v)| format!("{},{},{v}", k / width.max(1), k % width.max(1)));
    csv("step,neuron,value", rows)
}

pub fn accuracy_csv(step_accuracy: &[f64]) -> String {
    let rows = step_accuracy.iter().enumerate().map(|(t, a)| format!("{},{a}", t + 1));
    csv("step,accuracy", rows)
}

/// Per-layer synaptic and neuron energy, integer zeptojoules and derived nJ.
pub fn energy_csv(ledger: &EnergyLedger, synapses: &[usize]) -> String {
    let images = ledger.images.max(1);
    let mut rows = Vec::new();
    for (l, e) in ledger.layers.iter().enumerate() {
        let per_step = ledger.per_synapse_step(l, synapses.get(l).copied().unwrap_or(1));
        rows.push(format!(
            "{l},synaptic,{},{},{},{}",
            per_step * 1e15,
            e.synaptic_zj,
            e.synaptic_zj / u128::from(images),
            zj_to_joules(e.synaptic_zj) / images as f64 * 1e9
        ));
        let per_neuron_step = zj_to_joules(e.neuron_zj) / e.neuron_steps.max(1) as f64;
        rows.push(format!(
            "{l},neuron,{},{},{},{}",
            per_neuron_step * 1e15,
            e.neuron_zj,
            e.neuron_zj / u128::from(images),
            zj_to_joules(e.neuron_zj) / images as f64 * 1e9
        ));
    }
    let mut out = String::from("# both polarity arrays are counted for every input spike\n");
    out.push_str(&csv(
        "layer,component,per_step_average_fj,total_zj,per_image_zj,per_image_nj",
        rows,
    ));
    out
}
