//! MNIST IDX reader.
//!
//! IDX files carry a big-endian header: magic `0x00000803` (u8 images, three
//! dimensions) or `0x00000801` (u8 labels, one dimension), the dimension
//! sizes as u32, then raw bytes.

use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array2;

use crate::error::{Error, Result};

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;

/// Images stored as raw bytes, `len × rows·cols`, with their labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
    pub labels: Vec<u8>,
}

fn format_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_be_bytes([bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]])
}

/// Parses an IDX byte buffer; returns dimensions and payload.
pub fn parse_idx(bytes: &[u8], path: &Path) -> Result<(u32, Vec<usize>, Vec<u8>)> {
    if bytes.len() < 4 {
        return Err(format_err(path, "file shorter than the IDX magic"));
    }
    let magic = read_u32(bytes, 0);
    let ndim = match magic {
        IMAGE_MAGIC => 3,
        LABEL_MAGIC => 1,
        other => return Err(format_err(path, format!("unsupported IDX magic {other:#010x}"))),
    };
    let header = 4 + 4 * ndim;
    if bytes.len() < header {
        return Err(format_err(path, "truncated IDX header"));
    }
    let dims: Vec<usize> = (0..ndim).map(|d| read_u32(bytes, 4 + 4 * d) as usize).collect();
    let expected: usize = dims.iter().product();
    let payload = &bytes[header..];
    if payload.len() != expected {
        return Err(format_err(
            path,
            format!("payload has {} bytes, header declares {expected}", payload.len()),
        ));
    }
    Ok((magic, dims, payload.to_vec()))
}

/// Encodes dimensions and payload as an IDX byte buffer.
pub fn write_idx(magic: u32, dims: &[usize], payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + 4 * dims.len() + payload.len());
    out.extend_from_slice(&magic.to_be_bytes());
    for &d in dims {
        out.extend_from_slice(&(d as u32).to_be_bytes());
    }
    out.extend_from_slice(payload);
    out
}

fn load_file(path: &Path, magic: u32) -> Result<(Vec<usize>, Vec<u8>)> {
    let bytes = fs::read(path).map_err(|e| format_err(path, e.to_string()))?;
    let (found, dims, payload) = parse_idx(&bytes, path)?;
    if found != magic {
        return Err(format_err(path, format!("expected magic {magic:#010x}, found {found:#010x}")));
    }
    Ok((dims, payload))
}

impl Dataset {
    /// Loads an image file and its label file.
    pub fn load(images: &Path, labels: &Path) -> Result<Self> {
        let (dims, pixels) = load_file(images, IMAGE_MAGIC)?;
        let (ldims, labels_raw) = load_file(labels, LABEL_MAGIC)?;
        if dims[0] != ldims[0] {
            return Err(format_err(
                labels,
                format!("{} labels for {} images", ldims[0], dims[0]),
            ));
        }
        if let Some(bad) = labels_raw.iter().find(|&&l| l > 9) {
            return Err(format_err(labels, format!("label {bad} outside 0..=9")));
        }
        Ok(Dataset {
            rows: dims[1],
            cols: dims[2],
            pixels,
            labels: labels_raw,
        })
    }

    /// Loads `{train,t10k}-{images,labels}-idx?-ubyte` from a directory.
    pub fn load_split(dir: &Path, train: bool) -> Result<Self> {
        let prefix = if train { "train" } else { "t10k" };
        let images: PathBuf = dir.join(format!("{prefix}-images-idx3-ubyte"));
        let labels: PathBuf = dir.join(format!("{prefix}-labels-idx1-ubyte"));
        Dataset::load(&images, &labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.rows * self.cols
    }

    pub fn image(&self, i: usize) -> &[u8] {
        let d = self.dim();
        &self.pixels[i * d..(i + 1) * d]
    }

    pub fn label(&self, i: usize) -> usize {
        usize::from(self.labels[i])
    }

    /// Pixel intensities of image `i` scaled to [0, 1].
    pub fn intensities(&self, i: usize) -> Vec<f64> {
        self.image(i).iter().map(|&b| f64::from(b) / 255.0).collect()
    }

    /// Intensities of the selected images as a `len × dim` matrix.
    pub fn matrix(&self, indices: &[usize]) -> Array2<f64> {
        let d = self.dim();
        let mut m = Array2::zeros((indices.len(), d));
        for (row, &i) in indices.iter().enumerate() {
            for (dst, &b) in m.row_mut(row).iter_mut().zip(self.image(i)) {
                *dst = f64::from(b) / 255.0;
            }
        }
        m
    }

    pub fn labels_of(&self, indices: &[usize]) -> Vec<usize> {
        indices.iter().map(|&i| self.label(i)).collect()
    }
}
