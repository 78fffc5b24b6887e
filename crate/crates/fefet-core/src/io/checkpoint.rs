//! Checkpoint persistence: a one-line JSON header, a little-endian binary
//! body (bit-exact floats), and a trailing SHA-256 digest.
//!
//! Layout:
//! - header: one JSON object terminated by `\n` (version, dimensions, seed,
//!   config hash, body length)
//! - body: weights as f64 LE row-major, fault mask as one byte per cell,
//!   per-column back-gate voltages as f64 LE, per-neuron theta as f64 LE,
//!   neuron labels as one byte each
//! - trailer: 32-byte SHA-256 of header + body

use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const CHECKPOINT_VERSION: u32 = 1;

/// Everything needed to resume or evaluate a trained network.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    /// Synaptic weights in [0, 1], `n_in x n_out`.
    pub weights: Array2<f64>,
    /// Stuck-at-zero fault mask.
    pub faults: Array2<bool>,
    /// Per-column back-gate voltage, V.
    pub col_vbg: Array1<f64>,
    /// Per-neuron adaptive-threshold offsets, mV.
    pub theta: Vec<f64>,
    /// Per-neuron class labels (255 = unassigned/dead).
    pub labels: Vec<u8>,
    /// RNG seed the checkpointed run was trained with.
    pub seed: u64,
    /// Hash of the configuration the run used.
    pub config_hash: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    version: u32,
    n_rows: usize,
    n_cols: usize,
    seed: u64,
    config_hash: String,
    body_len: usize,
}

impl Checkpoint {
    pub fn validate(&self) -> Result<()> {
        let dims = self.weights.dim();
        if self.faults.dim() != dims
            || self.col_vbg.len() != dims.1
            || self.theta.len() != dims.1
            || self.labels.len() != dims.1
        {
            return Err(Error::Dimension {
                expected: format!("all fields sized for {dims:?}"),
                got: format!(
                    "faults {:?}, col_vbg {}, theta {}, labels {}",
                    self.faults.dim(),
                    self.col_vbg.len(),
                    self.theta.len(),
                    self.labels.len()
                ),
            });
        }
        Ok(())
    }

    fn body(&self) -> Vec<u8> {
        let (n_rows, n_cols) = self.weights.dim();
        let mut body =
            Vec::with_capacity(n_rows * n_cols * 9 + n_cols * 17);
        for &w in self.weights.iter() {
            body.extend_from_slice(&w.to_le_bytes());
        }
        body.extend(self.faults.iter().map(|&f| f as u8));
        for &v in self.col_vbg.iter() {
            body.extend_from_slice(&v.to_le_bytes());
        }
        for &t in &self.theta {
            body.extend_from_slice(&t.to_le_bytes());
        }
        body.extend_from_slice(&self.labels);
        body
    }
}

/// Serialize a checkpoint to bytes.
pub fn encode_checkpoint(ckpt: &Checkpoint) -> Result<Vec<u8>> {
    ckpt.validate()?;
    let (n_rows, n_cols) = ckpt.weights.dim();
    let body = ckpt.body();
    let header = Header {
        version: CHECKPOINT_VERSION,
        n_rows,
        n_cols,
        seed: ckpt.seed,
        config_hash: ckpt.config_hash.clone(),
        body_len: body.len(),
    };
    let mut out = serde_json::to_vec(&header).expect("header serializes");
    out.push(b'\n');
    out.extend_from_slice(&body);
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest);
    Ok(out)
}

struct BodyReader<'a> {
    bytes: &'a [u8],
    /// Absolute file offset of the next unread byte (for error reporting).
    offset: usize,
}

impl<'a> BodyReader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.bytes.len() < n {
            return Err(Error::Parse {
                offset: (self.offset + self.bytes.len()) as u64,
                message: "checkpoint body truncated".into(),
            });
        }
        let (head, tail) = self.bytes.split_at(n);
        self.bytes = tail;
        self.offset += n;
        Ok(head)
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let raw = self.take(n * 8)?;
        Ok(raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    }
}

/// Parse a checkpoint from bytes, verifying version and checksum.
pub fn decode_checkpoint(bytes: &[u8]) -> Result<Checkpoint> {
    let newline = bytes.iter().position(|&b| b == b'\n').ok_or(Error::Parse {
        offset: bytes.len() as u64,
        message: "missing header terminator".into(),
    })?;
    let header: Header = serde_json::from_slice(&bytes[..newline]).map_err(|e| Error::Parse {
        offset: 0,
        message: format!("bad checkpoint header: {e}"),
    })?;
    if header.version != CHECKPOINT_VERSION {
        return Err(Error::Version { found: header.version, expected: CHECKPOINT_VERSION });
    }
    let body_start = newline + 1;
    let body_end = body_start + header.body_len;
    if bytes.len() != body_end + 32 {
        return Err(Error::Parse {
            offset: bytes.len().min(body_end + 32) as u64,
            message: "checkpoint length does not match header".into(),
        });
    }
    let digest = Sha256::digest(&bytes[..body_end]);
    if digest.as_slice() != &bytes[body_end..] {
        return Err(Error::Checksum);
    }
    let mut r = BodyReader { bytes: &bytes[body_start..body_end], offset: body_start };
    let (n_rows, n_cols) = (header.n_rows, header.n_cols);
    let weights = Array2::from_shape_vec((n_rows, n_cols), r.f64s(n_rows * n_cols)?)
        .expect("sized read");
    let fault_bytes = r.take(n_rows * n_cols)?;
    let faults = Array2::from_shape_vec(
        (n_rows, n_cols),
        fault_bytes.iter().map(|&b| b != 0).collect(),
    )
    .expect("sized read");
    let col_vbg = Array1::from_vec(r.f64s(n_cols)?);
    let theta = r.f64s(n_cols)?;
    let labels = r.take(n_cols)?.to_vec();
    if !r.bytes.is_empty() {
        return Err(Error::Parse {
            offset: r.offset as u64,
            message: "trailing bytes after checkpoint body".into(),
        });
    }
    Ok(Checkpoint {
        weights,
        faults,
        col_vbg,
        theta,
        labels,
        seed: header.seed,
        config_hash: header.config_hash,
    })
}

/// Write a checkpoint atomically (temp file + rename).
pub fn save_checkpoint(path: &Path, ckpt: &Checkpoint) -> Result<()> {
    let bytes = encode_checkpoint(ckpt)?;
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, &bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    decode_checkpoint(&std::fs::read(path)?)
}
