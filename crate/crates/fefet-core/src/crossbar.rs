//! Pseudo-crossbar of FeFET cells.
//!
//! Rows carry input voltages, columns sum currents, and every column shares a
//! back-gate line that applies a volatile gain. Two abstraction levels are
//! exposed: a device-level matvec evaluating the full conductance model per
//! cell, and an algorithm-level effective-weight matrix `k(v_bg) * w` used by
//! the network experiments. Stuck-at-zero faults gate the readout only; the
//! stored weights stay queryable.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::device::{DeviceModel, FeFETCell};
use crate::error::{Error, Result};

/// Linear map from back-gate voltage to the multiplicative weight gain
/// `k = 1 + lambda_k * v_bg` (the "degree of self-repair").
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GainMap {
    /// Gain coefficient, 1/V.
    pub lambda_k: f64,
    pub k_min: f64,
    pub k_max: f64,
}

impl Default for GainMap {
    fn default() -> Self {
        // lambda_k is a calibration constant the experiments report in their
        // output metadata; k_range spans the default back-gate range.
        Self { lambda_k: 0.25, k_min: 0.75, k_max: 1.75 }
    }
}

impl GainMap {
    pub fn new(lambda_k: f64, k_min: f64, k_max: f64) -> Result<Self> {
        if !(lambda_k > 0.0 && lambda_k.is_finite()) {
            return Err(Error::domain(format!("lambda_k must be positive, got {lambda_k}")));
        }
        if !(k_min < k_max) || !(k_min..=k_max).contains(&1.0) {
            return Err(Error::domain(format!(
                "k_range [{k_min}, {k_max}] must be non-empty and contain k(0) = 1"
            )));
        }
        Ok(Self { lambda_k, k_min, k_max })
    }

    pub fn gain(&self, v_bg: f64) -> f64 {
        1.0 + self.lambda_k * v_bg
    }

    pub fn check_gain(&self, k: f64) -> Result<()> {
        if k < self.k_min || k > self.k_max {
            return Err(Error::Range {
                quantity: "k",
                value: k,
                min: self.k_min,
                max: self.k_max,
            });
        }
        Ok(())
    }

    /// Back-gate voltage realizing gain `k`, before any physical clamping.
    pub fn vbg_for_gain(&self, k: f64) -> f64 {
        (k - 1.0) / self.lambda_k
    }
}

/// A pseudo-crossbar array of FeFET cells with per-column back-gate voltages
/// and a stuck-at-zero fault mask.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossbarArray {
    cells: Array2<FeFETCell>,
    col_vbg: Array1<f64>,
    faults: Array2<bool>,
    device: DeviceModel,
}

impl CrossbarArray {
    /// Build an array of uniform cells with all weights at `w0` and back
    /// gates grounded.
    pub fn uniform(
        n_rows: usize,
        n_cols: usize,
        w0: f64,
        g_min: f64,
        g_max: f64,
        device: DeviceModel,
    ) -> Result<Self> {
        let cell = FeFETCell::new(w0, g_min, g_max)?;
        Ok(Self {
            cells: Array2::from_elem((n_rows, n_cols), cell),
            col_vbg: Array1::zeros(n_cols),
            faults: Array2::from_elem((n_rows, n_cols), false),
            device,
        })
    }

    /// Build an array from an explicit weight matrix.
    pub fn from_weights(
        weights: &Array2<f64>,
        g_min: f64,
        g_max: f64,
        device: DeviceModel,
    ) -> Result<Self> {
        let proto = FeFETCell::new(0.0, g_min, g_max)?;
        let mut cells = Array2::from_elem(weights.dim(), proto);
        for ((i, j), &w) in weights.indexed_iter() {
            cells[(i, j)] = proto.program_weight(w)?;
        }
        Ok(Self {
            col_vbg: Array1::zeros(weights.ncols()),
            faults: Array2::from_elem(weights.dim(), false),
            cells,
            device,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.cells.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.cells.ncols()
    }

    pub fn device(&self) -> &DeviceModel {
        &self.device
    }

    pub fn col_vbg(&self) -> &Array1<f64> {
        &self.col_vbg
    }

    pub fn faults(&self) -> &Array2<bool> {
        &self.faults
    }

    /// Raw stored weights, ignoring faults.
    pub fn weights(&self) -> Array2<f64> {
        self.cells.map(|c| c.w)
    }

    /// Shared (g_min, g_max) conductance window of the cells. Arrays built by
    /// the provided constructors are uniform in their window.
    pub fn conductance_window(&self) -> (f64, f64) {
        let c = self.cells[(0, 0)];
        (c.g_min, c.g_max)
    }

    pub fn set_weight(&mut self, row: usize, col: usize, w: f64) -> Result<()> {
        let cell = self.cell_checked(row, col)?;
        self.cells[(row, col)] = cell.program_weight(w)?;
        Ok(())
    }

    pub fn set_weights(&mut self, weights: &Array2<f64>) -> Result<()> {
        self.check_dims(weights.dim())?;
        for ((i, j), &w) in weights.indexed_iter() {
            self.cells[(i, j)] = self.cells[(i, j)].program_weight(w)?;
        }
        Ok(())
    }

    fn cell_checked(&self, row: usize, col: usize) -> Result<FeFETCell> {
        if row >= self.n_rows() {
            return Err(Error::Index { index: row, len: self.n_rows() });
        }
        if col >= self.n_cols() {
            return Err(Error::Index { index: col, len: self.n_cols() });
        }
        Ok(self.cells[(row, col)])
    }

    fn check_dims(&self, dim: (usize, usize)) -> Result<()> {
        if dim != self.cells.dim() {
            return Err(Error::Dimension {
                expected: format!("{:?}", self.cells.dim()),
                got: format!("{dim:?}"),
            });
        }
        Ok(())
    }

    pub fn set_col_vbg(&mut self, col: usize, v_bg: f64) -> Result<()> {
        if col >= self.n_cols() {
            return Err(Error::Index { index: col, len: self.n_cols() });
        }
        self.device.mobility.check_vbg(v_bg)?;
        self.col_vbg[col] = v_bg;
        Ok(())
    }

    pub fn set_all_vbg(&mut self, v_bg: &Array1<f64>) -> Result<()> {
        if v_bg.len() != self.n_cols() {
            return Err(Error::Dimension {
                expected: format!("{} columns", self.n_cols()),
                got: format!("{}", v_bg.len()),
            });
        }
        for &v in v_bg {
            self.device.mobility.check_vbg(v)?;
        }
        self.col_vbg.assign(v_bg);
        Ok(())
    }

    /// Replace the fault mask. Faults gate the readout contribution of a
    /// cell; the stored weight is untouched.
    pub fn apply_fault_mask(&mut self, mask: &Array2<bool>) -> Result<()> {
        self.check_dims(mask.dim())?;
        self.faults.assign(mask);
        Ok(())
    }

    /// Device-level matrix-vector product: column currents (A) for the given
    /// row voltages, at each column's back-gate bias. Faulted cells
    /// contribute exactly zero.
    pub fn matvec(&self, row_inputs: &Array1<f64>) -> Result<Array1<f64>> {
        if row_inputs.len() != self.n_rows() {
            return Err(Error::Dimension {
                expected: format!("{} row inputs", self.n_rows()),
                got: format!("{}", row_inputs.len()),
            });
        }
        let mut out = Array1::zeros(self.n_cols());
        for j in 0..self.n_cols() {
            // The per-column transfer is affine in the cell base conductance,
            // so hoist the (slope, offset) pair out of the row loop.
            let (slope, offset) = self.device.transfer(self.col_vbg[j])?;
            let mut acc = 0.0;
            for i in 0..self.n_rows() {
                if self.faults[(i, j)] {
                    continue;
                }
                let g = slope * self.cells[(i, j)].base_conductance() + offset;
                acc += g * row_inputs[i];
            }
            out[j] = acc;
        }
        Ok(out)
    }

    /// Algorithm-level effective weights: `k(col_vbg[j]) * w_ij` for healthy
    /// cells, zero for faulted ones.
    pub fn effective_weight_matrix(&self, gain: &GainMap) -> Result<Array2<f64>> {
        let mut out = Array2::zeros(self.cells.dim());
        for j in 0..self.n_cols() {
            let k = gain.gain(self.col_vbg[j]);
            gain.check_gain(k)?;
            for i in 0..self.n_rows() {
                if !self.faults[(i, j)] {
                    out[(i, j)] = k * self.cells[(i, j)].w;
                }
            }
        }
        Ok(out)
    }

    /// Per-column current with `v_read` on the listed rows and 0 elsewhere.
    pub fn read_column_sum(&self, active_rows: &[usize], v_read: f64) -> Result<Array1<f64>> {
        let mut input = Array1::zeros(self.n_rows());
        for &r in active_rows {
            if r >= self.n_rows() {
                return Err(Error::Index { index: r, len: self.n_rows() });
            }
            input[r] = v_read;
        }
        self.matvec(&input)
    }
}
