//! Astrocyte-layer behaviors built on the per-column back gate: stuck-at-zero
//! fault injection, self-repair via column gain boosting, and firing-rate
//! homeostasis.
//!
//! Self-repair gain for a column is the ratio of its total weight before
//! faults to its total (probed) weight after faults, realized as a back-gate
//! voltage through the [`GainMap`]. Weight updates during retraining always
//! read the raw stored weights at zero back-gate bias; only the forward pass
//! sees the boosted effective weights.

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::crossbar::{CrossbarArray, GainMap};
use crate::error::{Error, Result};
use crate::snn::{train_epoch, LifParams, NetworkTopology, TrainMode, TrainReport};
use crate::plasticity::StdpParams;

/// Dead-column threshold as a fraction of the mean prior column sum.
pub const DEAD_COLUMN_EPS_REL: f64 = 1e-6;

/// Back-gate homeostasis constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HomeostasisParams {
    /// Back-gate decrement per firing event, V.
    pub vbg_dec: f64,
    /// Relaxation time constant toward the baseline, ms.
    pub tau_homeo: f64,
    /// Baseline back-gate voltage the columns relax toward, V.
    pub vbg_baseline: f64,
}

impl Default for HomeostasisParams {
    fn default() -> Self {
        // One firing lowers k by 2% at the default gain slope of 0.25/V.
        Self { vbg_dec: 0.08, tau_homeo: 1000.0, vbg_baseline: 0.0 }
    }
}

impl HomeostasisParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.vbg_dec >= 0.0) || !(self.tau_homeo > 0.0) {
            return Err(Error::domain("vbg_dec must be >= 0 and tau_homeo > 0"));
        }
        Ok(())
    }
}

/// Per-column state of the self-repair protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct RepairState {
    pub w_prior_col_sums: Array1<f64>,
    /// Achieved degree of self-repair per column (after any clamping).
    pub k_per_col: Array1<f64>,
    pub vbg_per_col: Array1<f64>,
    /// Columns whose gain had to be clamped (dead column or range limit).
    pub clamped: Vec<bool>,
}

/// History of the repair gains over a retraining run, one snapshot per batch.
#[derive(Debug, Clone, Default)]
pub struct RepairHistory {
    pub k_snapshots: Vec<Array1<f64>>,
}

/// Draw a stuck-at-zero fault mask with exactly `round(fraction * n)` faulted
/// cells, uniformly chosen.
pub fn inject_faults(
    n_rows: usize,
    n_cols: usize,
    fraction: f64,
    seed: u64,
) -> Result<Array2<bool>> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::domain(format!("fault fraction {fraction} outside [0, 1]")));
    }
    let n = n_rows * n_cols;
    let n_faults = (fraction * n as f64).round() as usize;
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    idx.shuffle(&mut rng);
    let mut mask = Array2::from_elem((n_rows, n_cols), false);
    for &flat in idx.iter().take(n_faults) {
        mask[(flat / n_cols, flat % n_cols)] = true;
    }
    Ok(mask)
}

/// Per-column repair gains `k_j = prior_j / post_j`, clamped to the gain
/// range; near-dead columns (post sum below the epsilon floor) are pinned to
/// the maximum gain and flagged.
pub fn compute_repair_gain(
    prior_sums: &Array1<f64>,
    post_sums: &Array1<f64>,
    gain: &GainMap,
) -> Result<(Array1<f64>, Vec<bool>)> {
    if prior_sums.len() != post_sums.len() {
        return Err(Error::Dimension {
            expected: format!("{} column sums", prior_sums.len()),
            got: format!("{}", post_sums.len()),
        });
    }
    if prior_sums.iter().chain(post_sums).any(|&s| s < 0.0 || !s.is_finite()) {
        return Err(Error::domain("column sums must be non-negative and finite"));
    }
    let mean_prior = prior_sums.sum() / prior_sums.len().max(1) as f64;
    let eps = DEAD_COLUMN_EPS_REL * mean_prior;
    let mut k = Array1::zeros(prior_sums.len());
    let mut clamped = vec![false; prior_sums.len()];
    for j in 0..prior_sums.len() {
        if post_sums[j] <= eps {
            k[j] = gain.k_max;
            clamped[j] = true;
        } else {
            let ratio = prior_sums[j] / post_sums[j];
            let c = ratio.clamp(gain.k_min, gain.k_max);
            clamped[j] = c != ratio;
            k[j] = c;
        }
    }
    Ok((k, clamped))
}

/// Probe the per-column masked weight sums the way the hardware would: drive
/// every row with 1 V at zero back-gate bias and convert the column currents
/// back to weight units.
pub fn probe_post_fault_sums(array: &CrossbarArray) -> Result<Array1<f64>> {
    let n_rows = array.n_rows();
    let mut grounded = array.clone();
    grounded.set_all_vbg(&Array1::zeros(array.n_cols()))?;
    let currents = grounded.matvec(&Array1::ones(n_rows))?;
    // At v_bg = 0 each healthy cell contributes g_min + w * (g_max - g_min),
    // so subtract the healthy-cell baseline and divide by the conductance
    // span to recover the weight sum.
    let faults = array.faults();
    let (g_min, g_max) = array.conductance_window();
    let mut sums = Array1::zeros(array.n_cols());
    for j in 0..array.n_cols() {
        let healthy = (0..n_rows).filter(|&i| !faults[(i, j)]).count();
        sums[j] = (currents[j] - healthy as f64 * g_min) / (g_max - g_min);
    }
    Ok(sums)
}

/// Apply a repair state's gains to the array's column back gates, clamping to
/// the physical voltage range; returns the achieved gains.
pub fn apply_repair_gains(
    array: &mut CrossbarArray,
    gain: &GainMap,
    k: &Array1<f64>,
) -> Result<Array1<f64>> {
    let vbg_min = array.device().mobility.vbg_min;
    let vbg_max = array.device().mobility.vbg_max;
    let mut achieved = Array1::zeros(k.len());
    for j in 0..k.len() {
        let v = gain.vbg_for_gain(k[j]).clamp(vbg_min, vbg_max);
        array.set_col_vbg(j, v)?;
        achieved[j] = gain.gain(v);
    }
    Ok(achieved)
}

/// Retrain a faulted network with the self-repair protocol.
///
/// Forward passes see `k_j * w_post`; STDP updates read the raw weights at
/// zero back-gate bias; after every batch the gains are recomputed from the
/// updated masked weight sums. `prior_sums` must have been captured before
/// fault injection.
#[allow(clippy::too_many_arguments)]
pub fn retrain_with_repair(
    topology: &mut NetworkTopology,
    prior_sums: &Array1<f64>,
    images: &[&[u8]],
    stdp: &StdpParams,
    lif: &LifParams,
    batch_size: usize,
    seed: u64,
) -> Result<(TrainReport, RepairHistory)> {
    let n_out = topology.n_out();
    if prior_sums.len() != n_out {
        return Err(Error::State(format!(
            "prior sums cover {} columns but the network has {n_out}; capture them before fault injection",
            prior_sums.len()
        )));
    }
    let gain = topology.gain;
    let faults = topology.array.faults().clone();

    // Initial gains from the hardware probe.
    let post0 = probe_post_fault_sums(&topology.array)?;
    let (k0, _) = compute_repair_gain(prior_sums, &post0, &gain)?;
    let achieved = apply_repair_gains(&mut topology.array, &gain, &k0)?;

    let mut history = RepairHistory::default();
    history.k_snapshots.push(achieved);
    let prior = prior_sums.clone();
    let vbg_min = topology.array.device().mobility.vbg_min;
    let vbg_max = topology.array.device().mobility.vbg_max;

    let report = train_epoch(
        topology,
        images,
        stdp,
        lif,
        &TrainMode::AdaptiveTheta,
        batch_size,
        seed,
        |ctx| {
            // Recompute per-column gains from the updated raw weights,
            // masked by the faults (what the probe would read).
            let mut post = Array1::zeros(n_out);
            for j in 0..n_out {
                let mut s = 0.0;
                for i in 0..ctx.w.nrows() {
                    if !faults[(i, j)] {
                        s += ctx.w[(i, j)];
                    }
                }
                post[j] = s;
            }
            let (k, _) = compute_repair_gain(&prior, &post, &gain)?;
            for j in 0..n_out {
                let v = gain.vbg_for_gain(k[j]).clamp(vbg_min, vbg_max);
                ctx.k[j] = gain.gain(v);
            }
            history.k_snapshots.push(ctx.k.clone());
            Ok(())
        },
    )?;

    // Persist the final gains on the array's back gates.
    let final_k = history.k_snapshots.last().unwrap().clone();
    apply_repair_gains(&mut topology.array, &gain, &final_k)?;
    Ok((report, history))
}

/// One homeostasis step: columns whose neuron fired ramp their back gate down
/// by `vbg_dec`; every column relaxes toward the baseline with `tau_homeo`.
/// The resulting gain stays within the gain map's range.
pub fn homeostasis_step(
    array: &mut CrossbarArray,
    gain: &GainMap,
    fired: &[usize],
    dt: f64,
    params: &HomeostasisParams,
) -> Result<()> {
    let relax = 1.0 - (-dt / params.tau_homeo).exp();
    let vbg_min = array
        .device()
        .mobility
        .vbg_min
        .max(gain.vbg_for_gain(gain.k_min));
    let vbg_max = array
        .device()
        .mobility
        .vbg_max
        .min(gain.vbg_for_gain(gain.k_max));
    let n_cols = array.n_cols();
    let mut vbg = array.col_vbg().clone();
    for v in vbg.iter_mut() {
        *v += (params.vbg_baseline - *v) * relax;
    }
    for &j in fired {
        if j >= n_cols {
            return Err(Error::Index { index: j, len: n_cols });
        }
        vbg[j] -= params.vbg_dec;
    }
    for j in 0..n_cols {
        array.set_col_vbg(j, vbg[j].clamp(vbg_min, vbg_max))?;
    }
    Ok(())
}

/// Shannon entropy (nats) of a spike-count distribution; used to quantify how
/// evenly activity spreads across neurons.
pub fn spike_entropy(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let mut h = 0.0;
    for &c in counts {
        if c > 0 {
            let p = c as f64 / total as f64;
            h -= p * p.ln();
        }
    }
    h
}
