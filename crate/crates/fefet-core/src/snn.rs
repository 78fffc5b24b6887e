//! Two-layer spiking network: Poisson-encoded inputs, leaky
//! integrate-and-fire outputs with lateral inhibition, adaptive thresholds,
//! and the unsupervised STDP training loop with label assignment and
//! evaluation.
//!
//! The plastic synapses live in a [`CrossbarArray`]; the forward pass reads
//! the algorithm-level effective weights `k(col_vbg) * w` so that fault masks
//! and back-gate gains act exactly as they would in the array. Lateral
//! inhibition is a fixed dense negative coupling outside the crossbar.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::astro::{homeostasis_step, HomeostasisParams};
use crate::crossbar::{CrossbarArray, GainMap};
use crate::device::DeviceModel;
use crate::error::{Error, Result};
use crate::plasticity::{clip_weight, on_post_spike, on_pre_spike, SpikeTraces, StdpParams};

/// Leaky integrate-and-fire constants. Defaults follow the training-parameter
/// table of the source experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LifParams {
    pub v_rest: f64,
    pub v_reset: f64,
    pub v_thresh: f64,
    /// Membrane decay time constant, ms.
    pub tau_mem: f64,
    /// Refractory period, ms.
    pub t_refrac: f64,
    /// Adaptive threshold increment per spike, mV.
    pub theta_inc: f64,
    /// Adaptive threshold decay time constant, ms.
    pub theta_tau: f64,
    /// Simulation step, ms.
    pub dt: f64,
    /// Simulated time per image, ms.
    pub sim_time: f64,
    /// Maximum input spike rate at intensity 255, Hz.
    pub max_rate_hz: f64,
}

impl Default for LifParams {
    fn default() -> Self {
        Self {
            v_rest: -65.0,
            v_reset: -60.0,
            v_thresh: -52.0,
            tau_mem: 100.0,
            t_refrac: 5.0,
            theta_inc: 0.05,
            theta_tau: 1e7,
            dt: 1.0,
            sim_time: 100.0,
            max_rate_hz: 128.0,
        }
    }
}

impl LifParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.v_thresh > self.v_reset && self.v_thresh > self.v_rest) {
            return Err(Error::domain("v_thresh must exceed v_reset and v_rest"));
        }
        for (name, v) in [
            ("tau_mem", self.tau_mem),
            ("t_refrac", self.t_refrac),
            ("theta_tau", self.theta_tau),
            ("dt", self.dt),
            ("sim_time", self.sim_time),
            ("max_rate_hz", self.max_rate_hz),
        ] {
            if !(v > 0.0) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        if self.theta_inc < 0.0 {
            return Err(Error::domain("theta_inc must be non-negative"));
        }
        Ok(())
    }

    pub fn steps_per_image(&self) -> usize {
        (self.sim_time / self.dt).round() as usize
    }

    pub fn refrac_steps(&self) -> u32 {
        (self.t_refrac / self.dt).round() as u32
    }
}

/// Per-neuron dynamic state of one LIF layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LifState {
    pub v: Vec<f64>,
    /// Adaptive threshold offset, >= 0.
    pub theta: Vec<f64>,
    pub refrac_left: Vec<u32>,
}

impl LifState {
    pub fn new(n: usize, params: &LifParams) -> Self {
        Self { v: vec![params.v_rest; n], theta: vec![0.0; n], refrac_left: vec![0; n] }
    }

    /// Reset membrane and refractory state between images; theta persists.
    pub fn reset_membrane(&mut self, params: &LifParams) {
        self.v.iter_mut().for_each(|v| *v = params.v_rest);
        self.refrac_left.iter_mut().for_each(|r| *r = 0);
    }
}

/// Advance one time step. Non-refractory neurons decay toward rest
/// (exponential-Euler) and add their input drive; neurons reaching
/// `v_thresh + theta` spike, reset, and enter the refractory period.
/// With `adapt_theta`, a spike also bumps theta, which decays each step.
pub fn lif_step(
    state: &mut LifState,
    input_current: &[f64],
    params: &LifParams,
    adapt_theta: bool,
) -> Vec<usize> {
    let decay = (-params.dt / params.tau_mem).exp();
    let theta_decay = (-params.dt / params.theta_tau).exp();
    let mut spikes = Vec::new();
    for j in 0..state.v.len() {
        state.theta[j] *= theta_decay;
        if state.refrac_left[j] > 0 {
            state.refrac_left[j] -= 1;
            continue;
        }
        let v = params.v_rest + (state.v[j] - params.v_rest) * decay + input_current[j];
        if v >= params.v_thresh + state.theta[j] {
            state.v[j] = params.v_reset;
            state.refrac_left[j] = params.refrac_steps();
            if adapt_theta {
                state.theta[j] += params.theta_inc;
            }
            spikes.push(j);
        } else {
            state.v[j] = v;
        }
    }
    spikes
}

/// Sparse spike raster: active input indices per time step.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeRaster {
    pub n_in: usize,
    pub steps: Vec<Vec<u16>>,
}

impl SpikeRaster {
    pub fn is_set(&self, input: usize, step: usize) -> bool {
        self.steps[step].binary_search(&(input as u16)).is_ok()
    }

    pub fn total_spikes(&self) -> usize {
        self.steps.iter().map(Vec::len).sum()
    }
}

/// Poisson-encode one image: pixel `p` spikes each step with probability
/// `(intensity_p / 255) * max_rate * dt`. Deterministic for a given seed.
pub fn poisson_encode(image: &[u8], params: &LifParams, seed: u64) -> SpikeRaster {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let steps = params.steps_per_image();
    let scale = params.max_rate_hz * params.dt / 1000.0;
    let active: Vec<(u16, f64)> = image
        .iter()
        .enumerate()
        .filter(|(_, &px)| px > 0)
        .map(|(i, &px)| (i as u16, px as f64 / 255.0 * scale))
        .collect();
    let mut raster = Vec::with_capacity(steps);
    for _ in 0..steps {
        let mut row = Vec::new();
        for &(i, p) in &active {
            if rng.gen::<f64>() < p {
                row.push(i);
            }
        }
        raster.push(row);
    }
    SpikeRaster { n_in: image.len(), steps: raster }
}

/// The 784-input / N-output network: plastic crossbar synapses plus fixed
/// lateral inhibition and per-neuron adaptive thresholds.
#[derive(Debug, Clone)]
pub struct NetworkTopology {
    pub array: CrossbarArray,
    pub gain: GainMap,
    /// Fixed lateral inhibitory weight (strictly negative), mV per spike.
    pub w_inhib: f64,
    /// Drive contributed per unit effective weight per input spike, mV.
    pub input_scale: f64,
    /// Per-output-neuron target for the sum of incoming weights, applied
    /// after each batch (divisive normalization). `None` disables it.
    pub norm_target: Option<f64>,
    /// Learned adaptive-threshold offsets, carried across training.
    pub theta: Vec<f64>,
}

impl NetworkTopology {
    pub fn new(
        n_in: usize,
        n_out: usize,
        w_inhib: f64,
        input_scale: f64,
        norm_target: Option<f64>,
        gain: GainMap,
        device: DeviceModel,
        seed: u64,
    ) -> Result<Self> {
        if w_inhib >= 0.0 {
            return Err(Error::domain("inhibitory weight must be strictly negative"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights = Array2::from_shape_fn((n_in, n_out), |_| rng.gen_range(0.0..0.3));
        let array = CrossbarArray::from_weights(&weights, 1e-6, 1e-5, device)?;
        Ok(Self { array, gain, w_inhib, input_scale, norm_target, theta: vec![0.0; n_out] })
    }

    pub fn n_in(&self) -> usize {
        self.array.n_rows()
    }

    pub fn n_out(&self) -> usize {
        self.array.n_cols()
    }
}

/// Homeostasis strategy used during training.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainMode {
    /// Per-neuron adaptive firing thresholds.
    AdaptiveTheta,
    /// Thresholds frozen; per-column back-gate gains ramp down on firing.
    BgHomeostasis(HomeostasisParams),
}

#[derive(Debug, Clone, Default)]
pub struct TrainReport {
    /// Cumulative output spikes per neuron over the whole run.
    pub spike_counts: Vec<u64>,
    pub images_seen: usize,
}

pub(crate) struct BatchContext<'a> {
    /// Raw weights (fault-agnostic storage).
    pub w: &'a mut Array2<f64>,
    /// Per-column gains in effect for the next forward passes.
    pub k: &'a mut Array1<f64>,
}

/// One epoch of unsupervised training over `images`.
///
/// Images are simulated independently within a batch against frozen weights;
/// the accumulated STDP updates are applied once per batch in fixed index
/// order. `batch_hook` runs after each batch application (the self-repair
/// protocol recomputes per-column gains there).
pub(crate) fn train_epoch(
    topology: &mut NetworkTopology,
    images: &[&[u8]],
    stdp: &StdpParams,
    lif: &LifParams,
    mode: &TrainMode,
    batch_size: usize,
    seed: u64,
    mut batch_hook: impl FnMut(BatchContext<'_>) -> Result<()>,
) -> Result<TrainReport> {
    stdp.validate()?;
    lif.validate()?;
    let n_in = topology.n_in();
    let n_out = topology.n_out();
    let mut w = topology.array.weights();
    let faults = topology.array.faults().clone();
    // Masked view used by the forward pass; storage keeps the raw weights.
    let mut wm = &w * &faults.map(|&f| if f { 0.0 } else { 1.0 });
    let mut k = Array1::from_shape_fn(n_out, |j| topology.gain.gain(topology.array.col_vbg()[j]));
    for &kj in &k {
        topology.gain.check_gain(kj)?;
    }

    let mut state = LifState::new(n_out, lif);
    state.theta.copy_from_slice(&topology.theta);
    let adapt_theta = matches!(mode, TrainMode::AdaptiveTheta);
    let mut homeo = match mode {
        TrainMode::BgHomeostasis(p) => Some(p.clone()),
        TrainMode::AdaptiveTheta => None,
    };

    let mut report = TrainReport { spike_counts: vec![0; n_out], images_seen: 0 };
    let steps = lif.steps_per_image();
    let mut dw = Array2::<f64>::zeros((n_in, n_out));

    for (batch_idx, batch) in images.chunks(batch_size).enumerate() {
        dw.fill(0.0);
        for (img_idx, image) in batch.iter().enumerate() {
            let global_idx = batch_idx * batch_size + img_idx;
            let raster = poisson_encode(image, lif, seed.wrapping_add(global_idx as u64));
            state.reset_membrane(lif);
            let mut traces = SpikeTraces::new(n_in, n_out);
            let mut prev_out_spikes: Vec<usize> = Vec::new();
            // Postsynaptic traces are all zero until the first output spike;
            // skip the depression pass until then.
            let mut post_active = false;
            let mut drive = vec![0.0; n_out];

            for t in 0..steps {
                traces.decay(lif.dt, stdp);
                let pre = &raster.steps[t];

                drive.iter_mut().for_each(|d| *d = 0.0);
                for &i in pre {
                    let row = wm.row(i as usize);
                    for j in 0..n_out {
                        drive[j] += row[j] * k[j];
                    }
                }
                for d in drive.iter_mut() {
                    *d *= topology.input_scale;
                }
                for &j in &prev_out_spikes {
                    for (jj, d) in drive.iter_mut().enumerate() {
                        if jj != j {
                            *d += topology.w_inhib;
                        }
                    }
                }

                let out_spikes = lif_step(&mut state, &drive, lif, adapt_theta);

                // Depression: presynaptic spikes against the post traces.
                if post_active {
                    for &i in pre {
                        let i = i as usize;
                        for j in 0..n_out {
                            let xp = traces.x_post[j];
                            if xp > 0.0 {
                                dw[(i, j)] += on_pre_spike(w[(i, j)], xp, stdp);
                            }
                        }
                    }
                }
                // Potentiation: postsynaptic spikes against the pre traces.
                for &j in &out_spikes {
                    report.spike_counts[j] += 1;
                    for i in 0..n_in {
                        let xp = traces.x_pre[i];
                        if xp > 0.0 {
                            dw[(i, j)] += on_post_spike(w[(i, j)], xp, stdp);
                        }
                    }
                }

                if !out_spikes.is_empty() {
                    post_active = true;
                }
                let pre_idx: Vec<usize> = pre.iter().map(|&i| i as usize).collect();
                traces.on_spikes(&pre_idx, &out_spikes);

                if let Some(hp) = homeo.as_mut() {
                    homeostasis_step(
                        &mut topology.array,
                        &topology.gain,
                        &out_spikes,
                        lif.dt,
                        hp,
                    )?;
                    for j in 0..n_out {
                        k[j] = topology.gain.gain(topology.array.col_vbg()[j]);
                    }
                }
                prev_out_spikes = out_spikes;
            }
            report.images_seen += 1;
        }

        // Apply the batch update in fixed index order.
        for ((i, j), &d) in dw.indexed_iter() {
            if d != 0.0 {
                let nw = clip_weight(w[(i, j)] + d);
                w[(i, j)] = nw;
                if !faults[(i, j)] {
                    wm[(i, j)] = nw;
                }
            }
        }
        if let Some(target) = topology.norm_target {
            for j in 0..n_out {
                let sum: f64 = w.column(j).sum();
                if sum > 0.0 {
                    let scale = target / sum;
                    for i in 0..n_in {
                        let nw = (w[(i, j)] * scale).min(1.0);
                        w[(i, j)] = nw;
                        if !faults[(i, j)] {
                            wm[(i, j)] = nw;
                        }
                    }
                }
            }
        }
        batch_hook(BatchContext { w: &mut w, k: &mut k })?;
        // The hook may have rescaled weights or gains; refresh the mask view.
        for ((i, j), &wv) in w.indexed_iter() {
            wm[(i, j)] = if faults[(i, j)] { 0.0 } else { wv };
        }
    }

    topology.array.set_weights(&w)?;
    topology.theta.copy_from_slice(&state.theta);
    Ok(report)
}

/// Train on `images` (one pass), mutating the topology's weights and
/// thresholds. Deterministic for a given seed.
pub fn train(
    topology: &mut NetworkTopology,
    images: &[&[u8]],
    stdp: &StdpParams,
    lif: &LifParams,
    mode: &TrainMode,
    batch_size: usize,
    seed: u64,
) -> Result<TrainReport> {
    train_epoch(topology, images, stdp, lif, mode, batch_size, seed, |_| Ok(()))
}

/// Per-neuron output spike counts for a single image, with plasticity and
/// threshold adaptation frozen.
pub fn run_inference(
    topology: &NetworkTopology,
    image: &[u8],
    lif: &LifParams,
    seed: u64,
) -> Result<Vec<u32>> {
    let n_out = topology.n_out();
    let eff = topology.array.effective_weight_matrix(&topology.gain)?;
    let raster = poisson_encode(image, lif, seed);
    let mut state = LifState::new(n_out, lif);
    state.theta.copy_from_slice(&topology.theta);
    let mut counts = vec![0u32; n_out];
    let mut prev: Vec<usize> = Vec::new();
    let mut drive = vec![0.0; n_out];
    for t in 0..lif.steps_per_image() {
        drive.iter_mut().for_each(|d| *d = 0.0);
        for &i in &raster.steps[t] {
            let row = eff.row(i as usize);
            for j in 0..n_out {
                drive[j] += row[j];
            }
        }
        for d in drive.iter_mut() {
            *d *= topology.input_scale;
        }
        for &j in &prev {
            for (jj, d) in drive.iter_mut().enumerate() {
                if jj != j {
                    *d += topology.w_inhib;
                }
            }
        }
        let spikes = lif_step(&mut state, &drive, lif, false);
        for &j in &spikes {
            counts[j] += 1;
        }
        prev = spikes;
    }
    Ok(counts)
}

/// Outcome of label assignment: one class per output neuron, plus a flag for
/// neurons that never spiked on any class (assigned class 0 by convention).
#[derive(Debug, Clone, PartialEq)]
pub struct NeuronLabels {
    pub labels: Vec<u8>,
    pub dead: Vec<bool>,
}

/// Label each output neuron by the class eliciting its highest mean spike
/// count over the labeled subset. Ties break toward the lowest class index.
pub fn assign_labels(
    topology: &NetworkTopology,
    images: &[&[u8]],
    labels: &[u8],
    lif: &LifParams,
    seed: u64,
) -> Result<NeuronLabels> {
    if images.len() != labels.len() {
        return Err(Error::Dimension {
            expected: format!("{} labels", images.len()),
            got: format!("{}", labels.len()),
        });
    }
    let n_classes = 10usize;
    let present: std::collections::HashSet<u8> = labels.iter().copied().collect();
    if present.len() < n_classes {
        return Err(Error::domain(format!(
            "label-assignment subset covers only {} of {n_classes} classes",
            present.len()
        )));
    }
    let n_out = topology.n_out();
    let mut sums = Array2::<f64>::zeros((n_out, n_classes));
    let mut class_counts = vec![0usize; n_classes];
    for (idx, (image, &label)) in images.iter().zip(labels).enumerate() {
        let counts = run_inference(topology, image, lif, seed.wrapping_add(idx as u64))?;
        class_counts[label as usize] += 1;
        for j in 0..n_out {
            sums[(j, label as usize)] += counts[j] as f64;
        }
    }
    assign_labels_from_counts(&sums, &class_counts)
}

/// Pure argmax decode of a (neuron x class) response matrix; exposed so the
/// rule can be oracle-tested on synthetic counts.
pub fn assign_labels_from_counts(
    sums: &Array2<f64>,
    class_counts: &[usize],
) -> Result<NeuronLabels> {
    let n_out = sums.nrows();
    let n_classes = sums.ncols();
    let mut labels = vec![0u8; n_out];
    let mut dead = vec![false; n_out];
    for j in 0..n_out {
        let mut best = 0usize;
        let mut best_mean = f64::NEG_INFINITY;
        let mut any = false;
        for c in 0..n_classes {
            if class_counts[c] == 0 {
                continue;
            }
            let mean = sums[(j, c)] / class_counts[c] as f64;
            if sums[(j, c)] > 0.0 {
                any = true;
            }
            if mean > best_mean {
                best_mean = mean;
                best = c;
            }
        }
        if !any {
            labels[j] = 0;
            dead[j] = true;
        } else {
            labels[j] = best as u8;
        }
    }
    Ok(NeuronLabels { labels, dead })
}

/// Classify `images` by the label group with the highest summed spike count
/// and return the accuracy fraction.
pub fn evaluate(
    topology: &NetworkTopology,
    neuron_labels: &NeuronLabels,
    images: &[&[u8]],
    labels: &[u8],
    lif: &LifParams,
    seed: u64,
) -> Result<f64> {
    if images.is_empty() {
        return Ok(0.0);
    }
    let mut correct = 0usize;
    for (idx, (image, &label)) in images.iter().zip(labels).enumerate() {
        let counts = run_inference(topology, image, lif, seed.wrapping_add(idx as u64))?;
        let pred = predict_from_counts(&counts, &neuron_labels.labels);
        if pred == label {
            correct += 1;
        }
    }
    Ok(correct as f64 / images.len() as f64)
}

/// Group spike counts by neuron label and return the class with the highest
/// mean count per assigned neuron. Ties break toward the lowest class index.
pub fn predict_from_counts(counts: &[u32], labels: &[u8]) -> u8 {
    let mut per_class = [0u64; 10];
    let mut group_size = [0u64; 10];
    for (j, &c) in counts.iter().enumerate() {
        per_class[labels[j] as usize] += c as u64;
        group_size[labels[j] as usize] += 1;
    }
    let mut best = 0u8;
    let mut best_mean = 0.0;
    for (c, (&n, &g)) in per_class.iter().zip(&group_size).enumerate() {
        if g == 0 {
            continue;
        }
        let mean = n as f64 / g as f64;
        if mean > best_mean {
            best_mean = mean;
            best = c as u8;
        }
    }
    best
}
