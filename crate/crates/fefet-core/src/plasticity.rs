//! Weight-dependent (multiplicative) STDP, implemented via pre/post spike
//! traces.
//!
//! A trace jumps to 1 on its neuron's spike and decays as `exp(-dt/tau)`
//! between spikes (all-to-one nearest-trace semantics). On a postsynaptic
//! spike the weight potentiates by `a_plus * (1-w)^mu_plus * x_pre`; on a
//! presynaptic spike it depresses by `a_minus * w^mu_minus * x_post`. With
//! mu >= 1 the updates vanish at the bounds, so weights stay in [0, 1]
//! without clipping ever engaging.
//!
//! A `literal` mode reproduces the doubly-exponentiated kernel and negative
//! potentiation exponent as printed in the source material, for audit only;
//! it does not preserve the bound behavior and is off by default.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StdpParams {
    /// Post-synaptic (potentiation) learning rate.
    pub a_plus: f64,
    /// Pre-synaptic (depression) learning rate.
    pub a_minus: f64,
    /// Potentiation weight-dependence exponent.
    pub mu_plus: f64,
    /// Depression weight-dependence exponent.
    pub mu_minus: f64,
    /// Potentiation trace time constant, ms.
    pub tau_plus: f64,
    /// Depression trace time constant, ms.
    pub tau_minus: f64,
    /// Audit mode reproducing the printed update formula verbatim.
    pub literal: bool,
}

impl Default for StdpParams {
    fn default() -> Self {
        Self {
            a_plus: 1e-2,
            a_minus: 1e-4,
            mu_plus: 1.0,
            mu_minus: 1.0,
            tau_plus: 20.0,
            tau_minus: 20.0,
            literal: false,
        }
    }
}

impl StdpParams {
    pub fn validate(&self) -> Result<()> {
        if self.a_plus < 0.0 || self.a_minus < 0.0 {
            return Err(Error::domain("learning rates must be non-negative"));
        }
        if self.mu_plus < 0.0 || self.mu_minus < 0.0 {
            return Err(Error::domain("weight-dependence exponents must be non-negative"));
        }
        if self.tau_plus <= 0.0 || self.tau_minus <= 0.0 {
            return Err(Error::domain("trace time constants must be positive"));
        }
        Ok(())
    }
}

/// Decaying pre/post spike traces for one synapse population.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeTraces {
    pub x_pre: Vec<f64>,
    pub x_post: Vec<f64>,
}

impl SpikeTraces {
    pub fn new(n_pre: usize, n_post: usize) -> Self {
        Self { x_pre: vec![0.0; n_pre], x_post: vec![0.0; n_post] }
    }

    /// Decay every trace by `dt` milliseconds.
    pub fn decay(&mut self, dt: f64, params: &StdpParams) {
        debug_assert!(dt > 0.0);
        let dp = (-dt / params.tau_plus).exp();
        let dm = (-dt / params.tau_minus).exp();
        for x in &mut self.x_pre {
            *x *= dp;
        }
        for x in &mut self.x_post {
            *x *= dm;
        }
    }

    /// Register spikes: the corresponding traces jump to 1.
    pub fn on_spikes(&mut self, pre_spikes: &[usize], post_spikes: &[usize]) {
        for &i in pre_spikes {
            self.x_pre[i] = 1.0;
        }
        for &j in post_spikes {
            self.x_post[j] = 1.0;
        }
    }
}

/// Weight change when the postsynaptic neuron fires (potentiation).
pub fn on_post_spike(w: f64, x_pre: f64, params: &StdpParams) -> f64 {
    if params.literal {
        // Printed form: (1-w)^(-mu+) * A+ * e^(e^(-dt/tau)), with the trace
        // standing in for e^(-dt/tau).
        return (1.0 - w).powf(-params.mu_plus) * params.a_plus * x_pre.exp();
    }
    params.a_plus * (1.0 - w).powf(params.mu_plus) * x_pre
}

/// Weight change when the presynaptic neuron fires (depression, <= 0).
pub fn on_pre_spike(w: f64, x_post: f64, params: &StdpParams) -> f64 {
    if params.literal {
        return w.powf(params.mu_minus) * params.a_minus * x_post.exp();
    }
    -params.a_minus * w.powf(params.mu_minus) * x_post
}

/// Clamp a proposed weight back into the device range.
pub fn clip_weight(w: f64) -> f64 {
    w.clamp(0.0, 1.0)
}
