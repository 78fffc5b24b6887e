//! Simulation library for double-gate FeFET neuromorphic hardware.
//!
//! The device layer models a single DG-FeFET (back-gate-dependent mobility,
//! conductance, pulse programming) and composes cells into pseudo-crossbar
//! arrays with per-column back-gate gains. On top of that sit the
//! algorithm-level experiments: an unsupervised spiking MNIST classifier
//! trained with weight-dependent STDP, astrocyte-style fault self-repair and
//! back-gate homeostasis, and a dendritic gain-modulated dragonfly
//! prey-interception circuit.

pub mod astro;
pub mod crossbar;
pub mod device;
pub mod dragonfly;
pub mod error;
pub mod io;
pub mod plasticity;
pub mod snn;

pub use crossbar::{CrossbarArray, GainMap};
pub use device::{DeviceModel, FeFETCell, MobilityModel, PulseScheme, StackCapacitances};
pub use error::{Error, Result};
pub use plasticity::{SpikeTraces, StdpParams};
