//! Compact model of a single double-gate FeFET synapse.
//!
//! The top gate stores a nonvolatile weight `w` in [0, 1] (set by ferroelectric
//! polarization); the back gate modulates the channel conductance volatilely.
//! Channel conductance at a back-gate bias `v_bg` is
//!
//! ```text
//! G(v_bg) = (mu(v_bg) / mu(0)) * G0  +  gamma_tg * mu(v_bg) * c_tgox * v_bg * s_geo
//! ```
//!
//! where `G0 = g_min + w * (g_max - g_min)` is the conductance at zero
//! back-gate bias, `gamma_tg` is the capacitive coupling coefficient of the
//! gate stack, and `s_geo` is a geometry scale factor fixed at construction
//! that gives the additive term units of siemens.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Areal capacitances of the top-oxide / channel / back-oxide stack, in F/m^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StackCapacitances {
    pub c_tgox: f64,
    pub c_ch: f64,
    pub c_bgox: f64,
}

impl StackCapacitances {
    pub fn new(c_tgox: f64, c_ch: f64, c_bgox: f64) -> Result<Self> {
        for (name, v) in [("c_tgox", c_tgox), ("c_ch", c_ch), ("c_bgox", c_bgox)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::domain(format!(
                    "capacitance {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self { c_tgox, c_ch, c_bgox })
    }

    /// Coupling coefficient between back-gate voltage and top-gate threshold
    /// shift: the channel and back-oxide capacitances in series, divided by
    /// the top-oxide capacitance.
    pub fn coupling_coefficient(&self) -> f64 {
        (self.c_ch * self.c_bgox / (self.c_ch + self.c_bgox)) / self.c_tgox
    }

    pub(crate) fn validate(&self) -> Result<()> {
        Self::new(self.c_tgox, self.c_ch, self.c_bgox).map(|_| ())
    }
}

/// Linear electron-mobility model: `mu(v_bg) = mu0 * (1 + lambda_mu * v_bg)`,
/// valid on a closed back-gate voltage interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobilityModel {
    /// Mobility at v_bg = 0, in cm^2/(V s).
    pub mu0: f64,
    /// Linear coefficient, in 1/V.
    pub lambda_mu: f64,
    pub vbg_min: f64,
    pub vbg_max: f64,
}

impl Default for MobilityModel {
    fn default() -> Self {
        Self { mu0: 100.0, lambda_mu: 0.05, vbg_min: -1.0, vbg_max: 3.0 }
    }
}

impl MobilityModel {
    pub fn new(mu0: f64, lambda_mu: f64, vbg_min: f64, vbg_max: f64) -> Result<Self> {
        let m = Self { mu0, lambda_mu, vbg_min, vbg_max };
        m.validate()?;
        Ok(m)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !self.mu0.is_finite() || self.mu0 <= 0.0 {
            return Err(Error::domain(format!("mu0 must be positive, got {}", self.mu0)));
        }
        if !(self.vbg_min < self.vbg_max) {
            return Err(Error::domain(format!(
                "vbg range [{}, {}] is empty",
                self.vbg_min, self.vbg_max
            )));
        }
        // Mobility must stay positive over the whole valid interval.
        for v in [self.vbg_min, self.vbg_max] {
            if 1.0 + self.lambda_mu * v <= 0.0 {
                return Err(Error::domain(format!(
                    "mobility non-positive at v_bg = {v} (lambda_mu = {})",
                    self.lambda_mu
                )));
            }
        }
        Ok(())
    }

    pub fn check_vbg(&self, v_bg: f64) -> Result<()> {
        if !v_bg.is_finite() || v_bg < self.vbg_min || v_bg > self.vbg_max {
            return Err(Error::Range {
                quantity: "v_bg",
                value: v_bg,
                min: self.vbg_min,
                max: self.vbg_max,
            });
        }
        Ok(())
    }

    /// Electron mobility at the given back-gate bias.
    pub fn mobility(&self, v_bg: f64) -> Result<f64> {
        self.check_vbg(v_bg)?;
        Ok(self.mu0 * (1.0 + self.lambda_mu * v_bg))
    }
}

/// One DG-FeFET cell: a nonvolatile weight plus its conductance mapping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeFETCell {
    /// Normalized nonvolatile weight in [0, 1].
    pub w: f64,
    /// Conductance (S) at w = 0, v_bg = 0.
    pub g_min: f64,
    /// Conductance (S) at w = 1, v_bg = 0.
    pub g_max: f64,
}

impl FeFETCell {
    pub fn new(w: f64, g_min: f64, g_max: f64) -> Result<Self> {
        if !(g_min > 0.0 && g_max > g_min) {
            return Err(Error::domain(format!(
                "need 0 < g_min < g_max, got g_min = {g_min}, g_max = {g_max}"
            )));
        }
        let cell = Self { w: 0.0, g_min, g_max };
        cell.program_weight(w)
    }

    /// Conductance at v_bg = 0: `g_min + w * (g_max - g_min)`.
    pub fn base_conductance(&self) -> f64 {
        self.g_min + self.w * (self.g_max - self.g_min)
    }

    /// Direct write of the nonvolatile weight, used by the algorithm-level
    /// experiments. Exact: no programming noise or quantization.
    pub fn program_weight(&self, target_w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&target_w) {
            return Err(Error::domain(format!("target weight {target_w} outside [0, 1]")));
        }
        Ok(Self { w: target_w, ..*self })
    }
}

/// Shared device context: stack capacitances, mobility law, and the geometry
/// scale factor that closes the units of the additive conductance term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceModel {
    pub caps: StackCapacitances,
    pub mobility: MobilityModel,
    /// Effective geometry factor (W/L times area term) multiplying the
    /// capacitive term so that it carries units of siemens.
    pub s_geo: f64,
}

impl DeviceModel {
    pub fn new(caps: StackCapacitances, mobility: MobilityModel, s_geo: f64) -> Result<Self> {
        if !s_geo.is_finite() || s_geo <= 0.0 {
            return Err(Error::domain(format!("s_geo must be positive, got {s_geo}")));
        }
        caps.validate()?;
        mobility.validate()?;
        Ok(Self { caps, mobility, s_geo })
    }

    /// Channel conductance of `cell` sensed at back-gate bias `v_bg`.
    pub fn conductance(&self, cell: &FeFETCell, v_bg: f64) -> Result<f64> {
        let (slope, offset) = self.transfer(v_bg)?;
        Ok(slope * cell.base_conductance() + offset)
    }

    /// The affine map `G(v_bg) = slope * G(0) + offset` at a fixed bias.
    /// `slope` is the mobility ratio mu(v_bg)/mu(0); `offset` is the
    /// capacitive coupling term.
    pub fn transfer(&self, v_bg: f64) -> Result<(f64, f64)> {
        let mu = self.mobility.mobility(v_bg)?;
        let slope = mu / self.mobility.mu0;
        let offset =
            self.caps.coupling_coefficient() * mu * self.caps.c_tgox * v_bg * self.s_geo;
        Ok((slope, offset))
    }
}

impl Default for DeviceModel {
    fn default() -> Self {
        Self {
            caps: StackCapacitances { c_tgox: 2.0e-2, c_ch: 1.0e-2, c_bgox: 5.0e-3 },
            mobility: MobilityModel::default(),
            // mu0 * c_tgox * s_geo = 1e-7, so the additive term is
            // gamma_tg * (mu/mu0) * 1e-7 S per volt of back-gate bias.
            s_geo: 5.0e-8,
        }
    }
}

/// Programming pulse-train flavor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PulseKind {
    /// Identical pulses: conductance saturates within a few pulses.
    Identical,
    /// Pulse-width modulation: asymmetric, logarithmic-like staircase.
    WidthModulated,
    /// Pulse-amplitude modulation: near-uniform staircase, best linearity.
    AmplitudeModulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    /// Amplitude magnitude, V.
    pub amplitude: f64,
    /// Width, s.
    pub width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseDirection {
    Potentiate,
    Depress,
}

/// A programming scheme: one pulse list per direction plus the phenomenological
/// response curve implied by the scheme kind. The curve maps a normalized
/// staircase position s in [0, 1] to a weight; each pulse advances s by one
/// step of the corresponding list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseScheme {
    pub kind: PulseKind,
    pub potentiation: Vec<Pulse>,
    pub depression: Vec<Pulse>,
    /// Optional quantization of the weight to a finite number of levels.
    /// `None` keeps the weight continuous (the algorithm layers assume this).
    pub levels: Option<u32>,
}

impl PulseScheme {
    pub fn new(
        kind: PulseKind,
        potentiation: Vec<Pulse>,
        depression: Vec<Pulse>,
        levels: Option<u32>,
    ) -> Result<Self> {
        if potentiation.is_empty() || depression.is_empty() {
            return Err(Error::domain("pulse lists must be non-empty"));
        }
        for p in potentiation.iter().chain(&depression) {
            if !(p.amplitude.abs() > 0.0 && p.width > 0.0) {
                return Err(Error::domain(format!(
                    "pulse amplitude/width must be positive, got {p:?}"
                )));
            }
        }
        if let Some(l) = levels {
            if l < 2 {
                return Err(Error::domain("quantization needs at least 2 levels"));
            }
        }
        Ok(Self { kind, potentiation, depression, levels })
    }

    /// A default staircase of `n` pulses for the given kind.
    pub fn default_for(kind: PulseKind, n: usize) -> Self {
        let ramp = |i: usize| match kind {
            PulseKind::Identical => Pulse { amplitude: 3.0, width: 1e-6 },
            PulseKind::WidthModulated => Pulse {
                amplitude: 3.0,
                width: 50e-9 * 2f64.powi(i as i32),
            },
            PulseKind::AmplitudeModulated => Pulse {
                amplitude: 2.0 + 2.0 * (i as f64 + 1.0) / n as f64,
                width: 1e-6,
            },
        };
        let pulses: Vec<Pulse> = (0..n).map(ramp).collect();
        Self { kind, potentiation: pulses.clone(), depression: pulses, levels: None }
    }

    /// Staircase shape parameter for the logarithmic (width-modulated) curve,
    /// taken from the spread of pulse widths.
    fn log_beta(&self) -> f64 {
        let ws: Vec<f64> = self.potentiation.iter().map(|p| p.width).collect();
        let lo = ws.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ws.iter().cloned().fold(0.0f64, f64::max);
        if hi > lo { hi / lo } else { 9.0 }
    }

    fn curve(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, 1.0);
        match self.kind {
            PulseKind::AmplitudeModulated => s,
            PulseKind::Identical => {
                (1.0 - (-SAT_SHARPNESS * s).exp()) / (1.0 - (-SAT_SHARPNESS).exp())
            }
            PulseKind::WidthModulated => {
                let b = self.log_beta();
                (1.0 + b * s).ln() / (1.0 + b).ln()
            }
        }
    }

    fn curve_inv(&self, w: f64) -> f64 {
        let w = w.clamp(0.0, 1.0);
        match self.kind {
            PulseKind::AmplitudeModulated => w,
            PulseKind::Identical => {
                -(1.0 - w * (1.0 - (-SAT_SHARPNESS).exp())).ln() / SAT_SHARPNESS
            }
            PulseKind::WidthModulated => {
                let b = self.log_beta();
                (((1.0 + b).ln() * w).exp() - 1.0) / b
            }
        }
    }
}

/// Saturation sharpness of the identical-pulse response curve.
const SAT_SHARPNESS: f64 = 8.0;

/// Apply `count` pulses of a scheme to a cell. The weight moves monotonically
/// toward the corresponding bound and silently saturates there.
pub fn apply_pulses(
    cell: &FeFETCell,
    scheme: &PulseScheme,
    direction: PulseDirection,
    count: usize,
) -> FeFETCell {
    let mut w = cell.w;
    let step = match direction {
        PulseDirection::Potentiate => 1.0 / scheme.potentiation.len() as f64,
        PulseDirection::Depress => -1.0 / scheme.depression.len() as f64,
    };
    for _ in 0..count {
        let s = (scheme.curve_inv(w) + step).clamp(0.0, 1.0);
        w = scheme.curve(s);
        if let Some(levels) = scheme.levels {
            let n = (levels - 1) as f64;
            w = (w * n).round() / n;
        }
    }
    FeFETCell { w: w.clamp(0.0, 1.0), ..*cell }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn coupling_of_equal_caps_is_half() {
        let caps = StackCapacitances::new(1.0, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(caps.coupling_coefficient(), 0.5);
    }

    #[test]
    fn coupling_limit_large_channel() {
        let c = 1e-2;
        let caps = StackCapacitances::new(c, 1e9 * 5e-3, 5e-3).unwrap();
        assert_relative_eq!(caps.coupling_coefficient(), 5e-3 / c, max_relative = 1e-6);
    }

    #[test]
    fn coupling_hand_evaluated() {
        // series(1e-2, 5e-3) = 1/300; divided by 2e-2.
        let caps = StackCapacitances::new(2.0e-2, 1.0e-2, 5.0e-3).unwrap();
        assert_relative_eq!(
            caps.coupling_coefficient(),
            (1.0 / 300.0) / 2.0e-2,
            max_relative = 1e-12
        );
    }

    #[test]
    fn coupling_rejects_bad_caps() {
        assert!(StackCapacitances::new(0.0, 1.0, 1.0).is_err());
        assert!(StackCapacitances::new(1.0, -1.0, 1.0).is_err());
        assert!(StackCapacitances::new(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn mobility_at_zero_is_mu0() {
        let m = MobilityModel::default();
        assert_abs_diff_eq!(m.mobility(0.0).unwrap(), m.mu0);
    }

    #[test]
    fn mobility_linear_point() {
        let m = MobilityModel::new(100.0, 0.05, -1.0, 3.0).unwrap();
        assert_abs_diff_eq!(m.mobility(2.0).unwrap(), 110.0, epsilon = 1e-12);
    }

    #[test]
    fn mobility_out_of_range_errors() {
        let m = MobilityModel::new(100.0, 0.05, -1.0, 3.0).unwrap();
        assert!(matches!(m.mobility(5.0), Err(Error::Range { .. })));
    }

    #[test]
    fn conductance_at_zero_bias_is_base() {
        let dev = DeviceModel::default();
        let cell = FeFETCell::new(0.37, 1e-6, 1e-5).unwrap();
        let g = dev.conductance(&cell, 0.0).unwrap();
        assert_abs_diff_eq!(g, cell.base_conductance());
    }

    #[test]
    fn conductance_hand_evaluated() {
        // Independent evaluation of the transfer relation:
        //   mu(1) = 105, ratio = 1.05, G0 = 5.5e-6
        //   offset = gamma * 105 * 2e-2 * 1 * 5e-8 = gamma * 1.05 * 1e-7
        let dev = DeviceModel::default();
        let cell = FeFETCell::new(0.5, 1e-6, 1e-5).unwrap();
        let gamma = (1.0 / 300.0) / 2.0e-2;
        let expect = 1.05 * 5.5e-6 + gamma * 1.05 * 1e-7;
        assert_relative_eq!(dev.conductance(&cell, 1.0).unwrap(), expect, max_relative = 1e-12);
    }

    #[test]
    fn conductance_affine_in_base_state() {
        let dev = DeviceModel::default();
        let v_bg = 1.5;
        let (slope, offset) = dev.transfer(v_bg).unwrap();
        for w in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let cell = FeFETCell::new(w, 1e-6, 1e-5).unwrap();
            let g = dev.conductance(&cell, v_bg).unwrap();
            assert_relative_eq!(g, slope * cell.base_conductance() + offset, max_relative = 1e-14);
        }
        assert_relative_eq!(slope, dev.mobility.mobility(v_bg).unwrap() / dev.mobility.mu0);
    }

    #[test]
    fn conductance_monotone_in_vbg() {
        let dev = DeviceModel::default();
        let cell = FeFETCell::new(0.3, 1e-6, 1e-5).unwrap();
        let mut prev = dev.conductance(&cell, 0.0).unwrap();
        for i in 1..=30 {
            let v = 3.0 * i as f64 / 30.0;
            let g = dev.conductance(&cell, v).unwrap();
            assert!(g > prev, "not increasing at v_bg = {v}");
            prev = g;
        }
    }

    #[test]
    fn program_weight_is_exact() {
        let cell = FeFETCell::new(0.0, 1e-6, 1e-5).unwrap();
        assert_eq!(cell.program_weight(0.37).unwrap().w, 0.37);
        assert_eq!(cell.program_weight(0.0).unwrap().w, 0.0);
        assert_eq!(cell.program_weight(1.0).unwrap().w, 1.0);
        assert!(cell.program_weight(1.5).is_err());
        assert!(cell.program_weight(-0.1).is_err());
    }

    #[test]
    fn pulses_saturate_at_bounds() {
        let cell = FeFETCell::new(1.0, 1e-6, 1e-5).unwrap();
        for kind in [PulseKind::Identical, PulseKind::WidthModulated, PulseKind::AmplitudeModulated]
        {
            let scheme = PulseScheme::default_for(kind, 16);
            let out = apply_pulses(&cell, &scheme, PulseDirection::Potentiate, 50);
            assert_eq!(out.w, 1.0);
        }
        let cell0 = FeFETCell::new(0.0, 1e-6, 1e-5).unwrap();
        let scheme = PulseScheme::default_for(PulseKind::AmplitudeModulated, 16);
        assert_eq!(apply_pulses(&cell0, &scheme, PulseDirection::Depress, 9).w, 0.0);
    }

    #[test]
    fn amplitude_staircase_is_near_uniform() {
        let scheme = PulseScheme::default_for(PulseKind::AmplitudeModulated, 20);
        let mut cell = FeFETCell::new(0.0, 1e-6, 1e-5).unwrap();
        let mut steps = Vec::new();
        for _ in 0..20 {
            let next = apply_pulses(&cell, &scheme, PulseDirection::Potentiate, 1);
            assert!(next.w > cell.w);
            steps.push(next.w - cell.w);
            cell = next;
        }
        assert_abs_diff_eq!(cell.w, 1.0, epsilon = 1e-12);
        let max = steps.iter().cloned().fold(0.0f64, f64::max);
        let min = steps.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / min <= 2.0, "step ratio {} too large", max / min);
    }

    #[test]
    fn amplitude_pot_then_dep_returns_to_start() {
        let scheme = PulseScheme::default_for(PulseKind::AmplitudeModulated, 20);
        let start = FeFETCell::new(0.3, 1e-6, 1e-5).unwrap();
        let up = apply_pulses(&start, &scheme, PulseDirection::Potentiate, 7);
        let back = apply_pulses(&up, &scheme, PulseDirection::Depress, 7);
        assert_abs_diff_eq!(back.w, start.w, epsilon = 1e-9);
    }

    #[test]
    fn identical_saturates_within_a_few_pulses() {
        let scheme = PulseScheme::default_for(PulseKind::Identical, 16);
        let mut cell = FeFETCell::new(0.0, 1e-6, 1e-5).unwrap();
        cell = apply_pulses(&cell, &scheme, PulseDirection::Potentiate, 6);
        assert!(cell.w > 0.9, "identical scheme should be nearly saturated, w = {}", cell.w);
    }

    #[test]
    fn width_modulated_steps_shrink() {
        let scheme = PulseScheme::default_for(PulseKind::WidthModulated, 16);
        let mut cell = FeFETCell::new(0.0, 1e-6, 1e-5).unwrap();
        let mut steps = Vec::new();
        for _ in 0..16 {
            let next = apply_pulses(&cell, &scheme, PulseDirection::Potentiate, 1);
            steps.push(next.w - cell.w);
            cell = next;
        }
        // Logarithmic-like: strictly decreasing step size.
        for pair in steps.windows(2) {
            assert!(pair[1] < pair[0]);
        }
        assert!(steps[0] / steps[15] > 2.0, "expected pronounced asymmetry");
    }

    #[test]
    fn quantized_scheme_snaps_to_grid() {
        let mut scheme = PulseScheme::default_for(PulseKind::AmplitudeModulated, 10);
        scheme.levels = Some(11);
        let cell = FeFETCell::new(0.0, 1e-6, 1e-5).unwrap();
        let out = apply_pulses(&cell, &scheme, PulseDirection::Potentiate, 3);
        assert_abs_diff_eq!(out.w, 0.3, epsilon = 1e-12);
    }
}
