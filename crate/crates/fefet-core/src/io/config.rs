//! Run configuration: a single TOML file with one section per module, every
//! unstated constant visible and diffable. Unknown keys are rejected and all
//! module invariants are checked at load time.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::astro::HomeostasisParams;
use crate::crossbar::GainMap;
use crate::device::{DeviceModel, MobilityModel, StackCapacitances};
use crate::dragonfly::{Kinematics, TuningConfig};
use crate::error::{Error, Result};
use crate::plasticity::StdpParams;
use crate::snn::LifParams;

/// `[device]` section, flattened into the two device sub-structures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviceConfig {
    pub c_tgox: f64,
    pub c_ch: f64,
    pub c_bgox: f64,
    pub mu0: f64,
    pub lambda_mu: f64,
    pub vbg_min: f64,
    pub vbg_max: f64,
    pub s_geo: f64,
    /// Conductance window the weight range [0, 1] maps onto, S.
    pub g_min: f64,
    pub g_max: f64,
}

impl Default for DeviceConfig {
    fn default() -> Self {
        let d = DeviceModel::default();
        Self {
            c_tgox: d.caps.c_tgox,
            c_ch: d.caps.c_ch,
            c_bgox: d.caps.c_bgox,
            mu0: d.mobility.mu0,
            lambda_mu: d.mobility.lambda_mu,
            vbg_min: d.mobility.vbg_min,
            vbg_max: d.mobility.vbg_max,
            s_geo: d.s_geo,
            g_min: 1e-6,
            g_max: 1e-5,
        }
    }
}

impl DeviceConfig {
    pub fn to_model(&self) -> Result<DeviceModel> {
        let caps = StackCapacitances::new(self.c_tgox, self.c_ch, self.c_bgox)?;
        let mobility = MobilityModel::new(self.mu0, self.lambda_mu, self.vbg_min, self.vbg_max)?;
        DeviceModel::new(caps, mobility, self.s_geo)
    }

    fn validate(&self) -> Result<()> {
        self.to_model()?;
        if !(self.g_min > 0.0 && self.g_min < self.g_max) {
            return Err(Error::domain(format!(
                "conductance window [{}, {}] must be positive and increasing",
                self.g_min, self.g_max
            )));
        }
        Ok(())
    }
}

/// `[network]` section: the MNIST classifier topology.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    pub n_out: usize,
    /// Fixed lateral inhibitory weight, mV per spike (strictly negative).
    pub w_inhib: f64,
    /// Membrane drive per unit effective weight per input spike, mV.
    pub input_scale: f64,
    /// Per-neuron target for the sum of incoming weights, applied after
    /// each batch; omit to disable divisive normalization.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_target: Option<f64>,
    pub batch_size: usize,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            n_out: 100,
            w_inhib: -120.0,
            input_scale: 0.5,
            norm_target: Some(78.4),
            batch_size: 16,
        }
    }
}

impl NetworkConfig {
    fn validate(&self) -> Result<()> {
        if self.n_out == 0 || self.batch_size == 0 {
            return Err(Error::domain("n_out and batch_size must be positive"));
        }
        if self.w_inhib >= 0.0 {
            return Err(Error::domain("w_inhib must be strictly negative"));
        }
        if !(self.input_scale > 0.0) {
            return Err(Error::domain("input_scale must be positive"));
        }
        if let Some(t) = self.norm_target {
            if !(t > 0.0) {
                return Err(Error::domain("norm_target must be positive when set"));
            }
        }
        Ok(())
    }
}

/// `[training]` section: run sizing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingConfig {
    pub epochs: usize,
    /// Cap on training images per epoch; omit to use the whole file.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_train: Option<usize>,
    /// Cap on evaluation images; omit to use the whole file.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_test: Option<usize>,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self { epochs: 1, n_train: Some(10_000), n_test: Some(2_000) }
    }
}

impl TrainingConfig {
    fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::domain("epochs must be positive"));
        }
        Ok(())
    }
}

/// `[dragonfly]` section: tuning grids, pixel front end, crossbar mapping,
/// and engagement kinematics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DragonflyConfig {
    pub tuning: TuningConfig,
    pub kinematics: Kinematics,
    pub n_pixels: usize,
    /// Half-width of the pixel array, rad.
    pub pixel_half_span: f64,
    /// Back-gate volts applied at proprioceptive activity 1.
    pub v_unit: f64,
    /// Dragonfly flight speed, m/s.
    pub speed: f64,
    pub max_steps: usize,
}

impl Default for DragonflyConfig {
    fn default() -> Self {
        Self {
            tuning: TuningConfig::default(),
            kinematics: Kinematics::default(),
            n_pixels: 64,
            pixel_half_span: 75f64.to_radians(),
            v_unit: 2.0,
            speed: 3.0,
            max_steps: 2000,
        }
    }
}

impl DragonflyConfig {
    fn validate(&self) -> Result<()> {
        self.tuning.validate()?;
        if self.n_pixels < 2 || self.max_steps == 0 {
            return Err(Error::domain("n_pixels must be >= 2 and max_steps positive"));
        }
        if !(self.pixel_half_span > 0.0 && self.v_unit > 0.0 && self.speed >= 0.0) {
            return Err(Error::domain(
                "pixel_half_span and v_unit must be positive, speed non-negative",
            ));
        }
        if !(self.kinematics.dt > 0.0 && self.kinematics.max_turn_rate > 0.0) {
            return Err(Error::domain("dt and max_turn_rate must be positive"));
        }
        Ok(())
    }
}

/// The complete run configuration.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub device: DeviceConfig,
    pub gain: GainMap,
    pub lif: LifParams,
    pub stdp: StdpParams,
    pub network: NetworkConfig,
    pub training: TrainingConfig,
    pub homeostasis: HomeostasisParams,
    pub dragonfly: DragonflyConfig,
}

impl RunConfig {
    /// Check every module invariant, naming the offending section.
    pub fn validate(&self) -> Result<()> {
        let section = |name: &str, r: Result<()>| {
            r.map_err(|e| Error::config(format!("[{name}] {e}")))
        };
        section("device", self.device.validate())?;
        section(
            "gain",
            GainMap::new(self.gain.lambda_k, self.gain.k_min, self.gain.k_max).map(|_| ()),
        )?;
        section("lif", self.lif.validate())?;
        section("stdp", self.stdp.validate())?;
        section("network", self.network.validate())?;
        section("training", self.training.validate())?;
        section("homeostasis", self.homeostasis.validate())?;
        section("dragonfly", self.dragonfly.validate())?;
        Ok(())
    }
}

/// Apply one `dotted.path=value` override onto a parsed TOML tree. The value
/// is parsed as TOML (integer, float, boolean, string, ...).
fn apply_override(root: &mut toml::Value, spec: &str) -> Result<()> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::config(format!("override '{spec}' is not key=value")))?;
    let value: toml::Value = format!("v = {raw}")
        .parse::<toml::Table>()
        .map(|t| t["v"].clone())
        .or_else(|_| Ok::<_, Error>(toml::Value::String(raw.to_string())))?;
    let mut node = root;
    let mut parts = path.split('.').peekable();
    while let Some(part) = parts.next() {
        let table = node
            .as_table_mut()
            .ok_or_else(|| Error::config(format!("override path '{path}' crosses a non-table")))?;
        if parts.peek().is_none() {
            table.insert(part.to_string(), value);
            return Ok(());
        }
        node = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    }
    unreachable!("split always yields at least one part")
}

/// Parse a configuration from TOML text with `key=value` overrides applied
/// before validation.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<RunConfig> {
    let mut tree: toml::Value =
        text.parse().map_err(|e| Error::config(format!("TOML parse error: {e}")))?;
    for spec in overrides {
        apply_override(&mut tree, spec)?;
    }
    let config: RunConfig =
        tree.try_into().map_err(|e| Error::config(format!("invalid configuration: {e}")))?;
    config.validate()?;
    Ok(config)
}

/// Load a configuration file; a missing path yields the defaults (so every
/// command runs without a config file).
pub fn load_config(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig> {
    match path {
        Some(p) => parse_config(&std::fs::read_to_string(p)?, overrides),
        None => parse_config("", overrides),
    }
}

/// Hash of the canonical serialized configuration; recorded in checkpoints
/// and output manifests.
pub fn config_hash(config: &RunConfig) -> String {
    let text = toml::to_string(config).expect("config serializes");
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    format!("{:x}", hasher.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_and_stable() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        assert_eq!(config_hash(&cfg), config_hash(&RunConfig::default()));
    }

    #[test]
    fn empty_text_yields_defaults() {
        let cfg = parse_config("", &[]).unwrap();
        assert_eq!(cfg, RunConfig::default());
    }

    #[test]
    fn section_values_parse() {
        let cfg = parse_config(
            "[lif]\ndt = 0.5\n[network]\nn_out = 25\n[gain]\nlambda_k = 0.1\n",
            &[],
        )
        .unwrap();
        assert_eq!(cfg.lif.dt, 0.5);
        assert_eq!(cfg.network.n_out, 25);
        assert_eq!(cfg.gain.lambda_k, 0.1);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(
            parse_config("[lif]\nbogus = 1\n", &[]),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            parse_config("[nonexistent_section]\nx = 1\n", &[]),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn invariant_violations_name_the_section() {
        let err = parse_config("[network]\nw_inhib = 5.0\n", &[]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("[network]"), "message was: {msg}");
    }

    #[test]
    fn overrides_apply_and_validate() {
        let cfg = parse_config("", &["lif.dt=0.25".into(), "network.n_out=7".into()]).unwrap();
        assert_eq!(cfg.lif.dt, 0.25);
        assert_eq!(cfg.network.n_out, 7);
        // Overrides are validated like config keys.
        assert!(parse_config("", &["lif.bogus=1".into()]).is_err());
        assert!(parse_config("", &["network.w_inhib=5.0".into()]).is_err());
        assert!(parse_config("", &["no-equals-sign".into()]).is_err());
    }

    #[test]
    fn config_hash_tracks_content() {
        let a = parse_config("", &[]).unwrap();
        let b = parse_config("", &["lif.dt=0.5".into()]).unwrap();
        assert_ne!(config_hash(&a), config_hash(&b));
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = parse_config("", &["stdp.a_plus=0.02".into()]).unwrap();
        let text = toml::to_string(&cfg).unwrap();
        let back = parse_config(&text, &[]).unwrap();
        assert_eq!(cfg, back);
    }
}
