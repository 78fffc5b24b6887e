//! Dragonfly prey-interception circuit with dendritic gain modulation.
//!
//! Gaussian-tuned visual and proprioceptive populations multiply in a
//! sensorimotor basis layer, `S_ij = f_i(x) * g_j(y)`; motor neurons read the
//! basis through a fixed weight tensor whose double integral has the closed
//! form
//!
//! ```text
//! W_ijk = 2 pi s_r s_g s_m / sqrt(S) * exp(-(a_i - b_j - c_k)^2 / (2 S)),
//! S = s_r^2 + s_g^2 + s_m^2
//! ```
//!
//! and the turn command is population-decoded from the motor activations.
//! The circuit exists in two interchangeable realizations over a shared
//! pixel front end: a software multiply, and a crossbar mapping with the
//! proprioceptive input on the column back gates. The back-gate mapping
//! introduces a known gain offset (k(0) = 1, not 0), removed by subtracting
//! a zero-gain baseline pass before decoding.

use ndarray::{Array1, Array2, Array3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::crossbar::{CrossbarArray, GainMap};
use crate::device::DeviceModel;
use crate::error::{Error, Result};

/// Tuning-curve centers and widths for the three populations, plus the
/// synaptic scaling constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TuningConfig {
    /// Preferred prey-image positions of the visual neurons, rad.
    pub a: Vec<f64>,
    /// Preferred desired-image positions of the proprioceptive neurons, rad.
    pub b: Vec<f64>,
    /// Preferred turn directions of the motor neurons, rad, in (-pi, pi].
    pub c: Vec<f64>,
    pub sigma_r: f64,
    pub sigma_g: f64,
    pub sigma_m: f64,
    /// Synaptic scaling of the pixel tuning weights.
    pub kappa: f64,
    /// Overall motor activity scale.
    pub beta: f64,
}

fn uniform_grid(n: usize, half_span: f64) -> Vec<f64> {
    (0..n).map(|i| -half_span + 2.0 * half_span * i as f64 / (n - 1) as f64).collect()
}

impl Default for TuningConfig {
    fn default() -> Self {
        // Grids sized for smooth basis coverage: sigma equals grid spacing.
        let a = uniform_grid(15, 60f64.to_radians());
        let b = uniform_grid(9, 30f64.to_radians());
        let c = uniform_grid(15, 90f64.to_radians());
        let spacing = |g: &[f64]| g[1] - g[0];
        Self {
            sigma_r: spacing(&a),
            sigma_g: spacing(&b),
            sigma_m: spacing(&c),
            a,
            b,
            c,
            kappa: 1.0,
            beta: 1.0,
        }
    }
}

impl TuningConfig {
    pub fn validate(&self) -> Result<()> {
        if self.a.is_empty() || self.b.is_empty() || self.c.is_empty() {
            return Err(Error::domain("tuning center lists must be non-empty"));
        }
        if !(self.sigma_r > 0.0 && self.sigma_g > 0.0 && self.sigma_m > 0.0) {
            return Err(Error::domain("tuning widths must be positive"));
        }
        if self.kappa <= 0.0 {
            return Err(Error::domain("kappa must be positive"));
        }
        if self.c.iter().any(|&c| c <= -std::f64::consts::PI || c > std::f64::consts::PI) {
            return Err(Error::domain("motor centers must lie in (-pi, pi]"));
        }
        Ok(())
    }
}

fn gaussian(x: f64, center: f64, sigma: f64) -> f64 {
    (-(x - center).powi(2) / (2.0 * sigma * sigma)).exp()
}

/// Visual population response to prey-image position `x`.
pub fn visual_response(x: f64, cfg: &TuningConfig) -> Array1<f64> {
    Array1::from_iter(cfg.a.iter().map(|&a| gaussian(x, a, cfg.sigma_r)))
}

/// Proprioceptive population response to desired-image position `y`.
pub fn proprio_response(y: f64, cfg: &TuningConfig) -> Array1<f64> {
    Array1::from_iter(cfg.b.iter().map(|&b| gaussian(y, b, cfg.sigma_g)))
}

/// Tuning weight from the pixel at `x_p` onto visual neuron `i`.
pub fn tuning_weight(x_p: f64, a_i: f64, sigma_r: f64, kappa: f64) -> f64 {
    kappa * gaussian(x_p, a_i, sigma_r)
}

/// Outer-product sensorimotor basis: `S_ij = f_i * g_j`, every (visual,
/// proprioceptive) pair exactly once.
pub fn sensorimotor(f: &Array1<f64>, g: &Array1<f64>) -> Array2<f64> {
    let mut s = Array2::zeros((f.len(), g.len()));
    for (i, &fi) in f.iter().enumerate() {
        for (j, &gj) in g.iter().enumerate() {
            s[(i, j)] = fi * gj;
        }
    }
    s
}

/// Motor weight tensor in closed form (see module docs).
pub fn motor_weights(cfg: &TuningConfig) -> Array3<f64> {
    let var = cfg.sigma_r.powi(2) + cfg.sigma_g.powi(2) + cfg.sigma_m.powi(2);
    let prefactor =
        2.0 * std::f64::consts::PI * cfg.sigma_r * cfg.sigma_g * cfg.sigma_m / var.sqrt();
    let mut w = Array3::zeros((cfg.a.len(), cfg.b.len(), cfg.c.len()));
    for (i, &a) in cfg.a.iter().enumerate() {
        for (j, &b) in cfg.b.iter().enumerate() {
            for (k, &c) in cfg.c.iter().enumerate() {
                w[(i, j, k)] = prefactor * (-(a - b - c).powi(2) / (2.0 * var)).exp();
            }
        }
    }
    w
}

/// Motor activations: `R_k = beta * sum_ij W_ijk S_ij`.
pub fn motor_response(w: &Array3<f64>, s: &Array2<f64>, beta: f64) -> Result<Array1<f64>> {
    let (ni, nj, nk) = w.dim();
    if s.dim() != (ni, nj) {
        return Err(Error::Dimension {
            expected: format!("({ni}, {nj})"),
            got: format!("{:?}", s.dim()),
        });
    }
    let mut r = Array1::zeros(nk);
    for k in 0..nk {
        let mut acc = 0.0;
        for i in 0..ni {
            for j in 0..nj {
                acc += w[(i, j, k)] * s[(i, j)];
            }
        }
        r[k] = beta * acc;
    }
    Ok(r)
}

const DECODE_EPS: f64 = 1e-12;

/// Population-vector decode of the turn direction:
/// `d = sum_k c_k R_k / sum_k R_k`.
pub fn decode_turn(r: &Array1<f64>, c: &[f64]) -> Result<f64> {
    if r.len() != c.len() {
        return Err(Error::Dimension {
            expected: format!("{} activations", c.len()),
            got: format!("{}", r.len()),
        });
    }
    let total: f64 = r.sum();
    if total <= DECODE_EPS {
        return Err(Error::Decode("no motor drive to decode".into()));
    }
    Ok(r.iter().zip(c).map(|(&rk, &ck)| ck * rk).sum::<f64>() / total)
}

/// Offset-corrected decode for the crossbar mapping: subtract the zero-gain
/// baseline activations (floored at zero) before decoding.
pub fn decode_turn_offset_corrected(
    r_raw: &Array1<f64>,
    r_baseline: &Array1<f64>,
    c: &[f64],
) -> Result<f64> {
    if r_raw.len() != r_baseline.len() {
        return Err(Error::Dimension {
            expected: format!("{} baseline activations", r_raw.len()),
            got: format!("{}", r_baseline.len()),
        });
    }
    let corrected = Array1::from_iter(
        r_raw.iter().zip(r_baseline).map(|(&raw, &base)| (raw - base).max(0.0)),
    );
    decode_turn(&corrected, c)
}

/// Shared pixel front end: ommatidia positions and the static tuning-weight
/// matrix onto the visual population.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontEnd {
    pub pixels: Vec<f64>,
    /// pixels x visual neurons, entries in (0, kappa].
    pub alpha: Array2<f64>,
    /// Width of the prey-image blob on the pixel array, rad.
    pub sigma_pix: f64,
}

impl FrontEnd {
    pub fn build(cfg: &TuningConfig, n_pixels: usize, half_span: f64) -> Result<Self> {
        cfg.validate()?;
        if n_pixels < 2 {
            return Err(Error::domain("need at least 2 pixels"));
        }
        let pixels = uniform_grid(n_pixels, half_span);
        let sigma_pix = pixels[1] - pixels[0];
        let mut alpha = Array2::zeros((n_pixels, cfg.a.len()));
        for (p, &xp) in pixels.iter().enumerate() {
            for (i, &ai) in cfg.a.iter().enumerate() {
                alpha[(p, i)] = tuning_weight(xp, ai, cfg.sigma_r, cfg.kappa);
            }
        }
        Ok(Self { pixels, alpha, sigma_pix })
    }

    /// Prey-image intensity profile for a prey at eye position `x`.
    pub fn image(&self, x: f64) -> Array1<f64> {
        Array1::from_iter(self.pixels.iter().map(|&xp| gaussian(xp, x, self.sigma_pix)))
    }

    /// Visual drive through the tuning weights: `F_i = sum_p I_p alpha_pi`.
    pub fn visual_drive(&self, image: &Array1<f64>) -> Array1<f64> {
        self.alpha.t().dot(image)
    }
}

/// Crossbar realization of the sensorimotor layer: pixel intensities drive
/// the rows, tuning weights are programmed as cell weights, and each
/// (visual, proprioceptive) column's back gate carries the proprioceptive
/// input through the gain map.
#[derive(Debug, Clone)]
pub struct SensorArray {
    pub front: FrontEnd,
    pub array: CrossbarArray,
    pub gain: GainMap,
    /// Back-gate volts applied at g = 1.
    pub v_unit: f64,
    pub kappa: f64,
    n_vis: usize,
    n_prop: usize,
}

impl SensorArray {
    pub fn build(
        cfg: &TuningConfig,
        front: FrontEnd,
        device: DeviceModel,
        gain: GainMap,
        v_unit: f64,
    ) -> Result<Self> {
        let n_vis = cfg.a.len();
        let n_prop = cfg.b.len();
        let n_pix = front.pixels.len();
        device.mobility.check_vbg(v_unit)?;
        gain.check_gain(gain.gain(v_unit))?;
        // Column (i, j) stores the tuning weights of visual neuron i,
        // normalized into the [0, 1] device range.
        let mut weights = Array2::zeros((n_pix, n_vis * n_prop));
        for p in 0..n_pix {
            for i in 0..n_vis {
                for j in 0..n_prop {
                    weights[(p, i * n_prop + j)] = front.alpha[(p, i)] / cfg.kappa;
                }
            }
        }
        let array = CrossbarArray::from_weights(&weights, 1e-6, 1e-5, device)?;
        Ok(Self { front, array, gain, v_unit, kappa: cfg.kappa, n_vis, n_prop })
    }

    fn basis_matrix(&mut self, image: &Array1<f64>, g: Option<&Array1<f64>>) -> Result<Array2<f64>> {
        for j in 0..self.n_prop {
            let gj = g.map_or(0.0, |g| g[j]);
            if !(0.0..=1.0).contains(&gj) {
                return Err(Error::Range { quantity: "g", value: gj, min: 0.0, max: 1.0 });
            }
            let v = gj * self.v_unit;
            for i in 0..self.n_vis {
                self.array.set_col_vbg(i * self.n_prop + j, v)?;
            }
        }
        let eff = self.array.effective_weight_matrix(&self.gain)?;
        let flat = eff.t().dot(image) * self.kappa;
        let mut s = Array2::zeros((self.n_vis, self.n_prop));
        for i in 0..self.n_vis {
            for j in 0..self.n_prop {
                s[(i, j)] = flat[i * self.n_prop + j];
            }
        }
        Ok(s)
    }

    /// Raw (gain-offset) and zero-gain baseline basis activations for one
    /// pixel image and proprioceptive vector.
    pub fn sensorimotor_fefet(
        &mut self,
        image: &Array1<f64>,
        g: &Array1<f64>,
    ) -> Result<(Array2<f64>, Array2<f64>)> {
        if g.len() != self.n_prop {
            return Err(Error::Dimension {
                expected: format!("{} proprioceptive inputs", self.n_prop),
                got: format!("{}", g.len()),
            });
        }
        let raw = self.basis_matrix(image, Some(g))?;
        let baseline = self.basis_matrix(image, None)?;
        Ok((raw, baseline))
    }

    /// Offset-corrected basis: `(raw - baseline) / (lambda_k * v_unit)`,
    /// floored at zero; equals `g_j * sum_p I_p alpha_pi`.
    pub fn corrected_basis(&mut self, image: &Array1<f64>, g: &Array1<f64>) -> Result<Array2<f64>> {
        let (raw, baseline) = self.sensorimotor_fefet(image, g)?;
        let scale = self.gain.lambda_k * self.v_unit;
        Ok((raw - baseline).map(|&v| (v / scale).max(0.0)))
    }
}

/// Planar engagement kinematics constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Kinematics {
    /// Time step, s.
    pub dt: f64,
    /// Maximum turn rate, rad/s.
    pub max_turn_rate: f64,
    /// Capture distance, m.
    pub capture_radius: f64,
    /// Optional heading jitter (rad, std per step) on the prey.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prey_noise_std: Option<f64>,
}

impl Default for Kinematics {
    fn default() -> Self {
        Self { dt: 0.01, max_turn_rate: 10.0, capture_radius: 0.05, prey_noise_std: None }
    }
}

/// 2D state of one engagement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngagementState {
    pub dragonfly_pos: [f64; 2],
    pub heading: f64,
    pub speed: f64,
    pub prey_pos: [f64; 2],
    pub prey_vel: [f64; 2],
    /// Prey-image position on the eye (bearing relative to heading), rad.
    pub x_eye: f64,
    /// Desired prey-image position, rad.
    pub y_desired: f64,
    pub t: f64,
}

fn wrap_angle(a: f64) -> f64 {
    let mut a = a % std::f64::consts::TAU;
    if a > std::f64::consts::PI {
        a -= std::f64::consts::TAU;
    } else if a <= -std::f64::consts::PI {
        a += std::f64::consts::TAU;
    }
    a
}

impl EngagementState {
    /// Set up an engagement; the desired image position starts at the
    /// initial prey-image position (hold-the-line-of-sight strategy).
    pub fn new(
        dragonfly_pos: [f64; 2],
        heading: f64,
        speed: f64,
        prey_pos: [f64; 2],
        prey_vel: [f64; 2],
    ) -> Result<Self> {
        if speed < 0.0 {
            return Err(Error::domain("speed must be non-negative"));
        }
        let x = wrap_angle(bearing(dragonfly_pos, prey_pos) - heading);
        Ok(Self {
            dragonfly_pos,
            heading,
            speed,
            prey_pos,
            prey_vel,
            x_eye: x,
            y_desired: x,
            t: 0.0,
        })
    }

    pub fn distance(&self) -> f64 {
        let dx = self.prey_pos[0] - self.dragonfly_pos[0];
        let dy = self.prey_pos[1] - self.dragonfly_pos[1];
        dx.hypot(dy)
    }
}

fn bearing(from: [f64; 2], to: [f64; 2]) -> f64 {
    (to[1] - from[1]).atan2(to[0] - from[0])
}

/// Advance the engagement by one step given the decoded turn `d`: the
/// heading turns by at most `max_turn_rate * dt`, both agents advance, the
/// eye position is recomputed from geometry, and the desired position is
/// decremented by the heading change to compensate for the self-turn.
pub fn step_engagement(state: &mut EngagementState, d: f64, kin: &Kinematics) -> Result<()> {
    if kin.dt <= 0.0 {
        return Err(Error::domain("dt must be positive"));
    }
    let max_turn = kin.max_turn_rate * kin.dt;
    let dh = d.clamp(-max_turn, max_turn);
    state.heading = wrap_angle(state.heading + dh);
    state.dragonfly_pos[0] += state.speed * state.heading.cos() * kin.dt;
    state.dragonfly_pos[1] += state.speed * state.heading.sin() * kin.dt;
    state.prey_pos[0] += state.prey_vel[0] * kin.dt;
    state.prey_pos[1] += state.prey_vel[1] * kin.dt;
    state.x_eye = wrap_angle(bearing(state.dragonfly_pos, state.prey_pos) - state.heading);
    state.y_desired -= dh;
    state.t += kin.dt;
    Ok(())
}

/// Which realization of the sensorimotor layer drives the engagement.
pub enum PipelineMode {
    /// Software multiply over the shared pixel front end.
    Abstract(FrontEnd),
    /// Crossbar-mapped with back-gate proprioceptive input.
    Crossbar(Box<SensorArray>),
}

impl PipelineMode {
    fn front(&self) -> &FrontEnd {
        match self {
            PipelineMode::Abstract(f) => f,
            PipelineMode::Crossbar(s) => &s.front,
        }
    }

    /// One sense -> basis -> motor -> decode pass.
    pub fn decide(
        &mut self,
        cfg: &TuningConfig,
        w: &Array3<f64>,
        x: f64,
        y: f64,
    ) -> Result<(f64, f64)> {
        let g = proprio_response(y, cfg);
        match self {
            PipelineMode::Abstract(front) => {
                let image = front.image(x);
                let f = front.visual_drive(&image);
                let s = sensorimotor(&f, &g);
                let r = motor_response(w, &s, cfg.beta)?;
                Ok((decode_turn(&r, &cfg.c)?, r.sum()))
            }
            PipelineMode::Crossbar(sensor) => {
                let image = sensor.front.image(x);
                let (s_raw, s_base) = sensor.sensorimotor_fefet(&image, &g)?;
                let r_raw = motor_response(w, &s_raw, cfg.beta)?;
                let r_base = motor_response(w, &s_base, cfg.beta)?;
                let d = decode_turn_offset_corrected(&r_raw, &r_base, &cfg.c)?;
                Ok((d, (&r_raw - &r_base).sum()))
            }
        }
    }
}

/// One logged step of an engagement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub dragonfly_x: f64,
    pub dragonfly_y: f64,
    pub heading: f64,
    pub prey_x: f64,
    pub prey_y: f64,
    pub x_eye: f64,
    pub y_desired: f64,
    pub d: f64,
    pub r_sum: f64,
}

#[derive(Debug, Clone, Default)]
pub struct EngagementResult {
    pub rows: Vec<TrajectoryRow>,
    pub intercepted: bool,
}

/// Run an engagement until capture or `max_steps`. Deterministic unless prey
/// maneuver noise is configured, in which case the seed drives it.
pub fn run_engagement(
    cfg: &TuningConfig,
    kin: &Kinematics,
    mode: &mut PipelineMode,
    mut state: EngagementState,
    max_steps: usize,
    seed: u64,
) -> Result<EngagementResult> {
    cfg.validate()?;
    debug_assert!(!mode.front().pixels.is_empty());
    let w = motor_weights(cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut result = EngagementResult::default();
    for _ in 0..max_steps {
        let (d, r_sum) = mode.decide(cfg, &w, state.x_eye, state.y_desired)?;
        if let Some(noise) = kin.prey_noise_std {
            let angle = rng.gen_range(-1.0..1.0) * noise;
            let (vx, vy) = (state.prey_vel[0], state.prey_vel[1]);
            state.prey_vel[0] = vx * angle.cos() - vy * angle.sin();
            state.prey_vel[1] = vx * angle.sin() + vy * angle.cos();
        }
        step_engagement(&mut state, d, kin)?;
        result.rows.push(TrajectoryRow {
            t: state.t,
            dragonfly_x: state.dragonfly_pos[0],
            dragonfly_y: state.dragonfly_pos[1],
            heading: state.heading,
            prey_x: state.prey_pos[0],
            prey_y: state.prey_pos[1],
            x_eye: state.x_eye,
            y_desired: state.y_desired,
            d,
            r_sum,
        });
        if state.distance() < kin.capture_radius {
            result.intercepted = true;
            break;
        }
    }
    Ok(result)
}
