//! Command-line harness: each experiment is a subcommand wiring configs,
//! datasets, checkpoints, and CSV outputs together.
//!
//! Exit codes: 0 success, 2 configuration error, 3 domain outcome (e.g. no
//! interception), 4 I/O error. Every command is reproducible: (config, seed)
//! fully determines all outputs byte-for-byte.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ndarray::Array2;

use fefet_core::astro::{inject_faults, probe_post_fault_sums, retrain_with_repair, spike_entropy};
use fefet_core::device::FeFETCell;
use fefet_core::dragonfly::{
    run_engagement, EngagementState, FrontEnd, PipelineMode, SensorArray,
};
use fefet_core::error::{Error, Result};
use fefet_core::io::checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
use fefet_core::io::config::{config_hash, load_config, RunConfig};
use fefet_core::io::csv::{csv_string, CsvValue};
use fefet_core::io::idx::{load_idx, IdxDataset};
use fefet_core::snn::{
    assign_labels, evaluate, train, NetworkTopology, NeuronLabels, TrainMode, TrainReport,
};

#[derive(Parser)]
#[command(name = "fefet", about = "DG-FeFET neuromorphic hardware simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Run-configuration TOML file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. --set lif.dt=0.5 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory; created if missing.
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct TrainDataArgs {
    #[arg(long)]
    train_images: PathBuf,
    #[arg(long)]
    train_labels: PathBuf,
}

#[derive(clap::Args)]
struct TestDataArgs {
    #[arg(long)]
    test_images: PathBuf,
    #[arg(long)]
    test_labels: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RepairMode {
    Repair,
    NoRepair,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HomeostasisMode {
    /// Per-neuron adaptive firing thresholds (baseline).
    AdaptiveTheta,
    /// Back-gate homeostasis; thresholds frozen.
    Bg,
    /// No regulation at all.
    None,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scenario {
    /// Stationary prey dead ahead.
    Stationary,
    /// Prey crossing orthogonally at half the dragonfly speed.
    Crossing,
    /// Faster prey receding straight away (not interceptable).
    Receding,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep conductance vs programmed state per back-gate voltage and fit
    /// the linear transfer slopes.
    DeviceSweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of programmed states spread over w in [0, 1].
        #[arg(long, default_value_t = 5)]
        states: usize,
        /// Number of back-gate voltages spread over [0, vbg_sweep_max].
        #[arg(long, default_value_t = 5)]
        vbg_count: usize,
        #[arg(long, default_value_t = 2.0)]
        vbg_sweep_max: f64,
    },
    /// Train the unsupervised MNIST classifier and write a checkpoint.
    Train {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        data: TrainDataArgs,
        #[arg(long)]
        seed: u64,
    },
    /// Evaluate a checkpoint on a test set.
    Eval {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        data: TestDataArgs,
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        seed: u64,
    },
    /// Inject stuck-at-zero faults into a trained checkpoint and measure
    /// accuracy with or without astrocyte self-repair.
    InjectRepair {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        train_data: TrainDataArgs,
        #[command(flatten)]
        test_data: TestDataArgs,
        #[arg(long)]
        checkpoint: PathBuf,
        /// Fraction of cells to fault, in [0, 1].
        #[arg(long)]
        fraction: f64,
        #[arg(long, value_enum)]
        mode: RepairMode,
        #[arg(long)]
        seed: u64,
    },
    /// Train with a chosen homeostasis strategy and report activity spread.
    Homeostasis {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        train_data: TrainDataArgs,
        #[command(flatten)]
        test_data: TestDataArgs,
        #[arg(long, value_enum)]
        mode: HomeostasisMode,
        #[arg(long)]
        seed: u64,
    },
    /// Run a prey-interception engagement and log the trajectory.
    Dragonfly {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        scenario: Scenario,
        /// Use the crossbar-mapped sensorimotor pipeline.
        #[arg(long)]
        crossbar_mapped: bool,
        #[arg(long)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io(_) | Error::Parse { .. } | Error::Checksum | Error::Version { .. } => {
                    ExitCode::from(4)
                }
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::DeviceSweep { common, states, vbg_count, vbg_sweep_max } => {
            cmd_device_sweep(&common, states, vbg_count, vbg_sweep_max)
        }
        Command::Train { common, data, seed } => cmd_train(&common, &data, seed),
        Command::Eval { common, data, checkpoint, seed } => {
            cmd_eval(&common, &data, &checkpoint, seed)
        }
        Command::InjectRepair { common, train_data, test_data, checkpoint, fraction, mode, seed } => {
            cmd_inject_repair(&common, &train_data, &test_data, &checkpoint, fraction, mode, seed)
        }
        Command::Homeostasis { common, train_data, test_data, mode, seed } => {
            cmd_homeostasis(&common, &train_data, &test_data, mode, seed)
        }
        Command::Dragonfly { common, scenario, crossbar_mapped, seed } => {
            cmd_dragonfly(&common, scenario, crossbar_mapped, seed)
        }
    }
}

/// Write a file atomically (temp + rename).
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

struct RunContext {
    config: RunConfig,
    hash: String,
    out: PathBuf,
    artifacts: Vec<String>,
}

impl RunContext {
    fn new(common: &CommonArgs) -> Result<Self> {
        let config = load_config(common.config.as_deref(), &common.overrides)?;
        let hash = config_hash(&config);
        std::fs::create_dir_all(&common.out)?;
        Ok(Self { config, hash, out: common.out.clone(), artifacts: Vec::new() })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        write_atomic(&self.out.join(name), bytes)?;
        self.artifacts.push(name.to_string());
        Ok(())
    }

    fn write_csv(&mut self, name: &str, columns: &[&str], rows: &[Vec<CsvValue>]) -> Result<()> {
        let text = csv_string(columns, rows)?;
        self.write(name, text.as_bytes())
    }

    /// Write the manifest: config hash plus the sorted artifact list.
    fn finish(mut self) -> Result<()> {
        self.artifacts.sort();
        let mut text = format!("config_hash={}\n", self.hash);
        for a in &self.artifacts {
            text.push_str(a);
            text.push('\n');
        }
        write_atomic(&self.out.join("manifest.txt"), text.as_bytes())
    }
}

/// Ordinary least squares y = slope * x + intercept.
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|&v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(&a, &b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn cmd_device_sweep(
    common: &CommonArgs,
    states: usize,
    vbg_count: usize,
    vbg_sweep_max: f64,
) -> Result<u8> {
    let mut ctx = RunContext::new(common)?;
    if states < 2 || vbg_count < 2 {
        return Err(Error::config("need at least 2 states and 2 back-gate voltages"));
    }
    let device = ctx.config.device.to_model()?;
    let (g_min, g_max) = (ctx.config.device.g_min, ctx.config.device.g_max);
    let ws: Vec<f64> = (0..states).map(|i| i as f64 / (states - 1) as f64).collect();
    let vbgs: Vec<f64> =
        (0..vbg_count).map(|i| vbg_sweep_max * i as f64 / (vbg_count - 1) as f64).collect();
    device.mobility.check_vbg(vbg_sweep_max).map_err(|e| Error::config(e.to_string()))?;

    let cells: Vec<FeFETCell> =
        ws.iter().map(|&w| FeFETCell::new(w, g_min, g_max)).collect::<Result<_>>()?;
    let g0: Vec<f64> =
        cells.iter().map(|c| device.conductance(c, 0.0)).collect::<Result<_>>()?;

    let mut rows: Vec<Vec<CsvValue>> = Vec::new();
    for &v in &vbgs {
        for (i, cell) in cells.iter().enumerate() {
            let g = device.conductance(cell, v)?;
            rows.push(vec!["data".into(), v.into(), ws[i].into(), g.into()]);
        }
    }
    // Per-v_bg linear fit of G_DS(v_bg) against G_DS(0).
    for &v in &vbgs {
        let gv: Vec<f64> =
            cells.iter().map(|c| device.conductance(c, v)).collect::<Result<_>>()?;
        let (slope, intercept) = linear_fit(&g0, &gv);
        rows.push(vec!["slope".into(), v.into(), slope.into(), intercept.into()]);
    }
    ctx.write_csv("sweep.csv", &["kind", "v_bg", "a", "b"], &rows)?;
    ctx.finish()?;
    Ok(0)
}

fn dataset_images(ds: &IdxDataset, cap: Option<usize>) -> Result<(Vec<&[u8]>, Vec<u8>)> {
    let n = cap.map_or(ds.len(), |c| c.min(ds.len()));
    let images: Vec<&[u8]> = (0..n).map(|i| ds.images.image(i)).collect::<Result<_>>()?;
    Ok((images, ds.labels[..n].to_vec()))
}

fn fresh_topology(config: &RunConfig, n_in: usize, seed: u64) -> Result<NetworkTopology> {
    NetworkTopology::new(
        n_in,
        config.network.n_out,
        config.network.w_inhib,
        config.network.input_scale,
        config.network.norm_target,
        fefet_core::crossbar::GainMap::new(
            config.gain.lambda_k,
            config.gain.k_min,
            config.gain.k_max,
        )?,
        config.device.to_model()?,
        seed,
    )
}

fn restore_topology(config: &RunConfig, ckpt: &Checkpoint) -> Result<NetworkTopology> {
    let (n_in, _) = ckpt.weights.dim();
    let mut topology = fresh_topology(config, n_in, 0)?;
    if topology.n_out() != ckpt.weights.ncols() {
        return Err(Error::config(format!(
            "config network.n_out = {} but checkpoint has {} output neurons",
            topology.n_out(),
            ckpt.weights.ncols()
        )));
    }
    topology.array.set_weights(&ckpt.weights)?;
    topology.array.apply_fault_mask(&ckpt.faults)?;
    topology.array.set_all_vbg(&ckpt.col_vbg)?;
    topology.theta = ckpt.theta.clone();
    Ok(topology)
}

fn epoch_seed(seed: u64, epoch: usize) -> u64 {
    seed.wrapping_add(epoch as u64 * 0x9E37_79B9_7F4A_7C15)
}

fn train_epochs(
    topology: &mut NetworkTopology,
    config: &RunConfig,
    images: &[&[u8]],
    mode: &TrainMode,
    seed: u64,
) -> Result<TrainReport> {
    let mut total = TrainReport::default();
    for epoch in 0..config.training.epochs {
        let report = train(
            topology,
            images,
            &config.stdp,
            &config.lif,
            mode,
            config.network.batch_size,
            epoch_seed(seed, epoch),
        )?;
        if total.spike_counts.is_empty() {
            total.spike_counts = vec![0; report.spike_counts.len()];
        }
        for (t, &c) in total.spike_counts.iter_mut().zip(&report.spike_counts) {
            *t += c;
        }
        total.images_seen += report.images_seen;
    }
    Ok(total)
}

fn checkpoint_from(topology: &NetworkTopology, labels: &NeuronLabels, seed: u64, hash: &str) -> Checkpoint {
    Checkpoint {
        weights: topology.array.weights(),
        faults: topology.array.faults().clone(),
        col_vbg: topology.array.col_vbg().clone(),
        theta: topology.theta.clone(),
        labels: labels.labels.clone(),
        seed,
        config_hash: hash.to_string(),
    }
}

fn per_neuron_rows(report: &TrainReport, labels: &NeuronLabels) -> Vec<Vec<CsvValue>> {
    report
        .spike_counts
        .iter()
        .enumerate()
        .map(|(j, &spikes)| {
            vec![
                j.into(),
                (labels.labels[j] as i64).into(),
                (labels.dead[j] as i64).into(),
                (spikes as i64).into(),
            ]
        })
        .collect()
}

fn cmd_train(common: &CommonArgs, data: &TrainDataArgs, seed: u64) -> Result<u8> {
    let mut ctx = RunContext::new(common)?;
    let ds = load_idx(&data.train_images, &data.train_labels)?;
    let (images, labels) = dataset_images(&ds, ctx.config.training.n_train)?;
    let n_in = ds.images.rows * ds.images.cols;
    let mut topology = fresh_topology(&ctx.config, n_in, seed)?;
    let report =
        train_epochs(&mut topology, &ctx.config, &images, &TrainMode::AdaptiveTheta, seed)?;
    let neuron_labels = assign_labels(&topology, &images, &labels, &ctx.config.lif, seed)?;
    let ckpt = checkpoint_from(&topology, &neuron_labels, seed, &ctx.hash);
    save_checkpoint(&ctx.out.join("net.ckpt"), &ckpt)?;
    ctx.artifacts.push("net.ckpt".to_string());
    let rows = per_neuron_rows(&report, &neuron_labels);
    ctx.write_csv("metrics.csv", &["neuron", "label", "dead", "spikes"], &rows)?;
    ctx.finish()?;
    Ok(0)
}

fn cmd_eval(common: &CommonArgs, data: &TestDataArgs, checkpoint: &Path, seed: u64) -> Result<u8> {
    let mut ctx = RunContext::new(common)?;
    let ckpt = load_checkpoint(checkpoint)?;
    let topology = restore_topology(&ctx.config, &ckpt)?;
    let neuron_labels = NeuronLabels {
        labels: ckpt.labels.clone(),
        dead: ckpt.labels.iter().map(|&l| l == u8::MAX).collect(),
    };
    let ds = load_idx(&data.test_images, &data.test_labels)?;
    let (images, labels) = dataset_images(&ds, ctx.config.training.n_test)?;
    let accuracy = evaluate(&topology, &neuron_labels, &images, &labels, &ctx.config.lif, seed)?;
    let rows = vec![
        vec!["accuracy".into(), accuracy.into()],
        vec!["n_test".into(), images.len().into()],
    ];
    ctx.write_csv("metrics.csv", &["metric", "value"], &rows)?;
    ctx.finish()?;
    Ok(0)
}

fn cmd_inject_repair(
    common: &CommonArgs,
    train_data: &TrainDataArgs,
    test_data: &TestDataArgs,
    checkpoint: &Path,
    fraction: f64,
    mode: RepairMode,
    seed: u64,
) -> Result<u8> {
    let mut ctx = RunContext::new(common)?;
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::config(format!("fraction {fraction} outside [0, 1]")));
    }
    let ckpt = load_checkpoint(checkpoint)?;
    let lif = ctx.config.lif;
    let train_ds = load_idx(&train_data.train_images, &train_data.train_labels)?;
    let (train_images, train_labels) = dataset_images(&train_ds, ctx.config.training.n_train)?;
    let test_ds = load_idx(&test_data.test_images, &test_data.test_labels)?;
    let (test_images, test_labels) = dataset_images(&test_ds, ctx.config.training.n_test)?;

    let mut topology = restore_topology(&ctx.config, &ckpt)?;
    let mut neuron_labels = NeuronLabels {
        labels: ckpt.labels.clone(),
        dead: ckpt.labels.iter().map(|&l| l == u8::MAX).collect(),
    };
    let accuracy_baseline =
        evaluate(&topology, &neuron_labels, &test_images, &test_labels, &lif, seed)?;

    // Pre-fault column weight sums, then fault injection.
    let prior_sums = probe_post_fault_sums(&topology.array)?;
    let mask = inject_faults(topology.n_in(), topology.n_out(), fraction, seed)?;
    topology.array.apply_fault_mask(&mask)?;
    let accuracy_post_fault =
        evaluate(&topology, &neuron_labels, &test_images, &test_labels, &lif, seed)?;

    let (accuracy_final, mean_k) = match mode {
        RepairMode::NoRepair => (accuracy_post_fault, 1.0),
        RepairMode::Repair => {
            let (_, history) = retrain_with_repair(
                &mut topology,
                &prior_sums,
                &train_images,
                &ctx.config.stdp,
                &lif,
                ctx.config.network.batch_size,
                seed,
            )?;
            // Labels can shift during retraining; re-assign them.
            neuron_labels =
                assign_labels(&topology, &train_images, &train_labels, &lif, seed)?;
            let acc =
                evaluate(&topology, &neuron_labels, &test_images, &test_labels, &lif, seed)?;
            let k = history.k_snapshots.last().expect("at least the initial snapshot");
            (acc, k.iter().sum::<f64>() / k.len() as f64)
        }
    };

    let mode_name = match mode {
        RepairMode::Repair => "repair",
        RepairMode::NoRepair => "no_repair",
    };
    let rows = vec![vec![
        CsvValue::from(topology.n_out()),
        fraction.into(),
        mode_name.into(),
        accuracy_baseline.into(),
        accuracy_post_fault.into(),
        accuracy_final.into(),
        mean_k.into(),
        ctx.config.gain.lambda_k.into(),
    ]];
    ctx.write_csv(
        "repair.csv",
        &[
            "n_out",
            "fraction",
            "mode",
            "accuracy_baseline",
            "accuracy_post_fault",
            "accuracy_final",
            "mean_k",
            "lambda_k",
        ],
        &rows,
    )?;
    ctx.finish()?;
    Ok(0)
}

fn weight_grid_rows(weights: &Array2<f64>) -> (Vec<String>, Vec<Vec<CsvValue>>) {
    let columns: Vec<String> = (0..weights.ncols()).map(|j| format!("n{j}")).collect();
    let rows = weights
        .rows()
        .into_iter()
        .map(|row| row.iter().map(|&w| CsvValue::from(w)).collect())
        .collect();
    (columns, rows)
}

fn cmd_homeostasis(
    common: &CommonArgs,
    train_data: &TrainDataArgs,
    test_data: &TestDataArgs,
    mode: HomeostasisMode,
    seed: u64,
) -> Result<u8> {
    let mut ctx = RunContext::new(common)?;
    let mut config = ctx.config.clone();
    let train_mode = match mode {
        HomeostasisMode::AdaptiveTheta => TrainMode::AdaptiveTheta,
        HomeostasisMode::Bg => TrainMode::BgHomeostasis(config.homeostasis.clone()),
        HomeostasisMode::None => {
            // No regulation: adaptive thresholds disabled entirely.
            config.lif.theta_inc = 0.0;
            TrainMode::AdaptiveTheta
        }
    };
    let train_ds = load_idx(&train_data.train_images, &train_data.train_labels)?;
    let (train_images, train_labels) = dataset_images(&train_ds, config.training.n_train)?;
    let test_ds = load_idx(&test_data.test_images, &test_data.test_labels)?;
    let (test_images, test_labels) = dataset_images(&test_ds, config.training.n_test)?;

    let n_in = train_ds.images.rows * train_ds.images.cols;
    let mut topology = fresh_topology(&config, n_in, seed)?;
    let report = train_epochs(&mut topology, &config, &train_images, &train_mode, seed)?;
    let neuron_labels = assign_labels(&topology, &train_images, &train_labels, &config.lif, seed)?;
    let accuracy =
        evaluate(&topology, &neuron_labels, &test_images, &test_labels, &config.lif, seed)?;

    let total_spikes: u64 = report.spike_counts.iter().sum();
    let max_share = if total_spikes == 0 {
        0.0
    } else {
        *report.spike_counts.iter().max().unwrap() as f64 / total_spikes as f64
    };
    let entropy = spike_entropy(&report.spike_counts);
    let mode_name = match mode {
        HomeostasisMode::AdaptiveTheta => "adaptive_theta",
        HomeostasisMode::Bg => "bg",
        HomeostasisMode::None => "none",
    };
    let rows = vec![
        vec!["mode".into(), mode_name.into()],
        vec!["accuracy".into(), accuracy.into()],
        vec!["spike_entropy".into(), entropy.into()],
        vec!["max_share".into(), max_share.into()],
        vec!["images_seen".into(), report.images_seen.into()],
    ];
    ctx.write_csv("metrics.csv", &["metric", "value"], &rows)?;
    let spike_rows = per_neuron_rows(&report, &neuron_labels);
    ctx.write_csv("spikes.csv", &["neuron", "label", "dead", "spikes"], &spike_rows)?;
    let (grid_columns, grid_rows) = weight_grid_rows(&topology.array.weights());
    let column_refs: Vec<&str> = grid_columns.iter().map(String::as_str).collect();
    ctx.write_csv("weights.csv", &column_refs, &grid_rows)?;
    ctx.finish()?;
    Ok(0)
}

fn cmd_dragonfly(
    common: &CommonArgs,
    scenario: Scenario,
    crossbar_mapped: bool,
    seed: u64,
) -> Result<u8> {
    let mut ctx = RunContext::new(common)?;
    let dcfg = ctx.config.dragonfly.clone();
    let tuning = dcfg.tuning.clone();
    let speed = dcfg.speed;
    let state = match scenario {
        Scenario::Stationary => {
            EngagementState::new([0.0, 0.0], 0.0, speed, [3.0, 0.0], [0.0, 0.0])?
        }
        Scenario::Crossing => {
            EngagementState::new([0.0, 0.0], 0.0, speed, [4.0, 0.5], [0.0, speed / 2.0])?
        }
        Scenario::Receding => {
            EngagementState::new([0.0, 0.0], 0.0, speed, [3.0, 0.0], [speed * 1.5, 0.0])?
        }
    };
    let front = FrontEnd::build(&tuning, dcfg.n_pixels, dcfg.pixel_half_span)?;
    let mut mode = if crossbar_mapped {
        let sensor = SensorArray::build(
            &tuning,
            front,
            ctx.config.device.to_model()?,
            fefet_core::crossbar::GainMap::new(
                ctx.config.gain.lambda_k,
                ctx.config.gain.k_min,
                ctx.config.gain.k_max,
            )?,
            dcfg.v_unit,
        )?;
        PipelineMode::Crossbar(Box::new(sensor))
    } else {
        PipelineMode::Abstract(front)
    };
    let result =
        run_engagement(&tuning, &dcfg.kinematics, &mut mode, state, dcfg.max_steps, seed)?;

    let rows: Vec<Vec<CsvValue>> = result
        .rows
        .iter()
        .map(|r| {
            vec![
                r.t.into(),
                r.dragonfly_x.into(),
                r.dragonfly_y.into(),
                r.heading.into(),
                r.prey_x.into(),
                r.prey_y.into(),
                r.x_eye.into(),
                r.y_desired.into(),
                r.d.into(),
                r.r_sum.into(),
            ]
        })
        .collect();
    ctx.write_csv(
        "trajectory.csv",
        &[
            "t",
            "dragonfly_x",
            "dragonfly_y",
            "heading",
            "prey_x",
            "prey_y",
            "x_eye",
            "y_desired",
            "d",
            "r_sum",
        ],
        &rows,
    )?;
    let summary = vec![
        vec!["intercepted".into(), (result.intercepted as i64).into()],
        vec!["steps".into(), result.rows.len().into()],
    ];
    ctx.write_csv("summary.csv", &["metric", "value"], &summary)?;
    ctx.finish()?;
    Ok(if result.intercepted { 0 } else { 3 })
}
