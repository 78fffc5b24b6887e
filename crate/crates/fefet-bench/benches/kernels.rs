//! Criterion benchmarks for the hot simulation kernels.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fefet_core::crossbar::{CrossbarArray, GainMap};
use fefet_core::device::DeviceModel;
use fefet_core::dragonfly::{motor_weights, TuningConfig};
use fefet_core::io::checkpoint::{decode_checkpoint, encode_checkpoint, Checkpoint};
use fefet_core::plasticity::{on_post_spike, StdpParams};
use fefet_core::snn::{poisson_encode, run_inference, LifParams, NetworkTopology};

fn mnist_scale_array() -> CrossbarArray {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let w = Array2::from_shape_fn((784, 100), |_| rng.gen::<f64>());
    CrossbarArray::from_weights(&w, 1e-6, 1e-5, DeviceModel::default()).unwrap()
}

fn bench_matvec(c: &mut Criterion) {
    let array = mnist_scale_array();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let inputs = Array1::from_shape_fn(784, |_| rng.gen::<f64>());
    c.bench_function("crossbar matvec 784x100", |b| {
        b.iter(|| array.matvec(black_box(&inputs)).unwrap())
    });
}

fn bench_effective_weights(c: &mut Criterion) {
    let array = mnist_scale_array();
    let gain = GainMap::default();
    c.bench_function("effective weight matrix 784x100", |b| {
        b.iter(|| array.effective_weight_matrix(black_box(&gain)).unwrap())
    });
}

fn bench_poisson_encode(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let image: Vec<u8> = (0..784).map(|_| rng.gen()).collect();
    let lif = LifParams::default();
    c.bench_function("poisson encode 784px / 100ms", |b| {
        b.iter(|| poisson_encode(black_box(&image), &lif, 9))
    });
}

fn bench_inference(c: &mut Criterion) {
    let topology = NetworkTopology::new(
        784,
        100,
        -120.0,
        0.5,
        Some(78.4),
        GainMap::default(),
        DeviceModel::default(),
        4,
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let image: Vec<u8> = (0..784).map(|_| rng.gen()).collect();
    let lif = LifParams::default();
    c.bench_function("inference one image 784x100", |b| {
        b.iter(|| run_inference(black_box(&topology), &image, &lif, 9).unwrap())
    });
}

fn bench_stdp_updates(c: &mut Criterion) {
    let p = StdpParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let ws: Vec<f64> = (0..78_400).map(|_| rng.gen()).collect();
    c.bench_function("stdp potentiation 78400 synapses", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for &w in &ws {
                acc += on_post_spike(black_box(w), 0.5, &p);
            }
            acc
        })
    });
}

fn bench_motor_weights(c: &mut Criterion) {
    let cfg = TuningConfig::default();
    c.bench_function("motor weights 15x9x15", |b| {
        b.iter(|| motor_weights(black_box(&cfg)))
    });
}

fn bench_checkpoint_roundtrip(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let ckpt = Checkpoint {
        weights: Array2::from_shape_fn((784, 100), |_| rng.gen::<f64>()),
        faults: Array2::from_elem((784, 100), false),
        col_vbg: Array1::zeros(100),
        theta: vec![0.0; 100],
        labels: vec![0; 100],
        seed: 7,
        config_hash: "bench".into(),
    };
    let bytes = encode_checkpoint(&ckpt).unwrap();
    c.bench_function("checkpoint encode 784x100", |b| {
        b.iter(|| encode_checkpoint(black_box(&ckpt)).unwrap())
    });
    c.bench_function("checkpoint decode 784x100", |b| {
        b.iter(|| decode_checkpoint(black_box(&bytes)).unwrap())
    });
}

criterion_group!(
    kernels,
    bench_matvec,
    bench_effective_weights,
    bench_poisson_encode,
    bench_inference,
    bench_stdp_updates,
    bench_motor_weights,
    bench_checkpoint_roundtrip,
);
criterion_main!(kernels);
