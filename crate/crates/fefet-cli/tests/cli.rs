//! CLI contract tests: exit codes, config handling, and artifact layout.
//! Heavier end-to-end behavior is covered by the acceptance suite.

use std::path::{Path, PathBuf};
use std::process::Command;

fn fefet() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fefet"))
}

fn mnist() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/mnist")
}

fn code(cmd: &mut Command) -> i32 {
    cmd.output().expect("spawn fefet").status.code().expect("exit code")
}

#[test]
fn device_sweep_succeeds_and_writes_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sweep");
    assert_eq!(code(fefet().args(["device-sweep", "--out"]).arg(&out)), 0);
    let manifest = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.starts_with("config_hash="));
    assert!(manifest.contains("sweep.csv"));
    assert!(out.join("sweep.csv").exists());
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("bad.toml");
    std::fs::write(&config, "[device]\nnot_a_field = 1\n").unwrap();
    let c = code(
        fefet()
            .args(["device-sweep", "--out"])
            .arg(tmp.path().join("out"))
            .arg("--config")
            .arg(&config),
    );
    assert_eq!(c, 2);
}

#[test]
fn bad_override_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let c = code(
        fefet()
            .args(["device-sweep", "--set", "lif.no_such_knob=1", "--out"])
            .arg(tmp.path().join("out")),
    );
    assert_eq!(c, 2);
}

#[test]
fn invalid_config_value_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    // Negative membrane time constant fails validation.
    let c = code(
        fefet()
            .args(["device-sweep", "--set", "lif.tau_mem=-5", "--out"])
            .arg(tmp.path().join("out")),
    );
    assert_eq!(c, 2);
}

#[test]
fn missing_idx_file_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let c = code(
        fefet()
            .args(["train", "--seed", "1", "--out"])
            .arg(tmp.path().join("out"))
            .args(["--train-images", "/nonexistent/images", "--train-labels", "/nonexistent/labels"]),
    );
    assert_eq!(c, 4);
}

#[test]
fn corrupt_checkpoint_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let ckpt = tmp.path().join("net.ckpt");
    std::fs::write(&ckpt, b"not a checkpoint").unwrap();
    let d = mnist();
    let c = code(
        fefet()
            .args(["eval", "--seed", "1", "--out"])
            .arg(tmp.path().join("out"))
            .arg("--checkpoint")
            .arg(&ckpt)
            .arg("--test-images")
            .arg(d.join("t10k-images-idx3-ubyte"))
            .arg("--test-labels")
            .arg(d.join("t10k-labels-idx1-ubyte")),
    );
    assert_eq!(c, 4);
}

#[test]
fn receding_prey_is_a_domain_outcome() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let c = code(
        fefet()
            .args(["dragonfly", "--scenario", "receding", "--seed", "1", "--out"])
            .arg(&out),
    );
    // The engagement runs to completion without capture: domain outcome, and
    // artifacts are still written.
    assert_eq!(c, 3);
    assert!(out.join("trajectory.csv").exists());
    assert!(out.join("summary.csv").exists());
}

#[test]
fn dragonfly_trajectory_has_expected_header() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    assert_eq!(
        code(
            fefet()
                .args(["dragonfly", "--scenario", "stationary", "--seed", "1", "--out"])
                .arg(&out),
        ),
        0
    );
    let text = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(
        header,
        "t,dragonfly_x,dragonfly_y,heading,prey_x,prey_y,x_eye,y_desired,d,r_sum"
    );
}

#[test]
fn train_eval_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let d = mnist();
    let train_out = tmp.path().join("train");
    let c = code(
        fefet()
            .args(["train", "--seed", "3", "--set", "training.n_train=300", "--out"])
            .arg(&train_out)
            .arg("--train-images")
            .arg(d.join("train-images-idx3-ubyte"))
            .arg("--train-labels")
            .arg(d.join("train-labels-idx1-ubyte")),
    );
    assert_eq!(c, 0);
    assert!(train_out.join("net.ckpt").exists());
    let eval_out = tmp.path().join("eval");
    let c = code(
        fefet()
            .args(["eval", "--seed", "3", "--set", "training.n_test=100", "--out"])
            .arg(&eval_out)
            .arg("--checkpoint")
            .arg(train_out.join("net.ckpt"))
            .arg("--test-images")
            .arg(d.join("t10k-images-idx3-ubyte"))
            .arg("--test-labels")
            .arg(d.join("t10k-labels-idx1-ubyte")),
    );
    assert_eq!(c, 0);
    let metrics = std::fs::read_to_string(eval_out.join("metrics.csv")).unwrap();
    assert!(metrics.lines().any(|l| l.starts_with("accuracy,")));
}
