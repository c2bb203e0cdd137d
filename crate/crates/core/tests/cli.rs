//! Exit codes and artifacts of the `holoep` binary.

use std::fs;
use std::process::Command;

fn holoep() -> Command {
    Command::new(env!("CARGO_BIN_EXE_holoep"))
}

#[test]
fn train_with_missing_dataset_exits_2_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = holoep()
        .args(["train", "--set", "data.train_images=/missing/train-images.gz", "--output"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("/missing/train-images.gz"), "{stderr}");
}

#[test]
fn invalid_config_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "train.learning_rate = 0.1\n").unwrap();
    let out = holoep().args(["train", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("train.learning_rate"));
}

#[test]
fn missing_config_file_exits_2() {
    let out = holoep().args(["train", "--config", "/missing/run.cfg"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_subcommand_exits_1() {
    assert_eq!(holoep().arg("frobnicate").output().unwrap().status.code(), Some(1));
}

#[test]
fn synthetic_training_writes_metrics_and_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let out = holoep()
        .args([
            "train",
            "--set", "data.source=synthetic",
            "--set", "model.input=8",
            "--set", "model.layers=12,8",
            "--set", "model.classes=2",
            "--set", "data.synthetic_classes=2",
            "--set", "data.synthetic_train=100",
            "--set", "data.synthetic_val=50",
            "--set", "train.epochs=2",
            "--set", "train.batch_size=10",
            "--output",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["metrics.csv", "metrics.jsonl", "run_meta.json", "config.txt", "final.json"] {
        assert!(dir.path().join(f).exists(), "missing {f}");
    }
    let csv = fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4, "{csv}");
}

#[test]
fn sweep_on_a_checkpoint_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let train = holoep()
        .args([
            "train",
            "--set", "data.source=synthetic",
            "--set", "model.input=6",
            "--set", "model.layers=8,6",
            "--set", "model.classes=3",
            "--set", "data.synthetic_classes=3",
            "--set", "data.synthetic_train=30",
            "--set", "data.synthetic_val=10",
            "--set", "train.epochs=1",
            "--set", "train.batch_size=10",
            "--set", "model.seed=4",
            "--output",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(train.status.code(), Some(0));
    let ckpt = dir.path().join("final.json");
    let sweep = |sub: &str| {
        let o = dir.path().join(sub);
        let out = holoep()
            .args(["sweep-beta", "--checkpoint"])
            .arg(&ckpt)
            .args(["--samples", "4", "--amplitudes", "0.05,0.5", "--n-points", "1,4", "--output"])
            .arg(&o)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        fs::read_to_string(o.join("sweep.csv")).unwrap()
    };
    let (a, b) = (sweep("a"), sweep("b"));
    assert_eq!(a, b);
    assert!(a.starts_with("amplitude,n_points"));
}

#[test]
fn inspect_and_bench_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = holoep()
        .args(["inspect-jacobian", "--samples", "2", "--alpha", "0.7", "--output"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = fs::read_to_string(dir.path().join("jacobian.json")).unwrap();
    assert!(report.contains("symmetry_measure"));
    let out = holoep()
        .args(["bench", "--samples", "2", "--repeats", "1", "--output"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("bench.json").exists());
}

#[test]
fn verify_subset_exits_0_and_prints_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = holoep()
        .args(["verify", "--only", "2,3,6", "--output"])
        .arg(dir.path())
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert_eq!(stdout.matches("[PASS]").count(), 3, "{stdout}");
    assert!(dir.path().join("verify.txt").exists());
}
