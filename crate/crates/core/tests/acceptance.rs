//! One test per acceptance criterion. Each prints its measured values next
//! to the tolerances, whether it passes or not.
//!
//! The Fashion-MNIST criterion reads the gzipped IDX files from
//! `data/fashion-mnist` at the workspace root (override with
//! `HOLOEP_FASHION_DIR`) and reports SKIP when they are absent.

use std::io::Write;
use std::path::PathBuf;

use holoep::verify::{run, Status, TrainingProtocol};

fn protocol() -> TrainingProtocol {
    let data_dir = std::env::var_os("HOLOEP_FASHION_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/fashion-mnist"));
    TrainingProtocol {
        data_dir,
        ..TrainingProtocol::default()
    }
}

fn check(criterion: u8) {
    let c = run(criterion, &protocol());
    // Written straight to stderr so the line shows without --nocapture.
    let _ = writeln!(std::io::stderr(), "{}", c.line());
    assert_ne!(c.status, Status::Fail, "{}", c.line());
}

#[test]
fn criterion_01_symmetric_case_exactness() {
    check(1);
}

#[test]
fn criterion_02_asymmetry_transport_identity() {
    check(2);
}

#[test]
fn criterion_03_skew_expansion_second_order() {
    check(3);
}

#[test]
fn criterion_04_npoint_bias_order() {
    check(4);
}

#[test]
fn criterion_05_continuous_time_convergence() {
    check(5);
}

#[test]
fn criterion_06_hutchinson_correctness() {
    check(6);
}

#[test]
fn criterion_07_homeostatic_gradient_and_descent() {
    check(7);
}

#[test]
fn criterion_08_tied_weight_gradient_fusion() {
    check(8);
}

#[test]
fn criterion_09_desk_scale_training() {
    check(9);
}

#[test]
fn criterion_10_sweep_shapes_and_weight_angle_growth() {
    check(10);
}
