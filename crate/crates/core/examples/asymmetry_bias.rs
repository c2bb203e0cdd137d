//! Alignment of `∂βu*` with the RBP error as the initial weight angle α
//! grows, and the transport identity `∂βu* = J⁻¹Jᵀδ` that links them.
//!
//! ```text
//! cargo run --release --example asymmetry_bias
//! ```

use holoep::estimators::{asymmetry_transport, ground_truth_dudbeta, rbp_delta, LinearSolver};
use holoep::homeostasis::symmetry_measure;
use holoep::linalg::cosine;
use holoep::models::one_hot;
use holoep::training::weight_angle;
use holoep::verify::tight;
use holoep::{relax, Dims, Dynamics, ModelKind, Network, NetworkState, C64};

fn main() -> holoep::Result<()> {
    let x: Vec<f64> = (0..10).map(|i| ((i * 7) % 10) as f64 / 10.0).collect();
    let y = one_hot(3, 5);
    println!(
        "{:>6} {:>10} {:>10} {:>14} {:>14}",
        "α(deg)", "angle", "symmetry", "cos(∂βu*, δ)", "transport err"
    );
    for step in 0..=6 {
        let alpha = std::f64::consts::FRAC_PI_2 * step as f64 / 6.0;
        let net = Network::init(ModelKind::ReciprocalMLP, Dims::new(10, vec![40, 30], 5), 2, alpha)?;
        let b = net.bind(&x, &y)?;
        let u = relax(&b, C64::new(0.0, 0.0), &NetworkState::zeros(b.layer_dims()), &tight())?
            .state
            .real_parts();
        let truth = ground_truth_dudbeta(&b, &u, LinearSolver::Dense)?.real_parts();
        let rbp = rbp_delta(&b, &u, LinearSolver::Dense)?.real_parts();
        let j = b.jacobian_dense(&u)?;
        let moved = asymmetry_transport(&j, &rbp)?;
        let err: f64 = moved.iter().zip(&truth).map(|(a, t)| (a - t).powi(2)).sum::<f64>().sqrt()
            / truth.iter().map(|t| t * t).sum::<f64>().sqrt();
        println!(
            "{:>6.1} {:>10.2} {:>10.4} {:>14.6} {:>14.2e}",
            alpha.to_degrees(),
            weight_angle(&net)[0],
            symmetry_measure(&j)?,
            cosine(&truth, &rbp),
            err
        );
    }
    Ok(())
}
