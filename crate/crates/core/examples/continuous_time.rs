//! Continuous-time estimate with β rotating on the circle and no free
//! phase: the running average approaches `∂βu*` as periods accumulate.
//!
//! ```text
//! cargo run --release --example continuous_time -- [|β|] [N] [periods] [steps_per_point]
//! ```

use std::f64::consts::FRAC_PI_4;

use holoep::estimators::{ground_truth_dudbeta, holo_ep_continuous, LinearSolver, NudgeProtocol};
use holoep::models::one_hot;
use holoep::verify::{tight, toy_network};
use holoep::{relax, Dims, Dynamics, ModelKind, NetworkState, C64};

fn main() -> holoep::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let arg = |i: usize, d: f64| args.get(i).map_or(d, |s| s.parse().expect("number"));
    let mut protocol = NudgeProtocol::continuous(arg(1, 0.05), arg(2, 4.0) as usize, arg(3, 16.0) as usize);
    protocol.steps_per_point = arg(4, 60.0) as usize;

    let net = toy_network(ModelKind::ReciprocalMLP, Dims::new(6, vec![8, 6], 4), 5, FRAC_PI_4, 0.5)?;
    let x = vec![0.2, 0.4, 0.6, 0.8, 0.1, 0.3];
    let y = one_hot(0, 4);
    let b = net.bind(&x, &y)?;
    let free = relax(&b, C64::new(0.0, 0.0), &NetworkState::zeros(b.layer_dims()), &tight())?;
    let truth = ground_truth_dudbeta(&b, &free.state.real_parts(), LinearSolver::Dense)?;
    let est = holo_ep_continuous(&b, &protocol, &tight())?;
    println!("{:>7} {:>14} {:>12}", "period", "rel. error", "max |Im|");
    for (k, snap) in est.snapshots.iter().enumerate() {
        println!("{:>7} {:>14.4e} {:>12.3e}", k + 1, snap.relative_error(&truth), snap.max_imag());
    }
    println!("final cosine to ∂βu*: {:.6}", est.delta.cosine(&truth));
    Ok(())
}
