//! Gradient descent on the Hutchinson-estimated homeostatic loss alone,
//! re-solving the fixed point before every step; the Jacobian becomes
//! more symmetric for every model family.
//!
//! ```text
//! cargo run --release --example homeostasis_descent -- [steps] [lr]
//! ```

use holoep::homeostasis::{homeo_grad, homeo_loss_exact, symmetry_measure, HutchinsonConfig};
use holoep::models::one_hot;
use holoep::{relax, Dims, Dynamics, ModelKind, Network, NetworkState, SolverSettings, C64};

fn main() -> holoep::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let steps: usize = args.get(1).map_or(200, |s| s.parse().expect("step count"));
    let lr: f64 = args.get(2).map_or(0.05, |s| s.parse().expect("learning rate"));
    let x = vec![0.3, 0.8, 0.5, 0.1];
    let y = one_hot(1, 3);
    let settings = SolverSettings::default().with_budgets(2000, 2000).with_damping(0.5);
    for kind in [ModelKind::ReciprocalMLP, ModelKind::DirectFeedback, ModelKind::PCN] {
        let mut net = Network::init(kind, Dims::new(4, vec![6, 5, 4], 3), 70, std::f64::consts::FRAC_PI_2)?;
        println!("{kind}");
        for step in 0..=steps {
            let b = net.bind(&x, &y)?;
            let u = relax(&b, C64::new(0.0, 0.0), &NetworkState::zeros(b.layer_dims()), &settings)?
                .state
                .real_parts();
            if step % (steps / 5).max(1) == 0 {
                let j = b.jacobian_dense(&u)?;
                println!(
                    "  step {step:>4}  symmetry {:.4}  L_homeo {:.4e}",
                    symmetry_measure(&j)?,
                    homeo_loss_exact(&j)?
                );
            }
            let g = homeo_grad(&b, &u, &HutchinsonConfig::new(5, step as u64), 1.0)?;
            let mut p = net.params.clone();
            p.axpy(-lr, &g.grads);
            net = net.with_params(p);
        }
    }
    Ok(())
}
