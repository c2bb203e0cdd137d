//! Relaxes every model family to its free fixed point and reports the
//! residual, step count and Jacobian symmetry.
//!
//! ```text
//! cargo run --release --example relax_fixed_point
//! ```

use holoep::homeostasis::SymmetryReport;
use holoep::models::one_hot;
use holoep::{relax, residual, Dims, Dynamics, ModelKind, Network, NetworkState, SolverSettings, C64};

fn main() -> holoep::Result<()> {
    let x: Vec<f64> = (0..12).map(|i| (i as f64 * 0.37).sin().abs()).collect();
    let y = one_hot(2, 4);
    let zero = C64::new(0.0, 0.0);
    println!("{:<16} {:>6} {:>12} {:>10} {:>10}", "model", "steps", "residual", "‖u*‖", "symmetry");
    for kind in [
        ModelKind::ReciprocalMLP,
        ModelKind::HopfieldMLP,
        ModelKind::DirectFeedback,
        ModelKind::PCN,
    ] {
        let net = Network::init(kind, Dims::new(12, vec![16, 8], 4), 3, 0.4)?;
        let b = net.bind(&x, &y)?;
        let settings = SolverSettings::default()
            .with_tolerance(1e-12)
            .with_budgets(5000, 5000)
            .with_damping(0.5);
        let r = relax(&b, zero, &NetworkState::zeros(b.layer_dims()), &settings)?;
        let u = r.state.real_parts();
        let report = SymmetryReport::from_jacobian(&b.jacobian_dense(&u)?)?;
        println!(
            "{:<16} {:>6} {:>12.3e} {:>10.4} {:>10.4}",
            kind.name(),
            r.iterations,
            residual(&b, &r.state, zero)?,
            r.state.norm(),
            report.symmetry_measure
        );
    }
    Ok(())
}
