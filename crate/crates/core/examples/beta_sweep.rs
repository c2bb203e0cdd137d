//! Amplitude sweep on a symmetric and an asymmetric network: the one-sided
//! estimate degrades with |β| while the 6-point estimate does not.
//!
//! ```text
//! cargo run --release --example beta_sweep
//! ```

use std::f64::consts::FRAC_PI_4;

use holoep::estimators::{beta_sweep, sweep_csv};
use holoep::verify::{tight, toy_network, HOPFIELD_DAMPING};
use holoep::{Dims, ModelKind};

fn main() -> holoep::Result<()> {
    for (kind, alpha) in [(ModelKind::HopfieldMLP, 0.0), (ModelKind::ReciprocalMLP, FRAC_PI_4)] {
        let net = toy_network(kind, Dims::new(20, vec![32, 16], 5), 10, alpha, 0.5)?;
        let batch: Vec<(Vec<f64>, usize)> = (0..8)
            .map(|i| ((0..20).map(|k| ((i * 13 + k * 7) % 17) as f64 / 17.0).collect(), i % 5))
            .collect();
        let damping = if kind == ModelKind::HopfieldMLP { HOPFIELD_DAMPING } else { 1.0 };
        let rows = beta_sweep(
            &net,
            &batch,
            &[0.01, 0.05, 0.1, 0.2, 0.5, 1.0],
            &[1, 2, 4, 6],
            &tight().with_damping(damping),
        )?;
        println!("# {kind}, α = {alpha:.3}");
        let whole: Vec<_> = rows.into_iter().filter(|r| r.layer.is_none()).collect();
        print!("{}", sweep_csv(&whole));
    }
    Ok(())
}
