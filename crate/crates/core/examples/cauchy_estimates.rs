//! Error of the one-sided and N-point estimates of `∂βu*` as the teaching
//! amplitude grows: the N-point bias falls off like `|β|^N`.
//!
//! ```text
//! cargo run --release --example cauchy_estimates
//! ```

use std::f64::consts::FRAC_PI_4;

use holoep::estimators::{ground_truth_dudbeta, holo_ep_classic, holo_ep_npoint, LinearSolver};
use holoep::linalg::log_log_slope;
use holoep::models::one_hot;
use holoep::verify::{tight, toy_network};
use holoep::{Dims, ModelKind};

fn main() -> holoep::Result<()> {
    let net = toy_network(ModelKind::ReciprocalMLP, Dims::new(6, vec![8, 6], 4), 21, FRAC_PI_4, 0.5)?;
    let x = vec![0.1, 0.9, 0.4, 0.3, 0.7, 0.5];
    let y = one_hot(1, 4);
    let b = net.bind(&x, &y)?;
    let s = tight();
    let free = holo_ep_npoint(&b, 0.1, 2, false, &s)?.free.state.real_parts();
    let truth = ground_truth_dudbeta(&b, &free, LinearSolver::Dense)?;
    let amps = [0.05, 0.1, 0.2, 0.5];
    print!("{:>8} {:>12}", "|β|", "classic");
    for n in 2..=6 {
        print!(" {:>12}", format!("N={n}"));
    }
    println!();
    let mut curves = vec![Vec::new(); 5];
    for &a in &amps {
        let classic = holo_ep_classic(&b, a, &s)?.delta.relative_error(&truth);
        print!("{a:>8} {classic:>12.3e}");
        for (i, n) in (2..=6).enumerate() {
            let e = holo_ep_npoint(&b, a, n, false, &s)?.delta.relative_error(&truth);
            curves[i].push(e.max(1e-16));
            print!(" {e:>12.3e}");
        }
        println!();
    }
    for (i, c) in curves.iter().enumerate() {
        println!("N={}: log-log slope {:.2}", i + 2, log_log_slope(&amps, c));
    }
    Ok(())
}
