//! Trains a small reciprocal network on the synthetic teacher task with
//! several estimators and prints the validation curves side by side.
//!
//! ```text
//! cargo run --release --example synthetic_training -- [epochs]
//! ```

use holoep::data::{synth_teacher, Split};
use holoep::estimators::{Estimator, NudgeProtocol};
use holoep::training::{TrainConfig, Trainer};
use holoep::{Dims, ModelKind, Network};

fn main() -> holoep::Result<()> {
    let epochs: usize = std::env::args().nth(1).map_or(10, |s| s.parse().expect("epoch count"));
    let all = synth_teacher(1500, 20, 3, 7)?;
    let train = all.slice(0, 1200, Split::Train)?;
    let val = all.slice(1200, 1500, Split::Validation)?;
    let runs = [
        ("truth", Estimator::GroundTruth),
        ("rbp", Estimator::Rbp),
        ("classic 0.5", Estimator::Ep(NudgeProtocol::classic(0.5))),
        ("N=4 0.5", Estimator::Ep(NudgeProtocol::npoint(0.5, 4))),
        ("continuous", Estimator::Ep(NudgeProtocol::continuous(0.05, 4, 5))),
    ];
    for (name, estimator) in runs {
        let net = Network::init(ModelKind::ReciprocalMLP, Dims::new(20, vec![32, 16], 3), 1, 0.0)?;
        let config = TrainConfig {
            epochs,
            estimator,
            batch_size: 50,
            lr: 0.02,
            diag_samples: 10,
            ..TrainConfig::default()
        };
        let rows = Trainer::new(net, config)?.run(&train, &val, |_, _| Ok(()))?;
        let curve: Vec<String> = rows.iter().map(|r| format!("{:.1}", r.val_error_pct)).collect();
        let last = rows.last().expect("epoch rows");
        println!(
            "{name:<12} val error % [{}]  angle {:.1}°  cos vs RBP {:?}",
            curve.join(" "),
            last.weight_angle_deg[0],
            last.cosine_vs_rbp.iter().map(|c| format!("{c:.3}")).collect::<Vec<_>>()
        );
    }
    Ok(())
}
