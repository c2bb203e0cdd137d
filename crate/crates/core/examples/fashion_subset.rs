//! Trains a 784-256-256-10 reciprocal network on a Fashion-MNIST subset.
//!
//! ```text
//! cargo run --release --example fashion_subset -- [data_dir] [train_samples] [epochs] [estimator] [batch] [lr] [lambda_homeo]
//! ```
//!
//! `estimator` is `truth`, `rbp`, `classic:<|β|>`, `npoint:<|β|>:<N>` or
//! `continuous:<|β|>:<N>:<periods>`; the default is `truth`.

use std::path::PathBuf;
use std::time::Instant;

use holoep::data::{Dataset, Split};
use holoep::estimators::{Estimator, NudgeProtocol};
use holoep::training::{TrainConfig, Trainer};
use holoep::{Dims, ModelKind, Network};

fn parse_estimator(s: &str) -> Estimator {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |i: usize| parts[i].parse::<f64>().expect("number");
    match parts[0] {
        "truth" => Estimator::GroundTruth,
        "rbp" => Estimator::Rbp,
        "classic" => Estimator::Ep(NudgeProtocol::classic(num(1))),
        "npoint" => Estimator::Ep(NudgeProtocol::npoint(num(1), num(2) as usize)),
        "continuous" => {
            Estimator::Ep(NudgeProtocol::continuous(num(1), num(2) as usize, num(3) as usize))
        }
        other => panic!("unknown estimator {other}"),
    }
}

fn main() -> holoep::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let dir = PathBuf::from(args.get(1).map_or("data/fashion-mnist", String::as_str));
    let n: usize = args.get(2).map_or(4000, |s| s.parse().expect("sample count"));
    let epochs: usize = args.get(3).map_or(10, |s| s.parse().expect("epoch count"));
    let estimator = parse_estimator(args.get(4).map_or("truth", String::as_str));
    let batch_size: usize = args.get(5).map_or(50, |s| s.parse().expect("batch size"));
    let lr: f64 = args.get(6).map_or(1e-2, |s| s.parse().expect("learning rate"));
    let lambda_homeo: f64 = args.get(7).map_or(0.0, |s| s.parse().expect("homeostasis weight"));

    let train = Dataset::from_idx(
        &dir.join("train-images-idx3-ubyte.gz"),
        &dir.join("train-labels-idx1-ubyte.gz"),
        10,
        Some(n),
        Split::Train,
    )?;
    let val = Dataset::from_idx(
        &dir.join("t10k-images-idx3-ubyte.gz"),
        &dir.join("t10k-labels-idx1-ubyte.gz"),
        10,
        Some(1000),
        Split::Validation,
    )?;
    let net = Network::init(ModelKind::ReciprocalMLP, Dims::new(784, vec![256, 256], 10), 1, 0.0)?;
    let config = TrainConfig {
        epochs,
        estimator,
        batch_size,
        lr,
        homeostasis: lambda_homeo > 0.0,
        lambda_homeo,
        diag_samples: 5,
        ..TrainConfig::default()
    };
    let mut trainer = Trainer::new(net, config)?;
    let start = Instant::now();
    trainer.run(&train, &val, |_, row| {
        println!(
            "epoch {:>2}  val error {:6.2}%  train loss {}  angle {:?}  [{:.1}s]",
            row.epoch,
            row.val_error_pct,
            row.train_loss.map_or("-".into(), |l| format!("{l:.4}")),
            row.weight_angle_deg.iter().map(|a| format!("{a:.2}")).collect::<Vec<_>>(),
            start.elapsed().as_secs_f64()
        );
        Ok(())
    })?;
    Ok(())
}
