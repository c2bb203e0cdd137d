//! Long-run reproduction of the estimator table: 784-256-256-10 reciprocal
//! network, symmetric initialization, full Fashion-MNIST, 50 epochs per
//! estimator. Hours of CPU time per row; not part of the test suite.
//!
//! ```text
//! cargo run --release --example table1_full -- [data_dir] [epochs] [workers] [estimators...]
//! ```
//!
//! Estimators use the `fashion_subset` syntax (`truth`, `classic:0.5`,
//! `npoint:0.05:4`, `continuous:0.05:4:5`, ...); the default is the whole
//! table. Metrics go to `runs/table1/<estimator>/`.

use std::path::PathBuf;
use std::time::Instant;

use holoep::data::{Dataset, Split};
use holoep::estimators::{Estimator, NudgeProtocol};
use holoep::training::{RunMeta, RunOutput, TrainConfig, Trainer};
use holoep::{Dims, ModelKind, Network};

fn parse_estimator(s: &str) -> Estimator {
    let p: Vec<&str> = s.split(':').collect();
    let num = |i: usize| p[i].parse::<f64>().expect("number");
    match p[0] {
        "truth" => Estimator::GroundTruth,
        "rbp" => Estimator::Rbp,
        "classic" => Estimator::Ep(NudgeProtocol::classic(num(1))),
        "npoint" => Estimator::Ep(NudgeProtocol::npoint(num(1), num(2) as usize)),
        "continuous" => Estimator::Ep(NudgeProtocol::continuous(num(1), num(2) as usize, num(3) as usize)),
        other => panic!("unknown estimator {other}"),
    }
}

fn main() -> holoep::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let dir = PathBuf::from(args.get(1).map_or("data/fashion-mnist", String::as_str));
    let epochs: usize = args.get(2).map_or(50, |s| s.parse().expect("epoch count"));
    let workers: usize = args.get(3).map_or(0, |s| s.parse().expect("worker count"));
    let mut names: Vec<String> = args.iter().skip(4).cloned().collect();
    if names.is_empty() {
        for a in ["0.05", "0.5"] {
            names.push(format!("classic:{a}"));
            for n in [2, 4, 6] {
                names.push(format!("npoint:{a}:{n}"));
            }
            names.push(format!("continuous:{a}:4:5"));
        }
        names.push("truth".into());
    }
    let train = Dataset::from_idx(
        &dir.join("train-images-idx3-ubyte.gz"),
        &dir.join("train-labels-idx1-ubyte.gz"),
        10,
        None,
        Split::Train,
    )?;
    let val = Dataset::from_idx(
        &dir.join("t10k-images-idx3-ubyte.gz"),
        &dir.join("t10k-labels-idx1-ubyte.gz"),
        10,
        None,
        Split::Validation,
    )?;
    for name in names {
        let net = Network::init(ModelKind::ReciprocalMLP, Dims::new(784, vec![256, 256], 10), 1, 0.0)?;
        let config = TrainConfig {
            epochs,
            estimator: parse_estimator(&name),
            workers,
            ..TrainConfig::default()
        };
        let mut out = RunOutput::create(&PathBuf::from("runs/table1").join(name.replace(':', "_")))?;
        out.write_meta(&RunMeta::new(&net, 0.0, 1, &config))?;
        let start = Instant::now();
        let mut trainer = Trainer::new(net, config)?;
        let rows = trainer.run(&train, &val, |_, row| out.append(row))?;
        out.checkpoint(&trainer.net, 0.0, 1, None)?;
        let last = rows.last().expect("epoch rows");
        println!(
            "{name:<20} final val error {:.2}%  [{:.0}s]",
            last.val_error_pct,
            start.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
