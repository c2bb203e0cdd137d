//! Command-line surface. Every subcommand writes its artifacts under an
//! output directory and maps failures to exit codes: 0 success, 1 validation
//! failure, 2 I/O error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::RunConfig;
use crate::data::{Dataset, Split};
use crate::error::{Error, Result};
use crate::estimators::{beta_sweep, sweep_csv};
use crate::fixedpoint::{relax, Dynamics, NetworkState, SolverSettings};
use crate::homeostasis::SymmetryReport;
use crate::models::{Checkpoint, Dims, ModelKind, Network};
use crate::training::{RunMeta, RunOutput, Trainer};
use crate::verify::{self, Status, TrainingProtocol, CRITERIA};
use crate::C64;

#[derive(Debug, Parser)]
#[command(name = "holoep", version, about = "Holomorphic equilibrium propagation on convergent networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a network from a run configuration.
    Train(TrainArgs),
    /// Cosine of each estimator against RBP and the exact ∂βu* over amplitudes.
    SweepBeta(SweepArgs),
    /// Symmetric/skew decomposition of the Jacobian at free fixed points.
    InspectJacobian(InspectArgs),
    /// Run the numerical acceptance suite and print one line per check.
    Verify(VerifyArgs),
    /// Free-phase relaxation throughput.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Configuration file (flat `section.key = value` lines).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides applied after the file, as `key=value`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Network source shared by the inspection subcommands: a checkpoint, or a
/// freshly initialized model.
#[derive(Debug, Args)]
pub struct NetworkArgs {
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    #[arg(long, default_value = "reciprocal")]
    pub model: String,
    #[arg(long, default_value_t = 20)]
    pub input: usize,
    #[arg(long, value_delimiter = ',', default_value = "32,16")]
    pub layers: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    pub classes: usize,
    /// Initial forward/backward angle in radians.
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl NetworkArgs {
    fn load(&self) -> Result<Network> {
        match &self.checkpoint {
            Some(path) => Checkpoint::load(path)?.to_network(),
            None => Network::init(
                ModelKind::parse(&self.model)?,
                Dims::new(self.input, self.layers.clone(), self.classes),
                self.seed,
                self.alpha,
            ),
        }
    }
}

/// Input samples: leading samples of an IDX pair, or seeded uniform inputs.
#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, requires = "labels")]
    pub images: Option<PathBuf>,
    #[arg(long, requires = "images")]
    pub labels: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub input_seed: u64,
}

impl SampleArgs {
    fn load(&self, net: &Network) -> Result<Vec<(Vec<f64>, usize)>> {
        if self.samples == 0 {
            return Err(Error::Invalid("--samples must be at least 1".into()));
        }
        if let (Some(images), Some(labels)) = (&self.images, &self.labels) {
            let ds = Dataset::from_idx(images, labels, net.dims.classes, Some(self.samples), Split::Validation)?;
            if ds.input_dim() != net.dims.input {
                return Err(Error::Invalid(format!(
                    "images have {} pixels, network expects {}",
                    ds.input_dim(),
                    net.dims.input
                )));
            }
            return Ok((0..ds.len()).map(|i| (ds.image(i).to_vec(), ds.labels[i])).collect());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.input_seed);
        Ok((0..self.samples)
            .map(|i| {
                let x = (0..net.dims.input).map(|_| rng.random_range(0.0..1.0)).collect();
                (x, i % net.dims.classes)
            })
            .collect())
    }
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 150)]
    pub max_steps_free: usize,
    #[arg(long, default_value_t = 20)]
    pub max_steps_nudge: usize,
    /// Relaxation factor ρ in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub damping: f64,
}

impl SolverArgs {
    fn settings(&self) -> SolverSettings {
        SolverSettings::default()
            .with_tolerance(self.tolerance)
            .with_budgets(self.max_steps_free, self.max_steps_nudge)
            .with_damping(self.damping)
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub net: NetworkArgs,
    #[command(flatten)]
    pub data: SampleArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.02,0.05,0.1,0.2,0.5")]
    pub amplitudes: Vec<f64>,
    /// Points on the circle; 1 is the one-sided estimator.
    #[arg(long = "n-points", value_delimiter = ',', default_value = "1,2,4,6")]
    pub n_points: Vec<usize>,
    #[arg(long, default_value = "runs/sweep")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[command(flatten)]
    pub net: NetworkArgs,
    #[command(flatten)]
    pub data: SampleArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value = "runs/jacobian")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Criteria to run (default: all).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u8>,
    #[arg(long, value_delimiter = ',')]
    pub skip: Vec<u8>,
    /// Directory with the gzipped Fashion-MNIST IDX files.
    #[arg(long, default_value = "data/fashion-mnist")]
    pub data_dir: PathBuf,
    #[arg(long, default_value_t = 4000)]
    pub train_samples: usize,
    #[arg(long, default_value_t = 10)]
    pub epochs: usize,
    #[arg(long, default_value_t = 1000)]
    pub rank_samples: usize,
    #[arg(long, default_value_t = 2)]
    pub rank_epochs: usize,
    #[arg(long, default_value_t = 10)]
    pub rank_batch: usize,
    #[arg(long, default_value = "runs/verify")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub net: NetworkArgs,
    #[command(flatten)]
    pub data: SampleArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    #[arg(long, default_value = "runs/bench")]
    pub output: PathBuf,
}

/// Parses `argv` and runs the selected subcommand.
pub fn main_with_args<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}

/// `Ok(false)` marks a completed run whose checks failed.
fn dispatch(command: Command) -> Result<bool> {
    match command {
        Command::Train(a) => train(a),
        Command::SweepBeta(a) => sweep(a),
        Command::InspectJacobian(a) => inspect(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Bench(a) => bench(a),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn to_json(value: &impl Serialize) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Invalid(e.to_string()))
}

fn train(a: TrainArgs) -> Result<bool> {
    let mut cfg = match &a.config {
        Some(path) => RunConfig::load(path)?,
        None => {
            let mut c = RunConfig::default();
            c.apply_env();
            c
        }
    };
    for kv in &a.overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{kv}` is not key=value")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(dir) = a.output {
        cfg.output_dir = dir;
    }
    cfg.validate()?;
    let (train, val) = cfg.datasets()?;
    let net = cfg.network()?;
    let tc = cfg.train_config();
    let mut out = RunOutput::create(&cfg.output_dir)?;
    write(&out.dir().join("config.txt"), &cfg.to_text())?;
    out.write_meta(&RunMeta::new(&net, cfg.model.alpha, cfg.model.seed, &tc))?;
    let (alpha, seed, every) = (cfg.model.alpha, cfg.model.seed, cfg.train.checkpoint_every);
    let mut trainer = Trainer::new(net, tc)?;
    let start = Instant::now();
    trainer.run(&train, &val, |t, row| {
        out.append(row)?;
        println!(
            "epoch {:>3}  val error {:6.2}%  val loss {:.4}  angle {:?}  [{:.1}s]",
            row.epoch,
            row.val_error_pct,
            row.val_loss,
            row.weight_angle_deg.iter().map(|a| format!("{a:.2}")).collect::<Vec<_>>(),
            start.elapsed().as_secs_f64()
        );
        if every > 0 && row.epoch > 0 && row.epoch % every == 0 {
            out.checkpoint(&t.net, alpha, seed, Some(row.epoch))?;
        }
        Ok(())
    })?;
    let path = out.checkpoint(&trainer.net, alpha, seed, None)?;
    println!("wrote {}", path.display());
    Ok(true)
}

fn sweep(a: SweepArgs) -> Result<bool> {
    let net = a.net.load()?;
    let batch = a.data.load(&net)?;
    let rows = beta_sweep(&net, &batch, &a.amplitudes, &a.n_points, &a.solver.settings())?;
    let csv = sweep_csv(&rows);
    create_dir(&a.output)?;
    write(&a.output.join("sweep.csv"), &csv)?;
    print!("{csv}");
    Ok(true)
}

fn free_state(net: &Network, x: &[f64], y: &[f64], settings: &SolverSettings) -> Result<(Vec<f64>, bool)> {
    let b = net.bind(x, y)?;
    let r = relax(&b, C64::new(0.0, 0.0), &NetworkState::zeros(b.layer_dims()), settings)?;
    Ok((r.state.real_parts(), r.converged))
}

#[derive(Serialize)]
struct InspectRow {
    sample: usize,
    converged: bool,
    #[serde(flatten)]
    report: SymmetryReport,
}

fn inspect(a: InspectArgs) -> Result<bool> {
    let net = a.net.load()?;
    let batch = a.data.load(&net)?;
    let settings = a.solver.settings();
    let mut rows = Vec::new();
    for (i, (x, label)) in batch.iter().enumerate() {
        let y = crate::models::one_hot(*label, net.dims.classes);
        let (u, converged) = free_state(&net, x, &y, &settings)?;
        let j = net.bind(x, &y)?.jacobian_dense(&u)?;
        let report = SymmetryReport::from_jacobian(&j)?;
        println!(
            "sample {i:>3}  ‖S‖F {:.6e}  ‖A‖F {:.6e}  symmetry {:.6}  L_homeo {:.6e}{}",
            report.frob_s,
            report.frob_a,
            report.symmetry_measure,
            report.homeo_exact,
            if converged { "" } else { "  (not converged)" }
        );
        rows.push(InspectRow { sample: i, converged, report });
    }
    create_dir(&a.output)?;
    write(&a.output.join("jacobian.json"), &to_json(&rows)?)?;
    Ok(true)
}

fn verify_cmd(a: VerifyArgs) -> Result<bool> {
    let criteria: Vec<u8> = CRITERIA
        .iter()
        .map(|(c, _)| *c)
        .filter(|c| (a.only.is_empty() || a.only.contains(c)) && !a.skip.contains(c))
        .collect();
    if let Some(bad) = a.only.iter().find(|c| !CRITERIA.iter().any(|(k, _)| k == *c)) {
        return Err(Error::Invalid(format!("no criterion {bad}")));
    }
    let protocol = TrainingProtocol {
        data_dir: a.data_dir,
        train_samples: a.train_samples,
        epochs: a.epochs,
        rank_samples: a.rank_samples,
        rank_epochs: a.rank_epochs,
        rank_batch: a.rank_batch,
        ..TrainingProtocol::default()
    };
    create_dir(&a.output)?;
    let checks = verify::run_all(&criteria, &protocol, |c| println!("{}", c.line()));
    let report: String = checks.iter().map(|c| c.line() + "\n").collect();
    write(&a.output.join("verify.txt"), &report)?;
    let failed = checks.iter().filter(|c| c.status == Status::Fail).count();
    let skipped = checks.iter().filter(|c| c.status == Status::Skipped).count();
    println!(
        "{} passed, {failed} failed, {skipped} skipped",
        checks.len() - failed - skipped
    );
    Ok(failed == 0)
}

#[derive(Serialize)]
struct BenchReport {
    model: &'static str,
    state_dim: usize,
    samples: usize,
    repeats: usize,
    total_steps: usize,
    seconds: f64,
    steps_per_second: f64,
    samples_per_second: f64,
    nonconverged: usize,
}

fn bench(a: BenchArgs) -> Result<bool> {
    let net = a.net.load()?;
    let batch = a.data.load(&net)?;
    let settings = a.solver.settings();
    let targets: Vec<Vec<f64>> = batch
        .iter()
        .map(|(_, l)| crate::models::one_hot(*l, net.dims.classes))
        .collect();
    let (mut steps, mut nonconverged) = (0, 0);
    let start = Instant::now();
    for _ in 0..a.repeats.max(1) {
        for ((x, _), y) in batch.iter().zip(&targets) {
            let b = net.bind(x, y)?;
            let r = relax(&b, C64::new(0.0, 0.0), &NetworkState::zeros(b.layer_dims()), &settings)?;
            steps += r.iterations;
            nonconverged += usize::from(!r.converged);
        }
    }
    let seconds = start.elapsed().as_secs_f64();
    let solves = batch.len() * a.repeats.max(1);
    let report = BenchReport {
        model: net.kind.name(),
        state_dim: net.state_dim(),
        samples: batch.len(),
        repeats: a.repeats.max(1),
        total_steps: steps,
        seconds,
        steps_per_second: steps as f64 / seconds,
        samples_per_second: solves as f64 / seconds,
        nonconverged,
    };
    println!(
        "{}: state {}  {} solves  {:.0} steps/s  {:.1} solves/s  ({} not converged)",
        report.model, report.state_dim, solves, report.steps_per_second, report.samples_per_second, nonconverged
    );
    create_dir(&a.output)?;
    write(&a.output.join("bench.json"), &to_json(&report)?)?;
    Ok(true)
}
