//! Mini-batch training: per-sample estimation on the free equilibrium,
//! SGD with momentum, and per-epoch metrics (validation error, weight angle,
//! Jacobian symmetry, error-vector alignment).

use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::estimators::{
    estimate, ground_truth_dudbeta, rbp_delta, Estimator, LinearSolver, NudgeProtocol,
};
use crate::fixedpoint::{relax, Dynamics, NetworkState, SolverSettings};
use crate::homeostasis::{alignment_report, homeo_grad, HutchinsonConfig, SymmetryReport};
use crate::models::{
    one_hot, weight_angle_deg, Checkpoint, ModelKind, ModelParams, Network, DEFAULT_DENSE_LIMIT,
};
use crate::scalar::C64;

/// Optimization and estimation hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub lr: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    pub epochs: usize,
    /// Adds `λ_homeo · ∂θ L_homeo` to every sample gradient.
    pub homeostasis: bool,
    pub lambda_homeo: f64,
    /// Gaussian probes per sample for the Hutchinson estimate.
    pub homeo_samples: usize,
    pub estimator: Estimator,
    pub seed: u64,
    /// Learning-rate multiplier per layer, indexed by the layer a tensor
    /// drives. The readout always uses 1.
    pub layer_lr_scales: Option<Vec<f64>>,
    pub solver: SolverSettings,
    pub linear_solver: LinearSolver,
    /// Validation samples used for the Jacobian and alignment diagnostics.
    pub diag_samples: usize,
    /// Worker threads for per-sample estimation; 0 lets the pool decide.
    pub workers: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 50,
            lr: 1e-2,
            momentum: 0.9,
            weight_decay: 0.0,
            epochs: 50,
            homeostasis: false,
            lambda_homeo: 1.0,
            homeo_samples: 5,
            estimator: Estimator::Ep(NudgeProtocol::npoint(0.05, 4)),
            seed: 0,
            layer_lr_scales: None,
            solver: SolverSettings::default(),
            linear_solver: LinearSolver::default(),
            diag_samples: 20,
            workers: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Invalid("batch_size must be ≥ 1".into()));
        }
        if !(self.lr >= 0.0 && self.lr.is_finite()) {
            return Err(Error::Invalid(format!("lr {} must be finite and ≥ 0", self.lr)));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Invalid(format!("momentum {} not in [0, 1)", self.momentum)));
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return Err(Error::Invalid(format!(
                "weight_decay {} must be ≥ 0",
                self.weight_decay
            )));
        }
        if self.homeostasis && self.homeo_samples == 0 {
            return Err(Error::Invalid("homeo_samples must be ≥ 1".into()));
        }
        if !self.lambda_homeo.is_finite() {
            return Err(Error::Invalid("lambda_homeo must be finite".into()));
        }
        if let Some(s) = &self.layer_lr_scales {
            if s.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::Invalid("layer lr scales must be finite and ≥ 0".into()));
            }
        }
        self.estimator.validate()?;
        self.solver.validate()
    }

    fn layer_scale(&self, layer: Option<usize>) -> f64 {
        match (layer, &self.layer_lr_scales) {
            (Some(l), Some(s)) => s.get(l).copied().unwrap_or(1.0),
            _ => 1.0,
        }
    }
}

/// Everything tracked at the end of an epoch. Epoch 0 is the untrained
/// network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub epoch: usize,
    /// Mean readout cross-entropy over the epoch's training samples.
    pub train_loss: Option<f64>,
    pub val_error_pct: f64,
    pub val_loss: f64,
    /// Angle between `w_bwd[k]` and `w_fwd[k]ᵀ` per layer pair; empty for
    /// models without independent backward weights.
    pub weight_angle_deg: Vec<f64>,
    /// Mean over the diagnostic samples; `None` above the dense limit.
    pub symmetry_measure: Option<f64>,
    pub homeo_loss: Option<f64>,
    /// Per-layer cosine of the training estimator's error vector against RBP.
    pub cosine_vs_rbp: Vec<f64>,
    /// Per-layer cosine of `∂βu*` against RBP (functional symmetry).
    pub cosine_truth_vs_rbp: Vec<f64>,
    /// Largest imaginary magnitude discarded during the epoch.
    pub imag_diag: f64,
    /// Training samples whose fixed-point solves missed the tolerance.
    pub nonconverged: usize,
}

impl MetricRow {
    pub fn csv_header(&self) -> String {
        let mut cols: Vec<String> = ["epoch", "train_loss", "val_error_pct", "val_loss"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        cols.extend((0..self.weight_angle_deg.len()).map(|k| format!("weight_angle_deg.{k}")));
        cols.push("symmetry_measure".into());
        cols.push("homeo_loss".into());
        cols.extend((0..self.cosine_vs_rbp.len()).map(|l| format!("cosine_vs_rbp.{l}")));
        cols.extend((0..self.cosine_truth_vs_rbp.len()).map(|l| format!("cosine_truth_vs_rbp.{l}")));
        cols.push("imag_diag".into());
        cols.push("nonconverged".into());
        cols.join(",")
    }

    pub fn csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        let mut cols = vec![
            self.epoch.to_string(),
            opt(self.train_loss),
            self.val_error_pct.to_string(),
            self.val_loss.to_string(),
        ];
        cols.extend(self.weight_angle_deg.iter().map(|v| v.to_string()));
        cols.push(opt(self.symmetry_measure));
        cols.push(opt(self.homeo_loss));
        cols.extend(self.cosine_vs_rbp.iter().map(|v| v.to_string()));
        cols.extend(self.cosine_truth_vs_rbp.iter().map(|v| v.to_string()));
        cols.push(self.imag_diag.to_string());
        cols.push(self.nonconverged.to_string());
        cols.join(",")
    }
}

/// `v ← m·v + g + wd·θ`, `θ ← θ − lr·scale·v`.
pub fn sgd_step(
    params: &mut ModelParams,
    grads: &ModelParams,
    velocity: &mut ModelParams,
    config: &TrainConfig,
) {
    let g = grads.tensors();
    let v = velocity.tensors_mut();
    for ((p, g), v) in params.tensors_mut().into_iter().zip(g).zip(v) {
        let step = config.lr * config.layer_scale(p.layer);
        for ((theta, &gi), vi) in p.data.iter_mut().zip(g.data).zip(v.data.iter_mut()) {
            *vi = config.momentum * *vi + gi + config.weight_decay * *theta;
            *theta -= step * *vi;
        }
    }
}

/// Angles between every backward matrix and its forward transpose.
pub fn weight_angle(net: &Network) -> Vec<f64> {
    net.params
        .w_fwd
        .iter()
        .zip(&net.params.w_bwd)
        .map(|(f, b)| weight_angle_deg(f, b))
        .collect()
}

/// Validation error in percent, mean loss, and the number of free phases
/// that missed the tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub error_pct: f64,
    pub loss: f64,
    pub nonconverged: usize,
}

struct SampleOutcome {
    grad: ModelParams,
    loss: f64,
    imag: f64,
    converged: bool,
}

/// Independent per-sample stream for the Hutchinson probes.
fn sample_seed(seed: u64, epoch: usize, index: usize) -> u64 {
    seed ^ (epoch as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (index as u64 + 1).wrapping_mul(0xBF58_476D_1CE4_E5B9)
}

fn sample_gradient(
    net: &Network,
    x: &[f64],
    label: usize,
    config: &TrainConfig,
    seed: u64,
) -> Result<SampleOutcome> {
    let y = one_hot(label, net.dims.classes);
    let bound = net.bind(x, &y)?;
    let est = estimate(&bound, &config.estimator, &config.solver, config.linear_solver)?;
    let u0 = est.free.state.real_parts();
    let (loss, _) = bound.readout_loss(&u0);
    let mut grad = est.grad.grads;
    if config.homeostasis && config.lambda_homeo != 0.0 {
        let cfg = HutchinsonConfig::new(config.homeo_samples, seed);
        let h = homeo_grad(&bound, &u0, &cfg, config.lambda_homeo)?;
        grad.axpy(1.0, &h.grads);
    }
    Ok(SampleOutcome {
        grad,
        loss,
        imag: est.grad.imag_diagnostic,
        converged: est.converged,
    })
}

/// Runs the trainer's networks and owns the optimizer state.
pub struct Trainer {
    pub net: Network,
    pub config: TrainConfig,
    velocity: ModelParams,
    epoch: usize,
    pool: Option<rayon::ThreadPool>,
}

impl Trainer {
    pub fn new(net: Network, config: TrainConfig) -> Result<Self> {
        config.validate()?;
        let pool = if config.workers == 1 {
            None
        } else {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(config.workers)
                    .build()
                    .map_err(|e| Error::Config(format!("worker pool: {e}")))?,
            )
        };
        Ok(Self {
            velocity: net.params.zeros_like(),
            net,
            config,
            epoch: 0,
            pool,
        })
    }

    /// Number of completed epochs.
    pub fn epoch(&self) -> usize {
        self.epoch
    }

    /// Maps `f` over `0..n` on the worker pool, preserving order.
    fn map_indices<R: Send>(&self, n: usize, f: impl Fn(usize) -> R + Sync + Send) -> Vec<R> {
        match &self.pool {
            None => (0..n).map(f).collect(),
            Some(pool) => pool.install(|| (0..n).into_par_iter().map(f).collect()),
        }
    }

    /// Epoch permutation, reproducible from `(seed, epoch)`.
    fn permutation(&self, n: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(self.epoch as u64 + 1);
        order.shuffle(&mut rng);
        order
    }

    /// One pass over `train` followed by the validation metrics.
    pub fn train_epoch(&mut self, train: &Dataset, val: &Dataset) -> Result<MetricRow> {
        check_inputs(&self.net, train)?;
        let epoch = self.epoch + 1;
        let order = self.permutation(train.len());
        let mut loss_sum = 0.0;
        let mut imag = 0.0f64;
        let mut nonconverged = 0;
        for (b, chunk) in order.chunks(self.config.batch_size).enumerate() {
            let outcomes = {
                let net = &self.net;
                let config = &self.config;
                self.map_indices(chunk.len(), |i| {
                    let idx = chunk[i];
                    sample_gradient(
                        net,
                        train.image(idx),
                        train.labels[idx],
                        config,
                        sample_seed(config.seed, epoch, idx),
                    )
                })
            };
            let mut total: ModelParams = self.net.params.zeros_like();
            for o in outcomes {
                let o = o.map_err(|e| Error::Training {
                    epoch,
                    batch: b,
                    source: Box::new(e),
                })?;
                total.axpy(1.0, &o.grad);
                loss_sum += o.loss;
                imag = imag.max(o.imag);
                nonconverged += usize::from(!o.converged);
            }
            total.scale(1.0 / chunk.len() as f64);
            if !total.is_finite() {
                return Err(Error::Training {
                    epoch,
                    batch: b,
                    source: Box::new(Error::Invalid("non-finite batch gradient".into())),
                });
            }
            sgd_step(&mut self.net.params, &total, &mut self.velocity, &self.config);
        }
        self.epoch = epoch;
        let mut row = self.metrics(val)?;
        row.train_loss = Some(loss_sum / train.len() as f64);
        row.imag_diag = imag;
        row.nonconverged = nonconverged;
        Ok(row)
    }

    /// Validation error and loss at the free fixed point.
    pub fn evaluate(&self, data: &Dataset) -> Result<Evaluation> {
        check_inputs(&self.net, data)?;
        let net = &self.net;
        let settings = &self.config.solver;
        let results = self.map_indices(data.len(), |i| -> Result<(bool, f64, bool)> {
            let y = data.target(i);
            let bound = net.bind(data.image(i), &y)?;
            let free = relax(
                &bound,
                C64::new(0.0, 0.0),
                &NetworkState::zeros(bound.layer_dims()),
                settings,
            )?;
            let u0 = free.state.real_parts();
            let (loss, _) = bound.readout_loss(&u0);
            Ok((bound.predict(&u0) == data.labels[i], loss, free.converged))
        });
        let mut correct = 0usize;
        let mut loss = 0.0;
        let mut nonconverged = 0;
        for r in results {
            let (ok, l, conv) = r?;
            correct += usize::from(ok);
            loss += l;
            nonconverged += usize::from(!conv);
        }
        let n = data.len() as f64;
        Ok(Evaluation {
            error_pct: 100.0 * (1.0 - correct as f64 / n),
            loss: loss / n,
            nonconverged,
        })
    }

    /// Metrics of the current network; training-only fields are empty.
    pub fn metrics(&self, val: &Dataset) -> Result<MetricRow> {
        let eval = self.evaluate(val)?;
        let diag = self.diagnostics(val)?;
        Ok(MetricRow {
            epoch: self.epoch,
            train_loss: None,
            val_error_pct: eval.error_pct,
            val_loss: eval.loss,
            weight_angle_deg: weight_angle(&self.net),
            symmetry_measure: diag.symmetry,
            homeo_loss: diag.homeo,
            cosine_vs_rbp: diag.cos_est,
            cosine_truth_vs_rbp: diag.cos_truth,
            imag_diag: 0.0,
            nonconverged: 0,
        })
    }

    fn diagnostics(&self, val: &Dataset) -> Result<Diagnostics> {
        let n = self.config.diag_samples.min(val.len());
        let nl = self.net.dims.layers.len();
        if n == 0 || self.net.state_dim() > DEFAULT_DENSE_LIMIT {
            return Ok(Diagnostics::empty());
        }
        let net = &self.net;
        let config = &self.config;
        let per_sample = self.map_indices(n, |i| -> Result<_> {
            let y = val.target(i);
            let bound = net.bind(val.image(i), &y)?;
            let free = relax(
                &bound,
                C64::new(0.0, 0.0),
                &NetworkState::zeros(bound.layer_dims()),
                &config.solver,
            )?;
            let u0 = free.state.real_parts();
            let report = SymmetryReport::from_jacobian(&bound.jacobian_dense(&u0)?)?;
            let rbp = rbp_delta(&bound, &u0, LinearSolver::Dense)?;
            let truth = ground_truth_dudbeta(&bound, &u0, LinearSolver::Dense)?;
            let est = match config.estimator {
                Estimator::GroundTruth => truth.clone(),
                Estimator::Rbp => rbp.clone(),
                Estimator::Ep(_) => {
                    estimate(&bound, &config.estimator, &config.solver, config.linear_solver)?.delta
                }
            };
            Ok((
                report,
                alignment_report(&est, &rbp)?,
                alignment_report(&truth, &rbp)?,
            ))
        });
        let mut d = Diagnostics::empty();
        let mut sym = 0.0;
        let mut homeo = 0.0;
        let mut count = 0usize;
        d.cos_est = vec![0.0; nl];
        d.cos_truth = vec![0.0; nl];
        // Samples whose Jacobian is singular or ill-conditioned are skipped.
        for (report, ce, ct) in per_sample.into_iter().flatten() {
            sym += report.symmetry_measure;
            homeo += report.homeo_exact;
            for l in 0..nl {
                d.cos_est[l] += ce[l];
                d.cos_truth[l] += ct[l];
            }
            count += 1;
        }
        if count == 0 {
            return Ok(Diagnostics::empty());
        }
        let c = count as f64;
        d.symmetry = Some(sym / c);
        d.homeo = Some(homeo / c);
        d.cos_est.iter_mut().chain(d.cos_truth.iter_mut()).for_each(|v| *v /= c);
        Ok(d)
    }

    /// Epoch-0 metrics, then `config.epochs` training epochs. `on_epoch` sees
    /// every row as soon as it is computed.
    pub fn run(
        &mut self,
        train: &Dataset,
        val: &Dataset,
        mut on_epoch: impl FnMut(&Trainer, &MetricRow) -> Result<()>,
    ) -> Result<Vec<MetricRow>> {
        let mut rows = Vec::with_capacity(self.config.epochs + 1);
        let first = self.metrics(val)?;
        on_epoch(self, &first)?;
        rows.push(first);
        for _ in 0..self.config.epochs {
            let row = self.train_epoch(train, val)?;
            on_epoch(self, &row)?;
            rows.push(row);
        }
        Ok(rows)
    }
}

struct Diagnostics {
    symmetry: Option<f64>,
    homeo: Option<f64>,
    cos_est: Vec<f64>,
    cos_truth: Vec<f64>,
}

impl Diagnostics {
    fn empty() -> Self {
        Self {
            symmetry: None,
            homeo: None,
            cos_est: Vec::new(),
            cos_truth: Vec::new(),
        }
    }
}

fn check_inputs(net: &Network, data: &Dataset) -> Result<()> {
    if data.input_dim() != net.dims.input || data.classes != net.dims.classes {
        return Err(Error::Shape(format!(
            "dataset has {} inputs / {} classes, network expects {} / {}",
            data.input_dim(),
            data.classes,
            net.dims.input,
            net.dims.classes
        )));
    }
    Ok(())
}

/// Choices the run depends on that are not visible in the parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub kind: ModelKind,
    pub dims: crate::models::Dims,
    pub alpha: f64,
    pub init_seed: u64,
    pub train: TrainConfig,
    pub free_phase_init: String,
    pub initializer: String,
    pub direct_feedback: String,
    pub pcn_nudge: String,
}

impl RunMeta {
    pub fn new(net: &Network, alpha: f64, init_seed: u64, train: &TrainConfig) -> Self {
        Self {
            kind: net.kind,
            dims: net.dims.clone(),
            alpha,
            init_seed,
            train: train.clone(),
            free_phase_init: "zero state; nudged phases warm-start from the free fixed point".into(),
            initializer: "w ~ uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)); w_bwd <- sin(alpha) w_bwd + cos(alpha) w_fwd^T".into(),
            direct_feedback: "u_0 <- w_in x + w_fb s(u_L) + b_0; u_l <- w_fwd s(u_(l-1)) + b_l; nudge on u_L".into(),
            pcn_nudge: format!("nudge added to the value neurons of the last layer, Euler step {}", net.pcn_step),
        }
    }
}

/// Output directory layout: `run_meta.json`, `metrics.jsonl`, `metrics.csv`,
/// `checkpoint_epoch{N}.json` and `final.json`.
pub struct RunOutput {
    dir: PathBuf,
    jsonl: File,
    csv: File,
    csv_header: bool,
}

impl RunOutput {
    /// Creates the directory and truncates the metric files.
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let open = |name: &str| -> Result<File> {
            let p = dir.join(name);
            OpenOptions::new()
                .create(true)
                .write(true)
                .truncate(true)
                .open(&p)
                .map_err(|e| Error::io(p, e))
        };
        Ok(Self {
            dir: dir.to_path_buf(),
            jsonl: open("metrics.jsonl")?,
            csv: open("metrics.csv")?,
            csv_header: false,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write_meta(&self, meta: &RunMeta) -> Result<()> {
        let p = self.dir.join("run_meta.json");
        let s = serde_json::to_string_pretty(meta).map_err(|e| Error::Config(e.to_string()))?;
        std::fs::write(&p, s).map_err(|e| Error::io(p, e))
    }

    pub fn append(&mut self, row: &MetricRow) -> Result<()> {
        let line = serde_json::to_string(row).map_err(|e| Error::Config(e.to_string()))?;
        writeln!(self.jsonl, "{line}").map_err(|e| Error::io(self.dir.join("metrics.jsonl"), e))?;
        let csv_path = self.dir.join("metrics.csv");
        if !self.csv_header {
            writeln!(self.csv, "{}", row.csv_header()).map_err(|e| Error::io(&csv_path, e))?;
            self.csv_header = true;
        }
        writeln!(self.csv, "{}", row.csv()).map_err(|e| Error::io(csv_path, e))
    }

    /// Saves `checkpoint_epoch{epoch}.json`, or `final.json` for `None`.
    pub fn checkpoint(&self, net: &Network, alpha: f64, seed: u64, epoch: Option<usize>) -> Result<PathBuf> {
        let name = epoch.map_or("final.json".to_string(), |e| format!("checkpoint_epoch{e}.json"));
        let p = self.dir.join(name);
        Checkpoint::from_network(net, alpha, seed).save(&p)?;
        Ok(p)
    }
}

/// Test-set evaluation of the current network without a trainer.
pub fn evaluate(net: &Network, data: &Dataset, settings: &SolverSettings) -> Result<Evaluation> {
    let config = TrainConfig {
        solver: *settings,
        ..TrainConfig::default()
    };
    Trainer::new(net.clone(), config)?.evaluate(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{synth_teacher, Split};
    use crate::models::Dims;

    fn small_params() -> ModelParams {
        let net = Network::init(ModelKind::ReciprocalMLP, Dims::new(3, vec![4, 2], 2), 1, 0.3).unwrap();
        net.params
    }

    #[test]
    fn sgd_zero_gradient_keeps_params() {
        let mut p = small_params();
        let before = p.clone();
        let g = p.zeros_like();
        let mut v = p.zeros_like();
        sgd_step(&mut p, &g, &mut v, &TrainConfig::default());
        assert_eq!(p, before);
    }

    #[test]
    fn sgd_plain_step_subtracts_gradient() {
        let mut p = small_params();
        let before = p.clone();
        let mut g = p.clone();
        g.scale(0.25);
        let mut v = p.zeros_like();
        let cfg = TrainConfig {
            lr: 1.0,
            momentum: 0.0,
            ..TrainConfig::default()
        };
        sgd_step(&mut p, &g, &mut v, &cfg);
        let mut expect = before;
        expect.axpy(-1.0, &g);
        assert_eq!(p, expect);
    }

    #[test]
    fn sgd_momentum_unrolls() {
        let mut p = small_params();
        let before = p.clone();
        let mut g = p.zeros_like();
        g.b[0][1] = 1.0;
        let mut v = p.zeros_like();
        let cfg = TrainConfig {
            lr: 0.1,
            momentum: 0.9,
            ..TrainConfig::default()
        };
        sgd_step(&mut p, &g, &mut v, &cfg);
        sgd_step(&mut p, &g, &mut v, &cfg);
        let moved = before.b[0][1] - p.b[0][1];
        assert!((moved - 0.1 * 2.9).abs() < 1e-15, "{moved}");
    }

    #[test]
    fn sgd_layer_scale_skips_readout() {
        let mut p = small_params();
        let before = p.clone();
        let g = {
            let mut g = p.zeros_like();
            g.b[0][0] = 1.0;
            g.b[1][0] = 1.0;
            g.b_ro[0] = 1.0;
            g
        };
        let mut v = p.zeros_like();
        let cfg = TrainConfig {
            lr: 1.0,
            momentum: 0.0,
            layer_lr_scales: Some(vec![0.0, 0.5]),
            ..TrainConfig::default()
        };
        sgd_step(&mut p, &g, &mut v, &cfg);
        assert_eq!(p.b[0][0], before.b[0][0]);
        assert_eq!(p.b[1][0], before.b[1][0] - 0.5);
        assert_eq!(p.b_ro[0], before.b_ro[0] - 1.0);
    }

    #[test]
    fn weight_decay_enters_velocity() {
        let mut p = small_params();
        let before = p.clone();
        let g = p.zeros_like();
        let mut v = p.zeros_like();
        let cfg = TrainConfig {
            lr: 0.5,
            momentum: 0.0,
            weight_decay: 0.1,
            ..TrainConfig::default()
        };
        sgd_step(&mut p, &g, &mut v, &cfg);
        let expect = before.w_in.get(1, 2) * (1.0 - 0.05);
        assert!((p.w_in.get(1, 2) - expect).abs() < 1e-15);
    }

    #[test]
    fn angle_of_tied_and_negated_weights() {
        let mut net =
            Network::init(ModelKind::ReciprocalMLP, Dims::new(3, vec![4, 3, 2], 2), 0, 0.0).unwrap();
        assert!(weight_angle(&net).iter().all(|a| a.abs() < 1e-6));
        for b in &mut net.params.w_bwd {
            b.scale(-1.0);
        }
        assert!(weight_angle(&net).iter().all(|a| (a - 180.0).abs() < 1e-6));
        let hop = Network::init(ModelKind::HopfieldMLP, Dims::new(3, vec![4, 2], 2), 0, 0.0).unwrap();
        assert!(weight_angle(&hop).is_empty());
    }

    fn toy_data() -> (Dataset, Dataset) {
        let all = synth_teacher(300, 8, 2, 5).unwrap();
        (
            all.slice(0, 200, Split::Train).unwrap(),
            all.slice(200, 300, Split::Validation).unwrap(),
        )
    }

    fn toy_trainer(estimator: Estimator, lr: f64) -> Trainer {
        let net = Network::init(ModelKind::ReciprocalMLP, Dims::new(8, vec![6, 4], 2), 3, 0.0).unwrap();
        let cfg = TrainConfig {
            lr,
            batch_size: 10,
            epochs: 1,
            estimator,
            diag_samples: 5,
            ..TrainConfig::default()
        };
        Trainer::new(net, cfg).unwrap()
    }

    #[test]
    fn zero_lr_keeps_params_and_reports_metrics() {
        let (train, val) = toy_data();
        let mut t = toy_trainer(Estimator::GroundTruth, 0.0);
        let before = t.net.params.clone();
        let row = t.train_epoch(&train, &val).unwrap();
        assert_eq!(t.net.params, before);
        assert_eq!(row.epoch, 1);
        assert!(row.train_loss.unwrap().is_finite());
        assert!((0.0..=100.0).contains(&row.val_error_pct));
        assert_eq!(row.weight_angle_deg.len(), 1);
        assert_eq!(row.cosine_vs_rbp.len(), 2);
        assert!(row.symmetry_measure.is_some());
    }

    #[test]
    fn training_is_deterministic() {
        let (train, val) = toy_data();
        let run = || {
            let mut t = toy_trainer(Estimator::Ep(NudgeProtocol::npoint(0.1, 4)), 0.05);
            t.config.homeostasis = true;
            t.config.epochs = 2;
            t.run(&train, &val, |_, _| Ok(())).unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let (train, val) = toy_data();
        let run = |workers| {
            let mut t = toy_trainer(Estimator::GroundTruth, 0.05);
            t.config.workers = workers;
            t.pool = (workers != 1).then(|| {
                rayon::ThreadPoolBuilder::new().num_threads(workers).build().unwrap()
            });
            t.train_epoch(&train, &val).unwrap()
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn dataset_shape_mismatch_rejected() {
        let (train, val) = toy_data();
        let net = Network::init(ModelKind::ReciprocalMLP, Dims::new(5, vec![4, 2], 2), 0, 0.0).unwrap();
        let mut t = Trainer::new(net, TrainConfig::default()).unwrap();
        assert!(matches!(t.train_epoch(&train, &val), Err(Error::Shape(_))));
    }

    #[test]
    fn config_validation() {
        let bad = [
            TrainConfig {
                batch_size: 0,
                ..TrainConfig::default()
            },
            TrainConfig {
                momentum: 1.0,
                ..TrainConfig::default()
            },
            TrainConfig {
                lr: f64::NAN,
                ..TrainConfig::default()
            },
            TrainConfig {
                estimator: Estimator::Ep(NudgeProtocol::npoint(0.0, 4)),
                ..TrainConfig::default()
            },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
        assert!(TrainConfig::default().validate().is_ok());
    }

    #[test]
    fn csv_row_matches_header() {
        let row = MetricRow {
            epoch: 3,
            train_loss: None,
            val_error_pct: 12.5,
            val_loss: 0.4,
            weight_angle_deg: vec![1.0, 2.0],
            symmetry_measure: Some(0.9),
            homeo_loss: None,
            cosine_vs_rbp: vec![0.5, 0.6, 0.7],
            cosine_truth_vs_rbp: vec![0.9, 0.9, 1.0],
            imag_diag: 0.0,
            nonconverged: 0,
        };
        let h = row.csv_header().split(',').count();
        assert_eq!(h, row.csv().split(',').count());
        assert_eq!(h, 4 + 2 + 2 + 3 + 3 + 2);
    }

    #[test]
    fn run_output_writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let (train, val) = toy_data();
        let mut t = toy_trainer(Estimator::GroundTruth, 0.05);
        let mut out = RunOutput::create(dir.path()).unwrap();
        out.write_meta(&RunMeta::new(&t.net, 0.0, 3, &t.config)).unwrap();
        t.run(&train, &val, |tr, row| {
            out.append(row)?;
            out.checkpoint(&tr.net, 0.0, 3, Some(row.epoch)).map(|_| ())
        })
        .unwrap();
        let jsonl = std::fs::read_to_string(dir.path().join("metrics.jsonl")).unwrap();
        assert_eq!(jsonl.lines().count(), 2);
        let first: MetricRow = serde_json::from_str(jsonl.lines().next().unwrap()).unwrap();
        assert_eq!(first.epoch, 0);
        let csv = std::fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
        assert_eq!(csv.lines().count(), 3);
        let ck = Checkpoint::load(&dir.path().join("checkpoint_epoch1.json")).unwrap();
        assert_eq!(ck.to_network().unwrap().params, t.net.params);
    }
}
