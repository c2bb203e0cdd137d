//! Run configuration as flat `section.key = value` text.
//!
//! Blank lines and lines starting with `#` are ignored. Every key has a
//! default, so a file only lists what it changes; unknown keys are rejected.
//! [`RunConfig::to_text`] writes every key, and parsing that text gives back
//! an identical configuration. The only environment override is
//! `OUTPUT_DIR`, applied by [`RunConfig::load`].
//!
//! | key | default | meaning |
//! |---|---|---|
//! | `model.kind` | `reciprocal` | `reciprocal`, `hopfield`, `direct_feedback`, `pcn` |
//! | `model.input` | 784 | input dimension |
//! | `model.layers` | `256,256` | comma-separated layer sizes |
//! | `model.classes` | 10 | readout classes |
//! | `model.alpha` | 0 | initial forward/backward angle (radians) |
//! | `model.seed` | 0 | initializer seed |
//! | `model.pcn_step` | 0.5 | Euler step of the predictive-coding value neurons |
//! | `estimator.kind` | `npoint` | `truth`, `rbp`, `classic`, `npoint`, `continuous` |
//! | `estimator.amplitude` | 0.05 | teaching amplitude `|β|` |
//! | `estimator.n_points` | 4 | points on the β circle |
//! | `estimator.periods` | 5 | continuous mode: oscillation periods |
//! | `estimator.steps_per_point` | 60 | continuous mode: updates per point |
//! | `estimator.path_presyn` | false | N-point mode: average the presynaptic term over the circle |
//! | `solver.tolerance` | 1e-8 | relative residual tolerance |
//! | `solver.max_steps_free` | 150 | free-phase step budget |
//! | `solver.max_steps_nudge` | 20 | nudged-phase step budget |
//! | `solver.damping` | 1 | relaxation factor ρ |
//! | `solver.linear` | `iterative` | `dense` or `iterative` oracle solves |
//! | `solver.linear_tolerance` | 1e-10 | iterative oracle tolerance |
//! | `solver.linear_max_iter` | 1000 | iterative oracle sweeps before dense fallback |
//! | `train.batch_size` | 50 | |
//! | `train.lr` | 0.01 | |
//! | `train.momentum` | 0.9 | |
//! | `train.weight_decay` | 0 | |
//! | `train.epochs` | 50 | |
//! | `train.homeostasis` | false | add the homeostatic loss |
//! | `train.lambda_homeo` | 1 | its weight when enabled |
//! | `train.homeo_samples` | 5 | Gaussian probes per sample |
//! | `train.seed` | 0 | shuffling and probe seed |
//! | `train.layer_lr_scales` | *(empty)* | comma-separated per-layer multipliers |
//! | `train.diag_samples` | 20 | validation samples for Jacobian diagnostics |
//! | `train.checkpoint_every` | 0 | epochs between checkpoints (0: final only) |
//! | `data.source` | `idx` | `idx` or `synthetic` |
//! | `data.train_images`, `data.train_labels` | Fashion-MNIST train files under `data/fashion-mnist` | |
//! | `data.val_images`, `data.val_labels` | Fashion-MNIST `t10k` files | |
//! | `data.train_limit`, `data.val_limit` | *(empty: all)* | leading samples kept |
//! | `data.synthetic_train`, `data.synthetic_val` | 2000, 500 | synthetic set sizes |
//! | `data.synthetic_classes` | 2 | synthetic classes (dimension is `model.input`) |
//! | `data.synthetic_seed` | 0 | teacher seed |
//! | `output.dir` | `runs/default` | output directory |
//! | `workers` | 1 | estimation threads (0: all cores) |

use std::path::{Path, PathBuf};

use crate::data::{synth_teacher, Dataset, Split};
use crate::error::{Error, Result};
use crate::estimators::{Estimator, LinearSolver, NudgeProtocol};
use crate::fixedpoint::SolverSettings;
use crate::models::{Dims, ModelKind, Network, DEFAULT_PCN_STEP};
use crate::training::TrainConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    Truth,
    Rbp,
    Classic,
    NPoint,
    Continuous,
}

impl EstimatorKind {
    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Truth => "truth",
            EstimatorKind::Rbp => "rbp",
            EstimatorKind::Classic => "classic",
            EstimatorKind::NPoint => "npoint",
            EstimatorKind::Continuous => "continuous",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "truth" => EstimatorKind::Truth,
            "rbp" => EstimatorKind::Rbp,
            "classic" => EstimatorKind::Classic,
            "npoint" => EstimatorKind::NPoint,
            "continuous" => EstimatorKind::Continuous,
            other => return Err(Error::Config(format!("unknown estimator `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSection {
    pub kind: ModelKind,
    pub input: usize,
    pub layers: Vec<usize>,
    pub classes: usize,
    pub alpha: f64,
    pub seed: u64,
    pub pcn_step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorSection {
    pub kind: EstimatorKind,
    pub amplitude: f64,
    pub n_points: usize,
    pub periods: usize,
    pub steps_per_point: usize,
    pub path_presyn: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSection {
    pub settings: SolverSettings,
    pub dense: bool,
    pub linear_tolerance: f64,
    pub linear_max_iter: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainSection {
    pub batch_size: usize,
    pub lr: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    pub epochs: usize,
    pub homeostasis: bool,
    pub lambda_homeo: f64,
    pub homeo_samples: usize,
    pub seed: u64,
    pub layer_lr_scales: Option<Vec<f64>>,
    pub diag_samples: usize,
    pub checkpoint_every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataSource {
    Idx,
    Synthetic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataSection {
    pub source: DataSource,
    pub train_images: PathBuf,
    pub train_labels: PathBuf,
    pub val_images: PathBuf,
    pub val_labels: PathBuf,
    pub train_limit: Option<usize>,
    pub val_limit: Option<usize>,
    pub synthetic_train: usize,
    pub synthetic_val: usize,
    pub synthetic_classes: usize,
    pub synthetic_seed: u64,
}

/// Everything a `train` run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelSection,
    pub estimator: EstimatorSection,
    pub solver: SolverSection,
    pub train: TrainSection,
    pub data: DataSection,
    pub output_dir: PathBuf,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let t = TrainConfig::default();
        let fm = Path::new("data/fashion-mnist");
        Self {
            model: ModelSection {
                kind: ModelKind::ReciprocalMLP,
                input: 784,
                layers: vec![256, 256],
                classes: 10,
                alpha: 0.0,
                seed: 0,
                pcn_step: DEFAULT_PCN_STEP,
            },
            estimator: EstimatorSection {
                kind: EstimatorKind::NPoint,
                amplitude: 0.05,
                n_points: 4,
                periods: 5,
                steps_per_point: 60,
                path_presyn: false,
            },
            solver: SolverSection {
                settings: SolverSettings::default(),
                dense: false,
                linear_tolerance: 1e-10,
                linear_max_iter: 1000,
            },
            train: TrainSection {
                batch_size: t.batch_size,
                lr: t.lr,
                momentum: t.momentum,
                weight_decay: t.weight_decay,
                epochs: t.epochs,
                homeostasis: t.homeostasis,
                lambda_homeo: t.lambda_homeo,
                homeo_samples: t.homeo_samples,
                seed: t.seed,
                layer_lr_scales: None,
                diag_samples: t.diag_samples,
                checkpoint_every: 0,
            },
            data: DataSection {
                source: DataSource::Idx,
                train_images: fm.join("train-images-idx3-ubyte.gz"),
                train_labels: fm.join("train-labels-idx1-ubyte.gz"),
                val_images: fm.join("t10k-images-idx3-ubyte.gz"),
                val_labels: fm.join("t10k-labels-idx1-ubyte.gz"),
                train_limit: None,
                val_limit: None,
                synthetic_train: 2000,
                synthetic_val: 500,
                synthetic_classes: 2,
                synthetic_seed: 0,
            },
            output_dir: PathBuf::from("runs/default"),
            workers: 1,
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{value}`")))
}

fn list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value.split(',').map(|v| num(key, v.trim())).collect()
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn opt_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<Option<T>> {
    if value.is_empty() {
        Ok(None)
    } else {
        num(key, value).map(Some)
    }
}

fn opt_str<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or(String::new(), T::to_string)
}

impl RunConfig {
    /// Parses `text` on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    /// Reads a config file and applies the `OUTPUT_DIR` override.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse(&text)?;
        cfg.apply_env();
        Ok(cfg)
    }

    pub fn apply_env(&mut self) {
        if let Some(dir) = std::env::var_os("OUTPUT_DIR") {
            if !dir.is_empty() {
                self.output_dir = PathBuf::from(dir);
            }
        }
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let m = &mut self.model;
        let e = &mut self.estimator;
        let s = &mut self.solver;
        let t = &mut self.train;
        let d = &mut self.data;
        let flag = |v: &str| -> Result<bool> {
            match v {
                "true" => Ok(true),
                "false" => Ok(false),
                _ => Err(Error::Config(format!("`{key}`: expected true or false, got `{v}`"))),
            }
        };
        let path = |v: &str| PathBuf::from(v);
        match key {
            "model.kind" => m.kind = ModelKind::parse(value).map_err(|_| {
                Error::Config(format!("`{key}`: unknown model `{value}`"))
            })?,
            "model.input" => m.input = num(key, value)?,
            "model.layers" => m.layers = list(key, value)?,
            "model.classes" => m.classes = num(key, value)?,
            "model.alpha" => m.alpha = num(key, value)?,
            "model.seed" => m.seed = num(key, value)?,
            "model.pcn_step" => m.pcn_step = num(key, value)?,
            "estimator.kind" => e.kind = EstimatorKind::parse(value)?,
            "estimator.amplitude" => e.amplitude = num(key, value)?,
            "estimator.n_points" => e.n_points = num(key, value)?,
            "estimator.periods" => e.periods = num(key, value)?,
            "estimator.steps_per_point" => e.steps_per_point = num(key, value)?,
            "estimator.path_presyn" => e.path_presyn = flag(value)?,
            "solver.tolerance" => s.settings.tolerance = num(key, value)?,
            "solver.max_steps_free" => s.settings.max_steps_free = num(key, value)?,
            "solver.max_steps_nudge" => s.settings.max_steps_nudge = num(key, value)?,
            "solver.damping" => s.settings.damping = num(key, value)?,
            "solver.linear" => {
                s.dense = match value {
                    "dense" => true,
                    "iterative" => false,
                    _ => {
                        return Err(Error::Config(format!(
                            "`{key}`: expected dense or iterative, got `{value}`"
                        )))
                    }
                }
            }
            "solver.linear_tolerance" => s.linear_tolerance = num(key, value)?,
            "solver.linear_max_iter" => s.linear_max_iter = num(key, value)?,
            "train.batch_size" => t.batch_size = num(key, value)?,
            "train.lr" => t.lr = num(key, value)?,
            "train.momentum" => t.momentum = num(key, value)?,
            "train.weight_decay" => t.weight_decay = num(key, value)?,
            "train.epochs" => t.epochs = num(key, value)?,
            "train.homeostasis" => t.homeostasis = flag(value)?,
            "train.lambda_homeo" => t.lambda_homeo = num(key, value)?,
            "train.homeo_samples" => t.homeo_samples = num(key, value)?,
            "train.seed" => t.seed = num(key, value)?,
            "train.layer_lr_scales" => {
                t.layer_lr_scales = if value.is_empty() {
                    None
                } else {
                    Some(list(key, value)?)
                }
            }
            "train.diag_samples" => t.diag_samples = num(key, value)?,
            "train.checkpoint_every" => t.checkpoint_every = num(key, value)?,
            "data.source" => {
                d.source = match value {
                    "idx" => DataSource::Idx,
                    "synthetic" => DataSource::Synthetic,
                    _ => {
                        return Err(Error::Config(format!(
                            "`{key}`: expected idx or synthetic, got `{value}`"
                        )))
                    }
                }
            }
            "data.train_images" => d.train_images = path(value),
            "data.train_labels" => d.train_labels = path(value),
            "data.val_images" => d.val_images = path(value),
            "data.val_labels" => d.val_labels = path(value),
            "data.train_limit" => d.train_limit = opt_num(key, value)?,
            "data.val_limit" => d.val_limit = opt_num(key, value)?,
            "data.synthetic_train" => d.synthetic_train = num(key, value)?,
            "data.synthetic_val" => d.synthetic_val = num(key, value)?,
            "data.synthetic_classes" => d.synthetic_classes = num(key, value)?,
            "data.synthetic_seed" => d.synthetic_seed = num(key, value)?,
            "output.dir" => self.output_dir = path(value),
            "workers" => self.workers = num(key, value)?,
            other => return Err(Error::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Every key with its current value, in documentation order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let m = &self.model;
        let e = &self.estimator;
        let s = &self.solver;
        let t = &self.train;
        let d = &self.data;
        let p = |p: &Path| p.display().to_string();
        vec![
            ("model.kind", m.kind.name().to_string()),
            ("model.input", m.input.to_string()),
            ("model.layers", join(&m.layers)),
            ("model.classes", m.classes.to_string()),
            ("model.alpha", m.alpha.to_string()),
            ("model.seed", m.seed.to_string()),
            ("model.pcn_step", m.pcn_step.to_string()),
            ("estimator.kind", e.kind.name().to_string()),
            ("estimator.amplitude", e.amplitude.to_string()),
            ("estimator.n_points", e.n_points.to_string()),
            ("estimator.periods", e.periods.to_string()),
            ("estimator.steps_per_point", e.steps_per_point.to_string()),
            ("estimator.path_presyn", e.path_presyn.to_string()),
            ("solver.tolerance", s.settings.tolerance.to_string()),
            ("solver.max_steps_free", s.settings.max_steps_free.to_string()),
            ("solver.max_steps_nudge", s.settings.max_steps_nudge.to_string()),
            ("solver.damping", s.settings.damping.to_string()),
            ("solver.linear", if s.dense { "dense" } else { "iterative" }.to_string()),
            ("solver.linear_tolerance", s.linear_tolerance.to_string()),
            ("solver.linear_max_iter", s.linear_max_iter.to_string()),
            ("train.batch_size", t.batch_size.to_string()),
            ("train.lr", t.lr.to_string()),
            ("train.momentum", t.momentum.to_string()),
            ("train.weight_decay", t.weight_decay.to_string()),
            ("train.epochs", t.epochs.to_string()),
            ("train.homeostasis", t.homeostasis.to_string()),
            ("train.lambda_homeo", t.lambda_homeo.to_string()),
            ("train.homeo_samples", t.homeo_samples.to_string()),
            ("train.seed", t.seed.to_string()),
            ("train.layer_lr_scales", t.layer_lr_scales.as_deref().map_or(String::new(), join)),
            ("train.diag_samples", t.diag_samples.to_string()),
            ("train.checkpoint_every", t.checkpoint_every.to_string()),
            (
                "data.source",
                match d.source {
                    DataSource::Idx => "idx",
                    DataSource::Synthetic => "synthetic",
                }
                .to_string(),
            ),
            ("data.train_images", p(&d.train_images)),
            ("data.train_labels", p(&d.train_labels)),
            ("data.val_images", p(&d.val_images)),
            ("data.val_labels", p(&d.val_labels)),
            ("data.train_limit", opt_str(&d.train_limit)),
            ("data.val_limit", opt_str(&d.val_limit)),
            ("data.synthetic_train", d.synthetic_train.to_string()),
            ("data.synthetic_val", d.synthetic_val.to_string()),
            ("data.synthetic_classes", d.synthetic_classes.to_string()),
            ("data.synthetic_seed", d.synthetic_seed.to_string()),
            ("output.dir", p(&self.output_dir)),
            ("workers", self.workers.to_string()),
        ]
    }

    pub fn to_text(&self) -> String {
        self.entries()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn dims(&self) -> Dims {
        let classes = match self.data.source {
            DataSource::Idx => self.model.classes,
            DataSource::Synthetic => self.data.synthetic_classes,
        };
        Dims::new(self.model.input, self.model.layers.clone(), classes)
    }

    pub fn estimator(&self) -> Estimator {
        let e = &self.estimator;
        let mut p = match e.kind {
            EstimatorKind::Truth => return Estimator::GroundTruth,
            EstimatorKind::Rbp => return Estimator::Rbp,
            EstimatorKind::Classic => NudgeProtocol::classic(e.amplitude),
            EstimatorKind::NPoint => NudgeProtocol::npoint(e.amplitude, e.n_points),
            EstimatorKind::Continuous => NudgeProtocol::continuous(e.amplitude, e.n_points, e.periods),
        };
        p.steps_per_point = e.steps_per_point;
        p.path_presyn = e.path_presyn;
        Estimator::Ep(p)
    }

    pub fn linear_solver(&self) -> LinearSolver {
        if self.solver.dense {
            LinearSolver::Dense
        } else {
            LinearSolver::Iterative {
                tolerance: self.solver.linear_tolerance,
                max_iter: self.solver.linear_max_iter,
            }
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        let t = &self.train;
        TrainConfig {
            batch_size: t.batch_size,
            lr: t.lr,
            momentum: t.momentum,
            weight_decay: t.weight_decay,
            epochs: t.epochs,
            homeostasis: t.homeostasis,
            lambda_homeo: t.lambda_homeo,
            homeo_samples: t.homeo_samples,
            estimator: self.estimator(),
            seed: t.seed,
            layer_lr_scales: t.layer_lr_scales.clone(),
            solver: self.solver.settings,
            linear_solver: self.linear_solver(),
            diag_samples: t.diag_samples,
            workers: self.workers,
        }
    }

    /// Checks every value without touching the file system.
    pub fn validate(&self) -> Result<()> {
        self.dims().validate()?;
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&self.model.alpha) {
            return Err(Error::Config(format!(
                "`model.alpha` = {} outside [0, π/2]",
                self.model.alpha
            )));
        }
        if !(self.model.pcn_step > 0.0 && self.model.pcn_step.is_finite()) {
            return Err(Error::Config("`model.pcn_step` must be positive".into()));
        }
        if !self.solver.dense && !(self.solver.linear_tolerance > 0.0 && self.solver.linear_max_iter > 0) {
            return Err(Error::Config(
                "`solver.linear_tolerance` and `solver.linear_max_iter` must be positive".into(),
            ));
        }
        if self.data.source == DataSource::Synthetic
            && (self.data.synthetic_train == 0 || self.data.synthetic_val == 0)
        {
            return Err(Error::Config("synthetic set sizes must be ≥ 1".into()));
        }
        self.train_config().validate()
    }

    /// Freshly initialized network for this run.
    pub fn network(&self) -> Result<Network> {
        let mut net = Network::init(self.model.kind, self.dims(), self.model.seed, self.model.alpha)?;
        net.pcn_step = self.model.pcn_step;
        Ok(net)
    }

    /// Training and validation sets. Missing files surface as I/O errors
    /// naming the path.
    pub fn datasets(&self) -> Result<(Dataset, Dataset)> {
        let d = &self.data;
        let (train, val) = match d.source {
            DataSource::Idx => (
                Dataset::from_idx(
                    &d.train_images,
                    &d.train_labels,
                    self.model.classes,
                    d.train_limit,
                    Split::Train,
                )?,
                Dataset::from_idx(
                    &d.val_images,
                    &d.val_labels,
                    self.model.classes,
                    d.val_limit,
                    Split::Validation,
                )?,
            ),
            DataSource::Synthetic => {
                let all = synth_teacher(
                    d.synthetic_train + d.synthetic_val,
                    self.model.input,
                    d.synthetic_classes,
                    d.synthetic_seed,
                )?;
                (
                    all.slice(0, d.synthetic_train, Split::Train)?,
                    all.slice(d.synthetic_train, all.len(), Split::Validation)?,
                )
            }
        };
        if train.input_dim() != self.model.input {
            return Err(Error::Config(format!(
                "`model.input` = {} but the data has {} features",
                self.model.input,
                train.input_dim()
            )));
        }
        Ok((train, val))
    }
}
