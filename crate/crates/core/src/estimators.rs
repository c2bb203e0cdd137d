//! Neuronal error-vector and gradient estimators.
//!
//! * one-sided (classic) EP: `(u*_β − u*₀)/β`;
//! * N-point holomorphic EP: `δ̂ = (1/(N|β|)) Σ_k u*_{β_k} e^{−2iπk/N}` with
//!   `β_k = |β| e^{2iπk/N}`;
//! * continuous-time holomorphic EP: the same contour average accumulated
//!   along one uninterrupted trajectory while β sweeps the circle;
//! * oracles: implicit differentiation `∂βu* = −J_F⁻¹ ∂F/∂β` and recurrent
//!   backpropagation `δ = −J_F⁻ᵀ ∂F/∂β`.
//!
//! The EP gradient of the network parameters is `−Re((∂F/∂θ)ᵀ δ̂)`; the
//! readout receives its direct cross-entropy gradient.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixedpoint::{
    layer_offsets, relax, relax_path, residual, Dynamics, FixedPointResult, NetworkState,
    SolverSettings,
};
use crate::linalg::{cosine, cosine_complex, Lu, Matrix};
use crate::models::{one_hot, Bound, GradientEstimate, Network, Params, PresynPath};
use crate::scalar::{norm, C64};

/// Condition estimate above which dense solves are refused.
pub const MAX_CONDITION: f64 = 1e12;

/// Complex vector over all state units with per-layer views.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorVector {
    values: Vec<C64>,
    layer_dims: Vec<usize>,
}

impl ErrorVector {
    pub fn new(layer_dims: &[usize], values: Vec<C64>) -> Result<Self> {
        if layer_dims.iter().sum::<usize>() != values.len() {
            return Err(Error::Shape(format!(
                "{} values for layers {layer_dims:?}",
                values.len()
            )));
        }
        if values.iter().any(|z| !z.is_finite()) {
            return Err(Error::Invalid("non-finite error vector".into()));
        }
        Ok(Self {
            values,
            layer_dims: layer_dims.to_vec(),
        })
    }

    pub fn from_real(layer_dims: &[usize], values: &[f64]) -> Result<Self> {
        Self::new(layer_dims, values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.values
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    pub fn offsets(&self) -> Vec<usize> {
        layer_offsets(&self.layer_dims)
    }

    pub fn layer(&self, l: usize) -> &[C64] {
        let off = self.offsets();
        &self.values[off[l]..off[l + 1]]
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    pub fn norm(&self) -> f64 {
        norm(&self.values)
    }

    /// `‖self − other‖ / ‖other‖`.
    pub fn relative_error(&self, other: &ErrorVector) -> f64 {
        let diff: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        diff / other.norm().max(f64::MIN_POSITIVE)
    }

    pub fn cosine(&self, other: &ErrorVector) -> f64 {
        cosine_complex(&self.values, &other.values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NudgeMode {
    Classic,
    NPoint,
    Continuous,
}

/// How the nudge is applied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NudgeProtocol {
    pub amplitude: f64,
    pub mode: NudgeMode,
    pub n_points: usize,
    pub periods: usize,
    pub steps_per_point: usize,
    /// N-point mode only: average the presynaptic term over the N nudged
    /// fixed points instead of using the free fixed point.
    pub path_presyn: bool,
}

impl NudgeProtocol {
    pub fn classic(amplitude: f64) -> Self {
        Self {
            amplitude,
            mode: NudgeMode::Classic,
            n_points: 1,
            periods: 1,
            steps_per_point: 60,
            path_presyn: false,
        }
    }

    pub fn npoint(amplitude: f64, n_points: usize) -> Self {
        Self {
            mode: NudgeMode::NPoint,
            n_points,
            ..Self::classic(amplitude)
        }
    }

    pub fn continuous(amplitude: f64, n_points: usize, periods: usize) -> Self {
        Self {
            mode: NudgeMode::Continuous,
            n_points,
            periods,
            ..Self::classic(amplitude)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(Error::Invalid(format!(
                "teaching amplitude {} must be positive",
                self.amplitude
            )));
        }
        match self.mode {
            NudgeMode::Classic => Ok(()),
            NudgeMode::NPoint | NudgeMode::Continuous if self.n_points < 2 => {
                Err(Error::Invalid(format!("need N ≥ 2 points, got {}", self.n_points)))
            }
            NudgeMode::Continuous if self.periods == 0 || self.steps_per_point == 0 => Err(
                Error::Invalid("continuous mode needs periods ≥ 1 and steps ≥ 1".into()),
            ),
            _ => Ok(()),
        }
    }
}

/// How the implicit-differentiation oracles solve their linear systems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LinearSolver {
    /// Partial-pivot LU on the dense Jacobian.
    Dense,
    /// Fixed-point iteration `x ← J_G x + ℓ`, falling back to the dense solve
    /// if it has not reached `tolerance` (relative) after `max_iter` sweeps.
    Iterative { tolerance: f64, max_iter: usize },
}

impl Default for LinearSolver {
    fn default() -> Self {
        LinearSolver::Iterative {
            tolerance: 1e-10,
            max_iter: 1000,
        }
    }
}

/// Error-vector estimator used for training and diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Estimator {
    /// Implicit-differentiation `∂βu*` contracted with the presynaptic term.
    GroundTruth,
    /// Recurrent backpropagation `δ`.
    Rbp,
    /// Equilibrium propagation with the given nudge.
    Ep(NudgeProtocol),
}

impl Estimator {
    pub fn validate(&self) -> Result<()> {
        match self {
            Estimator::Ep(p) => p.validate(),
            _ => Ok(()),
        }
    }
}

/// Result of one estimator call on one sample.
#[derive(Debug, Clone)]
pub struct Estimate {
    pub delta: ErrorVector,
    /// Network gradient (EP convention) plus the direct readout gradient.
    pub grad: GradientEstimate,
    /// Free fixed point. Continuous mode has no free phase; there it is
    /// relaxed separately for the readout gradient and metrics.
    pub free: FixedPointResult,
    /// Whether every fixed-point solve reached the tolerance.
    pub converged: bool,
    /// `δ̂` at the end of every period (continuous mode only).
    pub snapshots: Vec<ErrorVector>,
}

/// `(u*_β − u*₀)/β`.
pub fn classic_ep(free: &FixedPointResult, nudged: &FixedPointResult, beta: f64) -> Result<ErrorVector> {
    if !free.converged || !nudged.converged {
        return Err(Error::NotConverged {
            residual: free.residual.max(nudged.residual),
            iterations: free.iterations.max(nudged.iterations),
        });
    }
    classic_unchecked(free, nudged, beta)
}

fn classic_unchecked(free: &FixedPointResult, nudged: &FixedPointResult, beta: f64) -> Result<ErrorVector> {
    if beta == 0.0 || !beta.is_finite() {
        return Err(Error::Invalid(format!("classic estimate needs β ≠ 0, got {beta}")));
    }
    let values = nudged
        .state
        .as_slice()
        .iter()
        .zip(free.state.as_slice())
        .map(|(a, b)| (a - b) / beta)
        .collect();
    ErrorVector::new(free.state.layer_dims(), values)
}

/// Points `β_k = |β| e^{2iπk/N}`, k = 0..N.
pub fn circle_points(amplitude: f64, n: usize) -> Vec<C64> {
    (0..n)
        .map(|k| C64::from_polar(amplitude, 2.0 * PI * k as f64 / n as f64))
        .collect()
}

/// Discrete Cauchy sum `(1/(N|β|)) Σ_k s_k e^{−2iπk/N}` for samples `s_k`
/// taken at `β_k = |β| e^{2iπk/N}`.
pub fn cauchy_sum(samples: &[&[C64]], amplitude: f64) -> Vec<C64> {
    let n = samples.len();
    let dim = samples.first().map_or(0, |s| s.len());
    let mut out = vec![C64::new(0.0, 0.0); dim];
    for (k, s) in samples.iter().enumerate() {
        let w = C64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64);
        for (o, &x) in out.iter_mut().zip(s.iter()) {
            *o += x * w;
        }
    }
    let scale = 1.0 / (n as f64 * amplitude);
    out.iter_mut().for_each(|o| *o *= scale);
    out
}

/// Scalar version of [`cauchy_sum`] for a closed-form `u*(β)`.
pub fn cauchy_derivative(f: impl Fn(C64) -> C64, amplitude: f64, n: usize) -> C64 {
    let vals: Vec<[C64; 1]> = circle_points(amplitude, n).into_iter().map(|b| [f(b)]).collect();
    let refs: Vec<&[C64]> = vals.iter().map(|v| v.as_slice()).collect();
    cauchy_sum(&refs, amplitude)[0]
}

/// Assembles `−Re((∂F/∂θ)ᵀ δ̂)` plus the readout gradient at the free point.
fn assemble(bound: &Bound<'_>, presyn: &Params<C64>, free: &[f64]) -> GradientEstimate {
    let mut g = GradientEstimate::from_complex(presyn).scaled(-1.0);
    g.grads.axpy(1.0, &bound.readout_grad(free));
    g
}

fn presyn_at_free(bound: &Bound<'_>, free: &[f64], delta: &[C64]) -> Result<Params<C64>> {
    let u: Vec<C64> = free.iter().map(|&x| C64::new(x, 0.0)).collect();
    bound.presyn_grad(&u, delta)
}

/// Free phase, then the N circle points warm-started from each other.
pub fn holo_ep_npoint(
    bound: &Bound<'_>,
    amplitude: f64,
    n: usize,
    path_presyn: bool,
    settings: &SolverSettings,
) -> Result<Estimate> {
    NudgeProtocol::npoint(amplitude, n).validate()?;
    let mut betas = vec![C64::new(0.0, 0.0)];
    betas.extend(circle_points(amplitude, n));
    let path = relax_path(bound, &betas, settings).map_err(|e| match e {
        Error::PathSolve { index, source } if index > 0 => Error::PathSolve {
            index: index - 1,
            source,
        },
        other => other,
    })?;
    let converged = path.iter().all(|r| r.converged);
    let free = path[0].clone();
    let samples: Vec<&[C64]> = path[1..].iter().map(|r| r.state.as_slice()).collect();
    let delta = ErrorVector::new(free.state.layer_dims(), cauchy_sum(&samples, amplitude))?;
    let u0 = free.state.real_parts();
    let presyn = if path_presyn {
        let mut acc = PresynPath::new(bound);
        for s in &samples {
            acc.push(bound, s);
        }
        acc.contract(bound, delta.as_slice())?
    } else {
        presyn_at_free(bound, &u0, delta.as_slice())?
    };
    let grad = assemble(bound, &presyn, &u0);
    Ok(Estimate {
        delta,
        grad,
        free,
        converged,
        snapshots: Vec::new(),
    })
}

/// One-sided EP with a real nudge.
pub fn holo_ep_classic(bound: &Bound<'_>, beta: f64, settings: &SolverSettings) -> Result<Estimate> {
    let path = relax_path(bound, &[C64::new(0.0, 0.0), C64::new(beta, 0.0)], settings)?;
    let converged = path.iter().all(|r| r.converged);
    let delta = classic_unchecked(&path[0], &path[1], beta)?;
    let u0 = path[0].state.real_parts();
    let presyn = presyn_at_free(bound, &u0, delta.as_slice())?;
    Ok(Estimate {
        grad: assemble(bound, &presyn, &u0),
        delta,
        free: path[0].clone(),
        converged,
        snapshots: Vec::new(),
    })
}

/// Continuous sweep of β around the circle from the zero state.
///
/// Each period holds β at each of the N points for `steps_per_point`
/// updates. After every update the state, weighted by `e^{−2iπk/N}`, is added
/// to a running sum that is divided by the number of elapsed updates and by
/// `|β|`; the presynaptic term is averaged over the same trajectory.
/// A snapshot of `δ̂` is taken at the end of every period. The free fixed
/// point is relaxed separately and only used for the readout gradient.
pub fn holo_ep_continuous(
    bound: &Bound<'_>,
    protocol: &NudgeProtocol,
    settings: &SolverSettings,
) -> Result<Estimate> {
    protocol.validate()?;
    if protocol.mode != NudgeMode::Continuous {
        return Err(Error::Invalid("protocol is not continuous".into()));
    }
    settings.validate()?;
    let dims = bound.layer_dims().to_vec();
    let n = protocol.n_points;
    let betas = circle_points(protocol.amplitude, n);
    let weights: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64))
        .collect();
    let dim = bound.state_dim();
    let mut u = vec![C64::new(0.0, 0.0); dim];
    let mut g = vec![C64::new(0.0, 0.0); dim];
    let mut acc = vec![C64::new(0.0, 0.0); dim];
    let mut path = PresynPath::new(bound);
    let mut steps = 0usize;
    let mut snapshots = Vec::with_capacity(protocol.periods);
    let rho = settings.damping;
    let normalize = |acc: &[C64], steps: usize| -> Vec<C64> {
        let s = 1.0 / (steps as f64 * protocol.amplitude);
        acc.iter().map(|&a| a * s).collect()
    };
    for period in 0..protocol.periods {
        for point in 0..n {
            for _ in 0..protocol.steps_per_point {
                bound.update(&u, betas[point], &mut g);
                if g.iter().any(|z| !z.is_finite()) {
                    return Err(Error::SweepDiverged { period, point });
                }
                for (a, b) in u.iter_mut().zip(&g) {
                    *a = *a * (1.0 - rho) + *b * rho;
                }
                for (a, &x) in acc.iter_mut().zip(&u) {
                    *a += x * weights[point];
                }
                path.push(bound, &u);
                steps += 1;
            }
        }
        snapshots.push(ErrorVector::new(&dims, normalize(&acc, steps))?);
    }
    let delta = snapshots.last().cloned().expect("at least one period");
    let free = relax(bound, C64::new(0.0, 0.0), &NetworkState::zeros(&dims), settings)?;
    let presyn = path.contract(bound, delta.as_slice())?;
    let u0 = free.state.real_parts();
    // Residual of the final nudged point, as a coarse convergence flag.
    let last = NetworkState::from_flat(&dims, u)?;
    let converged = free.converged
        && residual(bound, &last, betas[n - 1])? <= settings.tolerance.max(1e-6);
    Ok(Estimate {
        grad: assemble(bound, &presyn, &u0),
        delta,
        free,
        converged,
        snapshots,
    })
}

/// Dispatches on the nudge mode.
pub fn holo_ep(bound: &Bound<'_>, protocol: &NudgeProtocol, settings: &SolverSettings) -> Result<Estimate> {
    protocol.validate()?;
    match protocol.mode {
        NudgeMode::Classic => holo_ep_classic(bound, protocol.amplitude, settings),
        NudgeMode::NPoint => holo_ep_npoint(
            bound,
            protocol.amplitude,
            protocol.n_points,
            protocol.path_presyn,
            settings,
        ),
        NudgeMode::Continuous => holo_ep_continuous(bound, protocol, settings),
    }
}

fn dense_factor(bound: &Bound<'_>, free: &[f64]) -> Result<Lu> {
    let j = bound.jacobian_dense(free)?;
    let lu = Lu::factor(&j)?;
    let estimate = lu.condition_estimate();
    if !(estimate <= MAX_CONDITION) {
        return Err(Error::IllConditioned { estimate });
    }
    Ok(lu)
}

/// Solves `x = A x + ℓ` by iteration, where `A` is `J_G` or `J_Gᵀ`.
fn iterate_linear(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    rhs: &[f64],
    tolerance: f64,
    max_iter: usize,
) -> Option<Vec<f64>> {
    let scale = norm(rhs);
    if scale == 0.0 {
        return Some(vec![0.0; rhs.len()]);
    }
    let mut x = rhs.to_vec();
    for _ in 0..max_iter {
        let mut next = apply(&x);
        for (n, r) in next.iter_mut().zip(rhs) {
            *n += r;
        }
        let diff: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        x = next;
        if !diff.is_finite() {
            return None;
        }
        if diff <= tolerance * norm(&x).max(scale) {
            return Some(x);
        }
    }
    None
}

/// `∂βu* = −J_F⁻¹ ∂F/∂β` at the free fixed point.
pub fn ground_truth_dudbeta(bound: &Bound<'_>, free: &[f64], solver: LinearSolver) -> Result<ErrorVector> {
    let ell = bound.teaching_direction(free);
    let x = match solver {
        LinearSolver::Iterative { tolerance, max_iter } => {
            iterate_linear(|v| bound.jvp_update(free, v), &ell, tolerance, max_iter)
        }
        LinearSolver::Dense => None,
    };
    let x = match x {
        Some(x) => x,
        None => dense_factor(bound, free)?.solve(&ell).into_iter().map(|v| -v).collect(),
    };
    ErrorVector::from_real(bound.layer_dims(), &x)
}

/// RBP neuronal error `δ = −J_F⁻ᵀ ∂F/∂β`.
pub fn rbp_delta(bound: &Bound<'_>, free: &[f64], solver: LinearSolver) -> Result<ErrorVector> {
    let ell = bound.teaching_direction(free);
    let x = match solver {
        LinearSolver::Iterative { tolerance, max_iter } => {
            iterate_linear(|v| bound.vjp_update(free, v), &ell, tolerance, max_iter)
        }
        LinearSolver::Dense => None,
    };
    let x = match x {
        Some(x) => x,
        None => dense_factor(bound, free)?
            .solve_transpose(&ell)
            .into_iter()
            .map(|v| -v)
            .collect(),
    };
    ErrorVector::from_real(bound.layer_dims(), &x)
}

/// `J⁻¹ Jᵀ δ`, which maps the RBP error onto `∂βu*`.
pub fn asymmetry_transport(j: &Matrix, delta: &[f64]) -> Result<Vec<f64>> {
    if j.rows() != delta.len() {
        return Err(Error::Shape(format!(
            "{}x{} Jacobian against vector of length {}",
            j.rows(),
            j.cols(),
            delta.len()
        )));
    }
    let lu = Lu::factor(j)?;
    Ok(lu.solve(&j.matvec_t(delta)))
}

/// `−J_F⁻ᵀ g` for an arbitrary output-sensitivity vector `g`.
pub fn adjoint_solve(j: &Matrix, g: &[f64]) -> Result<Vec<f64>> {
    let lu = Lu::factor(j)?;
    Ok(lu.solve_transpose(g).into_iter().map(|v| -v).collect())
}

/// Relaxes the free phase and runs the requested estimator.
pub fn estimate(
    bound: &Bound<'_>,
    estimator: &Estimator,
    settings: &SolverSettings,
    solver: LinearSolver,
) -> Result<Estimate> {
    estimator.validate()?;
    match estimator {
        Estimator::Ep(p) => holo_ep(bound, p, settings),
        Estimator::GroundTruth | Estimator::Rbp => {
            let dims = bound.layer_dims().to_vec();
            let free = relax(bound, C64::new(0.0, 0.0), &NetworkState::zeros(&dims), settings)?;
            let u0 = free.state.real_parts();
            let delta = if *estimator == Estimator::GroundTruth {
                ground_truth_dudbeta(bound, &u0, solver)?
            } else {
                rbp_delta(bound, &u0, solver)?
            };
            let presyn = presyn_at_free(bound, &u0, delta.as_slice())?;
            Ok(Estimate {
                grad: assemble(bound, &presyn, &u0),
                converged: free.converged,
                delta,
                free,
                snapshots: Vec::new(),
            })
        }
    }
}

/// One row of the amplitude sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub amplitude: f64,
    /// 1 denotes the one-sided estimator.
    pub n_points: usize,
    /// Layer index, or `None` for the whole state.
    pub layer: Option<usize>,
    pub cosine_vs_rbp: f64,
    pub cosine_vs_truth: f64,
    pub imag_diag: f64,
}

pub const SWEEP_CSV_HEADER: &str = "amplitude,n_points,layer,cosine_vs_rbp,cosine_vs_truth,imag_diag";

impl SweepRow {
    pub fn csv(&self) -> String {
        let layer = self.layer.map_or("all".to_string(), |l| l.to_string());
        format!(
            "{},{},{},{:.12},{:.12},{:.6e}",
            self.amplitude, self.n_points, layer, self.cosine_vs_rbp, self.cosine_vs_truth, self.imag_diag
        )
    }
}

/// Batch-averaged cosines of every estimator configuration against RBP and
/// the implicit-differentiation truth. `n_points == 1` selects the one-sided
/// estimator; larger values the N-point contour.
pub fn beta_sweep(
    net: &Network,
    batch: &[(Vec<f64>, usize)],
    amplitudes: &[f64],
    ns: &[usize],
    settings: &SolverSettings,
) -> Result<Vec<SweepRow>> {
    if batch.is_empty() {
        return Err(Error::Invalid("empty sweep batch".into()));
    }
    let nl = net.dims.layers.len();
    struct Sample {
        truth: ErrorVector,
        rbp: ErrorVector,
        estimates: Vec<(f64, usize, ErrorVector)>,
    }
    let mut samples = Vec::with_capacity(batch.len());
    for (x, label) in batch {
        let y = one_hot(*label, net.dims.classes);
        let bound = net.bind(x, &y)?;
        let dims = bound.layer_dims().to_vec();
        let free = relax(&bound, C64::new(0.0, 0.0), &NetworkState::zeros(&dims), settings)?;
        let u0 = free.state.real_parts();
        let truth = ground_truth_dudbeta(&bound, &u0, LinearSolver::Dense)?;
        let rbp = rbp_delta(&bound, &u0, LinearSolver::Dense)?;
        let mut estimates = Vec::new();
        for &a in amplitudes {
            for &n in ns {
                let est = if n == 1 {
                    holo_ep_classic(&bound, a, settings)?
                } else {
                    holo_ep_npoint(&bound, a, n, false, settings)?
                };
                estimates.push((a, n, est.delta));
            }
        }
        samples.push(Sample {
            truth,
            rbp,
            estimates,
        });
    }
    let mut rows = Vec::new();
    let count = samples.len() as f64;
    let configs: Vec<(f64, usize)> = samples[0].estimates.iter().map(|e| (e.0, e.1)).collect();
    for (c, &(amplitude, n_points)) in configs.iter().enumerate() {
        for layer in std::iter::once(None).chain((0..nl).map(Some)) {
            let mut cr = 0.0;
            let mut ct = 0.0;
            let mut imag = 0.0f64;
            for s in &samples {
                let est = &s.estimates[c].2;
                let pick = |v: &ErrorVector| -> Vec<f64> {
                    match layer {
                        None => v.real_parts(),
                        Some(l) => v.layer(l).iter().map(|z| z.re).collect(),
                    }
                };
                let e = pick(est);
                cr += cosine(&e, &pick(&s.rbp));
                ct += cosine(&e, &pick(&s.truth));
                imag = imag.max(est.max_imag());
            }
            rows.push(SweepRow {
                amplitude,
                n_points,
                layer,
                cosine_vs_rbp: cr / count,
                cosine_vs_truth: ct / count,
                imag_diag: imag,
            });
        }
    }
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv());
        out.push('\n');
    }
    out
}
