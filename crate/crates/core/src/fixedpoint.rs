//! Fixed-point relaxation of discrete synchronous network dynamics.
//!
//! A network is described by its update map `G(u, β)`; the vector field is
//! `F(u) = G(u) − u`, so the fixed points of `G` are exactly the zeros of `F`
//! and `J_F = J_G − I`. Convergence is declared on the relative residual
//! `‖G(u) − u‖ / (1 + ‖u‖)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{norm, Scalar, C64};

/// Discrete synchronous update map over a layered state.
pub trait Dynamics: Sync {
    /// Sizes of the state layers, in order.
    fn layer_dims(&self) -> &[usize];

    /// Writes `G(u, β)` into `out`. Both slices have length `state_dim()`.
    fn update<T: Scalar>(&self, u: &[T], beta: T, out: &mut [T]);

    fn state_dim(&self) -> usize {
        self.layer_dims().iter().sum()
    }
}

/// Per-layer activations stored contiguously.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    values: Vec<C64>,
    layer_dims: Vec<usize>,
}

impl NetworkState {
    pub fn zeros(layer_dims: &[usize]) -> Self {
        Self {
            values: vec![C64::new(0.0, 0.0); layer_dims.iter().sum()],
            layer_dims: layer_dims.to_vec(),
        }
    }

    pub fn from_flat(layer_dims: &[usize], values: Vec<C64>) -> Result<Self> {
        let n: usize = layer_dims.iter().sum();
        if values.len() != n {
            return Err(Error::Shape(format!(
                "state of length {} for layer dims {layer_dims:?}",
                values.len()
            )));
        }
        if layer_dims.iter().any(|&d| d == 0) {
            return Err(Error::Shape(format!("empty layer in {layer_dims:?}")));
        }
        Ok(Self {
            values,
            layer_dims: layer_dims.to_vec(),
        })
    }

    pub fn from_real(layer_dims: &[usize], values: &[f64]) -> Result<Self> {
        Self::from_flat(
            layer_dims,
            values.iter().map(|&x| C64::new(x, 0.0)).collect(),
        )
    }

    pub fn from_layers(layers: Vec<Vec<C64>>) -> Result<Self> {
        let dims: Vec<usize> = layers.iter().map(Vec::len).collect();
        Self::from_flat(&dims, layers.into_iter().flatten().collect())
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Start offset of every layer, plus the total length.
    pub fn offsets(&self) -> Vec<usize> {
        layer_offsets(&self.layer_dims)
    }

    pub fn layer(&self, l: usize) -> &[C64] {
        let off = self.offsets();
        &self.values[off[l]..off[l + 1]]
    }

    pub fn layers(&self) -> Vec<&[C64]> {
        (0..self.layer_dims.len()).map(|l| self.layer(l)).collect()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.values
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    /// True when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.values.iter().all(|z| z.im == 0.0)
    }

    pub fn norm(&self) -> f64 {
        norm(&self.values)
    }

    pub fn distance(&self, other: &NetworkState) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

pub fn layer_offsets(dims: &[usize]) -> Vec<usize> {
    let mut off = Vec::with_capacity(dims.len() + 1);
    let mut acc = 0;
    off.push(0);
    for d in dims {
        acc += d;
        off.push(acc);
    }
    off
}

#[derive(Debug, Clone)]
pub struct FixedPointResult {
    pub state: NetworkState,
    /// Relative residual `‖G(u) − u‖ / (1 + ‖u‖)` at the returned state.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    /// Relative residual tolerance.
    pub tolerance: f64,
    /// Step budget for solves with β = 0.
    pub max_steps_free: usize,
    /// Step budget for solves with β ≠ 0.
    pub max_steps_nudge: usize,
    /// Relaxation factor ρ in `u ← (1 − ρ) u + ρ G(u)`; 1 is the plain update.
    pub damping: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_steps_free: 150,
            max_steps_nudge: 20,
            damping: 1.0,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::Invalid(format!("tolerance {} must be > 0", self.tolerance)));
        }
        if self.max_steps_free == 0 || self.max_steps_nudge == 0 {
            return Err(Error::Invalid("step budgets must be at least 1".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::Invalid(format!("damping {} not in (0, 1]", self.damping)));
        }
        Ok(())
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_budgets(mut self, free: usize, nudge: usize) -> Self {
        self.max_steps_free = free;
        self.max_steps_nudge = nudge;
        self
    }

    pub fn with_damping(mut self, damping: f64) -> Self {
        self.damping = damping;
        self
    }
}

/// Relative residual of `state` under the update map.
pub fn residual<D: Dynamics>(dynamics: &D, state: &NetworkState, beta: C64) -> Result<f64> {
    check_dims(dynamics, state)?;
    let u = state.as_slice();
    let mut out = vec![C64::new(0.0, 0.0); u.len()];
    dynamics.update(u, beta, &mut out);
    Ok(relative_defect(u, &out))
}

fn relative_defect<T: Scalar>(u: &[T], g: &[T]) -> f64 {
    let num: f64 = u.iter().zip(g).map(|(a, b)| (*b - *a).norm_sqr()).sum::<f64>().sqrt();
    num / (1.0 + norm(u))
}

fn check_dims<D: Dynamics>(dynamics: &D, state: &NetworkState) -> Result<()> {
    if state.layer_dims() != dynamics.layer_dims() {
        return Err(Error::Shape(format!(
            "state dims {:?} do not match model dims {:?}",
            state.layer_dims(),
            dynamics.layer_dims()
        )));
    }
    Ok(())
}

/// Iterates the update map from `init` until the residual drops below the
/// tolerance. The step budget is `max_steps_free` for β = 0 and
/// `max_steps_nudge` otherwise.
pub fn relax<D: Dynamics>(
    dynamics: &D,
    beta: C64,
    init: &NetworkState,
    settings: &SolverSettings,
) -> Result<FixedPointResult> {
    let budget = if beta == C64::new(0.0, 0.0) {
        settings.max_steps_free
    } else {
        settings.max_steps_nudge
    };
    relax_with_budget(dynamics, beta, init, budget, settings)
}

pub fn relax_with_budget<D: Dynamics>(
    dynamics: &D,
    beta: C64,
    init: &NetworkState,
    max_steps: usize,
    settings: &SolverSettings,
) -> Result<FixedPointResult> {
    settings.validate()?;
    check_dims(dynamics, init)?;
    if !beta.is_finite() {
        return Err(Error::Invalid(format!("non-finite nudge {beta}")));
    }
    let dims = init.layer_dims();
    if beta.im == 0.0 && init.is_real() {
        let mut u = init.real_parts();
        let (residual, iterations) = iterate(dynamics, &mut u, beta.re, max_steps, settings)?;
        let state = NetworkState::from_real(dims, &u)?;
        Ok(FixedPointResult {
            state,
            residual,
            iterations,
            converged: residual <= settings.tolerance,
        })
    } else {
        let mut u = init.as_slice().to_vec();
        let (residual, iterations) = iterate(dynamics, &mut u, beta, max_steps, settings)?;
        Ok(FixedPointResult {
            state: NetworkState::from_flat(dims, u)?,
            residual,
            iterations,
            converged: residual <= settings.tolerance,
        })
    }
}

fn iterate<D: Dynamics, T: Scalar>(
    dynamics: &D,
    u: &mut [T],
    beta: T,
    max_steps: usize,
    settings: &SolverSettings,
) -> Result<(f64, usize)> {
    let mut g = vec![T::zero(); u.len()];
    let rho = settings.damping;
    let mut steps = 0;
    loop {
        dynamics.update(u, beta, &mut g);
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::Diverged { iteration: steps });
        }
        let res = relative_defect(u, &g);
        if res <= settings.tolerance || steps == max_steps {
            return Ok((res, steps));
        }
        if rho == 1.0 {
            u.copy_from_slice(&g);
        } else {
            for (a, b) in u.iter_mut().zip(&g) {
                *a = *a * (1.0 - rho) + *b * rho;
            }
        }
        steps += 1;
    }
}

/// Solves the free phase first and warm-starts every following nudge from the
/// previous solution.
pub fn relax_path<D: Dynamics>(
    dynamics: &D,
    betas: &[C64],
    settings: &SolverSettings,
) -> Result<Vec<FixedPointResult>> {
    let mut out: Vec<FixedPointResult> = Vec::with_capacity(betas.len());
    for (index, &beta) in betas.iter().enumerate() {
        let res = match out.last() {
            None => relax_with_budget(
                dynamics,
                beta,
                &NetworkState::zeros(dynamics.layer_dims()),
                settings.max_steps_free,
                settings,
            ),
            Some(prev) => relax(dynamics, beta, &prev.state, settings),
        };
        out.push(res.map_err(|e| Error::PathSolve {
            index,
            source: Box::new(e),
        })?);
    }
    Ok(out)
}
