//! Concrete layered networks and their analytic derivative contractions.
//!
//! Four architectures share one parameter layout ([`Params`]):
//!
//! * [`ModelKind::ReciprocalMLP`]: independent forward and backward weights,
//!   `u_l ← W_f σ(u_{l−1}) + W_b σ(u_{l+1}) + b_l`.
//! * [`ModelKind::HopfieldMLP`]: tied weights in energy-gradient form,
//!   `u_l ← σ'(u_l) ⊙ (W σ(u_{l−1}) + Wᵀ σ(u_{l+1}) + b_l)`, whose Jacobian is
//!   symmetric at every state.
//! * [`ModelKind::DirectFeedback`]: feed-forward chain with the output fed back
//!   into the first layer.
//! * [`ModelKind::PCN`]: predictive coding with error neurons
//!   `ε_l = u_l − W_f σ(u_{l−1}) − b_l`, integrated by one Euler step per update.
//!
//! The output layer receives the nudge `β w_roᵀ (y − softmax(w_ro σ(u_L) + b_ro))`
//! (scaled by `σ'(u_L)` in the energy-based variant).

mod activation;
mod checkpoint;
mod linear;
mod params;
mod presyn;

use serde::{Deserialize, Serialize};

pub use activation::{sigma, sigma_prime, sigma_prime_vec, sigma_second, sigma_vec, softmax};
pub use checkpoint::{Checkpoint, CHECKPOINT_VERSION};
pub use linear::DEFAULT_DENSE_LIMIT;
pub use params::{
    blend_backward, init_params, weight_angle_deg, GradientEstimate, ModelParams, Params,
    TensorMut, TensorRef,
};
pub use presyn::{HopfieldSplit, PresynPath};

use crate::error::{Error, Result};
use crate::fixedpoint::{layer_offsets, Dynamics, NetworkState};
use crate::scalar::{Scalar, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    ReciprocalMLP,
    HopfieldMLP,
    DirectFeedback,
    PCN,
}

impl ModelKind {
    pub fn has_backward_weights(self) -> bool {
        matches!(self, ModelKind::ReciprocalMLP | ModelKind::PCN)
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::ReciprocalMLP => "reciprocal",
            ModelKind::HopfieldMLP => "hopfield",
            ModelKind::DirectFeedback => "direct_feedback",
            ModelKind::PCN => "pcn",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "reciprocal" | "ReciprocalMLP" => Ok(ModelKind::ReciprocalMLP),
            "hopfield" | "HopfieldMLP" => Ok(ModelKind::HopfieldMLP),
            "direct_feedback" | "DirectFeedback" => Ok(ModelKind::DirectFeedback),
            "pcn" | "PCN" => Ok(ModelKind::PCN),
            other => Err(Error::Invalid(format!("unknown model kind `{other}`"))),
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Input size, state layer sizes (hidden layers then output), class count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub input: usize,
    pub layers: Vec<usize>,
    pub classes: usize,
}

impl Dims {
    pub fn new(input: usize, layers: Vec<usize>, classes: usize) -> Self {
        Self {
            input,
            layers,
            classes,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input == 0 || self.classes == 0 || self.layers.is_empty() {
            return Err(Error::Invalid(format!("degenerate dims {self:?}")));
        }
        if self.layers.iter().any(|&d| d == 0) {
            return Err(Error::Invalid(format!("empty layer in {:?}", self.layers)));
        }
        Ok(())
    }

    pub fn state_dim(&self) -> usize {
        self.layers.iter().sum()
    }
}

/// Nudge amplitude and one-hot target.
#[derive(Debug, Clone, PartialEq)]
pub struct NudgeSpec {
    pub beta: C64,
    pub target: Vec<f64>,
}

impl NudgeSpec {
    pub fn new(beta: C64, target: Vec<f64>) -> Result<Self> {
        let ones = target.iter().filter(|&&v| v == 1.0).count();
        let zeros = target.iter().filter(|&&v| v == 0.0).count();
        if ones != 1 || ones + zeros != target.len() {
            return Err(Error::Invalid("target must be one-hot".into()));
        }
        if !beta.is_finite() {
            return Err(Error::Invalid("non-finite nudge".into()));
        }
        Ok(Self { beta, target })
    }
}

/// A network architecture together with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub kind: ModelKind,
    pub dims: Dims,
    pub params: ModelParams,
    /// Euler step of the predictive-coding value neurons.
    pub pcn_step: f64,
}

pub const DEFAULT_PCN_STEP: f64 = 0.5;

impl Network {
    pub fn new(kind: ModelKind, dims: Dims, params: ModelParams) -> Result<Self> {
        dims.validate()?;
        let net = Self {
            kind,
            dims,
            params,
            pcn_step: DEFAULT_PCN_STEP,
        };
        net.check_shapes()?;
        Ok(net)
    }

    pub fn init(kind: ModelKind, dims: Dims, seed: u64, alpha: f64) -> Result<Self> {
        let params = init_params(kind, &dims, seed, alpha)?;
        Self::new(kind, dims, params)
    }

    pub fn with_params(&self, params: ModelParams) -> Self {
        Self {
            params,
            ..self.clone()
        }
    }

    pub fn check_shapes(&self) -> Result<()> {
        let expect: ModelParams = Params::zeros(self.kind, &self.dims);
        let got = self.params.tensors();
        let want = expect.tensors();
        if got.len() != want.len() {
            return Err(Error::Shape(format!(
                "{} tensors for a {} network, expected {}",
                got.len(),
                self.kind,
                want.len()
            )));
        }
        for (g, w) in got.iter().zip(&want) {
            if g.name != w.name || g.shape != w.shape {
                return Err(Error::Shape(format!(
                    "tensor {} has shape {:?}, expected {} {:?}",
                    g.name, g.shape, w.name, w.shape
                )));
            }
        }
        if !self.params.is_finite() {
            return Err(Error::Invalid("non-finite parameter".into()));
        }
        Ok(())
    }

    /// Fixes the input and the target, producing an update map.
    pub fn bind<'a>(&'a self, input: &'a [f64], target: &'a [f64]) -> Result<Bound<'a>> {
        if input.len() != self.dims.input {
            return Err(Error::Shape(format!(
                "input of length {}, expected {}",
                input.len(),
                self.dims.input
            )));
        }
        if target.len() != self.dims.classes {
            return Err(Error::Shape(format!(
                "target of length {}, expected {}",
                target.len(),
                self.dims.classes
            )));
        }
        let mut drive = self.params.b[0].clone();
        self.params.w_in.matvec_add(input, &mut drive);
        Ok(Bound {
            net: self,
            input,
            target,
            drive,
            offsets: layer_offsets(&self.dims.layers),
        })
    }

    pub fn state_dim(&self) -> usize {
        self.dims.state_dim()
    }
}

/// Network with a fixed input and target.
#[derive(Debug, Clone)]
pub struct Bound<'a> {
    pub net: &'a Network,
    pub input: &'a [f64],
    pub target: &'a [f64],
    /// `w_in x + b_0`.
    drive: Vec<f64>,
    offsets: Vec<usize>,
}

impl Bound<'_> {
    pub fn kind(&self) -> ModelKind {
        self.net.kind
    }

    pub fn params(&self) -> &ModelParams {
        &self.net.params
    }

    pub fn num_layers(&self) -> usize {
        self.net.dims.layers.len()
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    fn split<'s, T>(&self, u: &'s [T]) -> Vec<&'s [T]> {
        self.offsets.windows(2).map(|w| &u[w[0]..w[1]]).collect()
    }

    fn split_mut<'s, T>(&self, u: &'s mut [T]) -> Vec<&'s mut [T]> {
        let mut out = Vec::with_capacity(self.num_layers());
        let mut rest = u;
        for w in self.offsets.windows(2) {
            let (head, tail) = rest.split_at_mut(w[1] - w[0]);
            out.push(head);
            rest = tail;
        }
        out
    }

    /// Readout logits `w_ro σ(u_L) + b_ro`.
    pub fn logits<T: Scalar>(&self, u: &[T]) -> Vec<T> {
        let last = self.split(u)[self.num_layers() - 1];
        let v = sigma_vec(last);
        let mut z: Vec<T> = self.params().b_ro.iter().map(|&b| T::from_re(b)).collect();
        self.params().w_ro.matvec_add(&v, &mut z);
        z
    }

    /// `y − softmax(logits)`.
    pub fn output_error<T: Scalar>(&self, u: &[T]) -> Vec<T> {
        let s = softmax(&self.logits(u));
        self.target
            .iter()
            .zip(s)
            .map(|(&y, si)| T::from_re(y) - si)
            .collect()
    }

    /// Nudge direction on the output layer, `w_roᵀ (y − softmax)`.
    pub fn nudge_vector<T: Scalar>(&self, u: &[T]) -> Vec<T> {
        self.params().w_ro.matvec_t(&self.output_error(u))
    }

    /// `∂G/∂β`, which equals `∂F/∂β`: nonzero only on the output layer.
    pub fn teaching_direction(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        let n = self.nudge_vector(u);
        let l = self.num_layers() - 1;
        let off = self.offsets[l];
        let last = &u[off..];
        for (i, ni) in n.into_iter().enumerate() {
            out[off + i] = match self.kind() {
                ModelKind::HopfieldMLP => sigma_prime(last[i]) * ni,
                ModelKind::PCN => self.net.pcn_step * ni,
                _ => ni,
            };
        }
        out
    }

    /// One synchronous update of every layer.
    pub fn step(&self, state: &NetworkState, beta: C64) -> Result<NetworkState> {
        if state.layer_dims() != self.net.dims.layers.as_slice() {
            return Err(Error::Shape(format!(
                "state dims {:?}, model dims {:?}",
                state.layer_dims(),
                self.net.dims.layers
            )));
        }
        let mut out = vec![C64::new(0.0, 0.0); state.len()];
        self.update(state.as_slice(), beta, &mut out);
        if out.iter().any(|z| !z.is_finite()) {
            return Err(Error::Diverged { iteration: 0 });
        }
        NetworkState::from_flat(state.layer_dims(), out)
    }

    fn update_layered<T: Scalar>(&self, u: &[T], beta: T, out: &mut [T]) {
        let p = self.params();
        let nl = self.num_layers();
        let ul = self.split(u);
        let v: Vec<Vec<T>> = ul.iter().map(|x| sigma_vec(x)).collect();
        let kind = self.kind();
        {
            let mut ol = self.split_mut(out);
            for l in 0..nl {
                let o = &mut *ol[l];
                let bias: &[f64] = if l == 0 { &self.drive } else { &p.b[l] };
                for (oi, &bi) in o.iter_mut().zip(bias) {
                    *oi = T::from_re(bi);
                }
                if l > 0 {
                    p.w_fwd[l - 1].matvec_add(&v[l - 1], o);
                }
                match kind {
                    ModelKind::ReciprocalMLP => {
                        if l + 1 < nl {
                            p.w_bwd[l].matvec_add(&v[l + 1], o);
                        }
                    }
                    ModelKind::HopfieldMLP => {
                        if l + 1 < nl {
                            p.w_fwd[l].matvec_t_add(&v[l + 1], o);
                        }
                    }
                    ModelKind::DirectFeedback => {
                        if l == 0 {
                            p.w_fb.as_ref().expect("feedback weights").matvec_add(&v[nl - 1], o);
                        }
                    }
                    ModelKind::PCN => unreachable!(),
                }
            }
        }
        let n = self.nudge_vector(u);
        let off = self.offsets[nl - 1];
        if kind == ModelKind::HopfieldMLP {
            for (i, oi) in out.iter_mut().enumerate() {
                let d = sigma_prime(u[i]);
                *oi *= d;
            }
            for (i, ni) in n.into_iter().enumerate() {
                out[off + i] += beta * ni * sigma_prime(u[off + i]);
            }
        } else {
            for (i, ni) in n.into_iter().enumerate() {
                out[off + i] += beta * ni;
            }
        }
    }

    /// Prediction errors `ε_l` of the predictive-coding network.
    pub fn pcn_errors<T: Scalar>(&self, u: &[T]) -> Vec<Vec<T>> {
        let p = self.params();
        let ul = self.split(u);
        let nl = self.num_layers();
        let mut eps = Vec::with_capacity(nl);
        for l in 0..nl {
            let bias: &[f64] = if l == 0 { &self.drive } else { &p.b[l] };
            let mut pred: Vec<T> = bias.iter().map(|&b| T::from_re(b)).collect();
            if l > 0 {
                p.w_fwd[l - 1].matvec_add(&sigma_vec(ul[l - 1]), &mut pred);
            }
            eps.push(ul[l].iter().zip(pred).map(|(&a, b)| a - b).collect());
        }
        eps
    }

    fn update_pcn<T: Scalar>(&self, u: &[T], beta: T, out: &mut [T]) {
        let p = self.params();
        let eta = self.net.pcn_step;
        let nl = self.num_layers();
        let ul = self.split(u);
        let eps = self.pcn_errors(u);
        let n = self.nudge_vector(u);
        let mut ol = self.split_mut(out);
        for l in 0..nl {
            let mut drift: Vec<T> = eps[l].iter().map(|&e| -e).collect();
            if l + 1 < nl {
                let fb = p.w_bwd[l].matvec(&eps[l + 1]);
                for ((d, f), &x) in drift.iter_mut().zip(fb).zip(ul[l]) {
                    *d += sigma_prime(x) * f;
                }
            } else {
                for (d, &ni) in drift.iter_mut().zip(&n) {
                    *d += beta * ni;
                }
            }
            for ((o, &x), d) in ol[l].iter_mut().zip(ul[l]).zip(drift) {
                *o = x + d * eta;
            }
        }
    }

    /// Cross-entropy of the readout and `y − softmax` at a real state.
    pub fn readout_loss(&self, u: &[f64]) -> (f64, Vec<f64>) {
        let z = self.logits(u);
        let s = softmax(&z);
        let loss = -self
            .target
            .iter()
            .zip(&s)
            .filter(|(&y, _)| y > 0.0)
            .map(|(&y, &si)| y * si.max(1e-300).ln())
            .sum::<f64>();
        let err = self.target.iter().zip(&s).map(|(y, si)| y - si).collect();
        (loss, err)
    }

    /// Gradient of the readout cross-entropy with respect to `(w_ro, b_ro)`;
    /// every other tensor is zero.
    pub fn readout_grad(&self, u: &[f64]) -> ModelParams {
        let (_, err) = self.readout_loss(u);
        let last = self.split(u)[self.num_layers() - 1];
        let v = sigma_vec(last);
        let mut g: ModelParams = self.params().zeros_like();
        let neg: Vec<f64> = err.iter().map(|e| -e).collect();
        g.w_ro.add_outer(&neg, &v, 1.0);
        g.b_ro = neg;
        g
    }

    /// Index of the largest readout logit.
    pub fn predict(&self, u: &[f64]) -> usize {
        self.logits(u)
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |b, (i, &z)| if z > b.1 { (i, z) } else { b })
            .0
    }
}

impl Dynamics for Bound<'_> {
    fn layer_dims(&self) -> &[usize] {
        &self.net.dims.layers
    }

    fn update<T: Scalar>(&self, u: &[T], beta: T, out: &mut [T]) {
        match self.kind() {
            ModelKind::PCN => self.update_pcn(u, beta, out),
            _ => self.update_layered(u, beta, out),
        }
    }
}

/// One-hot vector of length `classes`.
pub fn one_hot(label: usize, classes: usize) -> Vec<f64> {
    let mut y = vec![0.0; classes];
    y[label] = 1.0;
    y
}

#[cfg(test)]
mod tests;
