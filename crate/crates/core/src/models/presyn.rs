//! Presynaptic contractions `(∂F/∂θ)ᵀ δ` and their averages along a path of states.

use super::activation::{sigma_prime_vec, sigma_vec};
use super::{Bound, ModelKind, Params};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{Scalar, C64};

fn hadamard<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x * y).collect()
}

/// Vector-field gradients of a tied-weight network with the two occurrences of
/// every weight kept apart: `fwd[k]` is the copy used in layer `k + 1`'s
/// update, `bwd[k]` (shape of `fwd[k]ᵀ`) the copy used in layer `k`'s update.
#[derive(Debug, Clone, PartialEq)]
pub struct HopfieldSplit<T = C64> {
    pub fwd: Vec<Matrix<T>>,
    pub bwd: Vec<Matrix<T>>,
}

impl<T: Scalar> HopfieldSplit<T> {
    /// Gradient of the tied parameter: `fwd[k] + bwd[k]ᵀ`.
    pub fn fused(&self) -> Vec<Matrix<T>> {
        self.fwd
            .iter()
            .zip(&self.bwd)
            .map(|(f, b)| Matrix::from_fn(f.rows(), f.cols(), |i, j| f.get(i, j) + b.get(j, i)))
            .collect()
    }
}

impl Bound<'_> {
    fn check_len(&self, name: &str, n: usize) -> Result<()> {
        if n != self.net.state_dim() {
            return Err(Error::Shape(format!(
                "{name} of length {n}, expected {}",
                self.net.state_dim()
            )));
        }
        Ok(())
    }

    fn input_as<T: Scalar>(&self) -> Vec<T> {
        self.input.iter().map(|&x| T::from_re(x)).collect()
    }

    /// `(∂F/∂θ)ᵀ δ` at state `u` with β = 0. The readout tensors are zero.
    pub fn presyn_grad<T: Scalar>(&self, u: &[T], delta: &[T]) -> Result<Params<T>> {
        self.check_len("state", u.len())?;
        self.check_len("error vector", delta.len())?;
        let ul = self.split(u);
        let v: Vec<Vec<T>> = ul.iter().map(|x| sigma_vec(x)).collect();
        Ok(match self.kind() {
            ModelKind::ReciprocalMLP | ModelKind::DirectFeedback => self.presyn_from_rates(&v, delta),
            ModelKind::HopfieldMLP => self.presyn_hopfield(&ul, &v, delta),
            ModelKind::PCN => self.presyn_pcn(u, &ul, &v, delta),
        })
    }

    /// Presynaptic term for the architectures whose update is affine in the
    /// rates `v = σ(u)`; it depends on the state only through `v`.
    fn presyn_from_rates<T: Scalar>(&self, v: &[Vec<T>], delta: &[T]) -> Params<T> {
        let nl = self.num_layers();
        let dl = self.split(delta);
        let mut g: Params<T> = self.params().zeros_like();
        g.w_in.add_outer(dl[0], &self.input_as::<T>(), 1.0);
        for l in 0..nl {
            g.b[l].copy_from_slice(dl[l]);
            if l > 0 {
                g.w_fwd[l - 1].add_outer(dl[l], &v[l - 1], 1.0);
            }
        }
        for l in 0..g.w_bwd.len() {
            g.w_bwd[l].add_outer(dl[l], &v[l + 1], 1.0);
        }
        if let Some(fb) = &mut g.w_fb {
            fb.add_outer(dl[0], &v[nl - 1], 1.0);
        }
        g
    }

    fn presyn_hopfield<T: Scalar>(&self, ul: &[&[T]], v: &[Vec<T>], delta: &[T]) -> Params<T> {
        let nl = self.num_layers();
        let dl = self.split(delta);
        let d: Vec<Vec<T>> = (0..nl).map(|l| hadamard(&sigma_prime_vec(ul[l]), dl[l])).collect();
        let mut g: Params<T> = self.params().zeros_like();
        g.w_in.add_outer(&d[0], &self.input_as::<T>(), 1.0);
        for l in 0..nl {
            g.b[l].copy_from_slice(&d[l]);
            if l > 0 {
                g.w_fwd[l - 1].add_outer(&d[l], &v[l - 1], 1.0);
                g.w_fwd[l - 1].add_outer(&v[l], &d[l - 1], 1.0);
            }
        }
        g
    }

    fn presyn_pcn<T: Scalar>(&self, u: &[T], ul: &[&[T]], v: &[Vec<T>], delta: &[T]) -> Params<T> {
        let p = self.params();
        let eta = self.net.pcn_step;
        let nl = self.num_layers();
        let dl = self.split(delta);
        let eps = self.pcn_errors(u);
        let d: Vec<Vec<T>> = (0..nl).map(|l| hadamard(&sigma_prime_vec(ul[l]), dl[l])).collect();
        let mut g: Params<T> = p.zeros_like();
        for l in 0..nl {
            let mut q: Vec<T> = dl[l].iter().map(|&x| -x).collect();
            if l > 0 {
                p.w_bwd[l - 1].matvec_t_add(&d[l - 1], &mut q);
                g.w_fwd[l - 1].add_outer(&q, &v[l - 1], -eta);
                g.w_bwd[l - 1].add_outer(&d[l - 1], &eps[l], eta);
            } else {
                g.w_in.add_outer(&q, &self.input_as::<T>(), -eta);
            }
            for (gb, qi) in g.b[l].iter_mut().zip(q) {
                *gb = qi * (-eta);
            }
        }
        g
    }

    /// Tied-weight presynaptic term with forward and backward occurrences
    /// separated. Only defined for the Hopfield architecture.
    pub fn hopfield_split<T: Scalar>(&self, u: &[T], delta: &[T]) -> Result<HopfieldSplit<T>> {
        if self.kind() != ModelKind::HopfieldMLP {
            return Err(Error::Invalid(format!(
                "split gradient needs tied weights, got {}",
                self.kind()
            )));
        }
        self.check_len("state", u.len())?;
        self.check_len("error vector", delta.len())?;
        let ul = self.split(u);
        let dl = self.split(delta);
        let nl = self.num_layers();
        let v: Vec<Vec<T>> = ul.iter().map(|x| sigma_vec(x)).collect();
        let d: Vec<Vec<T>> = (0..nl).map(|l| hadamard(&sigma_prime_vec(ul[l]), dl[l])).collect();
        let mut fwd = Vec::with_capacity(nl - 1);
        let mut bwd = Vec::with_capacity(nl - 1);
        for k in 0..nl - 1 {
            let w = &self.params().w_fwd[k];
            let mut f = Matrix::zeros(w.rows(), w.cols());
            f.add_outer(&d[k + 1], &v[k], 1.0);
            let mut b = Matrix::zeros(w.cols(), w.rows());
            b.add_outer(&d[k], &v[k + 1], 1.0);
            fwd.push(f);
            bwd.push(b);
        }
        Ok(HopfieldSplit { fwd, bwd })
    }
}

/// Running average of the presynaptic term along a trajectory.
///
/// For architectures whose update is affine in the rates the average only
/// needs the mean rate per layer; otherwise the visited states are kept and
/// contracted once the error vector is known.
#[derive(Debug, Clone)]
pub struct PresynPath {
    store: Store,
    count: usize,
}

#[derive(Debug, Clone)]
enum Store {
    Rates(Vec<Vec<C64>>),
    States(Vec<Vec<C64>>),
}

impl PresynPath {
    pub fn new(bound: &Bound<'_>) -> Self {
        let store = match bound.kind() {
            ModelKind::ReciprocalMLP | ModelKind::DirectFeedback => Store::Rates(
                bound
                    .net
                    .dims
                    .layers
                    .iter()
                    .map(|&n| vec![C64::new(0.0, 0.0); n])
                    .collect(),
            ),
            _ => Store::States(Vec::new()),
        };
        Self { store, count: 0 }
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn push(&mut self, bound: &Bound<'_>, u: &[C64]) {
        match &mut self.store {
            Store::Rates(sum) => {
                for (s, x) in sum.iter_mut().zip(bound.split(u)) {
                    for (si, &xi) in s.iter_mut().zip(x) {
                        *si += super::sigma(xi);
                    }
                }
            }
            Store::States(states) => states.push(u.to_vec()),
        }
        self.count += 1;
    }

    /// Path average of `(∂F/∂θ(u_t))ᵀ δ`.
    pub fn contract(&self, bound: &Bound<'_>, delta: &[C64]) -> Result<Params<C64>> {
        if self.count == 0 {
            return Err(Error::Invalid("empty presynaptic path".into()));
        }
        let inv = 1.0 / self.count as f64;
        match &self.store {
            Store::Rates(sum) => {
                bound.check_len("error vector", delta.len())?;
                let mean: Vec<Vec<C64>> =
                    sum.iter().map(|s| s.iter().map(|&x| x * inv).collect()).collect();
                Ok(bound.presyn_from_rates(&mean, delta))
            }
            Store::States(states) => {
                let mut acc: Params<C64> = bound.params().zeros_like();
                for u in states {
                    acc.axpy(inv, &bound.presyn_grad(u, delta)?);
                }
                Ok(acc)
            }
        }
    }
}
