//! Parameter tensors, their gradients, and the forward/backward initializer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Dims, ModelKind};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{Scalar, C64};

/// Network parameters.
///
/// Layers are indexed from 0. `w_fwd[k]` maps layer `k` to layer `k + 1`
/// (shape `n_{k+1} × n_k`), `w_bwd[k]` maps layer `k + 1` back to layer `k`
/// (shape `n_k × n_{k+1}`), `w_fb` feeds the output layer back into layer 0.
/// The readout `(w_ro, b_ro)` only enters the nudge.
#[derive(Debug, Clone, PartialEq)]
pub struct Params<T = f64> {
    pub w_in: Matrix<T>,
    pub w_fwd: Vec<Matrix<T>>,
    pub w_bwd: Vec<Matrix<T>>,
    pub w_fb: Option<Matrix<T>>,
    pub b: Vec<Vec<T>>,
    pub w_ro: Matrix<T>,
    pub b_ro: Vec<T>,
}

pub type ModelParams = Params<f64>;

/// Named view of one parameter tensor.
#[derive(Debug)]
pub struct TensorRef<'a, T> {
    pub name: String,
    pub shape: Vec<usize>,
    /// Layer whose update the tensor drives; `None` for the readout.
    pub layer: Option<usize>,
    pub data: &'a [T],
}

#[derive(Debug)]
pub struct TensorMut<'a, T> {
    pub name: String,
    pub layer: Option<usize>,
    pub data: &'a mut [T],
}

impl<T: Scalar> Params<T> {
    /// All-zero parameters with the given structure.
    pub fn zeros(kind: ModelKind, dims: &Dims) -> Self {
        let l = &dims.layers;
        let n = l.len();
        let w_fwd = (0..n - 1).map(|k| Matrix::zeros(l[k + 1], l[k])).collect();
        let w_bwd = if kind.has_backward_weights() {
            (0..n - 1).map(|k| Matrix::zeros(l[k], l[k + 1])).collect()
        } else {
            Vec::new()
        };
        let w_fb = (kind == ModelKind::DirectFeedback).then(|| Matrix::zeros(l[0], l[n - 1]));
        Self {
            w_in: Matrix::zeros(l[0], dims.input),
            w_fwd,
            w_bwd,
            w_fb,
            b: l.iter().map(|&d| vec![T::zero(); d]).collect(),
            w_ro: Matrix::zeros(dims.classes, l[n - 1]),
            b_ro: vec![T::zero(); dims.classes],
        }
    }

    pub fn zeros_like<U: Scalar>(&self) -> Params<U> {
        Params {
            w_in: Matrix::zeros(self.w_in.rows(), self.w_in.cols()),
            w_fwd: self.w_fwd.iter().map(|m| Matrix::zeros(m.rows(), m.cols())).collect(),
            w_bwd: self.w_bwd.iter().map(|m| Matrix::zeros(m.rows(), m.cols())).collect(),
            w_fb: self.w_fb.as_ref().map(|m| Matrix::zeros(m.rows(), m.cols())),
            b: self.b.iter().map(|v| vec![U::zero(); v.len()]).collect(),
            w_ro: Matrix::zeros(self.w_ro.rows(), self.w_ro.cols()),
            b_ro: vec![U::zero(); self.b_ro.len()],
        }
    }

    /// Tensors in checkpoint order.
    pub fn tensors(&self) -> Vec<TensorRef<'_, T>> {
        fn mat<T: Scalar>(name: String, m: &Matrix<T>, layer: Option<usize>) -> TensorRef<'_, T> {
            TensorRef {
                name,
                shape: vec![m.rows(), m.cols()],
                layer,
                data: m.as_slice(),
            }
        }
        let mut out = Vec::new();
        out.push(mat("w_in".into(), &self.w_in, Some(0)));
        for (k, m) in self.w_fwd.iter().enumerate() {
            out.push(mat(format!("w_fwd.{k}"), m, Some(k + 1)));
        }
        for (k, m) in self.w_bwd.iter().enumerate() {
            out.push(mat(format!("w_bwd.{k}"), m, Some(k)));
        }
        if let Some(m) = &self.w_fb {
            out.push(mat("w_fb".into(), m, Some(0)));
        }
        for (k, v) in self.b.iter().enumerate() {
            out.push(TensorRef {
                name: format!("b.{k}"),
                shape: vec![v.len()],
                layer: Some(k),
                data: v,
            });
        }
        out.push(mat("w_ro".into(), &self.w_ro, None));
        out.push(TensorRef {
            name: "b_ro".into(),
            shape: vec![self.b_ro.len()],
            layer: None,
            data: &self.b_ro,
        });
        out
    }

    /// Mutable tensors, same order as [`Params::tensors`].
    pub fn tensors_mut(&mut self) -> Vec<TensorMut<'_, T>> {
        let mut out = Vec::new();
        out.push(TensorMut {
            name: "w_in".into(),
            layer: Some(0),
            data: self.w_in.as_mut_slice(),
        });
        for (k, m) in self.w_fwd.iter_mut().enumerate() {
            out.push(TensorMut {
                name: format!("w_fwd.{k}"),
                layer: Some(k + 1),
                data: m.as_mut_slice(),
            });
        }
        for (k, m) in self.w_bwd.iter_mut().enumerate() {
            out.push(TensorMut {
                name: format!("w_bwd.{k}"),
                layer: Some(k),
                data: m.as_mut_slice(),
            });
        }
        if let Some(m) = &mut self.w_fb {
            out.push(TensorMut {
                name: "w_fb".into(),
                layer: Some(0),
                data: m.as_mut_slice(),
            });
        }
        for (k, v) in self.b.iter_mut().enumerate() {
            out.push(TensorMut {
                name: format!("b.{k}"),
                layer: Some(k),
                data: v,
            });
        }
        out.push(TensorMut {
            name: "w_ro".into(),
            layer: None,
            data: self.w_ro.as_mut_slice(),
        });
        out.push(TensorMut {
            name: "b_ro".into(),
            layer: None,
            data: &mut self.b_ro,
        });
        out
    }

    pub fn num_params(&self) -> usize {
        self.tensors().iter().map(|t| t.data.len()).sum()
    }

    /// Flattened copy in checkpoint order.
    pub fn to_flat(&self) -> Vec<T> {
        self.tensors().iter().flat_map(|t| t.data.iter().copied()).collect()
    }

    pub fn set_flat(&mut self, flat: &[T]) -> Result<()> {
        if flat.len() != self.num_params() {
            return Err(Error::Shape(format!(
                "{} values for {} parameters",
                flat.len(),
                self.num_params()
            )));
        }
        let mut off = 0;
        for t in self.tensors_mut() {
            let n = t.data.len();
            t.data.copy_from_slice(&flat[off..off + n]);
            off += n;
        }
        Ok(())
    }

    /// `self += scale · other`.
    pub fn axpy(&mut self, scale: f64, other: &Params<T>) {
        for (dst, src) in self.tensors_mut().into_iter().zip(other.tensors()) {
            assert_eq!(dst.data.len(), src.data.len(), "tensor {} shape", dst.name);
            for (d, &s) in dst.data.iter_mut().zip(src.data) {
                *d += s * scale;
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        for t in self.tensors_mut() {
            for x in t.data.iter_mut() {
                *x = *x * s;
            }
        }
    }

    /// Zeroes the readout tensors.
    pub fn clear_readout(&mut self) {
        self.w_ro.scale(0.0);
        self.b_ro.iter_mut().for_each(|x| *x = T::zero());
    }

    pub fn norm(&self) -> f64 {
        self.tensors()
            .iter()
            .flat_map(|t| t.data.iter())
            .map(|x| x.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

impl Params<f64> {
    pub fn dot(&self, other: &Params<f64>) -> f64 {
        self.tensors()
            .iter()
            .zip(other.tensors())
            .map(|(a, b)| crate::scalar::dot(a.data, b.data))
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.data.iter().all(|x| x.is_finite()))
    }
}

/// Per-parameter real gradient plus the largest imaginary magnitude that was
/// discarded when projecting a complex estimate onto the reals.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientEstimate {
    pub grads: ModelParams,
    pub imag_diagnostic: f64,
}

impl GradientEstimate {
    pub fn real(grads: ModelParams) -> Self {
        Self {
            grads,
            imag_diagnostic: 0.0,
        }
    }

    /// Real part of a complex gradient; records `max |Im|`.
    pub fn from_complex(c: &Params<C64>) -> Self {
        let mut grads: ModelParams = c.zeros_like();
        let mut imag = 0.0f64;
        for (dst, src) in grads.tensors_mut().into_iter().zip(c.tensors()) {
            for (d, s) in dst.data.iter_mut().zip(src.data) {
                *d = s.re;
                imag = imag.max(s.im.abs());
            }
        }
        Self {
            grads,
            imag_diagnostic: imag,
        }
    }

    pub fn scaled(mut self, s: f64) -> Self {
        self.grads.scale(s);
        self.imag_diagnostic *= s.abs();
        self
    }

    /// Largest real magnitude over all tensors.
    pub fn max_abs(&self) -> f64 {
        self.grads
            .tensors()
            .iter()
            .flat_map(|t| t.data.iter())
            .fold(0.0, |m, x| m.max(x.abs()))
    }
}

fn uniform_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: f64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(-bound..bound))
}

/// `w_b ← sin(α) w_b + cos(α) w_fᵀ`.
pub fn blend_backward(w_fwd: &Matrix, raw_bwd: &Matrix, alpha: f64) -> Matrix {
    assert_eq!(w_fwd.rows(), raw_bwd.cols());
    assert_eq!(w_fwd.cols(), raw_bwd.rows());
    let (s, c) = alpha.sin_cos();
    Matrix::from_fn(raw_bwd.rows(), raw_bwd.cols(), |i, j| {
        s * raw_bwd.get(i, j) + c * w_fwd.get(j, i)
    })
}

/// Draws parameters deterministically from `seed`.
///
/// Weights are uniform in `±1/√fan_in`; raw backward weights use the bound of
/// the forward matrix they pair with and are then blended by the α rule.
/// Biases start at zero.
pub fn init_params(kind: ModelKind, dims: &Dims, seed: u64, alpha: f64) -> Result<ModelParams> {
    dims.validate()?;
    if !(0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&alpha) {
        return Err(Error::Invalid(format!("alpha {alpha} outside [0, π/2]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = ModelParams::zeros(kind, dims);
    let l = &dims.layers;
    p.w_in = uniform_matrix(&mut rng, l[0], dims.input, 1.0 / (dims.input as f64).sqrt());
    for k in 0..l.len() - 1 {
        let bound = 1.0 / (l[k] as f64).sqrt();
        p.w_fwd[k] = uniform_matrix(&mut rng, l[k + 1], l[k], bound);
    }
    if kind.has_backward_weights() {
        for k in 0..l.len() - 1 {
            let bound = 1.0 / (l[k] as f64).sqrt();
            let raw = uniform_matrix(&mut rng, l[k], l[k + 1], bound);
            p.w_bwd[k] = blend_backward(&p.w_fwd[k], &raw, alpha);
        }
    }
    if let Some(fb) = &mut p.w_fb {
        let last = l[l.len() - 1];
        *fb = uniform_matrix(&mut rng, l[0], last, 1.0 / (last as f64).sqrt());
    }
    let last = l[l.len() - 1];
    p.w_ro = uniform_matrix(&mut rng, dims.classes, last, 1.0 / (last as f64).sqrt());
    Ok(p)
}

/// Angle in degrees between `w_bwd` and `w_fwdᵀ` under the Frobenius inner product.
pub fn weight_angle_deg(w_fwd: &Matrix, w_bwd: &Matrix) -> f64 {
    let t = w_fwd.transpose();
    let denom = w_bwd.frobenius() * w_fwd.frobenius();
    if denom == 0.0 {
        return 90.0;
    }
    (w_bwd.frobenius_dot(&t) / denom).clamp(-1.0, 1.0).acos().to_degrees()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn dims() -> Dims {
        Dims::new(6, vec![5, 4, 3], 3)
    }

    #[test]
    fn alpha_zero_ties_backward_to_forward() {
        let p = init_params(ModelKind::ReciprocalMLP, &dims(), 3, 0.0).unwrap();
        for (f, b) in p.w_fwd.iter().zip(&p.w_bwd) {
            assert_eq!(&f.transpose(), b);
        }
    }

    #[test]
    fn alpha_right_angle_keeps_raw_draw() {
        let p = init_params(ModelKind::ReciprocalMLP, &dims(), 3, FRAC_PI_2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = dims();
        let _ = uniform_matrix(&mut rng, 5, 6, 1.0 / 6f64.sqrt());
        let _ = uniform_matrix(&mut rng, 4, 5, 1.0 / 5f64.sqrt());
        let _ = uniform_matrix(&mut rng, 3, 4, 0.5);
        let raw0 = uniform_matrix(&mut rng, 5, 4, 1.0 / 5f64.sqrt());
        assert!(p.w_bwd[0].max_abs_diff(&raw0) < 1e-15);
        assert_eq!(d.layers.len(), 3);
    }

    #[test]
    fn init_is_deterministic() {
        let a = init_params(ModelKind::PCN, &dims(), 11, FRAC_PI_4).unwrap();
        let b = init_params(ModelKind::PCN, &dims(), 11, FRAC_PI_4).unwrap();
        let c = init_params(ModelKind::PCN, &dims(), 12, FRAC_PI_4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn structure_per_kind() {
        let h = init_params(ModelKind::HopfieldMLP, &dims(), 0, 0.0).unwrap();
        assert!(h.w_bwd.is_empty() && h.w_fb.is_none());
        let d = init_params(ModelKind::DirectFeedback, &dims(), 0, 0.0).unwrap();
        assert!(d.w_bwd.is_empty());
        assert_eq!(d.w_fb.as_ref().unwrap().shape(), (5, 3));
        assert_eq!(d.w_ro.shape(), (3, 3));
    }

    #[test]
    fn angles_of_tied_and_flipped() {
        let f = Matrix::from_fn(3, 4, |i, j| (i * 4 + j) as f64 - 5.0);
        assert!(weight_angle_deg(&f, &f.transpose()).abs() < 1e-6);
        let mut neg = f.transpose();
        neg.scale(-1.0);
        assert!((weight_angle_deg(&f, &neg) - 180.0).abs() < 1e-6);
    }

    #[test]
    fn flat_round_trip() {
        let p = init_params(ModelKind::DirectFeedback, &dims(), 5, 0.0).unwrap();
        let flat = p.to_flat();
        let mut q = ModelParams::zeros(ModelKind::DirectFeedback, &dims());
        q.set_flat(&flat).unwrap();
        assert_eq!(p, q);
    }
}
