//! Jacobian symmetry diagnostics and the homeostatic regularizer
//! `L_homeo = E_ε[‖J ε‖² − εᵀ J² ε] = Tr(JᵀJ) − Tr(J²) = 2 ‖A‖_F²`,
//! where `A = (J − Jᵀ)/2`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::ErrorVector;
use crate::linalg::{cosine_complex, Matrix};
use crate::models::{Bound, GradientEstimate, ModelParams};
use crate::scalar::dot;

/// Matrix-free access to a square Jacobian.
pub trait JacobianOps {
    fn dim(&self) -> usize;
    fn jvp(&self, v: &[f64]) -> Vec<f64>;
    fn vjp(&self, v: &[f64]) -> Vec<f64>;
}

impl JacobianOps for Matrix {
    fn dim(&self) -> usize {
        self.rows()
    }
    fn jvp(&self, v: &[f64]) -> Vec<f64> {
        self.matvec(v)
    }
    fn vjp(&self, v: &[f64]) -> Vec<f64> {
        self.matvec_t(v)
    }
}

/// `J_F` of a bound network at a fixed (real) state.
pub struct NetworkJacobian<'a, 'b> {
    pub bound: &'a Bound<'b>,
    pub state: &'a [f64],
}

impl JacobianOps for NetworkJacobian<'_, '_> {
    fn dim(&self) -> usize {
        self.state.len()
    }
    fn jvp(&self, v: &[f64]) -> Vec<f64> {
        self.bound.jvp(self.state, v)
    }
    fn vjp(&self, v: &[f64]) -> Vec<f64> {
        self.bound.vjp(self.state, v)
    }
}

fn check_square(j: &Matrix) -> Result<()> {
    if j.rows() != j.cols() {
        return Err(Error::Shape(format!("{}x{} matrix is not square", j.rows(), j.cols())));
    }
    Ok(())
}

/// `(S, A) = ((J + Jᵀ)/2, (J − Jᵀ)/2)`.
pub fn decompose(j: &Matrix) -> Result<(Matrix, Matrix)> {
    check_square(j)?;
    let n = j.rows();
    let s = Matrix::from_fn(n, n, |a, b| 0.5 * (j.get(a, b) + j.get(b, a)));
    let k = Matrix::from_fn(n, n, |a, b| 0.5 * (j.get(a, b) - j.get(b, a)));
    Ok((s, k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub frob_s: f64,
    pub frob_a: f64,
    pub symmetry_measure: f64,
    pub homeo_exact: f64,
}

impl SymmetryReport {
    pub fn from_jacobian(j: &Matrix) -> Result<Self> {
        let (s, a) = decompose(j)?;
        let (frob_s, frob_a) = (s.frobenius(), a.frobenius());
        Ok(Self {
            frob_s,
            frob_a,
            symmetry_measure: ratio(frob_s, frob_a),
            homeo_exact: homeo_loss_exact(j)?,
        })
    }
}

fn ratio(s: f64, a: f64) -> f64 {
    if s + a == 0.0 {
        1.0
    } else {
        s / (s + a)
    }
}

/// `‖S‖_F / (‖S‖_F + ‖A‖_F)`; 1 for the zero matrix.
pub fn symmetry_measure(j: &Matrix) -> Result<f64> {
    let (s, a) = decompose(j)?;
    Ok(ratio(s.frobenius(), a.frobenius()))
}

/// `Tr(JᵀJ) − Tr(J²)`.
pub fn homeo_loss_exact(j: &Matrix) -> Result<f64> {
    check_square(j)?;
    let n = j.rows();
    let mut total = 0.0;
    for a in 0..n {
        for b in 0..n {
            let x = j.get(a, b);
            total += x * x - x * j.get(b, a);
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HutchinsonConfig {
    pub n_samples: usize,
    pub seed: u64,
}

impl Default for HutchinsonConfig {
    fn default() -> Self {
        Self {
            n_samples: 5,
            seed: 0,
        }
    }
}

impl HutchinsonConfig {
    pub fn new(n_samples: usize, seed: u64) -> Self {
        Self { n_samples, seed }
    }

    fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::Invalid("Hutchinson estimate needs at least one sample".into()));
        }
        Ok(())
    }

    /// Standard normal probe vectors, deterministic in the seed.
    pub fn probes(&self, dim: usize) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.n_samples)
            .map(|_| (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HutchinsonEstimate {
    pub mean: f64,
    /// Unbiased sample variance of the per-probe values (0 for one sample).
    pub variance: f64,
    pub n_samples: usize,
}

impl HutchinsonEstimate {
    pub fn std_error(&self) -> f64 {
        (self.variance / self.n_samples as f64).sqrt()
    }
}

/// Per-probe value `‖J ε‖² − (Jᵀ ε)·(J ε)`.
pub fn hutchinson_sample(ops: &impl JacobianOps, eps: &[f64]) -> f64 {
    let je = ops.jvp(eps);
    let jte = ops.vjp(eps);
    dot(&je, &je) - dot(&jte, &je)
}

pub fn homeo_loss_hutchinson(ops: &impl JacobianOps, cfg: &HutchinsonConfig) -> Result<HutchinsonEstimate> {
    cfg.validate()?;
    let values: Vec<f64> = cfg
        .probes(ops.dim())
        .iter()
        .map(|e| hutchinson_sample(ops, e))
        .collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let variance = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(HutchinsonEstimate {
        mean,
        variance,
        n_samples: values.len(),
    })
}

/// `λ ∂θ` of the Hutchinson estimate with the state held fixed:
/// `∂θ‖Jε‖² = 2 B(Jε, ε)` and `∂θ(εᵀJ²ε) = B(ε, Jε) + B(Jᵀε, ε)`, where
/// `B(a, b) = ∂θ(aᵀ J b)`.
pub fn homeo_grad(
    bound: &Bound<'_>,
    state: &[f64],
    cfg: &HutchinsonConfig,
    lambda: f64,
) -> Result<GradientEstimate> {
    cfg.validate()?;
    let mut total: ModelParams = bound.params().zeros_like();
    if lambda == 0.0 {
        return Ok(GradientEstimate::real(total));
    }
    let scale = lambda / cfg.n_samples as f64;
    for eps in cfg.probes(state.len()) {
        let je = bound.jvp(state, &eps);
        let jte = bound.vjp(state, &eps);
        total.axpy(2.0 * scale, &bound.bilinear_grad(state, &je, &eps));
        total.axpy(-scale, &bound.bilinear_grad(state, &eps, &je));
        total.axpy(-scale, &bound.bilinear_grad(state, &jte, &eps));
    }
    Ok(GradientEstimate::real(total))
}

/// Per-layer cosine between two error vectors.
pub fn alignment_report(estimate: &ErrorVector, reference: &ErrorVector) -> Result<Vec<f64>> {
    if estimate.layer_dims() != reference.layer_dims() {
        return Err(Error::Shape(format!(
            "layer dims {:?} vs {:?}",
            estimate.layer_dims(),
            reference.layer_dims()
        )));
    }
    Ok((0..estimate.layer_dims().len())
        .map(|l| cosine_complex(estimate.layer(l), reference.layer(l)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{one_hot, Dims, ModelKind, Network};
    use rand::Rng;

    fn upper() -> Matrix {
        Matrix::from_vec(2, 2, vec![0.0, 2.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn decomposition_of_upper_shift() {
        let (s, a) = decompose(&upper()).unwrap();
        assert_eq!(s.as_slice(), &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(a.as_slice(), &[0.0, 1.0, -1.0, 0.0]);
        assert!((symmetry_measure(&upper()).unwrap() - 0.5).abs() < 1e-15);
        assert!((homeo_loss_exact(&upper()).unwrap() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_and_skew_extremes() {
        let s = Matrix::from_vec(2, 2, vec![1.0, 3.0, 3.0, -2.0]).unwrap();
        let k = Matrix::from_vec(2, 2, vec![0.0, 3.0, -3.0, 0.0]).unwrap();
        assert_eq!(symmetry_measure(&s).unwrap(), 1.0);
        assert_eq!(symmetry_measure(&k).unwrap(), 0.0);
        assert_eq!(homeo_loss_exact(&s).unwrap(), 0.0);
        assert_eq!(decompose(&s).unwrap().1.frobenius(), 0.0);
        assert_eq!(decompose(&k).unwrap().0.frobenius(), 0.0);
        let est = homeo_loss_hutchinson(&s, &HutchinsonConfig::new(20, 3)).unwrap();
        assert!(est.mean.abs() < 1e-12 && est.variance < 1e-20);
    }

    #[test]
    fn exact_loss_is_twice_skew_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let j = Matrix::from_fn(7, 7, |_, _| rng.random_range(-1.0..1.0));
            let (_, a) = decompose(&j).unwrap();
            let r = SymmetryReport::from_jacobian(&j).unwrap();
            assert!((r.homeo_exact - 2.0 * a.frobenius_sqr()).abs() < 1e-12);
            assert!(r.homeo_exact >= 0.0);
        }
    }

    #[test]
    fn hutchinson_mean_is_near_exact() {
        let est = homeo_loss_hutchinson(&upper(), &HutchinsonConfig::new(1000, 11)).unwrap();
        assert!((est.mean - 4.0).abs() < 3.0 * est.std_error(), "{est:?}");
        let again = homeo_loss_hutchinson(&upper(), &HutchinsonConfig::new(1000, 11)).unwrap();
        assert_eq!(est, again);
    }

    fn toy(kind: ModelKind) -> Network {
        Network::init(kind, Dims::new(4, vec![5, 3, 2], 2), 4, 1.2).unwrap()
    }

    #[test]
    fn network_ops_match_dense() {
        let net = toy(ModelKind::ReciprocalMLP);
        let x = [0.2, 0.7, 0.1, 0.9];
        let y = one_hot(1, 2);
        let b = net.bind(&x, &y).unwrap();
        let u: Vec<f64> = (0..net.state_dim()).map(|i| (i as f64 * 0.7).cos()).collect();
        let cfg = HutchinsonConfig::new(7, 2);
        let dense = b.jacobian_dense(&u).unwrap();
        let free = homeo_loss_hutchinson(&NetworkJacobian { bound: &b, state: &u }, &cfg).unwrap();
        let mat = homeo_loss_hutchinson(&dense, &cfg).unwrap();
        assert!((free.mean - mat.mean).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        for kind in [ModelKind::ReciprocalMLP, ModelKind::DirectFeedback, ModelKind::PCN] {
            let net = toy(kind);
            let x = [0.2, 0.7, 0.1, 0.9];
            let y = one_hot(0, 2);
            let u: Vec<f64> = (0..net.state_dim()).map(|i| (i as f64 * 0.3).sin()).collect();
            let cfg = HutchinsonConfig::new(3, 5);
            let lambda = 0.7;
            let g = homeo_grad(&net.bind(&x, &y).unwrap(), &u, &cfg, lambda).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(8);
            let dir: Vec<f64> = (0..net.params.num_params()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let loss = |s: f64| {
                let mut p = net.params.clone();
                let flat: Vec<f64> = p.to_flat().iter().zip(&dir).map(|(a, d)| a + s * d).collect();
                p.set_flat(&flat).unwrap();
                let n2 = net.with_params(p);
                let b2 = n2.bind(&x, &y).unwrap();
                lambda * homeo_loss_hutchinson(&NetworkJacobian { bound: &b2, state: &u }, &cfg).unwrap().mean
            };
            let h = 1e-6;
            let fd = (loss(h) - loss(-h)) / (2.0 * h);
            let an = dot(&g.grads.to_flat(), &dir);
            assert!((fd - an).abs() < 1e-5 * an.abs(), "{kind}: {fd} vs {an}");
        }
    }

    #[test]
    fn zero_lambda_gives_zero_gradient() {
        let net = toy(ModelKind::ReciprocalMLP);
        let x = [0.2, 0.7, 0.1, 0.9];
        let y = one_hot(1, 2);
        let u = vec![0.1; net.state_dim()];
        let g = homeo_grad(&net.bind(&x, &y).unwrap(), &u, &HutchinsonConfig::default(), 0.0).unwrap();
        assert_eq!(g.grads.norm(), 0.0);
    }

    #[test]
    fn alignment_extremes() {
        let d = ErrorVector::from_real(&[2, 3], &[1.0, -2.0, 0.5, 0.1, 3.0]).unwrap();
        let neg = ErrorVector::from_real(&[2, 3], &[-1.0, 2.0, -0.5, -0.1, -3.0]).unwrap();
        for c in alignment_report(&d, &d).unwrap() {
            assert!((c - 1.0).abs() < 1e-15);
        }
        for c in alignment_report(&d, &neg).unwrap() {
            assert!((c + 1.0).abs() < 1e-15);
        }
    }
}
