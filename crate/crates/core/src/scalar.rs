//! Scalar abstraction shared by the real free phase and the complex nudged phases.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

pub use num_complex::Complex64 as C64;

/// Real part bound applied before every exponential.
pub const EXP_CLAMP: f64 = 40.0;

/// Field element the network dynamics can be evaluated over.
///
/// Implemented for `f64` (free phase, Jacobian products) and `Complex64`
/// (holomorphic nudges on the β-circle). All activation functions are written
/// once against this trait so both phases share one code path.
pub trait Scalar:
    Copy
    + Debug
    + Default
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + 'static
{
    fn from_re(x: f64) -> Self;
    fn re(self) -> f64;
    fn im(self) -> f64;
    fn norm_sqr(self) -> f64;
    fn is_finite(self) -> bool;
    /// `exp` with the real part clamped to `[-EXP_CLAMP, EXP_CLAMP]`.
    fn exp_clamped(self) -> Self;
    /// `Σ_j w_j x_j` for a real weight row.
    fn dot_weights(w: &[f64], x: &[Self]) -> Self;
    fn to_complex(self) -> C64 {
        C64::new(self.re(), self.im())
    }
    fn zero() -> Self {
        Self::from_re(0.0)
    }
    fn one() -> Self {
        Self::from_re(1.0)
    }
}

impl Scalar for f64 {
    #[inline]
    fn from_re(x: f64) -> Self {
        x
    }
    #[inline]
    fn re(self) -> f64 {
        self
    }
    #[inline]
    fn im(self) -> f64 {
        0.0
    }
    #[inline]
    fn norm_sqr(self) -> f64 {
        self * self
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    #[inline]
    fn exp_clamped(self) -> Self {
        self.clamp(-EXP_CLAMP, EXP_CLAMP).exp()
    }
    #[inline]
    fn dot_weights(w: &[f64], x: &[Self]) -> Self {
        dot(w, x)
    }
}

impl Scalar for C64 {
    #[inline]
    fn from_re(x: f64) -> Self {
        C64::new(x, 0.0)
    }
    #[inline]
    fn re(self) -> f64 {
        self.re
    }
    #[inline]
    fn im(self) -> f64 {
        self.im
    }
    #[inline]
    fn norm_sqr(self) -> f64 {
        C64::norm_sqr(&self)
    }
    #[inline]
    fn is_finite(self) -> bool {
        C64::is_finite(self)
    }
    #[inline]
    fn exp_clamped(self) -> Self {
        C64::new(self.re.clamp(-EXP_CLAMP, EXP_CLAMP), self.im).exp()
    }
    #[inline]
    fn dot_weights(w: &[f64], x: &[Self]) -> Self {
        debug_assert_eq!(w.len(), x.len());
        let mut re = [0.0f64; 4];
        let mut im = [0.0f64; 4];
        let wc = w.chunks_exact(4);
        let xc = x.chunks_exact(4);
        let (wr, xr) = (wc.remainder(), xc.remainder());
        for (a, b) in wc.zip(xc) {
            for k in 0..4 {
                re[k] += a[k] * b[k].re;
                im[k] += a[k] * b[k].im;
            }
        }
        let mut out = C64::new(re[0] + re[1] + re[2] + re[3], im[0] + im[1] + im[2] + im[3]);
        for (a, b) in wr.iter().zip(xr) {
            out += b * *a;
        }
        out
    }
    #[inline]
    fn to_complex(self) -> C64 {
        self
    }
}

/// Real dot product with four independent accumulators.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let ac = a.chunks_exact(4);
    let bc = b.chunks_exact(4);
    let (ar, br) = (ac.remainder(), bc.remainder());
    for (x, y) in ac.zip(bc) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    let mut out = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in ar.iter().zip(br) {
        out += x * y;
    }
    out
}

/// Euclidean norm of a scalar slice.
pub fn norm<T: Scalar>(v: &[T]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn to_complex<T: Scalar>(v: &[T]) -> Vec<C64> {
    v.iter().map(|x| x.to_complex()).collect()
}

pub fn real_parts(v: &[C64]) -> Vec<f64> {
    v.iter().map(|z| z.re).collect()
}

/// Largest imaginary magnitude in a complex slice.
pub fn max_imag(v: &[C64]) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.im.abs()))
}
