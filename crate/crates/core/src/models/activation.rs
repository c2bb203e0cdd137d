//! Shifted sigmoid `σ(x) = 1 / (1 + e^{−4x+2})` and softmax, evaluated by
//! their complex-analytic extensions.

use crate::scalar::Scalar;

#[inline]
pub fn sigma<T: Scalar>(x: T) -> T {
    let e = (T::from_re(2.0) - x * 4.0).exp_clamped();
    T::one() / (T::one() + e)
}

/// `σ'(x) = 4 σ (1 − σ)`.
#[inline]
pub fn sigma_prime<T: Scalar>(x: T) -> T {
    let s = sigma(x);
    s * (T::one() - s) * 4.0
}

/// `σ''(x) = 16 σ (1 − σ)(1 − 2σ)`.
#[inline]
pub fn sigma_second<T: Scalar>(x: T) -> T {
    let s = sigma(x);
    s * (T::one() - s) * (T::one() - s * 2.0) * 16.0
}

pub fn sigma_vec<T: Scalar>(u: &[T]) -> Vec<T> {
    u.iter().map(|&x| sigma(x)).collect()
}

pub fn sigma_prime_vec<T: Scalar>(u: &[T]) -> Vec<T> {
    u.iter().map(|&x| sigma_prime(x)).collect()
}

pub fn sigma_second_vec<T: Scalar>(u: &[T]) -> Vec<T> {
    u.iter().map(|&x| sigma_second(x)).collect()
}

/// Softmax shifted by the largest real part. The shift cancels exactly, so
/// the result is the holomorphic softmax of the unshifted logits.
pub fn softmax<T: Scalar>(z: &[T]) -> Vec<T> {
    let m = z.iter().map(|x| x.re()).fold(f64::NEG_INFINITY, f64::max);
    let shift = T::from_re(if m.is_finite() { m } else { 0.0 });
    let e: Vec<T> = z.iter().map(|&x| (x - shift).exp_clamped()).collect();
    let total = e.iter().fold(T::zero(), |a, &b| a + b);
    e.into_iter().map(|x| x / total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::C64;

    #[test]
    fn shifted_sigmoid_values() {
        assert!((sigma(0.5f64) - 0.5).abs() < 1e-15);
        assert!((sigma_prime(0.5f64) - 1.0).abs() < 1e-15);
        assert!(sigma_second(0.5f64).abs() < 1e-15);
        assert!((sigma(0.0f64) - 1.0 / (1.0 + 2f64.exp())).abs() < 1e-15);
    }

    #[test]
    fn derivatives_match_central_differences() {
        let h = 1e-6;
        for &x in &[-1.3, -0.2, 0.1, 0.5, 0.9, 2.0] {
            let d1 = (sigma(x + h) - sigma(x - h)) / (2.0 * h);
            let d2 = (sigma_prime(x + h) - sigma_prime(x - h)) / (2.0 * h);
            assert!((d1 - sigma_prime(x)).abs() < 1e-8);
            assert!((d2 - sigma_second(x)).abs() < 1e-7);
        }
    }

    #[test]
    fn complex_derivative_is_holomorphic() {
        // Complex-step derivative: Im σ(x + ih) / h → σ'(x).
        let h = 1e-20;
        for &x in &[-0.7, 0.0, 0.3, 1.1] {
            let z = sigma(C64::new(x, h));
            assert!((z.im / h - sigma_prime(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn softmax_is_shift_invariant_and_normalized() {
        let z = [1.0, 2.0, -3.0, 0.5];
        let s = softmax(&z);
        assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let shifted: Vec<f64> = z.iter().map(|x| x + 100.0).collect();
        for (a, b) in s.iter().zip(softmax(&shifted)) {
            assert!((a - b).abs() < 1e-15);
        }
        let zc: Vec<C64> = z.iter().map(|&x| C64::new(x, 0.0)).collect();
        for (a, b) in s.iter().zip(softmax(&zc)) {
            assert!((a - b.re).abs() < 1e-15 && b.im == 0.0);
        }
    }
}
