//! Finite-difference oracle: central differences with one Richardson step.
//!
//! Used to validate the analytic gradient and Hessian; deliberately shares no
//! code with them.

use crate::linalg::Mat;
use crate::scalar::Real;

/// Base step, relative to `max(1, |xᵢ|)`.
pub const STEP: f64 = 1e-5;

fn richardson<T: Real, V>(x: &[T], i: usize, f: &impl Fn(&[T]) -> V, diff: impl Fn(V, V, T) -> Vec<T>) -> Vec<T> {
    let h = T::of(STEP) * x[i].abs().max(T::one());
    let central = |h: T| {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += h;
        xm[i] -= h;
        diff(f(&xp), f(&xm), h)
    };
    let coarse = central(h);
    let fine = central(h * T::half());
    let three = T::of(3.0);
    let four = T::of(4.0);
    fine.iter().zip(&coarse).map(|(&f, &c)| (four * f - c) / three).collect()
}

/// Numerical gradient of a scalar function.
pub fn gradient<T: Real>(f: impl Fn(&[T]) -> T, x: &[T]) -> Vec<T> {
    (0..x.len())
        .map(|i| richardson(x, i, &f, |a, b, h| vec![(a - b) / (T::two() * h)])[0])
        .collect()
}

/// Numerical Jacobian of a vector function; row `r`, column `c` is `∂f_r/∂x_c`.
pub fn jacobian<T: Real>(f: impl Fn(&[T]) -> Vec<T>, x: &[T]) -> Mat<T> {
    let columns: Vec<Vec<T>> = (0..x.len())
        .map(|i| richardson(x, i, &f, |a, b, h| a.iter().zip(&b).map(|(&p, &m)| (p - m) / (T::two() * h)).collect()))
        .collect();
    Mat::from_columns(&columns)
}

/// `max |a − b| / max |b|` (with a tiny floor on the denominator).
pub fn relative_max_error<T: Real>(a: &[T], b: &[T]) -> T {
    let diff = a.iter().zip(b).fold(T::zero(), |m, (&x, &y)| m.max((x - y).abs()));
    let scale = b.iter().fold(T::zero(), |m, &y| m.max(y.abs()));
    diff / scale.max(T::min_positive_value())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_gradient_is_exact_to_roundoff() {
        let g = gradient(|x: &[f64]| x[0].powi(3) + x[0] * x[1], &[2.0, -1.0]);
        assert!((g[0] - 11.0).abs() < 1e-9 && (g[1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn jacobian_of_linear_map_recovers_matrix() {
        let j = jacobian(|x: &[f64]| vec![2.0 * x[0] - x[1], 3.0 * x[1]], &[0.3, 0.4]);
        assert!((j[(0, 0)] - 2.0).abs() < 1e-9);
        assert!((j[(0, 1)] + 1.0).abs() < 1e-9);
        assert!(j[(1, 0)].abs() < 1e-9);
        assert!((j[(1, 1)] - 3.0).abs() < 1e-9);
    }
}
