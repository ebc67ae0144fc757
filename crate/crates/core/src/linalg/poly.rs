//! Closed-form roots of the low-degree polynomials that appear in the 4×4
//! linearization blocks.

use crate::scalar::{Complex, Real};

/// Principal square root: nonnegative real part, ties to nonnegative imaginary part.
pub(crate) fn principal_sqrt<T: Real>(z: Complex<T>) -> Complex<T> {
    let r = z.sqrt();
    if r.re < T::zero() || (r.re == T::zero() && r.im < T::zero()) {
        -r
    } else {
        r
    }
}

/// Both roots of `a x² + b x + c` (a ≠ 0), computed without cancellation.
pub fn quadratic_roots<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>) -> [Complex<T>; 2] {
    let four = T::of(4.0);
    let disc = principal_sqrt(b * b - a * c * four);
    // pick the sign that avoids cancellation in b ± √disc
    let dot = b.re * disc.re + b.im * disc.im;
    let qd = if dot >= T::zero() { b + disc } else { b - disc };
    let q = -qd * T::half();
    if q.norm() == T::zero() {
        return [Complex::new(T::zero(), T::zero()); 2];
    }
    [q / a, c / q]
}

/// Roots of `s⁴ + b s² + c` for real `b`, `c`. Each `s²` root is split into
/// `±√` with the principal branch.
pub fn biquadratic_roots<T: Real>(b: T, c: T) -> [Complex<T>; 4] {
    let one = Complex::new(T::one(), T::zero());
    let [u1, u2] = quadratic_roots(one, Complex::new(b, T::zero()), Complex::new(c, T::zero()));
    let r1 = principal_sqrt(u1);
    let r2 = principal_sqrt(u2);
    [r1, -r1, r2, -r2]
}

fn eval_quartic<T: Real>(p: T, q: T, r: T, s: Complex<T>) -> (Complex<T>, Complex<T>) {
    let s2 = s * s;
    let f = s2 * s2 + s2 * p + s * q + r;
    let df = s2 * s * T::of(4.0) + s * (p * T::two()) + q;
    (f, df)
}

/// Roots of the depressed quartic `σ⁴ + p σ² + q σ + r` (Ferrari), each
/// polished by a few Newton steps.
pub fn depressed_quartic_roots<T: Real>(p: T, q: T, r: T) -> [Complex<T>; 4] {
    let scale = T::one() + p.abs() + q.abs().sqrt() + r.abs().sqrt().sqrt();
    let mut roots = if q.abs() <= T::epsilon() * scale * scale * scale {
        biquadratic_roots(p, r)
    } else {
        // resolvent cubic g(m) = m³ + p m² + (p²/4 − r) m − q²/8 has a root m > 0
        let c2 = p;
        let c1 = p * p / T::of(4.0) - r;
        let c0 = -q * q / T::of(8.0);
        let g = |m: T| ((m + c2) * m + c1) * m + c0;
        let mut lo = T::zero();
        let mut hi = T::one() + c2.abs().max(c1.abs()).max(c0.abs());
        for _ in 0..200 {
            let mid = (lo + hi) * T::half();
            if g(mid) > T::zero() {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= T::epsilon() * hi {
                break;
            }
        }
        let m = (lo + hi) * T::half();
        let k = (T::two() * m).sqrt();
        let one = Complex::new(T::one(), T::zero());
        let re = |x: T| Complex::new(x, T::zero());
        let half_p = p * T::half();
        let shift = q / (T::two() * k);
        let [a, b] = quadratic_roots(one, re(-k), re(half_p + m + shift));
        let [c, d] = quadratic_roots(one, re(k), re(half_p + m - shift));
        [a, b, c, d]
    };
    for s in roots.iter_mut() {
        for _ in 0..4 {
            let (f, df) = eval_quartic(p, q, r, *s);
            if df.norm() == T::zero() {
                break;
            }
            let next = *s - f / df;
            if !(next.re.is_finite() && next.im.is_finite()) {
                break;
            }
            // accept Newton only when it improves the residual
            if eval_quartic(p, q, r, next).0.norm() < f.norm() {
                *s = next;
            } else {
                break;
            }
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn biquadratic_of_free_rotation() {
        // s⁴ + 2s² + 1 = (s² + 1)²
        let r = biquadratic_roots(2.0f64, 1.0);
        for z in r {
            assert!((z.norm() - 1.0).abs() < 1e-15 && z.re.abs() < 1e-15);
        }
    }

    #[test]
    fn principal_branch_convention() {
        let r = principal_sqrt(Complex::new(-4.0, 0.0));
        assert_eq!(r, Complex::new(0.0, 2.0));
        let r = principal_sqrt(Complex::new(-4.0, -0.0));
        assert!(r.re >= 0.0 && r.im >= 0.0);
    }

    #[test]
    fn quadratic_roots_without_cancellation() {
        let one = Complex::new(1.0, 0.0);
        let [a, b] = quadratic_roots(one, Complex::new(-1e8f64, 0.0), one);
        let small = if a.norm() < b.norm() { a } else { b };
        assert!((small.re - 1e-8).abs() < 1e-22);
    }

    proptest! {
        #[test]
        fn quartic_roots_satisfy_the_polynomial(p in -20.0f64..20.0, q in -20.0f64..20.0, r in -20.0f64..20.0) {
            let roots = depressed_quartic_roots(p, q, r);
            let scale = 1.0 + p.abs() + q.abs() + r.abs();
            for s in roots {
                let (f, _) = eval_quartic(p, q, r, s);
                let mag = 1.0 + s.norm().powi(4);
                prop_assert!(f.norm() <= 1e-10 * scale * mag, "residual {} at {}", f.norm(), s);
            }
            // Vieta: the roots sum to zero
            let sum: Complex<f64> = roots.iter().sum();
            prop_assert!(sum.norm() < 1e-7 * scale);
        }
    }
}
