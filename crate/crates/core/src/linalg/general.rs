//! Eigenvalues of general real matrices: balancing, Householder reduction to
//! upper Hessenberg form, then the shifted double-step Francis QR iteration.

use super::{cnorm, solve_complex, Mat};
use crate::error::{Error, Result};
use crate::scalar::{Complex, Real};

const MAX_ITS: usize = 60;

/// Reduces `a` to upper Hessenberg form by Householder reflections. The
/// result is orthogonally similar to `a`.
pub fn hessenberg<T: Real>(a: &Mat<T>) -> Mat<T> {
    assert!(a.is_square());
    let n = a.rows();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let mut v: Vec<T> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = v.iter().map(|&x| x * x).sum::<T>().sqrt();
        if xnorm == T::zero() {
            continue;
        }
        let alpha = if v[0] >= T::zero() { -xnorm } else { xnorm };
        v[0] -= alpha;
        let vnorm = v.iter().map(|&x| x * x).sum::<T>().sqrt();
        if vnorm == T::zero() {
            continue;
        }
        for x in v.iter_mut() {
            *x /= vnorm;
        }
        // H <- (I - 2vvᵀ) H
        for j in 0..n {
            let s: T = v.iter().enumerate().map(|(t, &vi)| vi * h[(k + 1 + t, j)]).sum();
            for (t, &vi) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= T::two() * s * vi;
            }
        }
        // H <- H (I - 2vvᵀ)
        for i in 0..n {
            let s: T = v.iter().enumerate().map(|(t, &vi)| vi * h[(i, k + 1 + t)]).sum();
            for (t, &vi) in v.iter().enumerate() {
                h[(i, k + 1 + t)] -= T::two() * s * vi;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = T::zero();
        }
    }
    h
}

/// Diagonal similarity by powers of two so that row and column norms are
/// comparable; improves the accuracy of the QR step on badly scaled input.
fn balance<T: Real>(a: &mut Mat<T>) {
    let n = a.rows();
    let radix = T::two();
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = T::zero();
            let mut c = T::zero();
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == T::zero() || r == T::zero() {
                continue;
            }
            let s = c + r;
            let mut f = T::one();
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= sqrdx;
            }
            if (c + r) / f < T::of(0.95) * s {
                done = false;
                let ginv = T::one() / f;
                for j in 0..n {
                    a[(i, j)] *= ginv;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

fn sign<T: Real>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

/// All eigenvalues of a real square matrix, sorted by (re, im).
pub fn complex_eigenvalues<T: Real>(a: &Mat<T>) -> Result<Vec<Complex<T>>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut b = a.clone();
    balance(&mut b);
    let h = hessenberg(&b);

    // The iteration below follows the classical 1-based formulation; a
    // padded buffer keeps the index arithmetic identical to it.
    let mut m = vec![vec![T::zero(); n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            m[i + 1][j + 1] = h[(i, j)];
        }
    }
    let mut wr = vec![T::zero(); n + 1];
    let mut wi = vec![T::zero(); n + 1];
    hqr(&mut m, n, &mut wr, &mut wi)?;

    let mut out: Vec<Complex<T>> = (1..=n).map(|i| Complex::new(wr[i], wi[i])).collect();
    sort_complex(&mut out);
    Ok(out)
}

pub(crate) fn sort_complex<T: Real>(v: &mut [Complex<T>]) {
    v.sort_by(|x, y| {
        x.re.partial_cmp(&y.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.im.partial_cmp(&y.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}

#[allow(clippy::many_single_char_names)]
fn hqr<T: Real>(a: &mut [Vec<T>], n: usize, wr: &mut [T], wi: &mut [T]) -> Result<()> {
    let zero = T::zero();
    let mut anorm = zero;
    for i in 1..=n {
        for j in (i.max(2) - 1)..=n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n;
    let mut t = zero;
    let (mut p, mut q, mut r);
    let (mut x, mut y, mut z, mut w);
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == zero {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = zero;
                    break;
                }
                l -= 1;
            }
            x = a[nn][nn];
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = zero;
                nn -= 1;
            } else {
                y = a[nn - 1][nn - 1];
                w = a[nn][nn - 1] * a[nn - 1][nn];
                if l == nn - 1 {
                    p = T::half() * (y - x);
                    q = p * p + w;
                    z = q.abs().sqrt();
                    x += t;
                    if q >= zero {
                        z = p + sign(z, p);
                        wr[nn - 1] = x + z;
                        wr[nn] = x + z;
                        if z != zero {
                            wr[nn] = x - w / z;
                        }
                        wi[nn - 1] = zero;
                        wi[nn] = zero;
                    } else {
                        wr[nn - 1] = x + p;
                        wr[nn] = x + p;
                        wi[nn - 1] = -z;
                        wi[nn] = z;
                    }
                    nn -= 2;
                } else {
                    if its == MAX_ITS {
                        return Err(Error::EigenFailure);
                    }
                    if its > 0 && its % 10 == 0 {
                        // exceptional shift
                        t += x;
                        for i in 1..=nn {
                            a[i][i] -= x;
                        }
                        let s = a[nn][nn - 1].abs() + a[nn - 1][nn - 2].abs();
                        x = T::of(0.75) * s;
                        y = x;
                        w = T::of(-0.4375) * s * s;
                    }
                    its += 1;
                    let mut m = nn - 2;
                    loop {
                        z = a[m][m];
                        r = x - z;
                        let s0 = y - z;
                        p = (r * s0 - w) / a[m + 1][m] + a[m][m + 1];
                        q = a[m + 1][m + 1] - z - r - s0;
                        r = a[m + 2][m + 1];
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m + 2..=nn {
                        a[i][i - 2] = zero;
                        if i != m + 2 {
                            a[i][i - 3] = zero;
                        }
                    }
                    let mut k = m;
                    while k + 1 <= nn {
                        if k != m {
                            p = a[k][k - 1];
                            q = a[k + 1][k - 1];
                            r = zero;
                            if k != nn - 1 {
                                r = a[k + 2][k - 1];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != zero {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != zero {
                            if k == m {
                                if l != m {
                                    a[k][k - 1] = -a[k][k - 1];
                                }
                            } else {
                                a[k][k - 1] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                p = a[k][j] + q * a[k + 1][j];
                                if k != nn - 1 {
                                    p += r * a[k + 2][j];
                                    a[k + 2][j] -= p * z;
                                }
                                a[k + 1][j] -= p * y;
                                a[k][j] -= p * x;
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                p = x * a[i][k] + y * a[i][k + 1];
                                if k != nn - 1 {
                                    p += z * a[i][k + 2];
                                    a[i][k + 2] -= p * r;
                                }
                                a[i][k + 1] -= p * q;
                                a[i][k] -= p;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if nn < 2 || l + 1 >= nn {
                break;
            }
        }
    }
    Ok(())
}

/// Unit eigenvector of `a` for the (approximate) eigenvalue `s`, by complex
/// inverse iteration with a slightly offset shift.
pub fn eigenvector_for<T: Real>(a: &Mat<T>, s: Complex<T>) -> Result<Vec<Complex<T>>> {
    let n = a.rows();
    let scale = a.max_abs().max(T::one());
    let mut offset = T::of(1e-9) * scale;
    let mut v: Vec<Complex<T>> = (0..n)
        .map(|i| Complex::new(T::one() + T::of_usize(i) * T::of(0.1), T::of(0.05) * T::of_usize(i % 3)))
        .collect();
    for _attempt in 0..4 {
        let shift = s + Complex::new(offset, offset);
        let mut shifted: Vec<Complex<T>> = a.as_slice().iter().map(|&x| Complex::new(x, T::zero())).collect();
        for i in 0..n {
            shifted[i * n + i] = shifted[i * n + i] - shift;
        }
        let mut ok = true;
        for _ in 0..6 {
            match solve_complex(&shifted, n, &v) {
                Ok(next) => {
                    let nrm = cnorm(&next);
                    if !(nrm.is_finite() && nrm > T::zero()) {
                        ok = false;
                        break;
                    }
                    v = next.into_iter().map(|z| z / nrm).collect();
                }
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Ok(v);
        }
        offset = offset * T::of(1e3);
    }
    Err(Error::EigenFailure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: &[Complex<f64>], b: &[Complex<f64>], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn rotation_generator_has_unit_imaginary_pair() {
        let a = Mat::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]);
        let e = complex_eigenvalues(&a).unwrap();
        assert!(close(&e, &[Complex::new(0.0, -1.0), Complex::new(0.0, 1.0)], 1e-15));
    }

    #[test]
    fn hessenberg_is_similar_and_has_zero_band() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = Mat::from_fn(7, 7, |_, _| rng.gen_range(-1.0f64..1.0));
        let h = hessenberg(&a);
        for i in 0..7usize {
            for j in 0..i.saturating_sub(1) {
                assert_eq!(h[(i, j)], 0.0);
            }
        }
        assert!((h.trace() - a.trace()).abs() < 1e-13);
        assert!((h.frobenius() - a.frobenius()).abs() < 1e-13);
    }

    #[test]
    fn companion_matrix_recovers_roots() {
        // (s-1)(s-2)(s-3)(s²+1) = s⁵ - 6s⁴ + 12s³ - 12s² + 11s - 6
        let c = [-6.0, 11.0, -12.0, 12.0, -6.0];
        let mut a = Mat::zeros(5, 5);
        for i in 1..5 {
            a[(i, i - 1)] = 1.0;
        }
        for i in 0..5 {
            a[(i, 4)] = -c[i];
        }
        let e = complex_eigenvalues(&a).unwrap();
        let want = [
            Complex::new(0.0, -1.0),
            Complex::new(0.0, 1.0),
            Complex::new(1.0, 0.0),
            Complex::new(2.0, 0.0),
            Complex::new(3.0, 0.0),
        ];
        assert!(close(&e, &want, 1e-10), "{e:?}");
    }

    #[test]
    fn agrees_with_nalgebra_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for n in [3, 6, 10, 16] {
            let a = Mat::from_fn(n, n, |_, _| rng.gen_range(-3.0..3.0));
            let ours = complex_eigenvalues(&a).unwrap();
            let na = nalgebra::DMatrix::from_row_slice(n, n, a.as_slice());
            let mut theirs: Vec<Complex<f64>> = na.complex_eigenvalues().iter().copied().collect();
            sort_complex(&mut theirs);
            assert!(close(&ours, &theirs, 1e-9), "n = {n}\n{ours:?}\n{theirs:?}");
        }
    }

    #[test]
    fn inverse_iteration_finds_eigenvector() {
        let a = Mat::from_rows(&[vec![2.0, 1.0, 0.0], vec![-1.0, 2.0, 0.0], vec![0.0, 0.0, 5.0]]);
        let s = Complex::new(2.0, 1.0);
        let v = eigenvector_for(&a, s).unwrap();
        let av = a.mul_cvec(&v);
        let res: f64 = av.iter().zip(&v).map(|(x, y)| (x - s * y).norm_sqr()).sum::<f64>().sqrt();
        assert!(res < 1e-8);
    }
}
