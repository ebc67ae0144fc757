use super::Mat;
use crate::scalar::Real;

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    /// Ascending eigenvalues.
    pub values: Vec<T>,
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    pub vectors: Mat<T>,
}

/// Cyclic Jacobi rotations. Only the lower triangle is trusted; the input is
/// symmetrised first. Accurate to a few ulps of the spectral radius, which is
/// all the callers need for matrices of size ≤ ~40.
pub fn symmetric_eigen<T: Real>(a: &Mat<T>) -> SymmetricEigen<T> {
    assert!(a.is_square(), "symmetric_eigen needs a square matrix");
    let n = a.rows();
    let mut m = Mat::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)]) * T::half());
    let mut v = Mat::identity(n);

    let off = |m: &Mat<T>| {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..i {
                s += m[(i, j)] * m[(i, j)];
            }
        }
        s
    };
    let total = m.frobenius().max(T::min_positive_value());
    let tiny = T::epsilon() * T::epsilon() * total * total;

    for _sweep in 0..100 {
        if off(&m) <= tiny {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.abs() <= T::min_positive_value() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (T::two() * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = Mat::from_fn(n, n, |r, c| v[(r, order[c])]);
    SymmetricEigen { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diagonal_input_is_sorted() {
        let a = Mat::from_rows(&[vec![3.0, 0.0, 0.0], vec![0.0, -1.0, 0.0], vec![0.0, 0.0, 2.0]]);
        let e = symmetric_eigen(&a);
        assert_eq!(e.values, vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn reconstructs_random_symmetric_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 5, 12, 24] {
            let b = Mat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let a = b.add(&b.transpose());
            let e = symmetric_eigen(&a);
            let d = Mat::from_fn(n, n, |i, j| if i == j { e.values[i] } else { 0.0 });
            let back = e.vectors.matmul(&d).matmul(&e.vectors.transpose());
            assert!(back.sub(&a).max_abs() < 1e-12, "n = {n}");
            let vtv = e.vectors.transpose().matmul(&e.vectors);
            assert!(vtv.sub(&Mat::identity(n)).max_abs() < 1e-12);
        }
    }

    #[test]
    fn agrees_with_nalgebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 8;
        let b = Mat::from_fn(n, n, |_, _| rng.gen_range(-2.0..2.0));
        let a = b.add(&b.transpose());
        let na = nalgebra::DMatrix::from_row_slice(n, n, a.as_slice());
        let mut theirs: Vec<f64> = na.symmetric_eigen().eigenvalues.iter().copied().collect();
        theirs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let ours = symmetric_eigen(&a).values;
        for (x, y) in ours.iter().zip(&theirs) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn works_in_single_precision() {
        let a = Mat::from_rows(&[vec![2.0f32, 1.0], vec![1.0, 2.0]]);
        let e = symmetric_eigen(&a);
        assert!((e.values[0] - 1.0).abs() < 1e-6 && (e.values[1] - 3.0).abs() < 1e-6);
    }
}
