//! Central configurations: the canonical regular polygons, the centrality
//! test `∇U + λ∇I = 0`, and a damped Gauss-Newton refiner.

use crate::error::{Error, Result};
use crate::linalg::{self, least_squares, orthogonal_complement, Mat};
use crate::model::{
    euler_multiplier, gradient_flat, hessian_flat, potential_gradient, potential_terms_flat, BodyConfiguration,
    PotentialSpec,
};
use crate::scalar::Real;

/// Outcome of a centrality check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralityReport<T> {
    /// `‖∇U + λ ∇I‖`
    pub residual_norm: T,
    /// Euler multiplier `λ = Σ aₖUₖ / 2I`, i.e. `ω²`.
    pub lambda: T,
    pub tolerance: T,
    pub is_central: bool,
}

/// Equal-mass regular `n`-gon, body `i` at angle `2π(i−1)/n`.
pub fn regular_polygon<T: Real>(n: usize, radius: T, mass: T) -> Result<BodyConfiguration<T>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("polygon needs n ≥ 2, got {n}")));
    }
    if !(radius > T::zero() && radius.is_finite()) {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    if !(mass > T::zero() && mass.is_finite()) {
        return Err(Error::InvalidArgument("mass must be positive".into()));
    }
    let unit = |k: usize| -> [T; 2] {
        // exact values on the axes; mirror the lower half so y-coordinates cancel exactly
        if k == 0 {
            return [T::one(), T::zero()];
        }
        if 2 * k == n {
            return [-T::one(), T::zero()];
        }
        if 4 * k == n {
            return [T::zero(), T::one()];
        }
        if 4 * k == 3 * n {
            return [T::zero(), -T::one()];
        }
        let (kk, flip) = if 2 * k > n { (n - k, true) } else { (k, false) };
        let theta = T::two() * T::PI() * T::of_usize(kk) / T::of_usize(n);
        let (s, c) = theta.sin_cos();
        [c, if flip { -s } else { s }]
    };
    let positions = (0..n).map(|k| unit(k)).map(|p| [p[0] * radius, p[1] * radius]).collect();
    BodyConfiguration::new_centered(vec![mass; n], positions)
}

/// Default centrality tolerance `1e−10 · (‖∇U‖ + 1)`, loosened to a few ulps
/// for single precision.
pub fn default_centrality_tolerance<T: Real>(grad: &[T]) -> T {
    T::of(1e-10).max(T::epsilon() * T::of(64.0)) * (linalg::norm(grad) + T::one())
}

/// Residual of the central configuration equation with the Euler multiplier.
pub fn is_central_configuration<T: Real>(
    config: &BodyConfiguration<T>,
    spec: &PotentialSpec<T>,
    tol: T,
) -> Result<CentralityReport<T>> {
    let grad = potential_gradient(config, spec)?;
    let lambda = euler_multiplier(config, spec);
    let residual = central_residual(&grad, lambda, &config.flat(), &config.mass_diagonal());
    let residual_norm = linalg::norm(&residual);
    Ok(CentralityReport { residual_norm, lambda, tolerance: tol, is_central: residual_norm <= tol })
}

fn central_residual<T: Real>(grad: &[T], lambda: T, z: &[T], mass: &[T]) -> Vec<T> {
    grad.iter().zip(z).zip(mass).map(|((&g, &x), &m)| g + lambda * m * x).collect()
}

struct Evaluation<T> {
    residual: Vec<T>,
    norm: T,
}

fn evaluate<T: Real>(masses: &[T], mass: &[T], z: &[T], spec: &PotentialSpec<T>) -> Evaluation<T> {
    let terms = potential_terms_flat(masses, z, spec);
    let inertia = z.iter().zip(mass).map(|(&x, &m)| m * x * x).sum::<T>() * T::half();
    let s: T = terms.iter().zip(spec.terms()).map(|(&u, t)| t.exponent * u).sum();
    let lambda = s / (T::two() * inertia);
    let residual = central_residual(&gradient_flat(masses, z, spec, None), lambda, z, mass);
    let norm = linalg::norm(&residual);
    Evaluation { residual, norm }
}

/// Jacobian of `F(z) = ∇U + λ(z) M z` with `λ(z) = Σ aₖUₖ / 2I`.
fn residual_jacobian<T: Real>(masses: &[T], mass: &[T], z: &[T], spec: &PotentialSpec<T>) -> Mat<T> {
    let dim = z.len();
    let terms = potential_terms_flat(masses, z, spec);
    let inertia = z.iter().zip(mass).map(|(&x, &m)| m * x * x).sum::<T>() * T::half();
    let s: T = terms.iter().zip(spec.terms()).map(|(&u, t)| t.exponent * u).sum();
    let lambda = s / (T::two() * inertia);
    let mz: Vec<T> = z.iter().zip(mass).map(|(&x, &m)| m * x).collect();
    let mut grad_s = vec![T::zero(); dim];
    for (k, t) in spec.terms().iter().enumerate() {
        for (gs, g) in grad_s.iter_mut().zip(gradient_flat(masses, z, spec, Some(k))) {
            *gs += t.exponent * g;
        }
    }
    let grad_lambda: Vec<T> = grad_s
        .iter()
        .zip(&mz)
        .map(|(&g, &w)| g / (T::two() * inertia) - lambda * w / inertia)
        .collect();
    let mut jac = hessian_flat(masses, z, spec);
    for i in 0..dim {
        jac[(i, i)] += lambda * mass[i];
        for j in 0..dim {
            jac[(i, j)] += mz[i] * grad_lambda[j];
        }
    }
    jac
}

fn recenter<T: Real>(masses: &[T], z: &mut [T]) {
    let total: T = masses.iter().copied().sum();
    for axis in 0..2 {
        let c = masses.iter().enumerate().map(|(i, &m)| m * z[2 * i + axis]).sum::<T>() / total;
        for i in 0..masses.len() {
            z[2 * i + axis] -= c;
        }
    }
}

fn min_distance<T: Real>(z: &[T]) -> T {
    let n = z.len() / 2;
    let mut d = T::infinity();
    for i in 0..n {
        for j in i + 1..n {
            d = d.min((z[2 * i] - z[2 * j]).hypot(z[2 * i + 1] - z[2 * j + 1]));
        }
    }
    d
}

const POLISH_STEPS: usize = 4;

/// Damped Gauss-Newton on `∇U + λ(z) M z = 0` with gauge fixing: the center of
/// mass is projected to the origin and the `y` coordinate of body 1 is held at
/// its initial (centered) value. Each step is also orthogonal to `∇I`, so the
/// size of the configuration changes only at second order. Any remaining
/// degenerate direction is handled by a minimum-norm least-squares step.
pub fn refine_central_configuration<T: Real>(
    config: &BodyConfiguration<T>,
    spec: &PotentialSpec<T>,
    max_iter: usize,
    tol: T,
) -> Result<BodyConfiguration<T>> {
    if config.is_centered() && is_central_configuration(config, spec, tol)?.is_central {
        return Ok(config.clone());
    }
    let masses = config.masses().to_vec();
    let mass = config.mass_diagonal();
    let n = masses.len();
    let dim = 2 * n;
    let mut z = config.flat();
    recenter(&masses, &mut z);
    let pin = z[1];

    let mut constraints = vec![vec![T::zero(); dim]; 4];
    for i in 0..n {
        constraints[0][2 * i] = masses[i];
        constraints[1][2 * i + 1] = masses[i];
    }
    constraints[2][1] = T::one();
    let d0 = min_distance(&z);
    let cutoff = T::of(1e-10).max(T::epsilon() * T::of(1e3));

    let mut current = evaluate(&masses, &mass, &z, spec);
    let mut iterations = 0;
    // a few extra steps once `tol` is met drive the residual down to
    // roundoff; eigenvalues of the defective gauge modes move like its
    // square root
    let mut polish = 0;
    loop {
        let converged = current.norm <= tol;
        if converged {
            if polish == POLISH_STEPS {
                break;
            }
            polish += 1;
        } else if iterations == max_iter {
            return Err(Error::NoConvergence { iterations, residual: current.norm.to_f64_lossy() });
        }
        iterations += 1;
        // steps are also kept orthogonal to ∇I = Mz: the residual norm is not
        // scale invariant, and an unconstrained step would lower it by
        // inflating the configuration instead of correcting its shape
        constraints[3] = z.iter().zip(&mass).map(|(&x, &m)| m * x).collect();
        let free = Mat::from_columns(&orthogonal_complement(&constraints, dim));
        let jac = residual_jacobian(&masses, &mass, &z, spec).matmul(&free);
        let rhs: Vec<T> = current.residual.iter().map(|&r| -r).collect();
        let step = free.mul_vec(&least_squares(&jac, &rhs, cutoff));

        let mut t = T::one();
        let mut accepted = None;
        for _ in 0..40 {
            let mut trial: Vec<T> = z.iter().zip(&step).map(|(&x, &s)| x + t * s).collect();
            recenter(&masses, &mut trial);
            trial[1] = pin;
            if min_distance(&trial) > T::of(1e-6) * d0 {
                let eval = evaluate(&masses, &mass, &trial, spec);
                if eval.norm.is_finite() && eval.norm < current.norm {
                    accepted = Some((trial, eval));
                    break;
                }
            }
            t = t * T::half();
        }
        match accepted {
            Some((trial, eval)) => {
                z = trial;
                current = eval;
            }
            None if converged => break,
            None => {
                return Err(Error::NoConvergence { iterations, residual: current.norm.to_f64_lossy() });
            }
        }
    }
    let refined = BodyConfiguration::from_flat(masses, &z)?.mark_centered();
    Ok(refined)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::moment_of_inertia;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn triangle_and_square_coordinates() {
        let t = regular_polygon(3, 1.0, 1.0).unwrap().flat();
        let h = 3f64.sqrt() / 2.0;
        let want = [1.0, 0.0, -0.5, h, -0.5, -h];
        for (a, b) in t.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(regular_polygon(4, 1.0, 1.0).unwrap().flat(), vec![1.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn polygons_are_centered() {
        for n in 2..12 {
            let c = regular_polygon(n, 2.5f64, 0.7).unwrap();
            assert!(c.is_centered());
            let com = c.center_of_mass();
            assert!(com[0].abs() < 1e-15 && com[1].abs() < 1e-15);
        }
        assert!(regular_polygon::<f64>(1, 1.0, 1.0).is_err());
    }

    #[test]
    fn polygons_are_central_for_all_presets() {
        let specs = [
            PotentialSpec::homogeneous(0.5).unwrap(),
            PotentialSpec::homogeneous(1.0).unwrap(),
            PotentialSpec::homogeneous(3.0).unwrap(),
            PotentialSpec::manev(),
            PotentialSpec::schwarzschild(),
        ];
        for n in 3..8 {
            let c = regular_polygon(n, 1.0, 1.0).unwrap();
            for spec in &specs {
                let r = is_central_configuration(&c, spec, 1e-12).unwrap();
                assert!(r.is_central, "n = {n}, residual {}", r.residual_norm);
            }
        }
    }

    #[test]
    fn isosceles_triangle_is_not_central() {
        let c = BodyConfiguration::new(vec![1.0; 3], vec![[0.0, 1.0], [-1.0, 0.0], [1.0, 0.0]]).unwrap().recentered();
        let r = is_central_configuration(&c, &PotentialSpec::homogeneous(1.0).unwrap(), 1e-10).unwrap();
        assert!(!r.is_central);
    }

    #[test]
    fn exact_input_is_returned_unchanged() {
        let c = regular_polygon(3, 1.0, 1.0).unwrap();
        let r = refine_central_configuration(&c, &PotentialSpec::homogeneous(1.0).unwrap(), 50, 1e-12).unwrap();
        assert_eq!(r, c);
    }

    fn sorted_distances(c: &BodyConfiguration<f64>) -> Vec<f64> {
        let mut d = Vec::new();
        for i in 0..c.n() {
            for j in i + 1..c.n() {
                d.push(c.distance(i, j));
            }
        }
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        d
    }

    #[test]
    fn perturbed_triangle_returns_to_equilateral_shape() {
        let spec = PotentialSpec::homogeneous(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let base = regular_polygon(3, 1.0, 1.0).unwrap().flat();
            let noise: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let k = 0.05 / linalg::norm(&noise);
            let z: Vec<f64> = base.iter().zip(&noise).map(|(a, b)| a + k * b).collect();
            let guess = BodyConfiguration::from_flat(vec![1.0; 3], &z).unwrap();
            let r = refine_central_configuration(&guess, &spec, 100, 1e-12).unwrap();
            assert!(is_central_configuration(&r, &spec, 1e-12).unwrap().is_central);
            // central configurations are defined up to similarity: compare at I = 3/2
            let s = (1.5 / moment_of_inertia(&r)).sqrt();
            for d in sorted_distances(&r.scaled(s)) {
                assert!((d - 3f64.sqrt()).abs() < 1e-8, "{d}");
            }
        }
    }

    #[test]
    fn collinear_guess_converges_to_a_collinear_configuration() {
        let spec = PotentialSpec::homogeneous(1.0).unwrap();
        let guess = BodyConfiguration::new(vec![1.0; 3], vec![[-1.1, 0.0], [0.1, 0.0], [0.9, 0.0]]).unwrap();
        let r = refine_central_configuration(&guess, &spec, 100, 1e-12).unwrap();
        assert!(is_central_configuration(&r, &spec, 1e-12).unwrap().is_central);
        assert!(r.positions().iter().all(|q| q[1] == 0.0));
    }

    #[test]
    fn refined_output_satisfies_gauge_exactly() {
        let spec = PotentialSpec::manev();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let base = regular_polygon(4, 1.0, 1.0).unwrap().flat();
        let z: Vec<f64> = base.iter().map(|a| a + rng.gen_range(-0.03..0.03)).collect();
        let guess = BodyConfiguration::from_flat(vec![1.0; 4], &z).unwrap();
        let mut centered = z.clone();
        recenter(&[1.0; 4], &mut centered);
        let r = refine_central_configuration(&guess, &spec, 100, 1e-11).unwrap();
        assert_eq!(r.flat()[1], centered[1]);
        let com = r.center_of_mass();
        assert!(com[0].abs() < 1e-14 && com[1].abs() < 1e-14);
        assert!(r.is_centered());
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let spec = PotentialSpec::schwarzschild();
        let z = vec![1.0, 0.1, -0.4, 0.9, -0.5, -0.8, 0.1, -0.3];
        let masses = vec![1.0, 2.0, 0.5, 1.5];
        let mass: Vec<f64> = masses.iter().flat_map(|&m| [m, m]).collect();
        let analytic = residual_jacobian(&masses, &mass, &z, &spec);
        let numeric = crate::fd::jacobian(|x| evaluate(&masses, &mass, x, &spec).residual, &z);
        assert!(crate::fd::relative_max_error(analytic.as_slice(), numeric.as_slice()) < 1e-6);
    }
}
