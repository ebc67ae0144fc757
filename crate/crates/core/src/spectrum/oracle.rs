use super::Spectrum;
use crate::error::Result;
use crate::linalg::{complex_eigenvalues, Mat};
use crate::model::{angular_frequency_squared, potential_hessian, BodyConfiguration, PotentialSpec};
use crate::scalar::Real;

/// `K = M^{−1/2} D²U M^{−1/2}`; similar to `M⁻¹D²U` and symmetric.
pub fn mass_weighted_hessian<T: Real>(config: &BodyConfiguration<T>, spec: &PotentialSpec<T>) -> Result<Mat<T>> {
    let h = potential_hessian(config, spec)?;
    let w: Vec<T> = config.mass_diagonal().iter().map(|&m| T::one() / m.sqrt()).collect();
    Ok(Mat::from_fn(h.rows(), h.cols(), |i, j| w[i] * h[(i, j)] * w[j]))
}

/// `[[0, I_{2n}], [ω²I_{2n} + M⁻¹D²U, 2ωĴ]]`, the rotating-frame
/// linearization in position/velocity coordinates.
pub fn linearization_matrix<T: Real>(config: &BodyConfiguration<T>, spec: &PotentialSpec<T>) -> Result<Mat<T>> {
    let w2 = angular_frequency_squared(config, spec)?;
    let omega = w2.sqrt();
    let h = potential_hessian(config, spec)?;
    let m = config.mass_diagonal();
    let d = h.rows();
    let mut a = Mat::zeros(2 * d, 2 * d);
    for i in 0..d {
        a[(i, d + i)] = T::one();
        for j in 0..d {
            a[(d + i, j)] = h[(i, j)] / m[i];
        }
        a[(d + i, i)] += w2;
    }
    for b in 0..d / 2 {
        let (x, y) = (d + 2 * b, d + 2 * b + 1);
        a[(x, y)] = T::two() * omega;
        a[(y, x)] = -T::two() * omega;
    }
    Ok(a)
}

/// Eigenvalues of the full linearization from the dense solver, with split
/// defective eigenvalues consolidated. No symmetry is used.
pub fn full_linearization_spectrum<T: Real>(
    config: &BodyConfiguration<T>,
    spec: &PotentialSpec<T>,
) -> Result<Spectrum<T>> {
    let a = linearization_matrix(config, spec)?;
    Ok(Spectrum::new(complex_eigenvalues(&a)?).consolidated())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::central_config::regular_polygon;
    use crate::scalar::Complex;
    use crate::spectrum::classify;

    #[test]
    fn triangle_has_structural_modes() {
        let c = regular_polygon(3, 1.0, 1.0).unwrap();
        let s = full_linearization_spectrum(&c, &PotentialSpec::homogeneous(1.0).unwrap()).unwrap();
        assert_eq!(s.len(), 12);
        let w = 3f64.powf(-0.25);
        assert!(s.count_near(Complex::new(0.0, 0.0), 1e-8) >= 2);
        assert!(s.count_near(Complex::new(0.0, w), 1e-8) >= 2);
        assert!(s.count_near(Complex::new(0.0, -w), 1e-8) >= 2);
        assert!(s.hamiltonian_defect() < 1e-9);
    }

    #[test]
    fn schwarzschild_square_is_unstable() {
        let c = regular_polygon(4, 1.0, 1.0).unwrap();
        let s = full_linearization_spectrum(&c, &PotentialSpec::schwarzschild()).unwrap();
        assert!(s.max_real_part() > 0.0);
        assert!(classify(&s, 1e-8).is_unstable());
    }

    #[test]
    fn rejects_non_central_input() {
        let c = BodyConfiguration::new_centered(vec![1.0; 3], vec![[1.0, 0.0], [-0.5, 0.9], [-0.5, -0.9]]).unwrap();
        assert!(full_linearization_spectrum(&c, &PotentialSpec::homogeneous(1.0).unwrap()).is_err());
    }

    #[test]
    fn eigenvalues_follow_the_radius_scaling_law() {
        for (n, alpha) in [(3, 1.0), (4, 0.7), (5, 2.5)] {
            let spec = PotentialSpec::homogeneous(alpha).unwrap();
            let c = regular_polygon(n, 1.0, 1.0).unwrap();
            let base = full_linearization_spectrum(&c, &spec).unwrap();
            for rho in [0.5f64, 3.0] {
                let scaled = full_linearization_spectrum(&c.scaled(rho), &spec).unwrap();
                let f = rho.powf(-(alpha + 2.0) / 2.0);
                let expect = base.map(|z| z * f);
                let cmp = crate::spectrum::compare_spectra(&scaled, &expect, 1e-8);
                assert!(cmp.passed, "{cmp:?}");
                assert_eq!(classify(&scaled, 1e-8).verdict, classify(&base, 1e-8).verdict);
            }
        }
    }
}
