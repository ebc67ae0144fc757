use super::oracle::mass_weighted_hessian;
use super::Spectrum;
use crate::error::Result;
use crate::linalg::{biquadratic_roots, complex_eigenvalues, depressed_quartic_roots, Mat};
use crate::model::{angular_frequency_squared, BodyConfiguration, PotentialSpec};
use crate::scalar::{Complex, Real};
use crate::symmetry::{
    apply_j, character_table, detect_polygon_symmetry, j_compatible_pairs, CoupledPlane, Irrep, JDecomposition,
    SymmetryGroup,
};

/// `B = [[0, I₂], [ω²I₂ + Λ, 2ωJ]]` with `Λ = diag(λᵢ, λⱼ)`, the
/// linearization on the span of one `Ĵ`-compatible pair.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearBlock<T> {
    pub omega: T,
    pub lambda_pair: (T, T),
    pub matrix: Mat<T>,
}

impl<T: Real> LinearBlock<T> {
    /// `(b, c)` in the characteristic polynomial `s⁴ + b s² + c`.
    ///
    /// `cₖ = ω² + λₖ` within a few ulps of zero is set to exactly zero: the
    /// square root in the closed form would otherwise turn that roundoff into
    /// a spurious pair of size `√ε`.
    pub fn characteristic_coefficients(&self) -> (T, T) {
        let w2 = self.omega * self.omega;
        let snap = |l: T| {
            let c = w2 + l;
            if c.abs() <= T::of(8.0) * T::epsilon() * (w2 + l.abs()) {
                T::zero()
            } else {
                c
            }
        };
        let (c1, c2) = (snap(self.lambda_pair.0), snap(self.lambda_pair.1));
        (T::of(4.0) * w2 - c1 - c2, c1 * c2)
    }
}

pub fn build_block<T: Real>(omega: T, li: T, lj: T) -> LinearBlock<T> {
    let w2 = omega * omega;
    let (z, o) = (T::zero(), T::one());
    let two_w = T::two() * omega;
    let matrix = Mat::from_rows(&[
        vec![z, z, o, z],
        vec![z, z, z, o],
        vec![w2 + li, z, z, two_w],
        vec![z, w2 + lj, -two_w, z],
    ]);
    LinearBlock { omega, lambda_pair: (li, lj), matrix }
}

/// Closed form: `det [[s² − c₁, −2ωs], [2ωs, s² − c₂]] = s⁴ + (4ω² − c₁ − c₂)s² + c₁c₂`,
/// solved as a quadratic in `s²` followed by principal square roots.
pub fn block_spectrum<T: Real>(block: &LinearBlock<T>) -> [Complex<T>; 4] {
    let (b, c) = block.characteristic_coefficients();
    biquadratic_roots(b, c)
}

/// The same four eigenvalues from the general dense eigensolver.
pub fn block_spectrum_dense<T: Real>(block: &LinearBlock<T>) -> Result<Vec<Complex<T>>> {
    complex_eigenvalues(&block.matrix)
}

/// A planar component where `H` and `Ĵ` share no invariant planes.
///
/// On the rotation eigenspace `W` with `Ĵ u± = ±i u±` the linearization
/// `s²X = 2ωsĴX + (ω² + K)X` becomes, for `s = iσ`,
/// `σ⁴ − (4ω² − c₊ − c₋)σ² + 2ω(c₊ − c₋)σ + c₊c₋ − |κ|² = 0`
/// with `c± = ω² + h±±`. The conjugate space `W̄` contributes the conjugate roots.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledBlock<T> {
    pub irrep: Irrep,
    pub omega: T,
    pub h_plus: T,
    pub h_minus: T,
    pub kappa: T,
}

impl<T: Real> CoupledBlock<T> {
    pub fn new(omega: T, plane: &CoupledPlane<T>) -> Self {
        Self { irrep: plane.irrep, omega, h_plus: plane.h_plus, h_minus: plane.h_minus, kappa: plane.kappa }
    }

    /// `(p, q, r)` of the depressed quartic `σ⁴ + pσ² + qσ + r` in `σ = −is`.
    pub fn quartic_coefficients(&self) -> (T, T, T) {
        let w2 = self.omega * self.omega;
        let (cp, cm) = (w2 + self.h_plus, w2 + self.h_minus);
        (cp + cm - T::of(4.0) * w2, T::two() * self.omega * (cp - cm), cp * cm - self.kappa * self.kappa)
    }

    /// Eight eigenvalues: `s = iσ` for the four quartic roots and their conjugates.
    pub fn spectrum(&self) -> Vec<Complex<T>> {
        let (p, q, r) = self.quartic_coefficients();
        let i = Complex::new(T::zero(), T::one());
        depressed_quartic_roots(p, q, r).iter().flat_map(|&sigma| [i * sigma, (i * sigma).conj()]).collect()
    }
}

/// Linearization restricted to a residual component, solved densely.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualBlock<T> {
    pub irrep: Irrep,
    pub matrix: Mat<T>,
}

impl<T: Real> ResidualBlock<T> {
    pub fn spectrum(&self) -> Result<Vec<Complex<T>>> {
        complex_eigenvalues(&self.matrix)
    }
}

/// `[[0, I], [ω²I + QᵀKQ, 2ω QᵀĴQ]]` for an orthonormal basis `Q` of a
/// subspace invariant under both `K` and `Ĵ`.
pub fn reduced_linearization<T: Real>(k: &Mat<T>, basis: &[Vec<T>], omega: T) -> Mat<T> {
    let d = basis.len();
    let q = Mat::from_columns(basis);
    let kr = k.compress(&q);
    let jq: Vec<Vec<T>> = basis.iter().map(|v| apply_j(v)).collect();
    let jr = q.transpose().matmul(&Mat::from_columns(&jq));
    let w2 = omega * omega;
    let mut m = Mat::zeros(2 * d, 2 * d);
    for r in 0..d {
        m[(r, d + r)] = T::one();
        for c in 0..d {
            m[(d + r, c)] = kr[(r, c)] + if r == c { w2 } else { T::zero() };
            m[(d + r, d + c)] = T::two() * omega * jr[(r, c)];
        }
    }
    m
}

/// Everything the block reduction produces for one relative equilibrium.
/// `K = M^{−1/2} D²U M^{−1/2}` is the mass-weighted Hessian, so for equal
/// masses `m` the pair eigenvalues are those of `D²U` divided by `m`.
#[derive(Debug, Clone)]
pub struct Linearization<T> {
    pub omega_squared: T,
    pub omega: T,
    pub weighted_hessian: Mat<T>,
    pub group: SymmetryGroup<T>,
    pub decomposition: JDecomposition<T>,
    pub blocks: Vec<LinearBlock<T>>,
    pub coupled: Vec<CoupledBlock<T>>,
    pub residual: Vec<ResidualBlock<T>>,
}

impl<T: Real> Linearization<T> {
    /// Union of all block spectra, consolidated like the oracle.
    pub fn block_union_spectrum(&self) -> Result<Spectrum<T>> {
        let mut all: Vec<Complex<T>> = self.blocks.iter().flat_map(block_spectrum).collect();
        for c in &self.coupled {
            all.extend(c.spectrum());
        }
        for r in &self.residual {
            all.extend(r.spectrum()?);
        }
        Ok(Spectrum::new(all).consolidated())
    }
}

/// Splits the linearization of a central configuration into blocks. The
/// symmetry group is detected from the configuration; anything that is not
/// an equal-mass regular polygon is treated with the trivial group.
pub fn linearize<T: Real>(config: &BodyConfiguration<T>, spec: &PotentialSpec<T>) -> Result<Linearization<T>> {
    let omega_squared = angular_frequency_squared(config, spec)?;
    let omega = omega_squared.sqrt();
    let k = mass_weighted_hessian(config, spec)?;
    let tol = T::of(1e-8).max(T::epsilon() * T::of(1e3));
    let group = detect_polygon_symmetry(config, tol).unwrap_or_else(|_| SymmetryGroup::trivial(config.n()));
    let table = character_table(&group)?;
    let decomposition = j_compatible_pairs(&k, &group, &table)?;
    let blocks = decomposition.pairs.iter().map(|p| build_block(omega, p.lambdas[0], p.lambdas[1])).collect();
    let coupled = decomposition.coupled.iter().map(|c| CoupledBlock::new(omega, c)).collect();
    let residual = decomposition
        .residual
        .iter()
        .map(|r| ResidualBlock { irrep: r.irrep, matrix: reduced_linearization(&k, &r.basis, omega) })
        .collect();
    Ok(Linearization { omega_squared, omega, weighted_hessian: k, group, decomposition, blocks, coupled, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::central_config::regular_polygon;
    use crate::spectrum::{compare_spectra, full_linearization_spectrum};
    use proptest::prelude::*;

    #[test]
    fn block_layout() {
        let b = build_block(2.0, 0.5, -0.25);
        assert_eq!(b.matrix[(2, 0)], 4.5);
        assert_eq!(b.matrix[(3, 1)], 3.75);
        assert_eq!(b.matrix[(2, 3)], 4.0);
        assert_eq!(b.matrix[(3, 2)], -4.0);
        assert_eq!(b.matrix.trace(), 0.0);
    }

    #[test]
    fn free_translation_block() {
        let s = block_spectrum(&build_block(1.0f64, 0.0, 0.0));
        for z in s {
            assert!(z.re.abs() < 1e-15 && (z.im.abs() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn triangle_gauge_block_is_two_zeros_and_imaginary_pair() {
        for alpha in [0.5, 1.0, 1.5] {
            let w2 = 3f64.powf(-alpha / 2.0) * alpha;
            let l1 = w2 * (1.0 + alpha);
            let b = build_block(w2.sqrt(), l1, -w2);
            let s = Spectrum::new(block_spectrum(&b).to_vec()).into_values();
            let expect = w2.sqrt() * (2.0 - alpha).sqrt();
            assert!(s.iter().filter(|z| z.norm() < 1e-12).count() == 2);
            assert!(s.iter().any(|z| (z.im - expect).abs() < 1e-12 && z.re.abs() < 1e-12));
        }
    }

    #[test]
    fn newtonian_triangle_quartic_matches_routh() {
        let w2 = 3f64.powf(-0.5);
        let l4 = 0.5 * w2;
        let (b, c) = build_block(w2.sqrt(), l4, l4).characteristic_coefficients();
        assert!((b - w2).abs() < 1e-15);
        assert!((c - 27.0 / 12.0 * w2 * w2).abs() < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn closed_form_matches_dense(omega in 0.1f64..10.0, li in -10.0f64..10.0, lj in -10.0f64..10.0) {
            let b = build_block(omega, li, lj);
            let closed = Spectrum::new(block_spectrum(&b).to_vec());
            let dense = Spectrum::new(block_spectrum_dense(&b).unwrap()).consolidated();
            let cmp = compare_spectra(&closed, &dense, 1e-10);
            prop_assert!(cmp.passed, "{:?}", cmp);
        }
    }

    #[test]
    fn coupled_block_agrees_with_dense_reduction() {
        let c = regular_polygon(5, 1.0, 1.0).unwrap();
        let lin = linearize(&c, &PotentialSpec::homogeneous(1.0).unwrap()).unwrap();
        assert_eq!(lin.coupled.len(), 1);
        let plane = &lin.decomposition.coupled[0];
        let parts = |v: &[Complex<f64>]| -> [Vec<f64>; 2] {
            [v.iter().map(|z| z.re).collect(), v.iter().map(|z| z.im).collect()]
        };
        let basis: Vec<Vec<f64>> = parts(&plane.u_plus).into_iter().chain(parts(&plane.u_minus)).collect();
        let basis = crate::linalg::orthonormal_basis(&basis, 1e-8);
        assert_eq!(basis.len(), 4);
        let dense = complex_eigenvalues(&reduced_linearization(&lin.weighted_hessian, &basis, lin.omega)).unwrap();
        let cmp = compare_spectra(
            &Spectrum::new(lin.coupled[0].spectrum()),
            &Spectrum::new(dense).consolidated(),
            1e-10,
        );
        assert!(cmp.passed, "{cmp:?}");
    }

    #[test]
    fn block_union_matches_oracle_for_polygons() {
        for n in 3..9 {
            for spec in [
                PotentialSpec::homogeneous(1.0).unwrap(),
                PotentialSpec::homogeneous(2.5).unwrap(),
                PotentialSpec::manev(),
                PotentialSpec::schwarzschild(),
            ] {
                let c = regular_polygon(n, 1.0, 1.0).unwrap();
                let lin = linearize(&c, &spec).unwrap();
                let blocks = lin.block_union_spectrum().unwrap();
                let oracle = full_linearization_spectrum(&c, &spec).unwrap();
                let cmp = compare_spectra(&blocks, &oracle, 1e-9);
                assert!(cmp.passed, "n = {n}, {spec}: {cmp:?}");
            }
        }
    }

    #[test]
    fn unequal_masses_fall_back_to_residual_blocks() {
        // Lagrange triangle with unequal masses is still central
        let c = regular_polygon(3, 1.0, 1.0).unwrap();
        let masses = vec![1.0, 2.0, 3.0];
        let c = BodyConfiguration::new(masses, c.positions().to_vec()).unwrap().recentered();
        let spec = PotentialSpec::homogeneous(1.0).unwrap();
        let lin = linearize(&c, &spec).unwrap();
        assert!(!lin.residual.is_empty());
        let cmp =
            compare_spectra(&lin.block_union_spectrum().unwrap(), &full_linearization_spectrum(&c, &spec).unwrap(), 1e-9);
        assert!(cmp.passed, "{cmp:?}");
    }
}
