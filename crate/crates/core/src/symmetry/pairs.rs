//! Splitting configuration space into `Ĵ`-compatible eigenplanes of `H`.
//!
//! `Ĵ = diag(J, …, J)` commutes with rotations and anticommutes with
//! reflections, so it carries the `χ` isotypic component onto the `χ ⊗ det`
//! one. One-dimensional irreps therefore pair with their twist, and each
//! planar irrep is `Ĵ`-invariant. Inside a planar component `H` and `Ĵ` need
//! not share invariant planes; such components are returned as coupled
//! blocks described in the complex rotation eigenspace.

use super::character::{CharacterTable, Irrep};
use super::decompose::{copy_projector, isotypic_projectors, projector_range, verify_invariance};
use super::group::{GroupKind, SymmetryGroup};
use crate::error::{Error, Result};
use crate::linalg::{self, cdot, orthonormal_basis, symmetric_eigen, Mat};
use crate::scalar::{Complex, Real};

/// Two eigenvectors with `H Vₖ = λₖ Vₖ` and `Ĵ(V₁, V₂) = (V₁, V₂) J`,
/// i.e. `V₂ = −Ĵ V₁`.
#[derive(Debug, Clone)]
pub struct JPair<T> {
    pub irrep: Irrep,
    pub lambdas: [T; 2],
    pub v1: Vec<T>,
    pub v2: Vec<T>,
}

/// A planar isotypic component (multiplicity two) on which `H` and `Ĵ` have
/// no common invariant planes. Described on the rotation eigenspace `W`
/// (eigenvalue `e^{2πij/m}` of `𝒟(a)`) in the `Ĵ`-eigenbasis
/// `Ĵ u± = ±i u±`.
#[derive(Debug, Clone)]
pub struct CoupledPlane<T> {
    pub irrep: Irrep,
    /// `⟨u₊, H u₊⟩`
    pub h_plus: T,
    /// `⟨u₋, H u₋⟩`
    pub h_minus: T,
    /// `|⟨u₊, H u₋⟩|`
    pub kappa: T,
    pub u_plus: Vec<Complex<T>>,
    pub u_minus: Vec<Complex<T>>,
}

/// What is left of a `Ĵ`-invariant component after splitting off every
/// `Ĵ`-invariant eigenspace of `H`. Only arises without enough symmetry
/// (typically the trivial group); the linearization restricted to
/// `span(basis)` has to be solved as a dense matrix.
#[derive(Debug, Clone)]
pub struct ResidualComponent<T> {
    pub irrep: Irrep,
    /// Orthonormal, `Ĵ`- and `H`-invariant.
    pub basis: Vec<Vec<T>>,
}

#[derive(Debug, Clone, Default)]
pub struct JDecomposition<T> {
    pub pairs: Vec<JPair<T>>,
    pub coupled: Vec<CoupledPlane<T>>,
    pub residual: Vec<ResidualComponent<T>>,
}

impl<T: Real> JDecomposition<T> {
    /// Real dimension covered (must equal `2n`).
    pub fn dimension(&self) -> usize {
        2 * self.pairs.len() + 4 * self.coupled.len() + self.residual.iter().map(|r| r.basis.len()).sum::<usize>()
    }
}

/// `Ĵ v` with `J = [[0, 1], [−1, 0]]` on each body.
pub fn apply_j<T: Real>(v: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); v.len()];
    for i in 0..v.len() / 2 {
        out[2 * i] = v[2 * i + 1];
        out[2 * i + 1] = -v[2 * i];
    }
    out
}

fn apply_j_complex<T: Real>(v: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut out = vec![Complex::new(T::zero(), T::zero()); v.len()];
    for i in 0..v.len() / 2 {
        out[2 * i] = v[2 * i + 1];
        out[2 * i + 1] = -v[2 * i];
    }
    out
}

/// `x`, or about a thousand ulps when the scalar type is too coarse for it.
fn loose<T: Real>(x: f64) -> T {
    T::of(x).max(T::epsilon() * T::of(1024.0))
}

/// Sign convention: the first coordinate that is not negligible is positive.
fn orient<T: Real>(v: Vec<T>) -> Vec<T> {
    let big = linalg::max_abs(&v);
    let first = v.iter().copied().find(|x| x.abs() > T::of(1e-10) * big).unwrap_or(T::one());
    if first < T::zero() {
        v.iter().map(|&x| -x).collect()
    } else {
        v
    }
}

fn project_out<T: Real>(vectors: &[Vec<T>], remove: &[Vec<T>]) -> Vec<Vec<T>> {
    let stripped: Vec<Vec<T>> = vectors
        .iter()
        .map(|v| {
            let mut w = v.clone();
            for r in remove {
                let c = linalg::dot(r, &w);
                for (wi, &ri) in w.iter_mut().zip(r) {
                    *wi -= c * ri;
                }
            }
            w
        })
        .filter(|w| linalg::norm(w) > T::of(1e-6))
        .collect();
    orthonormal_basis(&stripped, T::of(1e-6))
}

/// Distance of `v` from `span(basis)` (orthonormal basis).
fn distance_to_span<T: Real>(v: &[T], basis: &[Vec<T>]) -> T {
    let mut w = v.to_vec();
    for b in basis {
        let c = linalg::dot(b, &w);
        for (wi, &bi) in w.iter_mut().zip(b) {
            *wi -= c * bi;
        }
    }
    linalg::norm(&w)
}

struct Context<'a, T> {
    h: &'a Mat<T>,
    scale: T,
    cluster_tol: T,
    pairs: Vec<JPair<T>>,
    coupled: Vec<CoupledPlane<T>>,
    residual: Vec<ResidualComponent<T>>,
}

impl<T: Real> Context<'_, T> {
    fn rayleigh(&self, v: &[T]) -> T {
        linalg::dot(v, &self.h.mul_vec(v))
    }

    fn eigen_residual(&self, v: &[T], lambda: T) -> T {
        let hv = self.h.mul_vec(v);
        linalg::norm(&hv.iter().zip(v).map(|(&a, &b)| a - lambda * b).collect::<Vec<_>>())
    }

    fn push_pair(&mut self, irrep: Irrep, v1: Vec<T>) -> Result<()> {
        let v1 = orient(v1);
        let v2: Vec<T> = apply_j(&v1).iter().map(|&x| -x).collect();
        let lambdas = [self.rayleigh(&v1), self.rayleigh(&v2)];
        let tol = loose::<T>(1e-7) * self.scale;
        if self.eigen_residual(&v1, lambdas[0]) > tol || self.eigen_residual(&v2, lambdas[1]) > tol {
            return Err(Error::PairingFailure(format!("{}: −ĴV₁ is not an eigenvector of H", irrep.name())));
        }
        self.pairs.push(JPair { irrep, lambdas, v1, v2 });
        Ok(())
    }

    /// Eigenvectors of `H` on `span(basis)`, grouped into eigenspaces.
    fn eigenspaces(&self, basis: &[Vec<T>]) -> Vec<(T, Vec<Vec<T>>)> {
        let q = Mat::from_columns(basis);
        let eig = symmetric_eigen(&self.h.compress(&q));
        let mut spaces: Vec<(T, Vec<Vec<T>>)> = Vec::new();
        for (k, &mu) in eig.values.iter().enumerate() {
            let v = q.mul_vec(&eig.vectors.column(k));
            match spaces.last_mut() {
                Some((m0, vs)) if (mu - *m0).abs() <= self.cluster_tol => vs.push(v),
                _ => spaces.push((mu, vec![v])),
            }
        }
        spaces
    }

    /// A `Ĵ`-invariant component, either because it is planar or because the
    /// group is trivial.
    fn invariant_component(&mut self, irrep: Irrep, basis: &[Vec<T>], group: &SymmetryGroup<T>) -> Result<()> {
        let spaces = self.eigenspaces(basis);
        let tol = loose::<T>(1e-7);
        let j_invariant = |vs: &Vec<Vec<T>>| vs.iter().all(|v| distance_to_span(&apply_j(v), vs) <= tol);
        if spaces.iter().all(|(_, vs)| j_invariant(vs)) {
            for (_, vs) in spaces {
                self.pair_within(irrep, vs)?;
            }
            return Ok(());
        }
        if spaces.len() == 2 && spaces.iter().all(|(_, vs)| vs.len() == 2) {
            let (ea, eb) = (&spaces[0].1, &spaces[1].1);
            if ea.iter().all(|v| distance_to_span(&apply_j(v), eb) <= tol) {
                for v in ea.clone() {
                    self.push_pair(irrep, v)?;
                }
                return Ok(());
            }
        }
        if let (Irrep::Planar(j), 4) = (irrep, basis.len()) {
            if group.kind() != GroupKind::Trivial {
                return self.coupled_component(irrep, j, group);
            }
        }
        let mut leftover = Vec::new();
        for (_, vs) in spaces {
            if j_invariant(&vs) {
                self.pair_within(irrep, vs)?;
            } else {
                leftover.extend(vs);
            }
        }
        self.residual.push(ResidualComponent { irrep, basis: leftover });
        Ok(())
    }

    /// Pairs up an eigenspace of `H` that `Ĵ` maps into itself.
    fn pair_within(&mut self, irrep: Irrep, space: Vec<Vec<T>>) -> Result<()> {
        let mut rest = space;
        while !rest.is_empty() {
            let v1 = orient(rest[0].clone());
            let v2: Vec<T> = apply_j(&v1).iter().map(|&x| -x).collect();
            rest = project_out(&rest, &[v1.clone(), v2]);
            self.push_pair(irrep, v1)?;
        }
        Ok(())
    }

    fn coupled_component(&mut self, irrep: Irrep, _j: usize, group: &SymmetryGroup<T>) -> Result<()> {
        let p00 = copy_projector(group, irrep, 0, 0);
        let p10 = copy_projector(group, irrep, 1, 0);
        let copies = projector_range(&p00, 2)?;
        let inv_sqrt2 = T::one() / T::two().sqrt();
        // w = (f − i f′)/√2 spans the e^{+iθ} eigenspace of 𝒟(a)
        let w: Vec<Vec<Complex<T>>> = copies
            .iter()
            .map(|f| {
                let fp = p10.mul_vec(f);
                f.iter().zip(&fp).map(|(&x, &y)| Complex::new(x, -y) * inv_sqrt2).collect()
            })
            .collect();
        let jw: Vec<Vec<Complex<T>>> = w.iter().map(|v| apply_j_complex(v)).collect();
        // Ĵ on W is i·A with A Hermitian, eigenvalues ±1
        let i = Complex::new(T::zero(), T::one());
        let a = |k: usize, l: usize| cdot(&w[k], &jw[l]) * (-i);
        let (a00, a01, a11) = (a(0, 0).re, a(0, 1), a(1, 1).re);
        let eigvec = |lambda: T| -> [Complex<T>; 2] {
            let x = [a01, Complex::new(lambda - a00, T::zero())];
            let y = [Complex::new(lambda - a11, T::zero()), a01.conj()];
            let nx = (x[0].norm_sqr() + x[1].norm_sqr()).sqrt();
            let ny = (y[0].norm_sqr() + y[1].norm_sqr()).sqrt();
            if nx >= ny {
                [x[0] / nx, x[1] / nx]
            } else {
                [y[0] / ny, y[1] / ny]
            }
        };
        let mid = (a00 + a11) * T::half();
        let rad = (((a00 - a11) * T::half()).powi(2) + a01.norm_sqr()).sqrt();
        let tol = loose::<T>(1e-8);
        if ((mid + rad) - T::one()).abs() > tol || ((mid - rad) + T::one()).abs() > tol {
            return Err(Error::PairingFailure(format!("{}: Ĵ is not split on the rotation eigenspace", irrep.name())));
        }
        let combine = |c: [Complex<T>; 2]| -> Vec<Complex<T>> {
            w[0].iter().zip(&w[1]).map(|(&x, &y)| x * c[0] + y * c[1]).collect()
        };
        let u_plus = combine(eigvec(T::one()));
        let u_minus = combine(eigvec(-T::one()));
        let hc = |v: &[Complex<T>]| self.h.mul_cvec(v);
        let h_plus = cdot(&u_plus, &hc(&u_plus)).re;
        let h_minus = cdot(&u_minus, &hc(&u_minus)).re;
        let kappa = cdot(&u_plus, &hc(&u_minus)).norm();
        self.coupled.push(CoupledPlane { irrep, h_plus, h_minus, kappa, u_plus, u_minus });
        Ok(())
    }
}

/// Splits `R^{2n}` into `Ĵ`-compatible eigenpairs of `H`, coupled planar
/// components and (without enough symmetry) residual components. Pairs come in component order (trivial with sign, the
/// alternating characters, then planar irreps by `j`).
pub fn j_compatible_pairs<T: Real>(
    h: &Mat<T>,
    group: &SymmetryGroup<T>,
    table: &CharacterTable<T>,
) -> Result<JDecomposition<T>> {
    let dim = 2 * group.n_bodies();
    if h.rows() != dim || !h.is_square() {
        return Err(Error::DimensionMismatch { expected: dim, found: h.rows() });
    }
    let scale = h.max_abs().max(T::min_positive_value());
    let inv = verify_invariance(h, group, T::of(1e-9).max(T::epsilon() * T::of(64.0)) * scale);
    if !inv.invariant {
        return Err(Error::NotInvariant { defect: inv.max_defect.to_f64_lossy() });
    }
    let projectors = isotypic_projectors(group, table);
    let ranks: Vec<usize> = projectors.iter().map(|p| p.trace().round().to_usize().unwrap_or(0)).collect();
    let mut ctx = Context {
        h,
        scale,
        cluster_tol: T::of(1e-8).max(T::epsilon() * T::of(256.0)) * scale,
        pairs: Vec::new(),
        coupled: Vec::new(),
        residual: Vec::new(),
    };
    let mut done = vec![false; table.irreps.len()];
    for (i, irrep) in table.irreps.iter().enumerate() {
        if done[i] || ranks[i] == 0 {
            continue;
        }
        done[i] = true;
        let basis = projector_range(&projectors[i], ranks[i])?;
        let twist = irrep.twisted();
        if matches!(irrep, Irrep::Planar(_)) || group.kind() == GroupKind::Trivial {
            ctx.invariant_component(*irrep, &basis, group)?;
            continue;
        }
        let k = table.irreps.iter().position(|x| *x == twist).ok_or_else(|| {
            Error::PairingFailure(format!("{} has no partner component", irrep.name()))
        })?;
        done[k] = true;
        if ranks[k] != ranks[i] {
            return Err(Error::PairingFailure(format!(
                "{} and {} components differ in dimension ({} vs {})",
                irrep.name(),
                twist.name(),
                ranks[i],
                ranks[k]
            )));
        }
        for (_, vs) in ctx.eigenspaces(&basis) {
            for v in vs {
                ctx.push_pair(*irrep, v)?;
            }
        }
    }
    let out = JDecomposition { pairs: ctx.pairs, coupled: ctx.coupled, residual: ctx.residual };
    if out.dimension() != dim {
        return Err(Error::PairingFailure(format!("covered dimension {} of {dim}", out.dimension())));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::central_config::regular_polygon;
    use crate::model::{potential_hessian, PotentialSpec};
    use crate::symmetry::{build_polygon_symmetry_group, character_table};

    fn decompose(n: usize, spec: &PotentialSpec<f64>) -> (Mat<f64>, JDecomposition<f64>) {
        let c = regular_polygon(n, 1.0, 1.0).unwrap();
        let h = potential_hessian(&c, spec).unwrap();
        let g = build_polygon_symmetry_group(n).unwrap();
        let t = character_table(&g).unwrap();
        let d = j_compatible_pairs(&h, &g, &t).unwrap();
        (h, d)
    }

    fn check_pairs(h: &Mat<f64>, d: &JDecomposition<f64>) {
        for p in &d.pairs {
            let jv1 = apply_j(&p.v1);
            let jv2 = apply_j(&p.v2);
            for k in 0..p.v1.len() {
                assert!((jv1[k] + p.v2[k]).abs() < 1e-10);
                assert!((jv2[k] - p.v1[k]).abs() < 1e-10);
            }
            for (v, l) in [(&p.v1, p.lambdas[0]), (&p.v2, p.lambdas[1])] {
                let hv = h.mul_vec(v);
                assert!(hv.iter().zip(v.iter()).all(|(a, b)| (a - l * b).abs() < 1e-10));
            }
        }
    }

    #[test]
    fn triangle_pairs_follow_the_component_structure() {
        let (h, d) = decompose(3, &PotentialSpec::homogeneous(1.0).unwrap());
        assert_eq!(d.pairs.len(), 3);
        assert!(d.coupled.is_empty());
        check_pairs(&h, &d);
        // first pair: v₁ ∝ z₀, with λ₂ = −ω²
        let z0 = regular_polygon(3, 1.0, 1.0).unwrap().flat();
        let s = 1.0 / linalg::norm(&z0);
        for (a, b) in d.pairs[0].v1.iter().zip(&z0) {
            assert!((a - b * s).abs() < 1e-12);
        }
        assert!((d.pairs[0].lambdas[1] + 3f64.powf(-0.5)).abs() < 1e-12);
        // translations form a pair with both eigenvalues zero
        assert!(d.pairs.iter().any(|p| p.lambdas[0].abs() < 1e-12 && p.lambdas[1].abs() < 1e-12));
    }

    #[test]
    fn square_pairs_include_the_doubled_eigenvalue() {
        let alpha = 1.0;
        let (h, d) = decompose(4, &PotentialSpec::homogeneous(alpha).unwrap());
        assert_eq!(d.pairs.len(), 4);
        check_pairs(&h, &d);
        // u₇ = (1, 0, −1, 0, 1, 0, −1, 0) sits in B-type component; its eigenvalue repeats in its pair
        let u7 = [1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0];
        let hu = h.mul_vec(&u7);
        let l = linalg::dot(&u7, &hu) / 4.0;
        assert!(d.pairs.iter().any(|p| (p.lambdas[0] - l).abs() < 1e-12 && (p.lambdas[1] - l).abs() < 1e-12));
    }

    #[test]
    fn pentagon_needs_a_coupled_block() {
        let (h, d) = decompose(5, &PotentialSpec::homogeneous(1.0).unwrap());
        check_pairs(&h, &d);
        assert_eq!(d.coupled.len(), 1);
        let c = &d.coupled[0];
        assert_eq!(c.irrep, Irrep::Planar(2));
        assert!(c.kappa > 0.1);
        let ju = apply_j_complex(&c.u_plus);
        let i = Complex::new(0.0, 1.0);
        assert!(ju.iter().zip(&c.u_plus).all(|(a, b)| (a - i * b).norm() < 1e-10));
    }

    #[test]
    fn rejects_non_invariant_matrices() {
        let g = build_polygon_symmetry_group::<f64>(3).unwrap();
        let t = character_table(&g).unwrap();
        let mut h = Mat::identity(6);
        h[(0, 1)] = 0.3;
        h[(1, 0)] = 0.3;
        assert!(matches!(j_compatible_pairs(&h, &g, &t), Err(Error::NotInvariant { .. })));
    }
}
