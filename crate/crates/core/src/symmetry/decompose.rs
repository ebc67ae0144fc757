use super::character::{CharacterTable, Irrep};
use super::group::{GroupKind, SymmetryGroup};
use crate::error::{Error, Result};
use crate::linalg::{self, symmetric_eigen, Mat};
use crate::scalar::Real;

/// Multiplicities `nᵢ = (χ, χᵢ)`, rounded after checking they are integers to
/// `1e−9`, and checked against `Σ nᵢ dᵢ = χ(e)`.
pub fn decompose_multiplicities<T: Real>(rep_character: &[T], table: &CharacterTable<T>) -> Result<Vec<usize>> {
    if rep_character.len() != table.class_sizes.len() {
        return Err(Error::DimensionMismatch { expected: table.class_sizes.len(), found: rep_character.len() });
    }
    let mut out = Vec::with_capacity(table.irreps.len());
    for (irrep, chi) in table.irreps.iter().zip(&table.values) {
        let value = table.inner_product(rep_character, chi);
        let rounded = value.round();
        if (value - rounded).abs() > T::of(1e-9) || rounded < T::zero() {
            return Err(Error::NonIntegerMultiplicity { irrep: irrep.name(), value: value.to_f64_lossy() });
        }
        out.push(rounded.to_usize().unwrap_or(0));
    }
    let dim: usize = out.iter().zip(&table.irreps).map(|(n, i)| n * i.degree()).sum();
    let expected = rep_character[0].round().to_usize().unwrap_or(0);
    if dim != expected {
        return Err(Error::InconsistentTraces(format!("Σ nᵢ dᵢ = {dim}, representation dimension {expected}")));
    }
    Ok(out)
}

/// Result of [`verify_invariance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvarianceReport<T> {
    pub invariant: bool,
    /// `max_g max |𝒟(g) H − H 𝒟(g)|`
    pub max_defect: T,
}

pub fn verify_invariance<T: Real>(h: &Mat<T>, group: &SymmetryGroup<T>, tol: T) -> InvarianceReport<T> {
    let mut max_defect = T::zero();
    for i in 0..group.order() {
        let d = group.matrix(i);
        let defect = d.matmul(h).sub(&h.matmul(d)).max_abs();
        max_defect = max_defect.max(defect);
    }
    InvarianceReport { invariant: max_defect <= tol, max_defect }
}

fn dihedral_modulus<T: Real>(group: &SymmetryGroup<T>) -> usize {
    match group.kind() {
        GroupKind::Trivial => 1,
        GroupKind::Dihedral { m } => m,
    }
}

/// `Σ_g w(g) 𝒟(g)`
fn weighted_sum<T: Real>(group: &SymmetryGroup<T>, weight: impl Fn(usize) -> T) -> Mat<T> {
    let dim = 2 * group.n_bodies();
    let mut p = Mat::zeros(dim, dim);
    for i in 0..group.order() {
        let w = weight(i);
        if w != T::zero() {
            p = p.add(&group.matrix(i).scaled(w));
        }
    }
    p
}

/// Isotypic projectors `Pᵢ = (dᵢ/|G|) Σ_g χᵢ(g) 𝒟(g)` (characters are real).
pub fn isotypic_projectors<T: Real>(group: &SymmetryGroup<T>, table: &CharacterTable<T>) -> Vec<Mat<T>> {
    let m = dihedral_modulus(group);
    let order = T::of_usize(group.order());
    table
        .irreps
        .iter()
        .map(|irrep| {
            let d = T::of_usize(irrep.degree());
            weighted_sum(group, |i| d / order * irrep.character(group.element(i), m))
        })
        .collect()
}

/// `P^{pq} = (d/|G|) Σ_g ρ(g)_{pq} 𝒟(g)`; maps vectors transforming as basis
/// vector `q` of the irrep to their partners transforming as basis vector `p`.
/// `P^{00}` projects onto one vector per copy of the irrep.
pub fn copy_projector<T: Real>(group: &SymmetryGroup<T>, irrep: Irrep, p: usize, q: usize) -> Mat<T> {
    let m = dihedral_modulus(group);
    let order = T::of_usize(group.order());
    let d = T::of_usize(irrep.degree());
    weighted_sum(group, |i| d / order * irrep.matrix(group.element(i), m)[p][q])
}

/// Orthonormal basis of the range of a symmetric projector with known rank:
/// the eigenvectors with eigenvalue near one.
pub(crate) fn projector_range<T: Real>(p: &Mat<T>, rank: usize) -> Result<Vec<Vec<T>>> {
    let eig = symmetric_eigen(p);
    let basis: Vec<Vec<T>> =
        (0..p.cols()).filter(|&k| eig.values[k] > T::half()).map(|k| eig.vectors.column(k)).collect();
    if basis.len() != rank {
        return Err(Error::InconsistentTraces(format!("projector rank {} but expected {rank}", basis.len())));
    }
    Ok(basis)
}

/// Eigenvalues of `H` restricted to one isotypic component.
#[derive(Debug, Clone)]
pub struct ComponentEigenvalues<T> {
    pub irrep: Irrep,
    pub degree: usize,
    pub multiplicity: usize,
    /// `Σ` of the per-copy eigenvalues, straight from the trace equations.
    pub trace_sum: T,
    /// One value per copy, ascending. Each occurs `degree` times in the
    /// spectrum of `H`.
    pub eigenvalues: Vec<T>,
}

/// Solves `Tr(H 𝒟(c)) = Σᵢ χᵢ(c) Sᵢ` over class representatives `c` for the
/// per-component sums `Sᵢ`. Components with a single copy are then done;
/// with several copies the individual values come from diagonalising `H`
/// on the range of the copy projector, and their sum must reproduce `Sᵢ`.
pub fn eigenvalues_by_trace_equations<T: Real>(
    h: &Mat<T>,
    group: &SymmetryGroup<T>,
    table: &CharacterTable<T>,
) -> Result<Vec<ComponentEigenvalues<T>>> {
    let dim = 2 * group.n_bodies();
    if h.rows() != dim || !h.is_square() {
        return Err(Error::DimensionMismatch { expected: dim, found: h.rows() });
    }
    let traces: Vec<T> = (0..group.order()).map(|i| h.matmul(group.matrix(i)).trace()).collect();
    let scale = h.max_abs().max(T::min_positive_value()) * T::of_usize(dim);
    let tol = T::of(1e-9) * scale;
    // class functions only: traces must agree within each class
    for class in group.classes() {
        let t0 = traces[class[0]];
        if class.iter().any(|&i| (traces[i] - t0).abs() > tol) {
            return Err(Error::InconsistentTraces("Tr(H𝒟(g)) is not a class function; H is not invariant".into()));
        }
    }
    let k = table.irreps.len();
    let system = Mat::from_fn(k, k, |c, i| table.values[i][c]);
    let rhs: Vec<T> = group.classes().iter().map(|c| traces[c[0]]).collect();
    let sums = linalg::solve(&system, &rhs).map_err(|_| Error::InconsistentTraces("singular trace system".into()))?;

    let multiplicities = decompose_multiplicities(&group.representation_character(), table)?;
    let mut out = Vec::with_capacity(k);
    for ((irrep, &mult), &sum) in table.irreps.iter().zip(&multiplicities).zip(&sums) {
        let eigenvalues = match mult {
            0 => Vec::new(),
            1 => vec![sum],
            _ => {
                let p = copy_projector(group, *irrep, 0, 0);
                let basis = Mat::from_columns(&projector_range(&p, mult)?);
                let restricted = h.compress(&basis);
                let values = symmetric_eigen(&restricted).values;
                let total: T = values.iter().copied().sum();
                if (total - sum).abs() > tol {
                    return Err(Error::InconsistentTraces(format!(
                        "component {}: projected eigenvalues sum to {} but the trace equations give {}",
                        irrep.name(),
                        total,
                        sum
                    )));
                }
                values
            }
        };
        out.push(ComponentEigenvalues {
            irrep: *irrep,
            degree: irrep.degree(),
            multiplicity: mult,
            trace_sum: sum,
            eigenvalues,
        });
    }
    Ok(out)
}

/// Full multiset of eigenvalues implied by a trace-equation solution.
pub fn expand_component_eigenvalues<T: Real>(components: &[ComponentEigenvalues<T>]) -> Vec<T> {
    let mut v: Vec<T> = components
        .iter()
        .flat_map(|c| c.eigenvalues.iter().flat_map(move |&x| std::iter::repeat(x).take(c.degree)))
        .collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}
