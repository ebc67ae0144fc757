use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::model::BodyConfiguration;
use crate::scalar::Real;

/// `(σ, O)`: body `i` is carried to body `σ(i)` and every position vector is
/// transformed by the orthogonal 2×2 matrix `O`.
///
/// Dihedral elements additionally remember their word `a^rotation r^reflected`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement<T> {
    pub perm: Vec<usize>,
    pub ortho: [[T; 2]; 2],
    pub rotation: usize,
    pub reflected: bool,
}

impl<T: Real> GroupElement<T> {
    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            ortho: [[T::one(), T::zero()], [T::zero(), T::one()]],
            rotation: 0,
            reflected: false,
        }
    }

    /// `self ∘ other`; `modulus` is the order of the rotation subgroup.
    pub fn compose(&self, other: &Self, modulus: usize) -> Self {
        let perm = other.perm.iter().map(|&i| self.perm[i]).collect();
        let mut ortho = [[T::zero(); 2]; 2];
        for (i, row) in ortho.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = self.ortho[i][0] * other.ortho[0][j] + self.ortho[i][1] * other.ortho[1][j];
            }
        }
        // a^k r^e · a^l r^f = a^(k + (−1)^e l) r^(e+f)
        let m = modulus.max(1);
        let l = if self.reflected { (m - other.rotation % m) % m } else { other.rotation % m };
        Self { perm, ortho, rotation: (self.rotation + l) % m, reflected: self.reflected ^ other.reflected }
    }

    pub fn determinant(&self) -> T {
        self.ortho[0][0] * self.ortho[1][1] - self.ortho[0][1] * self.ortho[1][0]
    }

    /// `max |O Oᵀ − I|`
    pub fn orthogonality_defect(&self) -> T {
        let o = &self.ortho;
        let mut d = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                let dot = o[i][0] * o[j][0] + o[i][1] * o[j][1];
                let target = if i == j { T::one() } else { T::zero() };
                d = d.max((dot - target).abs());
            }
        }
        d
    }

    pub fn label(&self) -> String {
        let rot = match self.rotation {
            0 => String::new(),
            1 => "a".to_string(),
            k => format!("a^{k}"),
        };
        match (rot.is_empty(), self.reflected) {
            (true, false) => "e".into(),
            (true, true) => "r".into(),
            (false, false) => rot,
            (false, true) => format!("{rot}r"),
        }
    }
}

/// The `2n × 2n` matrix of `g` acting on `(x₁, y₁, …, xₙ, yₙ)`: the block in
/// body-row `σ(i)`, body-column `i` is `O`.
pub fn representation_matrix<T: Real>(g: &GroupElement<T>, n: usize) -> Result<Mat<T>> {
    if g.perm.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: g.perm.len() });
    }
    let mut d = Mat::zeros(2 * n, 2 * n);
    for (i, &si) in g.perm.iter().enumerate() {
        if si >= n {
            return Err(Error::InvalidArgument(format!("permutation entry {si} out of range")));
        }
        for p in 0..2 {
            for q in 0..2 {
                d[(2 * si + p, 2 * i + q)] = g.ortho[p][q];
            }
        }
    }
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    /// Only the identity.
    Trivial,
    /// Dihedral group of order `2m` generated by a rotation `a` of order `m`
    /// and a reflection `r`.
    Dihedral { m: usize },
}

/// Finite group acting on the configuration space of `n` bodies.
#[derive(Debug, Clone)]
pub struct SymmetryGroup<T> {
    n: usize,
    kind: GroupKind,
    elements: Vec<GroupElement<T>>,
    table: Vec<Vec<usize>>,
    classes: Vec<Vec<usize>>,
    matrices: Vec<Mat<T>>,
}

impl<T: Real> SymmetryGroup<T> {
    pub fn trivial(n: usize) -> Self {
        let e = GroupElement::identity(n);
        let matrices = vec![Mat::identity(2 * n)];
        Self { n, kind: GroupKind::Trivial, elements: vec![e], table: vec![vec![0]], classes: vec![vec![0]], matrices }
    }

    /// Closes `{a, r}` into the dihedral group of order `2m`. Elements are
    /// ordered `e, a, …, a^(m−1), r, ar, …, a^(m−1) r`. Fails when the
    /// generators do not satisfy the dihedral relations on `R^(2n)`.
    pub fn dihedral(n: usize, m: usize, a: GroupElement<T>, r: GroupElement<T>) -> Result<Self> {
        if m < 2 {
            return Err(Error::UnsupportedGroup(format!("dihedral order parameter {m} < 2")));
        }
        let a = GroupElement { rotation: 1, reflected: false, ..a };
        let r = GroupElement { rotation: 0, reflected: true, ..r };
        let mut rotations = vec![GroupElement::identity(n)];
        for k in 1..m {
            rotations.push(rotations[k - 1].compose(&a, m));
        }
        let reflections: Vec<_> = rotations.iter().map(|g| g.compose(&r, m)).collect();
        let elements: Vec<GroupElement<T>> = rotations.into_iter().chain(reflections).collect();
        let matrices = elements.iter().map(|g| representation_matrix(g, n)).collect::<Result<Vec<_>>>()?;

        let index = |g: &GroupElement<T>| g.rotation + if g.reflected { m } else { 0 };
        let tol = T::of(1e-9);
        let order = elements.len();
        let mut table = vec![vec![0; order]; order];
        for i in 0..order {
            for j in 0..order {
                let prod = elements[i].compose(&elements[j], m);
                let k = index(&prod);
                let same_perm = prod.perm == elements[k].perm;
                let mut dev = T::zero();
                for p in 0..2 {
                    for q in 0..2 {
                        dev = dev.max((prod.ortho[p][q] - elements[k].ortho[p][q]).abs());
                    }
                }
                if !same_perm || dev > tol {
                    return Err(Error::UnsupportedGroup(format!(
                        "generators violate the dihedral relations ({} · {} ≠ {})",
                        elements[i].label(),
                        elements[j].label(),
                        elements[k].label()
                    )));
                }
                table[i][j] = k;
            }
        }

        let inverse: Vec<usize> = (0..order).map(|i| (0..order).find(|&j| table[i][j] == 0).unwrap()).collect();
        let mut class_of = vec![usize::MAX; order];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for g in 0..order {
            if class_of[g] != usize::MAX {
                continue;
            }
            let mut members: Vec<usize> = (0..order).map(|h| table[table[h][g]][inverse[h]]).collect();
            members.sort_unstable();
            members.dedup();
            for &x in &members {
                class_of[x] = classes.len();
            }
            classes.push(members);
        }
        Ok(Self { n, kind: GroupKind::Dihedral { m }, elements, table, classes, matrices })
    }

    pub fn n_bodies(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[GroupElement<T>] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &GroupElement<T> {
        &self.elements[i]
    }

    /// `𝒟(gᵢ)`
    pub fn matrix(&self, i: usize) -> &Mat<T> {
        &self.matrices[i]
    }

    pub fn multiplication_table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// Index of `gᵢ gⱼ`.
    pub fn product(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    /// Conjugacy classes as lists of element indices; the first member is the
    /// class representative and classes are ordered by representative.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, element: usize) -> usize {
        self.classes.iter().position(|c| c.contains(&element)).expect("every element has a class")
    }

    /// Character of the configuration-space representation, per class.
    pub fn representation_character(&self) -> Vec<T> {
        self.classes.iter().map(|c| self.matrices[c[0]].trace()).collect()
    }
}

fn rotation<T: Real>(theta: T) -> [[T; 2]; 2] {
    let (s, c) = theta.sin_cos();
    [[c, -s], [s, c]]
}

/// Dihedral symmetry of the regular `n`-gon with body `i` at angle `2π(i−1)/n`:
/// `a` sends body `i` to `i+1` and rotates by `2π/n` counter-clockwise, `r`
/// fixes body 1 and reflects about the x axis.
pub fn build_polygon_symmetry_group<T: Real>(n: usize) -> Result<SymmetryGroup<T>> {
    if n < 3 {
        return Err(Error::UnsupportedGroup(format!("polygon symmetry needs n ≥ 3, got {n}")));
    }
    polygon_group_with_slots(n, T::zero(), &(0..n).collect::<Vec<_>>())
}

/// Dihedral group of a regular polygon whose body at angular slot `s`
/// (counter-clockwise from body `slots[0]`) is `slots[s]`, with body
/// `slots[0]` at polar angle `theta0`.
fn polygon_group_with_slots<T: Real>(n: usize, theta0: T, slots: &[usize]) -> Result<SymmetryGroup<T>> {
    let mut slot_of = vec![0; n];
    for (s, &b) in slots.iter().enumerate() {
        slot_of[b] = s;
    }
    let step = T::two() * T::PI() / T::of_usize(n);
    let a = GroupElement {
        perm: (0..n).map(|b| slots[(slot_of[b] + 1) % n]).collect(),
        ortho: exact_rotation(n, step),
        rotation: 1,
        reflected: false,
    };
    // reflection across the line through the first body: R(2θ₀) diag(1, −1)
    let (s2, c2) = (T::two() * theta0).sin_cos();
    let r = GroupElement {
        perm: (0..n).map(|b| slots[(n - slot_of[b]) % n]).collect(),
        ortho: [[c2, s2], [s2, -c2]],
        rotation: 0,
        reflected: true,
    };
    SymmetryGroup::dihedral(n, n, a, r)
}

/// Rotation by `2π/n`, exact on the axes for `n ∈ {1, 2, 4}`.
fn exact_rotation<T: Real>(n: usize, step: T) -> [[T; 2]; 2] {
    let (o, z) = (T::one(), T::zero());
    match n {
        1 => [[o, z], [z, o]],
        2 => [[-o, z], [z, -o]],
        4 => [[z, -o], [o, z]],
        _ => rotation(step),
    }
}

/// Recognises an equal-mass regular polygon centered at the origin, in any
/// orientation and labelling, and returns its dihedral group. `tol` is
/// relative to the circumradius.
pub fn detect_polygon_symmetry<T: Real>(config: &BodyConfiguration<T>, tol: T) -> Result<SymmetryGroup<T>> {
    let n = config.n();
    if n < 3 {
        return Err(Error::UnsupportedGroup("fewer than three bodies".into()));
    }
    let m0 = config.masses()[0];
    if config.masses().iter().any(|&m| (m - m0).abs() > tol * m0) {
        return Err(Error::UnsupportedGroup("unequal masses".into()));
    }
    let radius = config.radius();
    let com = config.center_of_mass();
    if com[0].hypot(com[1]) > tol * radius {
        return Err(Error::UnsupportedGroup("center of mass is not at the origin".into()));
    }
    let pos = config.positions();
    if pos.iter().any(|q| (q[0].hypot(q[1]) - radius).abs() > tol * radius) {
        return Err(Error::UnsupportedGroup("bodies are not on a common circle".into()));
    }
    let theta0 = pos[0][1].atan2(pos[0][0]);
    let two_pi = T::two() * T::PI();
    let step = two_pi / T::of_usize(n);
    let mut slots = vec![usize::MAX; n];
    for (b, q) in pos.iter().enumerate() {
        let mut rel = q[1].atan2(q[0]) - theta0;
        while rel < T::zero() {
            rel += two_pi;
        }
        let s_real = rel / step;
        let s = s_real.round();
        if (s_real - s).abs() * step > tol {
            return Err(Error::UnsupportedGroup("bodies are not equally spaced".into()));
        }
        let s = s.to_usize().unwrap_or(0) % n;
        if slots[s] != usize::MAX {
            return Err(Error::UnsupportedGroup("two bodies share an angular slot".into()));
        }
        slots[s] = b;
    }
    polygon_group_with_slots(n, theta0, &slots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::central_config::regular_polygon;

    #[test]
    fn triangle_generators_match_printed_matrices() {
        let g = build_polygon_symmetry_group::<f64>(3).unwrap();
        let h = 3f64.sqrt() / 2.0;
        #[rustfmt::skip]
        let d_r = Mat::from_rows(&[
            vec![0.0, 0.0, 0.0, 0.0, -0.5, -h],
            vec![0.0, 0.0, 0.0, 0.0, h, -0.5],
            vec![-0.5, -h, 0.0, 0.0, 0.0, 0.0],
            vec![h, -0.5, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, -0.5, -h, 0.0, 0.0],
            vec![0.0, 0.0, h, -0.5, 0.0, 0.0],
        ]);
        #[rustfmt::skip]
        let d_t = Mat::from_rows(&[
            vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, -1.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0, 0.0, -1.0],
            vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, -1.0, 0.0, 0.0],
        ]);
        assert!(g.matrix(1).sub(&d_r).max_abs() < 1e-15);
        assert!(g.matrix(3).sub(&d_t).max_abs() < 1e-15);
        assert_eq!(g.element(1).label(), "a");
        assert_eq!(g.element(3).label(), "r");
    }

    #[test]
    fn orders_and_class_counts() {
        let g3 = build_polygon_symmetry_group::<f64>(3).unwrap();
        assert_eq!((g3.order(), g3.classes().len()), (6, 3));
        let g4 = build_polygon_symmetry_group::<f64>(4).unwrap();
        assert_eq!((g4.order(), g4.classes().len()), (8, 5));
        let g5 = build_polygon_symmetry_group::<f64>(5).unwrap();
        assert_eq!((g5.order(), g5.classes().len()), (10, 4));
        let g6 = build_polygon_symmetry_group::<f64>(6).unwrap();
        assert_eq!((g6.order(), g6.classes().len()), (12, 6));
        assert!(build_polygon_symmetry_group::<f64>(2).is_err());
    }

    #[test]
    fn identity_is_identity_matrix() {
        let g = build_polygon_symmetry_group::<f64>(4).unwrap();
        assert_eq!(g.matrix(0), &Mat::identity(8));
    }

    #[test]
    fn representation_is_a_homomorphism() {
        for n in 3..9 {
            let g = build_polygon_symmetry_group::<f64>(n).unwrap();
            for i in 0..g.order() {
                assert!(g.element(i).orthogonality_defect() < 1e-14);
                for j in 0..g.order() {
                    let lhs = g.matrix(i).matmul(g.matrix(j));
                    let rhs = g.matrix(g.product(i, j));
                    assert!(lhs.sub(rhs).max_abs() <= 1e-13);
                }
            }
        }
    }

    #[test]
    fn triangle_characters() {
        let g = build_polygon_symmetry_group::<f64>(3).unwrap();
        let chi = g.representation_character();
        assert!((chi[0] - 6.0).abs() < 1e-15);
        assert!(chi[1].abs() < 1e-15 && chi[2].abs() < 1e-15);
    }

    #[test]
    fn square_traces_by_element() {
        let g = build_polygon_symmetry_group::<f64>(4).unwrap();
        let tr: Vec<f64> = (0..8).map(|i| g.matrix(i).trace()).collect();
        assert_eq!(tr, vec![8.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn detects_rotated_relabelled_polygons() {
        let base = regular_polygon(5, 2.0, 1.0).unwrap().rotated(0.37);
        let mut pos = base.positions().to_vec();
        pos.swap(1, 3);
        pos.swap(0, 4);
        let c = BodyConfiguration::new(vec![1.0; 5], pos).unwrap();
        let g = detect_polygon_symmetry(&c, 1e-9).unwrap();
        assert_eq!(g.order(), 10);
        // every element maps the configuration onto itself
        let z = c.flat();
        for i in 0..g.order() {
            let moved = g.matrix(i).mul_vec(&z);
            assert!(crate::linalg::max_abs(&crate::linalg::sub(&moved, &z)) < 1e-12);
        }
    }

    #[test]
    fn rejects_non_polygons() {
        let c = BodyConfiguration::new(vec![1.0; 3], vec![[1.0, 0.0], [-0.5, 0.8], [-0.5, -0.8]]).unwrap();
        assert!(detect_polygon_symmetry(&c, 1e-9).is_err());
    }
}
