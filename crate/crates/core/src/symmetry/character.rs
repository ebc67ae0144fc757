use super::group::{GroupElement, GroupKind, SymmetryGroup};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Real irreducible representations of the dihedral group of order `2m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Irrep {
    /// All ones.
    Trivial,
    /// `+1` on rotations, `−1` on reflections (the determinant).
    Sign,
    /// `(−1)^k` on `a^k` and `a^k r` (even `m` only).
    Alternating,
    /// `(−1)^k` on `a^k`, `(−1)^(k+1)` on `a^k r` (even `m` only).
    AlternatingSign,
    /// Two-dimensional: `a^k ↦ R(2πjk/m)`, `a^k r ↦ R(2πjk/m) diag(1, −1)`.
    Planar(usize),
}

impl Irrep {
    pub fn degree(&self) -> usize {
        match self {
            Irrep::Planar(_) => 2,
            _ => 1,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Irrep::Trivial => "A1".into(),
            Irrep::Sign => "A2".into(),
            Irrep::Alternating => "B1".into(),
            Irrep::AlternatingSign => "B2".into(),
            Irrep::Planar(j) => format!("E{j}"),
        }
    }

    /// The irrep obtained by tensoring with the sign (determinant) character.
    /// `Ĵ` maps the `χ` isotypic component onto the `χ ⊗ det` one.
    pub fn twisted(&self) -> Irrep {
        match self {
            Irrep::Trivial => Irrep::Sign,
            Irrep::Sign => Irrep::Trivial,
            Irrep::Alternating => Irrep::AlternatingSign,
            Irrep::AlternatingSign => Irrep::Alternating,
            Irrep::Planar(j) => Irrep::Planar(*j),
        }
    }

    /// Matrix of the irrep on the dihedral word `a^k r^e` (1-d irreps use the
    /// top-left entry only).
    pub fn matrix<T: Real>(&self, g: &GroupElement<T>, m: usize) -> [[T; 2]; 2] {
        let one_d = |v: T| [[v, T::zero()], [T::zero(), v]];
        let parity = if g.rotation % 2 == 0 { T::one() } else { -T::one() };
        let refl = if g.reflected { -T::one() } else { T::one() };
        match self {
            Irrep::Trivial => one_d(T::one()),
            Irrep::Sign => one_d(refl),
            Irrep::Alternating => one_d(parity),
            Irrep::AlternatingSign => one_d(parity * refl),
            Irrep::Planar(j) => {
                let theta = T::two() * T::PI() * T::of_usize((j * g.rotation) % m) / T::of_usize(m);
                let (s, c) = theta.sin_cos();
                if g.reflected {
                    [[c, s], [s, -c]]
                } else {
                    [[c, -s], [s, c]]
                }
            }
        }
    }

    pub fn character<T: Real>(&self, g: &GroupElement<T>, m: usize) -> T {
        let r = self.matrix(g, m);
        match self {
            Irrep::Planar(_) => r[0][0] + r[1][1],
            _ => r[0][0],
        }
    }
}

/// Characters of every irreducible representation on every conjugacy class.
#[derive(Debug, Clone)]
pub struct CharacterTable<T> {
    pub irreps: Vec<Irrep>,
    /// `values[i][c]` is `χᵢ` on class `c`.
    pub values: Vec<Vec<T>>,
    pub class_sizes: Vec<usize>,
    pub group_order: usize,
}

impl<T: Real> CharacterTable<T> {
    pub fn degrees(&self) -> Vec<usize> {
        self.irreps.iter().map(Irrep::degree).collect()
    }

    /// `(f, g) = (1/|G|) Σ_c |c| f(c) g(c)` for real class functions.
    pub fn inner_product(&self, f: &[T], g: &[T]) -> T {
        let s: T = f
            .iter()
            .zip(g)
            .zip(&self.class_sizes)
            .map(|((&a, &b), &size)| T::of_usize(size) * a * b)
            .sum();
        s / T::of_usize(self.group_order)
    }

    /// `max |(χᵢ, χⱼ) − δᵢⱼ|`
    pub fn orthonormality_defect(&self) -> T {
        let mut d = T::zero();
        for (i, a) in self.values.iter().enumerate() {
            for (j, b) in self.values.iter().enumerate() {
                let target = if i == j { T::one() } else { T::zero() };
                d = d.max((self.inner_product(a, b) - target).abs());
            }
        }
        d
    }
}

/// Irreps of the group in the canonical order: trivial, sign, the two
/// alternating characters for even `m`, then the planar irreps by increasing `j`.
pub fn irreps_of<T: Real>(group: &SymmetryGroup<T>) -> Vec<Irrep> {
    match group.kind() {
        GroupKind::Trivial => vec![Irrep::Trivial],
        GroupKind::Dihedral { m } => {
            let mut v = vec![Irrep::Trivial, Irrep::Sign];
            if m % 2 == 0 {
                v.push(Irrep::Alternating);
                v.push(Irrep::AlternatingSign);
            }
            v.extend((1..m.div_ceil(2)).map(Irrep::Planar));
            v
        }
    }
}

/// Closed-form character table of a dihedral (or trivial) group.
pub fn character_table<T: Real>(group: &SymmetryGroup<T>) -> Result<CharacterTable<T>> {
    let m = match group.kind() {
        GroupKind::Trivial => 1,
        GroupKind::Dihedral { m } => m,
    };
    let irreps = irreps_of(group);
    let sum_sq: usize = irreps.iter().map(|i| i.degree() * i.degree()).sum();
    if sum_sq != group.order() {
        return Err(Error::UnsupportedGroup(format!("Σ dᵢ² = {sum_sq} but |G| = {}", group.order())));
    }
    let values = irreps
        .iter()
        .map(|irrep| group.classes().iter().map(|c| irrep.character(group.element(c[0]), m)).collect())
        .collect();
    Ok(CharacterTable {
        irreps,
        values,
        class_sizes: group.classes().iter().map(Vec::len).collect(),
        group_order: group.order(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::build_polygon_symmetry_group;

    #[test]
    fn s3_table_matches_printed_values() {
        let g = build_polygon_symmetry_group::<f64>(3).unwrap();
        let t = character_table(&g).unwrap();
        assert_eq!(t.degrees(), vec![1, 1, 2]);
        // classes: {e}, {a, a²}, {reflections}
        assert_eq!(t.class_sizes, vec![1, 2, 3]);
        assert_eq!(t.values[0], vec![1.0, 1.0, 1.0]);
        assert_eq!(t.values[1], vec![1.0, 1.0, -1.0]);
        assert!((t.values[2][0] - 2.0).abs() < 1e-15);
        assert!((t.values[2][1] + 1.0).abs() < 1e-15);
        assert!(t.values[2][2].abs() < 1e-15);
    }

    #[test]
    fn square_table_has_four_linear_characters() {
        let g = build_polygon_symmetry_group::<f64>(4).unwrap();
        let t = character_table(&g).unwrap();
        assert_eq!(t.degrees(), vec![1, 1, 1, 1, 2]);
        assert!(t.values[0].iter().all(|&x| x == 1.0));
    }

    #[test]
    fn orthonormal_for_many_orders() {
        for n in 3..13 {
            let g = build_polygon_symmetry_group::<f64>(n).unwrap();
            let t = character_table(&g).unwrap();
            assert_eq!(t.irreps.len(), g.classes().len());
            assert!(t.orthonormality_defect() <= 1e-13, "n = {n}");
        }
    }

    #[test]
    fn planar_irreps_are_homomorphisms() {
        let g = build_polygon_symmetry_group::<f64>(7).unwrap();
        for irrep in irreps_of(&g) {
            for i in 0..g.order() {
                for j in 0..g.order() {
                    let a = irrep.matrix(g.element(i), 7);
                    let b = irrep.matrix(g.element(j), 7);
                    let c = irrep.matrix(g.element(g.product(i, j)), 7);
                    for p in 0..2 {
                        for q in 0..2 {
                            let ab = a[p][0] * b[0][q] + a[p][1] * b[1][q];
                            assert!((ab - c[p][q]).abs() < 1e-13);
                        }
                    }
                }
            }
        }
    }
}
