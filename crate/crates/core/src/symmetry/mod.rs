//! Symmetry groups of polygonal configurations, their character tables and
//! the resulting block decomposition of the Hessian.

mod character;
mod decompose;
mod group;
mod pairs;

pub use character::{character_table, irreps_of, CharacterTable, Irrep};
pub use decompose::{
    copy_projector, decompose_multiplicities, eigenvalues_by_trace_equations, expand_component_eigenvalues,
    isotypic_projectors, verify_invariance, ComponentEigenvalues, InvarianceReport,
};
pub use group::{
    build_polygon_symmetry_group, detect_polygon_symmetry, representation_matrix, GroupElement, GroupKind,
    SymmetryGroup,
};
pub use pairs::{apply_j, j_compatible_pairs, CoupledPlane, JDecomposition, JPair, ResidualComponent};
