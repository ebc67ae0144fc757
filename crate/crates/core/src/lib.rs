//! Linear stability of planar N-body relative equilibria under power-law
//! potentials.
//!
//! The pipeline: build a central configuration, assemble `D²U`, split the
//! configuration space by the symmetry group of the configuration, reduce the
//! rotating-frame linearization to 4×4 blocks and solve them in closed form.
//! Every block result is checked against the eigenvalues of the full
//! `4n × 4n` linearization.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the common double-precision case.

pub mod central_config;
pub mod dynamics;
pub mod error;
pub mod fd;
pub mod linalg;
pub mod model;
pub mod scalar;
pub mod spectrum;
pub mod symmetry;

pub use central_config::{
    default_centrality_tolerance, is_central_configuration, refine_central_configuration, regular_polygon,
    CentralityReport,
};
pub use dynamics::{estimate_growth_rate, integrate_rotating_frame, GrowthEstimate, RotatingFrame, Trajectory};
pub use error::{Error, Result};
pub use linalg::Mat;
pub use model::{
    angular_frequency_squared, euler_multiplier, moment_of_inertia, potential_energy, potential_gradient,
    potential_hessian, potential_terms, BodyConfiguration, PotentialSpec, PowerTerm,
};
pub use scalar::{Complex, Real};
pub use spectrum::{
    block_spectrum, build_block, classify, compare_spectra, full_linearization_spectrum, linearize, LinearBlock,
    Spectrum, StabilityVerdict, Verdict,
};
pub use symmetry::{
    build_polygon_symmetry_group, character_table, detect_polygon_symmetry, j_compatible_pairs, CharacterTable,
    Irrep, SymmetryGroup,
};

pub type Config64 = BodyConfiguration<f64>;
pub type Potential64 = PotentialSpec<f64>;
pub type Mat64 = Mat<f64>;
pub type Complex64 = Complex<f64>;
