//! Planar body configurations, power-law potentials and the derived
//! quantities `U`, `I`, `∇U`, `D²U`, `ω²`.
//!
//! Flattened coordinates are always ordered `(x₁, y₁, x₂, y₂, …)`.

use crate::central_config::{is_central_configuration, default_centrality_tolerance};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::Real;

/// Masses and planar positions of `n ≥ 2` bodies.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyConfiguration<T> {
    masses: Vec<T>,
    positions: Vec<[T; 2]>,
    centered: bool,
}

impl<T: Real> BodyConfiguration<T> {
    /// Validates masses and positions. The result is not marked centered even
    /// if its center of mass happens to be at the origin; use
    /// [`BodyConfiguration::new_centered`] or [`BodyConfiguration::recentered`].
    pub fn new(masses: Vec<T>, positions: Vec<[T; 2]>) -> Result<Self> {
        if masses.len() != positions.len() {
            return Err(Error::DimensionMismatch { expected: masses.len(), found: positions.len() });
        }
        if masses.len() < 2 {
            return Err(Error::InvalidConfiguration(format!("need at least 2 bodies, got {}", masses.len())));
        }
        if let Some((i, m)) = masses.iter().enumerate().find(|(_, m)| !(m.is_finite() && **m > T::zero())) {
            return Err(Error::InvalidConfiguration(format!("mass {} of body {} is not positive", m, i + 1)));
        }
        if positions.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfiguration("non-finite coordinate".into()));
        }
        let config = Self { masses, positions, centered: false };
        config.check_collisions()?;
        Ok(config)
    }

    /// Like [`BodyConfiguration::new`] but requires the center of mass to sit
    /// at the origin (relative tolerance `1e-12` of the configuration size, or
    /// a few ulps in single precision) and marks the result centered.
    pub fn new_centered(masses: Vec<T>, positions: Vec<[T; 2]>) -> Result<Self> {
        let mut config = Self::new(masses, positions)?;
        let com = config.center_of_mass();
        let size = config.radius().max(T::min_positive_value());
        let tol = T::of(1e-12).max(T::epsilon() * T::of(16.0)) * size;
        if com[0].abs() > tol || com[1].abs() > tol {
            return Err(Error::InvalidConfiguration(format!(
                "center of mass ({}, {}) is not at the origin",
                com[0], com[1]
            )));
        }
        config.centered = true;
        Ok(config)
    }

    /// Builds from the flattened vector `z = (x₁, y₁, …)`.
    pub fn from_flat(masses: Vec<T>, z: &[T]) -> Result<Self> {
        if z.len() != 2 * masses.len() {
            return Err(Error::DimensionMismatch { expected: 2 * masses.len(), found: z.len() });
        }
        let positions = z.chunks(2).map(|c| [c[0], c[1]]).collect();
        Self::new(masses, positions)
    }

    pub fn n(&self) -> usize {
        self.masses.len()
    }

    pub fn masses(&self) -> &[T] {
        &self.masses
    }

    pub fn positions(&self) -> &[[T; 2]] {
        &self.positions
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    pub fn flat(&self) -> Vec<T> {
        self.positions.iter().flat_map(|p| [p[0], p[1]]).collect()
    }

    /// Mass vector repeated per coordinate, i.e. the diagonal of `M`.
    pub fn mass_diagonal(&self) -> Vec<T> {
        self.masses.iter().flat_map(|&m| [m, m]).collect()
    }

    pub fn total_mass(&self) -> T {
        self.masses.iter().copied().sum()
    }

    pub fn center_of_mass(&self) -> [T; 2] {
        let mut c = [T::zero(); 2];
        for (m, q) in self.masses.iter().zip(&self.positions) {
            c[0] += *m * q[0];
            c[1] += *m * q[1];
        }
        let total = self.total_mass();
        [c[0] / total, c[1] / total]
    }

    /// Largest distance of a body from the origin.
    pub fn radius(&self) -> T {
        self.positions.iter().fold(T::zero(), |r, q| r.max(q[0].hypot(q[1])))
    }

    pub fn distance(&self, i: usize, j: usize) -> T {
        let (a, b) = (self.positions[i], self.positions[j]);
        (a[0] - b[0]).hypot(a[1] - b[1])
    }

    pub fn min_distance(&self) -> T {
        let mut d = T::infinity();
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                d = d.min(self.distance(i, j));
            }
        }
        d
    }

    fn check_collisions(&self) -> Result<()> {
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                let d = self.distance(i, j);
                if d == T::zero() {
                    return Err(Error::Collision { i: i + 1, j: j + 1, distance: d.to_f64_lossy() });
                }
            }
        }
        Ok(())
    }

    /// Translates so the center of mass is at the origin and marks the result centered.
    pub fn recentered(&self) -> Self {
        let c = self.center_of_mass();
        Self {
            masses: self.masses.clone(),
            positions: self.positions.iter().map(|q| [q[0] - c[0], q[1] - c[1]]).collect(),
            centered: true,
        }
    }

    /// Scales all positions by `s > 0` about the origin.
    pub fn scaled(&self, s: T) -> Self {
        Self {
            masses: self.masses.clone(),
            positions: self.positions.iter().map(|q| [q[0] * s, q[1] * s]).collect(),
            centered: self.centered,
        }
    }

    /// Rotates every body counter-clockwise by `theta` about the origin.
    pub fn rotated(&self, theta: T) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            masses: self.masses.clone(),
            positions: self.positions.iter().map(|q| [c * q[0] - s * q[1], s * q[0] + c * q[1]]).collect(),
            centered: self.centered,
        }
    }

    /// Same masses, new flattened positions. The centered flag is dropped.
    pub fn with_flat(&self, z: &[T]) -> Result<Self> {
        Self::from_flat(self.masses.clone(), z)
    }

    pub(crate) fn mark_centered(mut self) -> Self {
        self.centered = true;
        self
    }

    /// Converts the scalar type (e.g. to run the same configuration in `f32`).
    pub fn cast<S: Real>(&self) -> BodyConfiguration<S> {
        let c = |x: T| S::of(x.to_f64_lossy());
        BodyConfiguration {
            masses: self.masses.iter().map(|&m| c(m)).collect(),
            positions: self.positions.iter().map(|q| [c(q[0]), c(q[1])]).collect(),
            centered: self.centered,
        }
    }
}

/// One power-law term `c · r^(−a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm<T> {
    pub coefficient: T,
    pub exponent: T,
}

/// `U = Σₖ cₖ Σ_{i<j} mᵢ mⱼ r_{ij}^(−aₖ)`, terms kept in increasing exponent order.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec<T> {
    terms: Vec<PowerTerm<T>>,
}

impl<T: Real> PotentialSpec<T> {
    pub fn new(mut terms: Vec<PowerTerm<T>>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidPotential("no terms".into()));
        }
        for t in &terms {
            if !(t.coefficient.is_finite() && t.coefficient > T::zero()) {
                return Err(Error::InvalidPotential(format!("coefficient {} must be positive", t.coefficient)));
            }
            if !(t.exponent.is_finite() && t.exponent > T::zero()) {
                return Err(Error::InvalidPotential(format!("exponent {} must be positive", t.exponent)));
            }
        }
        terms.sort_by(|a, b| a.exponent.partial_cmp(&b.exponent).unwrap());
        if terms.windows(2).any(|w| w[0].exponent == w[1].exponent) {
            return Err(Error::InvalidPotential("repeated exponent".into()));
        }
        Ok(Self { terms })
    }

    /// Builds from `(coefficient, exponent)` pairs.
    pub fn from_pairs(pairs: &[(T, T)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(coefficient, exponent)| PowerTerm { coefficient, exponent }).collect())
    }

    pub fn homogeneous(alpha: T) -> Result<Self> {
        Self::from_pairs(&[(T::one(), alpha)])
    }

    /// `1/r + 1/r²`
    pub fn manev() -> Self {
        Self::from_pairs(&[(T::one(), T::one()), (T::one(), T::two())]).expect("valid preset")
    }

    /// `1/r + 1/r³`
    pub fn schwarzschild() -> Self {
        Self::from_pairs(&[(T::one(), T::one()), (T::one(), T::of(3.0))]).expect("valid preset")
    }

    pub fn terms(&self) -> &[PowerTerm<T>] {
        &self.terms
    }

    /// The exponent α when the potential has a single term.
    pub fn homogeneity(&self) -> Option<T> {
        (self.terms.len() == 1).then(|| self.terms[0].exponent)
    }

    /// Multiplies every coefficient by `s`.
    pub fn scaled(&self, s: T) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| PowerTerm { coefficient: t.coefficient * s, exponent: t.exponent })
                .collect(),
        }
    }

    pub fn cast<S: Real>(&self) -> PotentialSpec<S> {
        PotentialSpec {
            terms: self
                .terms
                .iter()
                .map(|t| PowerTerm {
                    coefficient: S::of(t.coefficient.to_f64_lossy()),
                    exponent: S::of(t.exponent.to_f64_lossy()),
                })
                .collect(),
        }
    }
}

impl<T: Real> std::fmt::Display for PotentialSpec<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|t| format!("{}/r^{}", t.coefficient, t.exponent)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `I = ½ Σ mᵢ |qᵢ|²`
pub fn moment_of_inertia<T: Real>(config: &BodyConfiguration<T>) -> T {
    config
        .masses()
        .iter()
        .zip(config.positions())
        .map(|(&m, q)| m * (q[0] * q[0] + q[1] * q[1]))
        .sum::<T>()
        * T::half()
}

/// Per-term partial sums `Uₖ = cₖ Σ_{i<j} mᵢ mⱼ r^(−aₖ)`.
pub fn potential_terms<T: Real>(config: &BodyConfiguration<T>, spec: &PotentialSpec<T>) -> Vec<T> {
    potential_terms_flat(config.masses(), &config.flat(), spec)
}

pub fn potential_energy<T: Real>(config: &BodyConfiguration<T>, spec: &PotentialSpec<T>) -> T {
    potential_terms(config, spec).into_iter().sum()
}

pub(crate) fn potential_terms_flat<T: Real>(masses: &[T], z: &[T], spec: &PotentialSpec<T>) -> Vec<T> {
    let n = masses.len();
    let mut u = vec![T::zero(); spec.terms().len()];
    for i in 0..n {
        for j in i + 1..n {
            let r = (z[2 * i] - z[2 * j]).hypot(z[2 * i + 1] - z[2 * j + 1]);
            let mm = masses[i] * masses[j];
            for (uk, t) in u.iter_mut().zip(spec.terms()) {
                *uk += t.coefficient * mm * r.powf(-t.exponent);
            }
        }
    }
    u
}

/// Gradient of term `k` alone, or of the whole potential when `only` is `None`.
pub(crate) fn gradient_flat<T: Real>(masses: &[T], z: &[T], spec: &PotentialSpec<T>, only: Option<usize>) -> Vec<T> {
    let n = masses.len();
    let mut g = vec![T::zero(); 2 * n];
    for i in 0..n {
        for j in i + 1..n {
            let dx = z[2 * i] - z[2 * j];
            let dy = z[2 * i + 1] - z[2 * j + 1];
            let r2 = dx * dx + dy * dy;
            let r = r2.sqrt();
            let mm = masses[i] * masses[j];
            let mut f = T::zero();
            for (k, t) in spec.terms().iter().enumerate() {
                if only.is_some_and(|o| o != k) {
                    continue;
                }
                f += t.exponent * t.coefficient * mm * r.powf(-t.exponent - T::two());
            }
            // ∇ᵢ U gets −f (qᵢ − qⱼ), ∇ⱼ U the opposite
            g[2 * i] -= f * dx;
            g[2 * i + 1] -= f * dy;
            g[2 * j] += f * dx;
            g[2 * j + 1] += f * dy;
        }
    }
    g
}

fn ensure_separated<T: Real>(config: &BodyConfiguration<T>) -> Result<()> {
    config.check_collisions()
}

/// Analytic gradient `∇U`, flattened.
pub fn potential_gradient<T: Real>(config: &BodyConfiguration<T>, spec: &PotentialSpec<T>) -> Result<Vec<T>> {
    ensure_separated(config)?;
    Ok(gradient_flat(config.masses(), &config.flat(), spec, None))
}

/// Gradients of the individual terms `∇Uₖ`.
pub fn potential_gradient_terms<T: Real>(config: &BodyConfiguration<T>, spec: &PotentialSpec<T>) -> Result<Vec<Vec<T>>> {
    ensure_separated(config)?;
    let z = config.flat();
    Ok((0..spec.terms().len()).map(|k| gradient_flat(config.masses(), &z, spec, Some(k))).collect())
}

/// Analytic Hessian `D²U`, assembled from per-pair 2×2 blocks.
pub fn potential_hessian<T: Real>(config: &BodyConfiguration<T>, spec: &PotentialSpec<T>) -> Result<Mat<T>> {
    ensure_separated(config)?;
    Ok(hessian_flat(config.masses(), &config.flat(), spec))
}

pub(crate) fn hessian_flat<T: Real>(masses: &[T], z: &[T], spec: &PotentialSpec<T>) -> Mat<T> {
    let n = masses.len();
    let mut h = Mat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in i + 1..n {
            let d = [z[2 * i] - z[2 * j], z[2 * i + 1] - z[2 * j + 1]];
            let r = d[0].hypot(d[1]);
            let mm = masses[i] * masses[j];
            let mut outer = T::zero();
            let mut iso = T::zero();
            for t in spec.terms() {
                let a = t.exponent;
                outer += t.coefficient * mm * a * (a + T::two()) * r.powf(-a - T::of(4.0));
                iso += t.coefficient * mm * a * r.powf(-a - T::two());
            }
            for p in 0..2 {
                for q in 0..2 {
                    let mut b = outer * d[p] * d[q];
                    if p == q {
                        b -= iso;
                    }
                    h[(2 * i + p, 2 * i + q)] += b;
                    h[(2 * j + p, 2 * j + q)] += b;
                    h[(2 * i + p, 2 * j + q)] -= b;
                    h[(2 * j + p, 2 * i + q)] -= b;
                }
            }
        }
    }
    h
}

/// Generalized Euler multiplier `(Σₖ aₖ Uₖ) / (2I)`, without any centrality check.
pub fn euler_multiplier<T: Real>(config: &BodyConfiguration<T>, spec: &PotentialSpec<T>) -> T {
    let weighted: T = potential_terms(config, spec).iter().zip(spec.terms()).map(|(&u, t)| t.exponent * u).sum();
    weighted / (T::two() * moment_of_inertia(config))
}

/// `ω²` of the relative equilibrium generated by a central configuration.
///
/// Computed from the Euler formula and cross-checked against the multiplier
/// that best solves `∇U + λ ∇I = 0`; fails if the configuration is not
/// central or the two disagree.
pub fn angular_frequency_squared<T: Real>(config: &BodyConfiguration<T>, spec: &PotentialSpec<T>) -> Result<T> {
    let grad = potential_gradient(config, spec)?;
    let tol = default_centrality_tolerance(&grad);
    angular_frequency_squared_with_tol(config, spec, tol)
}

pub fn angular_frequency_squared_with_tol<T: Real>(
    config: &BodyConfiguration<T>,
    spec: &PotentialSpec<T>,
    tol: T,
) -> Result<T> {
    let report = is_central_configuration(config, spec, tol)?;
    if !report.is_central {
        return Err(Error::NotCentral {
            residual: report.residual_norm.to_f64_lossy(),
            tolerance: tol.to_f64_lossy(),
        });
    }
    let grad = potential_gradient(config, spec)?;
    let mz: Vec<T> = config.flat().iter().zip(config.mass_diagonal()).map(|(&x, m)| x * m).collect();
    let mz2: T = mz.iter().map(|&x| x * x).sum();
    let ls = -grad.iter().zip(&mz).map(|(&g, &m)| g * m).sum::<T>() / mz2;
    let euler = report.lambda;
    let mznorm = mz2.sqrt();
    // |λ_ls − λ_euler|·‖Mz‖ is bounded by the residual, so this only fires on
    // genuinely inconsistent input
    if (ls - euler).abs() * mznorm > T::two() * tol + T::epsilon() * T::of(64.0) * euler.abs() * mznorm {
        return Err(Error::MultiplierMismatch { euler: euler.to_f64_lossy(), residual: ls.to_f64_lossy() });
    }
    Ok(euler)
}
