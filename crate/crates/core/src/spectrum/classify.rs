use super::Spectrum;
use crate::scalar::{Complex, Real};

/// Relative tolerance used when none is given.
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeLabel {
    Zero,
    PureImaginary,
    Real,
    Complex,
}

impl ModeLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModeLabel::Zero => "zero",
            ModeLabel::PureImaginary => "pure-imaginary",
            ModeLabel::Real => "real",
            ModeLabel::Complex => "complex",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    SpectrallyUnstable,
    NotUnstableAtLinearOrder,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::SpectrallyUnstable => "spectrally-unstable",
            Verdict::NotUnstableAtLinearOrder => "not-unstable-at-linear-order",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityVerdict<T> {
    pub eigenvalues: Vec<Complex<T>>,
    pub labels: Vec<ModeLabel>,
    pub verdict: Verdict,
    pub max_real_part: T,
    /// Absolute threshold `tol · max |s|` used for every label.
    pub threshold: T,
    pub zero_modes: usize,
    pub imaginary_modes: usize,
}

impl<T: Real> StabilityVerdict<T> {
    pub fn is_unstable(&self) -> bool {
        self.verdict == Verdict::SpectrallyUnstable
    }
}

pub fn label_of<T: Real>(z: Complex<T>, threshold: T) -> ModeLabel {
    match (z.re.abs() <= threshold, z.im.abs() <= threshold) {
        (true, true) => ModeLabel::Zero,
        (true, false) => ModeLabel::PureImaginary,
        (false, true) => ModeLabel::Real,
        (false, false) => ModeLabel::Complex,
    }
}

/// Labels each eigenvalue against `tol` times the spectral radius; unstable
/// iff some real part exceeds that threshold.
pub fn classify<T: Real>(eigs: &Spectrum<T>, tol: T) -> StabilityVerdict<T> {
    let threshold = tol * eigs.scale();
    let labels: Vec<ModeLabel> = eigs.values().iter().map(|&z| label_of(z, threshold)).collect();
    let max_real_part = if eigs.is_empty() { T::zero() } else { eigs.max_real_part() };
    let verdict =
        if max_real_part > threshold { Verdict::SpectrallyUnstable } else { Verdict::NotUnstableAtLinearOrder };
    StabilityVerdict {
        eigenvalues: eigs.values().to_vec(),
        zero_modes: labels.iter().filter(|l| **l == ModeLabel::Zero).count(),
        imaginary_modes: labels.iter().filter(|l| **l == ModeLabel::PureImaginary).count(),
        labels,
        verdict,
        max_real_part,
        threshold,
    }
}
