//! Report object model. Everything the CLI prints (JSON or table) is
//! rendered from these types.

use crate::request::{AnalysisRequest, TermRequest};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const REPORT_SCHEMA: &str = "relstab.report/1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexValue> for Complex64 {
    fn from(z: ComplexValue) -> Self {
        Complex64::new(z.re, z.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    /// Block reduction and dense oracle disagree (exit code 3).
    ConsistencyFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub schema: String,
    pub status: Status,
    pub request: AnalysisRequest,
    pub case: CaseReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<OmegaReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hessian: Option<HessianReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<BlocksReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
    /// Always present: block union against oracle.
    pub consistency: ConsistencyReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsReport>,
    pub discrepancies: Vec<Discrepancy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub n: usize,
    pub masses: Vec<f64>,
    pub positions: Vec<[f64; 2]>,
    pub potential: Vec<TermRequest>,
    pub potential_text: String,
    pub symmetry_group: String,
    pub group_order: usize,
    pub centrality_residual: f64,
    pub centrality_tolerance: f64,
}

/// A published value next to the computed one it is compared with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceScalar {
    pub value: f64,
    pub expression: String,
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag: Option<String>,
    pub agrees: bool,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComputedScalar {
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaReport {
    pub computed: ComputedScalar,
    pub omega: f64,
    pub period: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceScalar>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub irrep: String,
    pub degree: usize,
    pub multiplicity: usize,
    pub trace_sum: f64,
    /// One per copy; each occurs `degree` times in the spectrum of `D²U`.
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryReport {
    /// One-based.
    pub row: usize,
    pub col: usize,
    pub computed: f64,
    pub reference: ReferenceScalar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceList {
    pub values: Vec<f64>,
    pub expression: String,
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag: Option<String>,
    pub agrees: bool,
    /// Largest matched distance relative to the larger list's magnitude.
    pub max_relative_distance: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HessianReport {
    /// From the trace equations, per isotypic component.
    pub components: Vec<ComponentReport>,
    /// Direct symmetric diagonalization, ascending.
    pub direct_eigenvalues: Vec<f64>,
    /// Trace-equation multiset against direct diagonalization.
    pub trace_vs_direct: f64,
    pub trace_vs_direct_tolerance: f64,
    pub entries: Vec<EntryReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_eigenvalues: Option<ReferenceList>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub irrep: String,
    pub lambdas: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledReport {
    pub irrep: String,
    pub h_plus: f64,
    pub h_minus: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub irrep: String,
    pub dimension: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub group: String,
    pub order: usize,
    pub pairs: Vec<PairReport>,
    pub coupled: Vec<CoupledReport>,
    pub residual: Vec<ResidualReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockKind {
    /// 4×4 block from a J-compatible pair; `s⁴ + b s² + c`.
    Pair,
    /// 8-dimensional coupled plane; `σ⁴ + p σ² + q σ + r` with `s = iσ`.
    Coupled,
    /// Reduced linearization solved densely.
    Residual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub kind: BlockKind,
    pub irrep: String,
    /// `[λᵢ, λⱼ]` for pairs, `[h₊, h₋, κ]` for coupled planes.
    pub parameters: Vec<f64>,
    /// Non-leading coefficients: `[b, c]` or `[p, q, r]`; empty for residual blocks.
    pub characteristic: Vec<f64>,
    pub eigenvalues: Vec<ComplexValue>,
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSpectrum {
    pub values: Vec<ComplexValue>,
    pub expression: String,
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag: Option<String>,
    pub agrees: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_relative_distance: Option<f64>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlocksReport {
    pub blocks: Vec<BlockReport>,
    /// Union of the block spectra in canonical order.
    pub union: Vec<ComplexValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceSpectrum>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub eigenvalues: Vec<ComplexValue>,
    pub labels: Vec<String>,
    pub spectral_radius: f64,
    /// Distance to the images under `s → −s` and `s → s̄`, relative.
    pub hamiltonian_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedPairReport {
    pub block: ComplexValue,
    pub oracle: ComplexValue,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub passed: bool,
    pub tolerance: f64,
    pub scale: f64,
    pub block_count: usize,
    pub oracle_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_distance: Option<f64>,
    pub worst_pairs: Vec<MatchedPairReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub verdict: String,
    pub max_real_part: f64,
    pub max_real_over_omega: f64,
    pub tolerance: f64,
    pub threshold: f64,
    pub zero_modes: usize,
    pub imaginary_modes: usize,
    pub real_modes: usize,
    pub complex_modes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub predicted: f64,
    pub measured: f64,
    pub no_growth: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    pub samples: usize,
    pub relative_error: f64,
    pub epsilon: f64,
    /// Only required to agree when `predicted > 0.05 ω`.
    pub checked: bool,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsReport {
    pub dt: f64,
    pub periods: f64,
    pub steps: usize,
    pub equilibrium_drift: f64,
    pub energy_drift: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthReport>,
}

/// A reference value that disagrees with the computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub quantity: String,
    pub reference: String,
    pub computed: String,
    pub source: String,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_ms: f64,
}

impl StabilityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are finite") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn is_unstable(&self) -> Option<bool> {
        self.verdict.as_ref().map(|v| v.verdict == relstab_core::Verdict::SpectrallyUnstable.as_str())
    }
}
