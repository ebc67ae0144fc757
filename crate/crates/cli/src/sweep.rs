//! Parameter sweeps over the homogeneity exponent.

use crate::analysis::run_analysis;
use crate::error::CliError;
use crate::report::{BlockKind, ComplexValue, StabilityReport};
use crate::request::{AnalysisRequest, PotentialRequest, Section};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const SWEEP_SCHEMA: &str = "relstab.sweep/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<StabilityReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exit_code: Option<i32>,
}

/// One summary line per grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_real_part: Option<f64>,
    /// The two non-structural eigenvalues of the block built from the
    /// one-dimensional irreps (`A1` paired with `A2`).
    pub component_modes: Vec<ComplexValue>,
    /// `pure-imaginary`, `zero`, `real`, `complex`, `mixed` or `unavailable`.
    pub component_label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema: String,
    pub parameter: String,
    pub grid: Vec<f64>,
    pub points: Vec<SweepPoint>,
    pub summary: Vec<SweepRow>,
    pub failures: usize,
}

/// Runs `base` once per grid value. Points run concurrently; results are
/// kept in grid order. A failing point is recorded and the sweep goes on.
pub fn run_sweep(base: &AnalysisRequest, parameter: &str, grid: &[f64]) -> Result<SweepReport, CliError> {
    if parameter != "alpha" {
        return Err(CliError::Input(format!("cannot sweep `{parameter}`; only `alpha` is supported")));
    }
    let resolved = base.resolve()?;
    if resolved.spec.homogeneity().is_none() {
        return Err(CliError::Input("alpha sweeps need a single-term potential".into()));
    }
    let mut base = base.clone();
    for s in [Section::Blocks, Section::Verdict] {
        if !base.wants(s) {
            base.outputs.push(s);
        }
    }
    let points: Vec<SweepPoint> = grid
        .par_iter()
        .map(|&value| {
            let mut req = base.clone();
            req.potential = Some(PotentialRequest::Homogeneous { alpha: value });
            match run_analysis(&req) {
                Ok(report) => {
                    let failed = report.status != crate::report::Status::Ok;
                    SweepPoint {
                        value,
                        error: failed.then(|| "block union does not match the oracle".to_string()),
                        exit_code: failed.then_some(crate::error::EXIT_CONSISTENCY),
                        report: Some(report),
                    }
                }
                Err(e) => SweepPoint { value, report: None, error: Some(e.to_string()), exit_code: Some(e.exit_code()) },
            }
        })
        .collect();
    let summary = points.iter().map(summarize).collect();
    let failures = points.iter().filter(|p| p.error.is_some()).count();
    Ok(SweepReport {
        schema: SWEEP_SCHEMA.into(),
        parameter: parameter.into(),
        grid: grid.to_vec(),
        points,
        summary,
        failures,
    })
}

fn summarize(p: &SweepPoint) -> SweepRow {
    let Some(r) = &p.report else {
        return SweepRow {
            value: p.value,
            verdict: None,
            max_real_part: None,
            component_modes: Vec::new(),
            component_label: "unavailable".into(),
        };
    };
    let (component_modes, component_label) = component_one(r).unwrap_or_else(|| (Vec::new(), "unavailable".into()));
    SweepRow {
        value: p.value,
        verdict: r.verdict.as_ref().map(|v| v.verdict.clone()),
        max_real_part: r.verdict.as_ref().map(|v| v.max_real_part),
        component_modes,
        component_label,
    }
}

/// The block pairing the trivial and sign components carries the two
/// structural zero modes; the other two eigenvalues are the ones whose type
/// changes with α.
fn component_one(r: &StabilityReport) -> Option<(Vec<ComplexValue>, String)> {
    let block = r
        .blocks
        .as_ref()?
        .blocks
        .iter()
        .find(|b| b.kind == BlockKind::Pair && (b.irrep == "A1" || b.irrep == "A2"))?;
    let mut idx: Vec<usize> = (0..block.eigenvalues.len()).collect();
    let norm = |z: &ComplexValue| z.re.hypot(z.im);
    idx.sort_by(|&a, &b| norm(&block.eigenvalues[b]).total_cmp(&norm(&block.eigenvalues[a])).then(a.cmp(&b)));
    idx.truncate(2);
    idx.sort();
    let modes: Vec<ComplexValue> = idx.iter().map(|&i| block.eigenvalues[i]).collect();
    let labels: Vec<&str> = idx.iter().map(|&i| block.labels[i].as_str()).collect();
    let label = if labels.windows(2).all(|w| w[0] == w[1]) { labels[0].to_string() } else { "mixed".to_string() };
    Some((modes, label))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trichotomy_around_two() {
        let s = run_sweep(&AnalysisRequest::preset("triangle-homogeneous"), "alpha", &[1.9, 2.0, 2.1]).unwrap();
        let labels: Vec<&str> = s.summary.iter().map(|r| r.component_label.as_str()).collect();
        assert_eq!(labels, ["pure-imaginary", "zero", "real"]);
        assert_eq!(s.failures, 0);
    }

    #[test]
    fn grid_order_is_preserved() {
        let grid = [3.0, 0.5, 2.0, 1.0, 1.5];
        let s = run_sweep(&AnalysisRequest::preset("triangle-homogeneous"), "alpha", &grid).unwrap();
        let got: Vec<f64> = s.points.iter().map(|p| p.value).collect();
        assert_eq!(got, grid);
        assert!(s.summary.iter().all(|r| r.verdict.as_deref() == Some("spectrally-unstable")));
    }

    #[test]
    fn empty_grid_and_bad_parameter() {
        let s = run_sweep(&AnalysisRequest::preset("square-homogeneous"), "alpha", &[]).unwrap();
        assert!(s.points.is_empty() && s.summary.is_empty());
        assert!(run_sweep(&AnalysisRequest::preset("square-homogeneous"), "mass", &[1.0]).is_err());
        assert!(run_sweep(&AnalysisRequest::preset("manev-square"), "alpha", &[1.0]).is_err());
    }

    #[test]
    fn failures_are_aggregated() {
        let s = run_sweep(&AnalysisRequest::preset("triangle-homogeneous"), "alpha", &[1.0, -1.0]).unwrap();
        assert_eq!(s.failures, 1);
        assert!(s.points[0].report.is_some());
        assert_eq!(s.points[1].exit_code, Some(crate::error::EXIT_INPUT));
        assert_eq!(s.summary[1].component_label, "unavailable");
    }
}
