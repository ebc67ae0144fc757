//! End-to-end analysis of one request.

use crate::error::CliError;
use crate::reference::{preset_reference, EvaluatedPreset};
use crate::report::*;
use crate::request::{AnalysisRequest, DynamicsOptions, ResolvedCase, Section, TermRequest};
use num_complex::Complex64;
use relstab_core::dynamics::{dominant_mode, estimate_growth_rate_with_step};
use relstab_core::linalg::symmetric_eigen;
use relstab_core::spectrum::{label_of, ModeLabel};
use relstab_core::symmetry::{eigenvalues_by_trace_equations, GroupKind};
use relstab_core::{
    angular_frequency_squared, character_table, classify, compare_spectra, default_centrality_tolerance,
    full_linearization_spectrum, is_central_configuration, linearize, potential_gradient, potential_hessian,
    RotatingFrame, Spectrum,
};
use std::time::Instant;

/// Runs the whole pipeline. A mismatch between the block reduction and the
/// oracle is not an `Err`: the report is returned with
/// [`Status::ConsistencyFailure`] so the caller can still inspect it.
pub fn run_analysis(request: &AnalysisRequest) -> Result<StabilityReport, CliError> {
    let case = request.resolve()?;
    analyse(request, &case)
}

/// Like [`run_analysis`] but fills in wall-clock timing, which makes the
/// report non-deterministic.
pub fn run_analysis_timed(request: &AnalysisRequest) -> Result<StabilityReport, CliError> {
    let start = Instant::now();
    let mut report = run_analysis(request)?;
    report.timing = Some(Timing { total_ms: start.elapsed().as_secs_f64() * 1e3 });
    Ok(report)
}

fn core<T>(r: relstab_core::Result<T>) -> Result<T, CliError> {
    r.map_err(CliError::from_core)
}

fn complex_list(values: &[Complex64]) -> Vec<ComplexValue> {
    values.iter().map(|&z| z.into()).collect()
}

fn analyse(request: &AnalysisRequest, case: &ResolvedCase) -> Result<StabilityReport, CliError> {
    let tol = &request.tolerances;
    let config = &case.config;
    let spec = &case.spec;

    let grad = core(potential_gradient(config, spec))?;
    let centrality_tol = tol.centrality.unwrap_or_else(|| default_centrality_tolerance(&grad));
    let centrality = core(is_central_configuration(config, spec, centrality_tol))?;
    if !centrality.is_central {
        return Err(CliError::Input(format!(
            "configuration is not central: residual {:e} exceeds {:e}",
            centrality.residual_norm, centrality_tol
        )));
    }
    let w2 = core(angular_frequency_squared(config, spec))?;
    let omega = w2.sqrt();
    let lin = core(linearize(config, spec))?;
    let oracle = core(full_linearization_spectrum(config, spec))?;
    let union = core(lin.block_union_spectrum())?;
    let verdict = classify(&oracle, tol.classify);
    let threshold = verdict.threshold;
    let union_scale = union.scale();

    let reference = match (case.preset, case.alpha) {
        (Some(name), Some(alpha)) => preset_reference(name)
            .map(|r| r.evaluate(alpha))
            .transpose()
            .map_err(|e| CliError::Consistency(e.to_string()))?,
        _ => None,
    };
    let mut discrepancies = Vec::new();

    let group_name = match lin.group.kind() {
        GroupKind::Trivial => "trivial".to_string(),
        GroupKind::Dihedral { m } => format!("D{m}"),
    };
    let case_report = CaseReport {
        name: case.name.clone(),
        preset: case.preset.map(String::from),
        n: config.n(),
        masses: config.masses().to_vec(),
        positions: config.positions().to_vec(),
        potential: spec.terms().iter().map(|t| TermRequest { coefficient: t.coefficient, exponent: t.exponent }).collect(),
        potential_text: spec.to_string(),
        symmetry_group: group_name.clone(),
        group_order: lin.group.order(),
        centrality_residual: centrality.residual_norm,
        centrality_tolerance: centrality_tol,
    };

    let omega_report = request.wants(Section::Omega).then(|| {
        let reference = reference.as_ref().map(|r| {
            let agrees = relative_close(w2, r.omega_squared.value, tol.reference);
            if !agrees {
                discrepancies.push(Discrepancy {
                    quantity: "omega_squared".into(),
                    reference: format!("{} = {}", r.omega_squared.expr, r.omega_squared.value),
                    computed: w2.to_string(),
                    source: r.omega_squared.source.clone(),
                    note: r.omega_squared.flag.clone().unwrap_or_else(|| "reference value not reproduced".into()),
                });
            }
            ReferenceScalar {
                value: r.omega_squared.value,
                expression: r.omega_squared.expr.clone(),
                source: r.omega_squared.source.clone(),
                flag: r.omega_squared.flag.clone(),
                agrees,
                tolerance: tol.reference,
            }
        });
        OmegaReport {
            computed: ComputedScalar { value: w2, tolerance: centrality_tol },
            omega,
            period: 2.0 * std::f64::consts::PI / omega,
            reference,
        }
    });

    let hessian_report = if request.wants(Section::Hessian) {
        Some(hessian_section(case, &lin.group, reference.as_ref(), tol.reference, &mut discrepancies)?)
    } else {
        None
    };

    let decomposition_report = request.wants(Section::Decomposition).then(|| {
        let d = &lin.decomposition;
        DecompositionReport {
            group: group_name.clone(),
            order: lin.group.order(),
            pairs: d.pairs.iter().map(|p| PairReport { irrep: p.irrep.name(), lambdas: p.lambdas }).collect(),
            coupled: d
                .coupled
                .iter()
                .map(|c| CoupledReport { irrep: c.irrep.name(), h_plus: c.h_plus, h_minus: c.h_minus, kappa: c.kappa })
                .collect(),
            residual: d
                .residual
                .iter()
                .map(|r| ResidualReport { irrep: r.irrep.name(), dimension: r.basis.len() })
                .collect(),
        }
    });

    let blocks_report = if request.wants(Section::Blocks) {
        let labelled = |values: Vec<Complex64>| {
            let s = Spectrum::new(values).consolidated_relative_to(union_scale).into_values();
            let labels = s.iter().map(|&z| label_of(z, threshold).as_str().to_string()).collect();
            (complex_list(&s), labels)
        };
        let mut blocks = Vec::new();
        for b in &lin.blocks {
            let (c1, c2) = b.characteristic_coefficients();
            let (eigenvalues, labels) = labelled(relstab_core::block_spectrum(b).to_vec());
            let irrep = lin
                .decomposition
                .pairs
                .iter()
                .find(|p| p.lambdas == [b.lambda_pair.0, b.lambda_pair.1])
                .map(|p| p.irrep.name())
                .unwrap_or_default();
            blocks.push(BlockReport {
                kind: BlockKind::Pair,
                irrep,
                parameters: vec![b.lambda_pair.0, b.lambda_pair.1],
                characteristic: vec![c1, c2],
                eigenvalues,
                labels,
            });
        }
        for c in &lin.coupled {
            let (p, q, r) = c.quartic_coefficients();
            let (eigenvalues, labels) = labelled(c.spectrum());
            blocks.push(BlockReport {
                kind: BlockKind::Coupled,
                irrep: c.irrep.name(),
                parameters: vec![c.h_plus, c.h_minus, c.kappa],
                characteristic: vec![p, q, r],
                eigenvalues,
                labels,
            });
        }
        for r in &lin.residual {
            let (eigenvalues, labels) = labelled(core(r.spectrum())?);
            blocks.push(BlockReport {
                kind: BlockKind::Residual,
                irrep: r.irrep.name(),
                parameters: Vec::new(),
                characteristic: Vec::new(),
                eigenvalues,
                labels,
            });
        }
        let reference = reference.as_ref().map(|r| {
            let published = Spectrum::new(r.block_spectrum.value.clone());
            let cmp = compare_spectra(&published, &oracle, tol.reference);
            let rel = (cmp.failure.is_none() || cmp.max_distance.is_finite())
                .then(|| cmp.max_distance / cmp.scale.max(f64::MIN_POSITIVE));
            if !cmp.passed {
                discrepancies.push(Discrepancy {
                    quantity: "block_spectrum".into(),
                    reference: format_complex_list(published.values()),
                    computed: format_complex_list(oracle.values()),
                    source: r.block_spectrum.source.clone(),
                    note: r
                        .block_spectrum
                        .flag
                        .clone()
                        .or_else(|| cmp.failure.clone())
                        .unwrap_or_else(|| "published block spectrum differs from the oracle".into()),
                });
            }
            ReferenceSpectrum {
                values: complex_list(published.values()),
                expression: r.block_spectrum.expr.clone(),
                source: r.block_spectrum.source.clone(),
                flag: r.block_spectrum.flag.clone(),
                agrees: cmp.passed,
                max_relative_distance: rel,
                tolerance: tol.reference,
            }
        });
        Some(BlocksReport { blocks, union: complex_list(union.values()), reference })
    } else {
        None
    };

    let oracle_report = request.wants(Section::Oracle).then(|| OracleReport {
        eigenvalues: complex_list(oracle.values()),
        labels: verdict.labels.iter().map(|l| l.as_str().to_string()).collect(),
        spectral_radius: oracle.scale(),
        hamiltonian_defect: oracle.hamiltonian_defect(),
    });

    let cmp = compare_spectra(&union, &oracle, tol.compare);
    let consistency = ConsistencyReport {
        passed: cmp.passed,
        tolerance: cmp.tolerance,
        scale: cmp.scale,
        block_count: cmp.sizes.0,
        oracle_count: cmp.sizes.1,
        max_distance: cmp.max_distance.is_finite().then_some(cmp.max_distance),
        worst_pairs: cmp
            .worst_pairs
            .iter()
            .map(|p| MatchedPairReport { block: p.left.into(), oracle: p.right.into(), distance: p.distance })
            .collect(),
        failure: cmp.failure.clone(),
    };

    let verdict_report = request.wants(Section::Verdict).then(|| {
        let count = |l: ModeLabel| verdict.labels.iter().filter(|&&x| x == l).count();
        VerdictReport {
            verdict: verdict.verdict.as_str().to_string(),
            max_real_part: verdict.max_real_part,
            max_real_over_omega: verdict.max_real_part / omega,
            tolerance: tol.classify,
            threshold,
            zero_modes: verdict.zero_modes,
            imaginary_modes: verdict.imaginary_modes,
            real_modes: count(ModeLabel::Real),
            complex_modes: count(ModeLabel::Complex),
        }
    });

    let dynamics_report = if request.wants(Section::Dynamics) {
        Some(dynamics_section(case, request.dynamics.unwrap_or_default(), verdict.max_real_part)?)
    } else {
        None
    };

    Ok(StabilityReport {
        schema: REPORT_SCHEMA.into(),
        status: if cmp.passed { Status::Ok } else { Status::ConsistencyFailure },
        request: request.clone(),
        case: case_report,
        omega: omega_report,
        hessian: hessian_report,
        decomposition: decomposition_report,
        blocks: blocks_report,
        oracle: oracle_report,
        consistency,
        verdict: verdict_report,
        dynamics: dynamics_report,
        discrepancies,
        timing: None,
    })
}

fn relative_close(computed: f64, reference: f64, tol: f64) -> bool {
    (computed - reference).abs() <= tol * reference.abs().max(1.0)
}

fn format_complex_list(values: &[Complex64]) -> String {
    let parts: Vec<String> = values
        .iter()
        .map(|z| if z.im == 0.0 { format!("{:.10}", z.re) } else { format!("{:.10}{:+.10}i", z.re, z.im) })
        .collect();
    format!("[{}]", parts.join(", "))
}

/// Largest matched distance between two real multisets, relative to the
/// larger magnitude present (`f64::INFINITY` on a size mismatch).
pub fn multiset_distance(a: &[f64], b: &[f64]) -> f64 {
    let sa = Spectrum::new(a.iter().map(|&x| Complex64::new(x, 0.0)).collect());
    let sb = Spectrum::new(b.iter().map(|&x| Complex64::new(x, 0.0)).collect());
    let cmp = compare_spectra(&sa, &sb, 1.0);
    cmp.max_distance / cmp.scale.max(f64::MIN_POSITIVE)
}

fn hessian_section(
    case: &ResolvedCase,
    group: &relstab_core::SymmetryGroup<f64>,
    reference: Option<&EvaluatedPreset>,
    ref_tol: f64,
    discrepancies: &mut Vec<Discrepancy>,
) -> Result<HessianReport, CliError> {
    let h = core(potential_hessian(&case.config, &case.spec))?;
    let table = core(character_table(group))?;
    let components = core(eigenvalues_by_trace_equations(&h, group, &table))?;
    let mut direct = symmetric_eigen(&h).values;
    direct.sort_by(f64::total_cmp);
    let expanded = relstab_core::symmetry::expand_component_eigenvalues(&components);
    let trace_vs_direct = multiset_distance(&expanded, &direct);
    let trace_tol = 1e-9;
    if !(trace_vs_direct <= trace_tol) {
        return Err(CliError::Consistency(format!(
            "trace-equation eigenvalues differ from direct diagonalization by {trace_vs_direct:e}"
        )));
    }
    let mut entries = Vec::new();
    let mut reference_eigenvalues = None;
    if let Some(r) = reference {
        for e in &r.hessian_entries {
            let (i, j, value) = e.value;
            let computed = h[(i, j)];
            let agrees = (computed - value).abs() <= ref_tol * value.abs().max(1.0);
            if !agrees {
                discrepancies.push(Discrepancy {
                    quantity: format!("hessian[{},{}]", i + 1, j + 1),
                    reference: format!("{} = {}", e.expr, value),
                    computed: computed.to_string(),
                    source: e.source.clone(),
                    note: e.flag.clone().unwrap_or_else(|| "published entry not reproduced".into()),
                });
            }
            entries.push(EntryReport {
                row: i + 1,
                col: j + 1,
                computed,
                reference: ReferenceScalar {
                    value,
                    expression: e.expr.clone(),
                    source: e.source.clone(),
                    flag: e.flag.clone(),
                    agrees,
                    tolerance: ref_tol,
                },
            });
        }
        let published = &r.hessian_eigenvalues;
        let d = multiset_distance(&published.value, &direct);
        let agrees = d <= ref_tol;
        if !agrees {
            discrepancies.push(Discrepancy {
                quantity: "hessian_eigenvalues".into(),
                reference: format!("{:?}", published.value),
                computed: format!("{direct:?}"),
                source: published.source.clone(),
                note: published
                    .flag
                    .clone()
                    .unwrap_or_else(|| "published eigenvalues differ from direct diagonalization".into()),
            });
        }
        let mut values = published.value.clone();
        values.sort_by(f64::total_cmp);
        reference_eigenvalues = Some(ReferenceList {
            values,
            expression: published.expr.clone(),
            source: published.source.clone(),
            flag: published.flag.clone(),
            agrees,
            max_relative_distance: if d.is_finite() { d } else { f64::MAX },
            tolerance: ref_tol,
        });
    }
    Ok(HessianReport {
        components: components
            .iter()
            .map(|c| ComponentReport {
                irrep: c.irrep.name(),
                degree: c.degree,
                multiplicity: c.multiplicity,
                trace_sum: c.trace_sum,
                eigenvalues: c.eigenvalues.clone(),
            })
            .collect(),
        direct_eigenvalues: direct,
        trace_vs_direct,
        trace_vs_direct_tolerance: trace_tol,
        entries,
        reference_eigenvalues,
    })
}

/// Growth is only required to match when the instability is this fast
/// relative to the rotation.
pub const GROWTH_CHECK_FRACTION: f64 = 0.05;
pub const GROWTH_TOLERANCE: f64 = 0.1;

fn dynamics_section(case: &ResolvedCase, opts: DynamicsOptions, max_re: f64) -> Result<DynamicsReport, CliError> {
    let frame = core(RotatingFrame::new(&case.config, &case.spec))?;
    let period = frame.period();
    let dt = period / opts.steps_per_period;
    let z0 = frame.equilibrium().to_vec();
    let v0 = vec![0.0; z0.len()];
    let mut drift = 0.0f64;
    let traj = core(frame.run(&z0, &v0, opts.periods * period, dt, usize::MAX, |_, z, _| {
        for (a, b) in z.iter().zip(&z0) {
            drift = drift.max((a - b).abs());
        }
        true
    }))?;
    if let Some(b) = &traj.blow_up {
        return Err(CliError::Consistency(format!("equilibrium run collided at t = {}", b.time)));
    }
    let energy_drift = traj.relative_energy_drift();
    let growth = if max_re > 0.0 {
        let (s, direction) = core(dominant_mode(&case.config, &case.spec))?;
        let radius = case.config.radius();
        let epsilon = opts.epsilon * radius;
        // enough time to grow through the fitting window several times over
        let duration = (30.0 / s.re).min(1e3 * period);
        let est = core(estimate_growth_rate_with_step(&frame, radius, &direction, epsilon, duration, dt))?;
        let relative_error = (est.rate - max_re).abs() / max_re;
        let checked = max_re > GROWTH_CHECK_FRACTION * frame.omega();
        Some(GrowthReport {
            predicted: max_re,
            measured: est.rate,
            no_growth: est.no_growth,
            window: est.window.map(|(a, b)| [a, b]),
            samples: est.samples,
            relative_error,
            epsilon,
            checked,
            agrees: !est.no_growth && relative_error <= GROWTH_TOLERANCE,
        })
    } else {
        None
    };
    Ok(DynamicsReport {
        dt,
        periods: opts.periods,
        steps: (opts.periods * opts.steps_per_period).round() as usize,
        equilibrium_drift: drift,
        energy_drift,
        growth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::request::{CaseSpec, ExplicitCase, PotentialRequest};

    #[test]
    fn triangle_newtonian() {
        let r = run_analysis(&AnalysisRequest::preset("triangle-homogeneous")).unwrap();
        assert_eq!(r.status, Status::Ok);
        let w = r.omega.as_ref().unwrap();
        assert!((w.computed.value - 3f64.powf(-0.5)).abs() < 1e-12);
        assert!(w.reference.as_ref().unwrap().agrees);
        assert_eq!(r.is_unstable(), Some(true));
        assert_eq!(r.case.symmetry_group, "D3");
    }

    #[test]
    fn manev_triangle_matches_published_omega() {
        let r = run_analysis(&AnalysisRequest::preset("manev-triangle")).unwrap();
        let w = r.omega.as_ref().unwrap();
        assert!((w.computed.value - (2.0 / 3.0 + 1.0 / 3f64.sqrt())).abs() < 1e-12);
        assert_eq!(r.is_unstable(), Some(true));
        // the published Hessian is twice the true one; the report says so
        assert!(r.discrepancies.iter().any(|d| d.quantity == "hessian[1,1]"));
        assert!(r.discrepancies.iter().any(|d| d.quantity == "hessian_eigenvalues"));
    }

    #[test]
    fn manev_square_flags_published_omega() {
        let r = run_analysis(&AnalysisRequest::preset("manev-square")).unwrap();
        let w = r.omega.as_ref().unwrap();
        assert!((w.computed.value - (3.0 + 2f64.sqrt()) / 2.0).abs() < 1e-12);
        let reference = w.reference.as_ref().unwrap();
        assert!(!reference.agrees && reference.flag.is_some());
        assert!(r.discrepancies.iter().any(|d| d.quantity == "omega_squared"));
    }

    #[test]
    fn explicit_pentagon_runs_end_to_end() {
        let mut req = AnalysisRequest::preset("unused");
        req.case = CaseSpec::Explicit(ExplicitCase { n: 5, radius: None, masses: None, positions: None });
        req.potential = Some(PotentialRequest::Homogeneous { alpha: 1.0 });
        let r = run_analysis(&req).unwrap();
        assert!(r.consistency.passed, "{:?}", r.consistency);
        assert!(r.omega.as_ref().unwrap().reference.is_none());
        assert!(r.discrepancies.is_empty());
        let coupled = r.blocks.as_ref().unwrap().blocks.iter().filter(|b| b.kind == BlockKind::Coupled).count();
        assert!(coupled > 0);
    }

    #[test]
    fn non_central_input_is_rejected() {
        let mut req = AnalysisRequest::preset("unused");
        req.case = CaseSpec::Explicit(ExplicitCase {
            n: 3,
            radius: None,
            masses: None,
            positions: Some(vec![[1.0, 0.0], [-0.5, 0.9], [-0.5, -0.9]]),
        });
        req.potential = Some(PotentialRequest::Named("newtonian".into()));
        assert!(matches!(run_analysis(&req), Err(CliError::Input(_))));
        req.tolerances.refine = true;
        let r = run_analysis(&req).unwrap();
        assert!(r.consistency.passed);
    }

    #[test]
    fn sections_are_optional() {
        let mut req = AnalysisRequest::preset("square-homogeneous");
        req.outputs = vec![Section::Verdict];
        let r = run_analysis(&req).unwrap();
        assert!(r.omega.is_none() && r.hessian.is_none() && r.blocks.is_none() && r.oracle.is_none());
        assert!(r.verdict.is_some());
        assert!(r.consistency.passed);
    }

    #[test]
    fn timing_is_opt_in() {
        let req = AnalysisRequest::preset("manev-triangle");
        assert!(run_analysis(&req).unwrap().timing.is_none());
        assert!(run_analysis_timed(&req).unwrap().timing.is_some());
    }
}
