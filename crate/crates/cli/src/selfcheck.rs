//! The invariant battery behind `relstab selfcheck`.

use crate::presets::PRESETS;
use crate::request::AnalysisRequest;
use crate::sampling::{random_central_configurations, random_configuration, RandomCase};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use relstab_core::fd;
use relstab_core::spectrum::{block_spectrum_dense, SpectrumComparison};
use relstab_core::symmetry::isotypic_projectors;
use relstab_core::{
    block_spectrum, build_block, build_polygon_symmetry_group, character_table, classify, compare_spectra,
    full_linearization_spectrum, linearize, potential_energy, potential_gradient, potential_hessian,
    regular_polygon, Complex, Mat, PotentialSpec, Spectrum,
};
use serde::{Deserialize, Serialize};

pub const SELFCHECK_SCHEMA: &str = "relstab.selfcheck/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Worst observed error, in the units of `tolerance`.
    pub worst: f64,
    pub tolerance: f64,
    pub cases: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckResult {
    fn new(name: &str, tolerance: f64, results: Vec<(f64, String)>) -> Self {
        let cases = results.len();
        let worst = results.iter().max_by(|a, b| a.0.total_cmp(&b.0));
        let (w, label) = worst.map_or((0.0, String::new()), |(w, l)| (*w, l.clone()));
        // NaN counts as a failure
        let passed = cases > 0 && results.iter().all(|(e, _)| *e <= tolerance);
        Self { name: name.into(), passed, worst: w, tolerance, cases, detail: (!label.is_empty()).then_some(label) }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: worst {:.3e} (tolerance {:.0e}, {} cases){}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.worst,
            self.tolerance,
            self.cases,
            self.detail.as_ref().map(|d| format!(" at {d}")).unwrap_or_default()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfcheckReport {
    pub schema: String,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

/// The presets and `count` random refined central configurations.
pub fn battery_cases(count: usize, seed: u64) -> Vec<RandomCase> {
    let mut cases: Vec<RandomCase> = PRESETS
        .iter()
        .map(|p| {
            let r = AnalysisRequest::preset(p.name).resolve().expect("presets resolve");
            RandomCase { label: p.name.to_string(), config: r.config, spec: r.spec }
        })
        .collect();
    cases.extend(random_central_configurations(count, seed));
    cases
}

fn preset_potentials() -> Vec<(&'static str, PotentialSpec<f64>)> {
    vec![
        ("homogeneous", PotentialSpec::homogeneous(1.0).expect("valid")),
        ("manev", PotentialSpec::manev()),
        ("schwarzschild", PotentialSpec::schwarzschild()),
    ]
}

pub fn check_gradient_fd(samples: usize, seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut results = Vec::new();
    for (name, spec) in preset_potentials() {
        for k in 0..samples {
            let n = rng.gen_range(2..6);
            let c = random_configuration(&mut rng, n);
            let analytic = potential_gradient(&c, &spec).expect("collision free");
            let numeric = fd::gradient(
                |z: &[f64]| potential_energy(&c.with_flat(z).expect("same size"), &spec),
                &c.flat(),
            );
            results.push((fd::relative_max_error(&analytic, &numeric), format!("{name} sample {k}")));
        }
    }
    CheckResult::new("gradient vs finite differences", 1e-6, results)
}

pub fn check_hessian_fd(samples: usize, seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut results = Vec::new();
    for (name, spec) in preset_potentials() {
        for k in 0..samples {
            let n = rng.gen_range(2..6);
            let c = random_configuration(&mut rng, n);
            let analytic = potential_hessian(&c, &spec).expect("collision free");
            let numeric = fd::jacobian(
                |z: &[f64]| potential_gradient(&c.with_flat(z).expect("same size"), &spec).expect("collision free"),
                &c.flat(),
            );
            results.push((
                fd::relative_max_error(analytic.as_slice(), numeric.as_slice()),
                format!("{name} sample {k}"),
            ));
        }
    }
    CheckResult::new("Hessian vs finite differences", 1e-5, results)
}

fn relative(cmp: &SpectrumComparison<f64>) -> f64 {
    cmp.max_distance / cmp.scale.max(f64::MIN_POSITIVE)
}

fn max_abs_diff(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
    a.sub(b).max_abs()
}

pub fn check_homomorphism(sizes: &[usize]) -> CheckResult {
    let results = sizes
        .iter()
        .map(|&n| {
            let g = build_polygon_symmetry_group::<f64>(n).expect("n >= 3");
            let mut worst = 0.0f64;
            for i in 0..g.order() {
                for j in 0..g.order() {
                    let prod = g.matrix(i).matmul(g.matrix(j));
                    worst = worst.max(max_abs_diff(&prod, g.matrix(g.product(i, j))));
                }
            }
            (worst, format!("n = {n}"))
        })
        .collect();
    CheckResult::new("representation is a homomorphism", 1e-12, results)
}

pub fn check_character_orthonormality(sizes: &[usize]) -> CheckResult {
    let results = sizes
        .iter()
        .map(|&n| {
            let g = build_polygon_symmetry_group::<f64>(n).expect("n >= 3");
            let t = character_table(&g).expect("dihedral table");
            (t.orthonormality_defect(), format!("n = {n}"))
        })
        .collect();
    CheckResult::new("character orthonormality", 1e-12, results)
}

pub fn check_projector_algebra(sizes: &[usize]) -> CheckResult {
    let results = sizes
        .iter()
        .map(|&n| {
            let g = build_polygon_symmetry_group::<f64>(n).expect("n >= 3");
            let t = character_table(&g).expect("dihedral table");
            let ps = isotypic_projectors(&g, &t);
            let dim = 2 * n;
            let mut worst = 0.0f64;
            let mut sum = Mat::zeros(dim, dim);
            for (i, p) in ps.iter().enumerate() {
                worst = worst.max(max_abs_diff(&p.matmul(p), p));
                worst = worst.max(max_abs_diff(&p.transpose(), p));
                for q in &ps[i + 1..] {
                    worst = worst.max(p.matmul(q).max_abs());
                }
                sum = sum.add(p);
            }
            worst = worst.max(max_abs_diff(&sum, &Mat::identity(dim)));
            (worst, format!("n = {n}"))
        })
        .collect();
    CheckResult::new("isotypic projector algebra", 1e-11, results)
}

pub fn check_hamiltonian_symmetry(cases: &[RandomCase]) -> CheckResult {
    let results = cases
        .par_iter()
        .map(|c| {
            let d = full_linearization_spectrum(&c.config, &c.spec).map_or(f64::INFINITY, |s| s.hamiltonian_defect());
            (d, c.label.clone())
        })
        .collect();
    CheckResult::new("spectrum symmetric under s -> -s and s -> conj(s)", 1e-9, results)
}

pub fn check_block_union(cases: &[RandomCase]) -> CheckResult {
    let results = cases
        .par_iter()
        .map(|c| {
            let d = (|| {
                let lin = linearize(&c.config, &c.spec).ok()?;
                let oracle = full_linearization_spectrum(&c.config, &c.spec).ok()?;
                let cmp = compare_spectra(&lin.block_union_spectrum().ok()?, &oracle, 1e-9);
                Some(relative(&cmp))
            })()
            .unwrap_or(f64::INFINITY);
            (d, c.label.clone())
        })
        .collect();
    CheckResult::new("block union equals oracle", 1e-9, results)
}

pub fn check_structural_modes() -> CheckResult {
    let results = PRESETS
        .iter()
        .map(|p| {
            let r = AnalysisRequest::preset(p.name).resolve().expect("presets resolve");
            let s = full_linearization_spectrum(&r.config, &r.spec).expect("preset is central");
            let w = relstab_core::angular_frequency_squared(&r.config, &r.spec).expect("central").sqrt();
            let counts = [
                s.count_near(Complex::new(0.0, 0.0), 1e-8),
                s.count_near(Complex::new(0.0, w), 1e-8),
                s.count_near(Complex::new(0.0, -w), 1e-8),
            ];
            // report a missing mode as an error of 1
            let err = if counts.iter().all(|&k| k >= 2) { 0.0 } else { 1.0 };
            (err, format!("{} (multiplicities {counts:?})", p.name))
        })
        .collect();
    CheckResult::new("structural modes 0 and +-i omega have multiplicity >= 2", 1e-8, results)
}

pub fn check_radius_scaling() -> CheckResult {
    let mut jobs = Vec::new();
    for n in [3, 4, 5] {
        for alpha in [0.5, 1.0, 2.5] {
            for rho in [0.5, 3.0] {
                jobs.push((n, alpha, rho));
            }
        }
    }
    let results = jobs
        .par_iter()
        .map(|&(n, alpha, rho): &(usize, f64, f64)| {
            let spec = PotentialSpec::homogeneous(alpha).expect("valid");
            let c = regular_polygon(n, 1.0, 1.0).expect("n >= 3");
            let base = full_linearization_spectrum(&c, &spec).expect("central");
            let scaled = full_linearization_spectrum(&c.scaled(rho), &spec).expect("central");
            let f = rho.powf(-(alpha + 2.0) / 2.0);
            let cmp = compare_spectra(&scaled, &base.map(|z| z * f), 1e-8);
            let same_verdict = classify(&scaled, 1e-8).verdict == classify(&base, 1e-8).verdict;
            let err = if same_verdict { relative(&cmp) } else { f64::INFINITY };
            (err, format!("n = {n}, alpha = {alpha}, rho = {rho}"))
        })
        .collect();
    CheckResult::new("eigenvalues scale as rho^(-(alpha+2)/2)", 1e-8, results)
}

pub fn check_closed_form_blocks(samples: usize, seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let triples: Vec<(f64, f64, f64)> = (0..samples)
        .map(|_| (rng.gen_range(0.1..10.0), rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)))
        .collect();
    let results = triples
        .par_iter()
        .map(|&(w, li, lj)| {
            let b = build_block(w, li, lj);
            let closed = Spectrum::new(block_spectrum(&b).to_vec());
            let err = block_spectrum_dense(&b).map_or(f64::INFINITY, |d| {
                let cmp = compare_spectra(&closed, &Spectrum::new(d).consolidated(), 1e-10);
                relative(&cmp)
            });
            (err, format!("omega = {w:.4}, lambda = ({li:.4}, {lj:.4})"))
        })
        .collect();
    CheckResult::new("closed-form block roots vs dense eigensolver", 1e-10, results)
}

/// Runs every check. `random_cases` random central configurations are added
/// to the preset cases for the spectral checks.
pub fn run_selfcheck(random_cases: usize, seed: u64) -> SelfcheckReport {
    let cases = battery_cases(random_cases, seed);
    let sizes = [3, 4, 5, 6, 7, 8];
    let checks = vec![
        check_gradient_fd(100, seed),
        check_hessian_fd(20, seed + 1),
        check_homomorphism(&sizes),
        check_character_orthonormality(&sizes),
        check_projector_algebra(&sizes),
        check_hamiltonian_symmetry(&cases),
        check_block_union(&cases),
        check_structural_modes(),
        check_radius_scaling(),
        check_closed_form_blocks(1000, seed + 2),
    ];
    SelfcheckReport { schema: SELFCHECK_SCHEMA.into(), passed: checks.iter().all(|c| c.passed), checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_checks_pass() {
        assert!(check_homomorphism(&[3, 4, 6]).passed);
        assert!(check_character_orthonormality(&[3, 4, 6]).passed);
        assert!(check_projector_algebra(&[3, 4, 6]).passed);
    }

    #[test]
    fn failing_results_are_reported() {
        let c = CheckResult::new("x", 1e-9, vec![(1e-12, "a".into()), (1e-3, "b".into())]);
        assert!(!c.passed);
        assert_eq!(c.detail.as_deref(), Some("b"));
        assert!(c.line().starts_with("FAIL"));
        assert!(!CheckResult::new("nan", 1.0, vec![(f64::NAN, "n".into())]).passed);
        assert!(!CheckResult::new("empty", 1.0, Vec::new()).passed);
    }

    #[test]
    fn small_battery_passes() {
        let r = run_selfcheck(3, 5);
        for c in &r.checks {
            assert!(c.passed, "{}", c.line());
        }
    }
}
