//! Acceptance gate: one PASS/FAIL line per criterion, details indented below.
//!
//! Failing criteria are reported but only fail the process when
//! `RELSTAB_ACCEPTANCE_STRICT=1`, so that a known failure does not stop
//! `cargo test` from running the remaining suites.

use relstab_cli::presets::PRESETS;
use relstab_cli::reference::preset_reference;
use relstab_cli::request::{AnalysisRequest, DynamicsOptions, Section};
use relstab_cli::sampling::random_central_configurations;
use relstab_cli::{run_analysis, run_selfcheck, run_sweep};
use relstab_core::linalg::symmetric_eigen;
use relstab_core::symmetry::{eigenvalues_by_trace_equations, expand_component_eigenvalues};
use relstab_core::{
    angular_frequency_squared, character_table, classify, compare_spectra, full_linearization_spectrum, linearize,
    potential_gradient, potential_hessian, BodyConfiguration, PotentialSpec,
};

const SEED: u64 = 20240917;
const ALPHAS: [f64; 5] = [0.5, 1.0, 1.5, 2.0, 3.0];

struct Outcome {
    passed: bool,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { passed: true, details: Vec::new() }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        self.details.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }
}

fn case(name: &str, alpha: Option<f64>) -> (BodyConfiguration<f64>, PotentialSpec<f64>) {
    let mut req = AnalysisRequest::preset(name);
    if let Some(a) = alpha {
        req = req.with_alpha(a);
    }
    let r = req.resolve().expect("preset resolves");
    (r.config, r.spec)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Sorted-multiset distance relative to the larger magnitude.
fn multiset_rel(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let scale = a.iter().chain(&b).fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

fn omega_squared() -> Outcome {
    let mut o = Outcome::new();
    let s3 = 3f64.sqrt();
    let s2 = 2f64.sqrt();
    for a in ALPHAS {
        let (c, s) = case("triangle-homogeneous", Some(a));
        let w2 = angular_frequency_squared(&c, &s).unwrap();
        let want = 3f64.powf(-a / 2.0) * a;
        o.check(rel(w2, want) <= 1e-12, format!("triangle alpha = {a}: {w2:.16} vs {want:.16} (rel {:.1e})", rel(w2, want)));
        let (c, s) = case("square-homogeneous", Some(a));
        let w2 = angular_frequency_squared(&c, &s).unwrap();
        let want = (2f64.powf(-1.0 - a) + 2f64.powf(-a / 2.0)) * a;
        o.check(rel(w2, want) <= 1e-12, format!("square alpha = {a}: {w2:.16} vs {want:.16} (rel {:.1e})", rel(w2, want)));
    }
    for (name, want) in [
        ("manev-triangle", 2.0 / 3.0 + 1.0 / s3),
        ("schwarzschild-triangle", 2.0 / s3),
        ("schwarzschild-square", 7.0 / 16.0 + 5.0 / (2.0 * s2)),
    ] {
        let (c, s) = case(name, None);
        let w2 = angular_frequency_squared(&c, &s).unwrap();
        o.check(rel(w2, want) <= 1e-12, format!("{name}: {w2:.16} vs {want:.16} (rel {:.1e})", rel(w2, want)));
    }
    // the published value is flagged; the target is the equilibrium condition
    let (c, s) = case("manev-square", None);
    let w2 = angular_frequency_squared(&c, &s).unwrap();
    let g = potential_gradient(&c, &s).unwrap();
    let residual = c
        .positions()
        .iter()
        .zip(c.masses())
        .enumerate()
        .flat_map(|(i, (p, m))| [g[2 * i] + w2 * m * p[0], g[2 * i + 1] + w2 * m * p[1]])
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    o.check(residual <= 1e-12, format!("manev-square: |grad(U + omega^2 I)| = {residual:.1e} at omega^2 = {w2:.16}"));
    o
}

fn hessian_entries() -> Outcome {
    let mut o = Outcome::new();
    let s3 = 3f64.sqrt();
    let s2 = 2f64.sqrt();
    for a in ALPHAS {
        let (c, s) = case("triangle-homogeneous", Some(a));
        let h = potential_hessian(&c, &s).unwrap()[(0, 0)];
        let want = 3f64.powf(-a / 2.0) * a * (3.0 + 2.0 * a) / 6.0;
        o.check((h - want).abs() <= 1e-12, format!("H1(1,1) alpha = {a}: {h:.15} vs published {want:.15}"));
    }
    let entries = [
        ("manev-triangle", "H3(1,1)", (0, 0), (16.0 + 5.0 * s3) / 9.0),
        ("schwarzschild-triangle", "H4(2,2)", (1, 1), 0.0),
        ("schwarzschild-square", "H6(1,1)", (0, 0), (5.0 + 11.0 * s2) / 8.0),
    ];
    for (name, label, idx, want) in entries {
        let (c, s) = case(name, None);
        let h = potential_hessian(&c, &s).unwrap()[idx];
        o.check((h - want).abs() <= 1e-12, format!("{label} {name}: {h:.15} vs published {want:.15}"));
    }
    o
}

fn trace_equation_eigenvalues() -> Outcome {
    let mut o = Outcome::new();
    let mut cases: Vec<(&str, Option<f64>)> = Vec::new();
    for a in ALPHAS {
        cases.push(("triangle-homogeneous", Some(a)));
        cases.push(("square-homogeneous", Some(a)));
    }
    cases.push(("manev-triangle", None));
    cases.push(("schwarzschild-triangle", None));
    for (name, alpha) in cases {
        let (c, s) = case(name, alpha);
        let h = potential_hessian(&c, &s).unwrap();
        let lin = linearize(&c, &s).unwrap();
        let table = character_table(&lin.group).unwrap();
        let comps = eigenvalues_by_trace_equations(&h, &lin.group, &table).unwrap();
        let trace = expand_component_eigenvalues(&comps);
        let direct = symmetric_eigen(&h).values;
        let d = multiset_rel(&trace, &direct);
        let tag = match alpha {
            Some(a) => format!("{name} alpha = {a}"),
            None => name.to_string(),
        };
        o.check(d <= 1e-9, format!("{tag}: trace equations vs direct diagonalization {d:.1e}"));

        let published = preset_reference(name).unwrap().evaluate(alpha.unwrap_or(1.0)).unwrap().hessian_eigenvalues;
        let pd = multiset_rel(&published.value, &direct);
        if pd > 1e-9 {
            let mut req = AnalysisRequest::preset(name);
            if let Some(a) = alpha {
                req = req.with_alpha(a);
            }
            let report = run_analysis(&req).unwrap();
            let flagged = report.discrepancies.iter().any(|x| x.quantity == "hessian_eigenvalues");
            o.check(flagged, format!("{tag}: published list differs by {pd:.1e}; discrepancy reported: {flagged}"));
        }
    }
    o
}

fn block_oracle() -> Outcome {
    let mut o = Outcome::new();
    let mut cases: Vec<(String, BodyConfiguration<f64>, PotentialSpec<f64>)> =
        PRESETS.iter().map(|p| {
            let (c, s) = case(p.name, None);
            (p.name.to_string(), c, s)
        }).collect();
    let random = random_central_configurations(25, SEED);
    o.check(random.len() == 25, format!("{} random refined central configurations", random.len()));
    cases.extend(random.into_iter().map(|r| (r.label, r.config, r.spec)));
    for (label, c, s) in cases {
        let lin = linearize(&c, &s).unwrap();
        let union = lin.block_union_spectrum().unwrap();
        let oracle = full_linearization_spectrum(&c, &s).unwrap();
        let cmp = compare_spectra(&union, &oracle, 1e-9);
        o.check(cmp.passed, format!("{label}: max distance {:.1e} (scale {:.3})", cmp.max_distance, cmp.scale));
    }
    o
}

fn routh_coefficients() -> Outcome {
    let mut o = Outcome::new();
    let (c, s) = case("triangle-homogeneous", Some(1.0));
    let lin = linearize(&c, &s).unwrap();
    let w2 = lin.omega_squared;
    // the essential component is the pair block carrying the instability
    let block = lin.blocks.iter().find(|b| {
        relstab_core::block_spectrum(b).iter().any(|z| z.re > 1e-8)
    });
    match block {
        Some(b) => {
            let (bc, cc) = b.characteristic_coefficients();
            let want_c = 27.0 / 12.0 * w2 * w2;
            o.check(rel(bc, w2) <= 1e-10, format!("s^2 coefficient {bc:.15} vs omega^2 = {w2:.15}"));
            o.check(rel(cc, want_c) <= 1e-10, format!("constant {cc:.15} vs 27/12 omega^4 = {want_c:.15}"));
        }
        None => o.check(false, "no unstable pair block".into()),
    }
    o
}

fn trichotomy() -> Outcome {
    let mut o = Outcome::new();
    let s = run_sweep(&AnalysisRequest::preset("triangle-homogeneous"), "alpha", &[1.9, 2.0, 2.1]).unwrap();
    for (row, want) in s.summary.iter().zip(["pure-imaginary", "zero", "real"]) {
        o.check(row.component_label == want, format!("alpha = {}: {} (expected {want})", row.value, row.component_label));
    }
    o.check(s.summary.len() == 3, format!("{} sweep points", s.summary.len()));
    o
}

fn verdicts() -> Outcome {
    let mut o = Outcome::new();
    for p in PRESETS.iter() {
        let (c, s) = case(p.name, None);
        let oracle = full_linearization_spectrum(&c, &s).unwrap();
        let v = classify(&oracle, 1e-8);
        let w = angular_frequency_squared(&c, &s).unwrap().sqrt();
        let ok = v.is_unstable() && v.max_real_part > 1e-6 * w;
        o.check(ok, format!("{}: {} with max Re = {:.10} ({:.4} omega)", p.name, v.verdict.as_str(), v.max_real_part, v.max_real_part / w));
    }
    o
}

fn property_suites() -> Outcome {
    let mut o = Outcome::new();
    let r = run_selfcheck(25, SEED);
    for c in &r.checks {
        o.check(c.passed, c.line());
    }
    o
}

fn dynamics() -> Outcome {
    let mut o = Outcome::new();
    for p in PRESETS.iter() {
        let mut req = AnalysisRequest::preset(p.name);
        req.outputs = vec![Section::Omega, Section::Verdict, Section::Dynamics];
        req.dynamics = Some(DynamicsOptions::default());
        let r = run_analysis(&req).unwrap();
        let d = r.dynamics.as_ref().unwrap();
        o.check(
            d.equilibrium_drift < 1e-8,
            format!("{}: drift {:.1e} over {} periods (energy drift {:.1e})", p.name, d.equilibrium_drift, d.periods, d.energy_drift),
        );
        if let Some(g) = &d.growth {
            if g.checked {
                o.check(
                    g.agrees,
                    format!("{}: growth {:.6} vs max Re {:.6} (relative error {:.2e})", p.name, g.measured, g.predicted, g.relative_error),
                );
            } else {
                o.details.push(format!("skip {}: max Re below 0.05 omega", p.name));
            }
        }
    }
    o
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 omega^2 reproduction (rel 1e-12)", omega_squared),
        ("2 Hessian golden entries (abs 1e-12)", hessian_entries),
        ("3 trace-equation eigenvalues vs diagonalization (rel 1e-9)", trace_equation_eigenvalues),
        ("4 block union vs oracle, presets + 25 random (1e-9)", block_oracle),
        ("5 Routh coefficients at alpha = 1 (rel 1e-10)", routh_coefficients),
        ("6 alpha trichotomy at 1.9 / 2.0 / 2.1", trichotomy),
        ("7 all presets spectrally unstable, max Re > 1e-6 omega", verdicts),
        ("8 property suites", property_suites),
        ("9 dynamics: growth within 10%, drift < 1e-8", dynamics),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let out = run();
        println!("{} criterion {name}", if out.passed { "PASS" } else { "FAIL" });
        for d in &out.details {
            println!("    {d}");
        }
        failed += usize::from(!out.passed);
    }
    println!("{} of 9 criteria passed", 9 - failed);
    let strict = std::env::var("RELSTAB_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if failed > 0 && strict {
        std::process::exit(1);
    }
}
