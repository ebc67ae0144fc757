//! Bit-exact golden reports for the six presets, plus round-trip and
//! determinism. Set `RELSTAB_UPDATE_GOLDEN=1` to rewrite the files.

use relstab_cli::presets::PRESETS;
use relstab_cli::request::{AnalysisRequest, Section};
use relstab_cli::{run_analysis, StabilityReport};
use std::path::PathBuf;

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.json"))
}

#[test]
fn preset_reports_match_golden_files() {
    let update = std::env::var("RELSTAB_UPDATE_GOLDEN").is_ok_and(|v| v == "1");
    let mut mismatched = Vec::new();
    for p in PRESETS.iter() {
        let text = run_analysis(&AnalysisRequest::preset(p.name)).unwrap().to_json();
        let path = golden_path(p.name);
        if update {
            std::fs::write(&path, &text).unwrap();
            continue;
        }
        let expected = std::fs::read_to_string(&path)
            .unwrap_or_else(|e| panic!("{}: {e}; run with RELSTAB_UPDATE_GOLDEN=1", path.display()));
        if expected != text {
            mismatched.push(p.name);
        }
    }
    assert!(mismatched.is_empty(), "reports differ from golden files: {mismatched:?}");
}

#[test]
fn golden_files_parse_back_to_identical_reports() {
    for p in PRESETS.iter() {
        let Ok(text) = std::fs::read_to_string(golden_path(p.name)) else { continue };
        let report = StabilityReport::from_json(&text).unwrap();
        assert_eq!(report.to_json(), text, "{}", p.name);
    }
}

#[test]
fn reports_round_trip_bit_for_bit() {
    let mut req = AnalysisRequest::preset("schwarzschild-square");
    req.outputs = Section::ALL.to_vec();
    req.dynamics = Some(Default::default());
    let report = run_analysis(&req).unwrap();
    let back = StabilityReport::from_json(&report.to_json()).unwrap();
    assert_eq!(back, report);
    // compare bit patterns too: PartialEq on f64 would accept 0.0 == -0.0
    let bits = |r: &StabilityReport| {
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        v.to_string()
    };
    assert_eq!(bits(&back), bits(&report));
    assert_eq!(report.dynamics.as_ref().map(|d| d.steps), back.dynamics.as_ref().map(|d| d.steps));
}

#[test]
fn identical_requests_give_identical_reports() {
    for p in PRESETS.iter() {
        let req = AnalysisRequest::preset(p.name);
        assert_eq!(run_analysis(&req).unwrap().to_json(), run_analysis(&req).unwrap().to_json(), "{}", p.name);
    }
}

#[test]
fn preset_reports_carry_reference_values() {
    for p in PRESETS.iter() {
        let r = run_analysis(&AnalysisRequest::preset(p.name)).unwrap();
        let w = r.omega.as_ref().unwrap().reference.as_ref().expect("omega^2 reference");
        assert!(!w.source.is_empty());
        let h = r.hessian.as_ref().unwrap();
        assert!(h.entries.iter().all(|e| !e.reference.source.is_empty()));
        for d in &r.discrepancies {
            assert!(!d.source.is_empty(), "{}: {}", p.name, d.quantity);
        }
    }
}
