//! Published reference values for the preset cases (`data/reference.json`).

use crate::expr::{evaluate, evaluate_real, Env, ExprError};
use num_complex::Complex64;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::sync::OnceLock;

const DATA: &str = include_str!("../data/reference.json");

#[derive(Debug, Clone, Deserialize)]
pub struct ReferenceFile {
    pub schema: String,
    pub note: String,
    pub presets: BTreeMap<String, PresetReference>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct PresetReference {
    /// Named intermediate expressions, evaluated in order.
    pub definitions: Vec<(String, String)>,
    pub omega_squared: ScalarEntry,
    pub hessian_entries: Vec<HessianEntry>,
    pub hessian_eigenvalues: EigenvalueList,
    pub block_spectrum: SpectrumList,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ScalarEntry {
    pub expr: String,
    pub source: String,
    #[serde(default)]
    pub flag: Option<String>,
}

/// One-based indices, as printed.
#[derive(Debug, Clone, Deserialize)]
pub struct HessianEntry {
    pub row: usize,
    pub col: usize,
    pub expr: String,
    pub source: String,
    #[serde(default)]
    pub flag: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct EigenvalueList {
    pub values: Vec<Eigenvalue>,
    pub source: String,
    #[serde(default)]
    pub flag: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Eigenvalue {
    pub expr: String,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Deserialize)]
pub struct SpectrumList {
    pub values: Vec<String>,
    pub source: String,
    #[serde(default)]
    pub flag: Option<String>,
}

pub fn reference_data() -> &'static ReferenceFile {
    static DATA_FILE: OnceLock<ReferenceFile> = OnceLock::new();
    DATA_FILE.get_or_init(|| serde_json::from_str(DATA).expect("bundled reference data is valid JSON"))
}

pub fn preset_reference(name: &str) -> Option<&'static PresetReference> {
    reference_data().presets.get(name)
}

/// A reference entry evaluated at a concrete `α`.
#[derive(Debug, Clone)]
pub struct Evaluated<V> {
    pub value: V,
    pub expr: String,
    pub source: String,
    pub flag: Option<String>,
}

#[derive(Debug, Clone)]
pub struct EvaluatedPreset {
    pub omega_squared: Evaluated<f64>,
    /// Zero-based `(row, col)` with the value.
    pub hessian_entries: Vec<Evaluated<(usize, usize, f64)>>,
    /// Expanded by multiplicity.
    pub hessian_eigenvalues: Evaluated<Vec<f64>>,
    pub block_spectrum: Evaluated<Vec<Complex64>>,
}

impl PresetReference {
    pub fn evaluate(&self, alpha: f64) -> Result<EvaluatedPreset, ExprError> {
        let mut env = Env::new();
        env.insert("alpha".into(), Complex64::new(alpha, 0.0));
        for (name, expr) in &self.definitions {
            let v = evaluate(expr, &env)?;
            env.insert(name.clone(), v);
        }
        let omega_squared = Evaluated {
            value: evaluate_real(&self.omega_squared.expr, &env)?,
            expr: self.omega_squared.expr.clone(),
            source: self.omega_squared.source.clone(),
            flag: self.omega_squared.flag.clone(),
        };
        let hessian_entries = self
            .hessian_entries
            .iter()
            .map(|e| {
                Ok(Evaluated {
                    value: (e.row - 1, e.col - 1, evaluate_real(&e.expr, &env)?),
                    expr: e.expr.clone(),
                    source: e.source.clone(),
                    flag: e.flag.clone(),
                })
            })
            .collect::<Result<Vec<_>, ExprError>>()?;
        let mut eig = Vec::new();
        for v in &self.hessian_eigenvalues.values {
            let x = evaluate_real(&v.expr, &env)?;
            eig.extend(std::iter::repeat(x).take(v.multiplicity));
        }
        let hessian_eigenvalues = Evaluated {
            value: eig,
            expr: self
                .hessian_eigenvalues
                .values
                .iter()
                .map(|v| if v.multiplicity == 1 { v.expr.clone() } else { format!("{} (x{})", v.expr, v.multiplicity) })
                .collect::<Vec<_>>()
                .join("; "),
            source: self.hessian_eigenvalues.source.clone(),
            flag: self.hessian_eigenvalues.flag.clone(),
        };
        let spectrum =
            self.block_spectrum.values.iter().map(|s| evaluate(s, &env)).collect::<Result<Vec<_>, ExprError>>()?;
        let block_spectrum = Evaluated {
            value: spectrum,
            expr: self.block_spectrum.values.join("; "),
            source: self.block_spectrum.source.clone(),
            flag: self.block_spectrum.flag.clone(),
        };
        Ok(EvaluatedPreset { omega_squared, hessian_entries, hessian_eigenvalues, block_spectrum })
    }
}
