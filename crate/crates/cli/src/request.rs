//! Analysis requests: what to analyse and which report sections to produce.

use crate::error::CliError;
use crate::presets::{find_preset, parse_polygon_name};
use relstab_core::{refine_central_configuration, regular_polygon, BodyConfiguration, PotentialSpec};
use serde::{Deserialize, Serialize};

pub const REQUEST_SCHEMA: &str = "relstab.request/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisRequest {
    #[serde(default = "default_request_schema")]
    pub schema: String,
    pub case: CaseSpec,
    /// Required for explicit and `polygon(n)` cases; for presets only the
    /// homogeneous ones accept an override (`{"alpha": ..}`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialRequest>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "Section::defaults")]
    pub outputs: Vec<Section>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsOptions>,
}

fn default_request_schema() -> String {
    REQUEST_SCHEMA.into()
}

/// A preset name (one of the six cases, `polygon(n)` or
/// `polygon(n, potential)`), or explicit bodies.
/// Explicit cases without positions are regular polygons of the given radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CaseSpec {
    Preset(String),
    Explicit(ExplicitCase),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitCase {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub masses: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialRequest {
    /// `"newtonian"`, `"manev"` or `"schwarzschild"`.
    Named(String),
    Homogeneous { alpha: f64 },
    Terms { terms: Vec<TermRequest> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRequest {
    pub coefficient: f64,
    pub exponent: f64,
}

impl PotentialRequest {
    pub fn to_spec(&self) -> Result<PotentialSpec<f64>, CliError> {
        let spec = match self {
            PotentialRequest::Named(name) => match name.as_str() {
                "newtonian" => PotentialSpec::homogeneous(1.0),
                "manev" => Ok(PotentialSpec::manev()),
                "schwarzschild" => Ok(PotentialSpec::schwarzschild()),
                other => return Err(CliError::Input(format!("unknown potential `{other}`"))),
            },
            PotentialRequest::Homogeneous { alpha } => PotentialSpec::homogeneous(*alpha),
            PotentialRequest::Terms { terms } => {
                PotentialSpec::from_pairs(&terms.iter().map(|t| (t.coefficient, t.exponent)).collect::<Vec<_>>())
            }
        };
        spec.map_err(|e| CliError::Input(e.to_string()))
    }

    /// Parses the command-line form: a name, a bare number (homogeneous
    /// exponent) or `c:a,c:a,...` term pairs.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let t = text.trim();
        if let Ok(alpha) = t.parse::<f64>() {
            return Ok(PotentialRequest::Homogeneous { alpha });
        }
        if t.contains(':') {
            let terms = t
                .split(',')
                .map(|pair| {
                    let (c, a) = pair
                        .split_once(':')
                        .ok_or_else(|| CliError::Input(format!("term `{pair}` is not coefficient:exponent")))?;
                    let num = |s: &str| {
                        s.trim().parse::<f64>().map_err(|_| CliError::Input(format!("`{s}` is not a number")))
                    };
                    Ok(TermRequest { coefficient: num(c)?, exponent: num(a)? })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            return Ok(PotentialRequest::Terms { terms });
        }
        Ok(PotentialRequest::Named(t.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute bound on `‖∇U + ω² M z‖`; `None` uses the core default.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centrality: Option<f64>,
    /// Relative to the spectral radius.
    pub classify: f64,
    /// Relative matching tolerance for block union against oracle.
    pub compare: f64,
    /// Relative tolerance for agreement with reference values.
    pub reference: f64,
    /// Newton-polish the configuration before analysis.
    pub refine: bool,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { centrality: None, classify: 1e-8, compare: 1e-9, reference: 1e-9, refine: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Section {
    Omega,
    Hessian,
    Decomposition,
    Blocks,
    Oracle,
    Verdict,
    Dynamics,
}

impl Section {
    pub const ALL: [Section; 7] = [
        Section::Omega,
        Section::Hessian,
        Section::Decomposition,
        Section::Blocks,
        Section::Oracle,
        Section::Verdict,
        Section::Dynamics,
    ];

    /// Everything except the (slow) dynamics section.
    pub fn defaults() -> Vec<Section> {
        Self::ALL[..6].to_vec()
    }

    pub fn parse(s: &str) -> Result<Section, CliError> {
        Self::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| CliError::Input(format!("unknown output section `{s}`")))
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Section::Omega => "omega",
            Section::Hessian => "hessian",
            Section::Decomposition => "decomposition",
            Section::Blocks => "blocks",
            Section::Oracle => "oracle",
            Section::Verdict => "verdict",
            Section::Dynamics => "dynamics",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsOptions {
    /// Length of the equilibrium-drift run, in rotation periods.
    pub periods: f64,
    pub steps_per_period: f64,
    /// Perturbation size relative to the configuration radius.
    pub epsilon: f64,
}

impl Default for DynamicsOptions {
    fn default() -> Self {
        Self { periods: 10.0, steps_per_period: relstab_core::dynamics::STEPS_PER_PERIOD, epsilon: 1e-6 }
    }
}

impl AnalysisRequest {
    pub fn preset(name: &str) -> Self {
        Self {
            schema: REQUEST_SCHEMA.into(),
            case: CaseSpec::Preset(name.into()),
            potential: None,
            tolerances: Tolerances::default(),
            outputs: Section::defaults(),
            dynamics: None,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.potential = Some(PotentialRequest::Homogeneous { alpha });
        self
    }

    pub fn wants(&self, s: Section) -> bool {
        self.outputs.contains(&s)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema != REQUEST_SCHEMA {
            return Err(CliError::Input(format!("unsupported request schema `{}`", self.schema)));
        }
        let t = &self.tolerances;
        for (name, v) in [("classify", t.classify), ("compare", t.compare), ("reference", t.reference)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Input(format!("tolerance `{name}` must be positive")));
            }
        }
        if let Some(c) = t.centrality {
            if !(c > 0.0 && c.is_finite()) {
                return Err(CliError::Input("tolerance `centrality` must be positive".into()));
            }
        }
        if let Some(d) = &self.dynamics {
            if !(d.periods > 0.0 && d.steps_per_period >= 1.0 && d.epsilon > 0.0) {
                return Err(CliError::Input("dynamics options must be positive".into()));
            }
        }
        Ok(())
    }

    /// Resolves the case to bodies, a potential, the preset name (if any)
    /// and the homogeneous exponent used to evaluate reference values.
    pub fn resolve(&self) -> Result<ResolvedCase, CliError> {
        self.validate()?;
        let explicit_spec = self.potential.as_ref().map(|p| p.to_spec()).transpose()?;
        let (name, config, spec, preset, alpha) = match &self.case {
            CaseSpec::Preset(name) => {
                if let Some((n, named)) = parse_polygon_name(name)? {
                    let spec = match (named, explicit_spec) {
                        (Some(_), Some(_)) => {
                            return Err(CliError::Input(format!("case `{name}` already names a potential")))
                        }
                        (Some(p), None) => p.to_spec()?,
                        (None, Some(s)) => s,
                        (None, None) => return Err(CliError::Input(format!("case `{name}` needs a potential"))),
                    };
                    (name.clone(), polygon(n, 1.0, None)?, spec, None, None)
                } else {
                    let preset =
                        find_preset(name).ok_or_else(|| CliError::Input(format!("unknown preset `{name}`")))?;
                    let (spec, alpha) = preset.potential(self.potential.as_ref())?;
                    (name.clone(), polygon(preset.n, 1.0, None)?, spec, Some(preset.name), alpha)
                }
            }
            CaseSpec::Explicit(c) => {
                let spec = explicit_spec.ok_or_else(|| CliError::Input("explicit case needs a potential".into()))?;
                let config = match &c.positions {
                    Some(pos) => {
                        if pos.len() != c.n {
                            return Err(CliError::Input(format!("{} positions for n = {}", pos.len(), c.n)));
                        }
                        let masses = c.masses.clone().unwrap_or_else(|| vec![1.0; c.n]);
                        BodyConfiguration::new_centered(masses, pos.clone())
                            .map_err(|e| CliError::Input(e.to_string()))?
                    }
                    None => polygon(c.n, c.radius.unwrap_or(1.0), c.masses.clone())?,
                };
                (format!("explicit-{}", c.n), config, spec, None, None)
            }
        };
        let config = if self.tolerances.refine {
            refine_central_configuration(&config, &spec, 200, self.tolerances.centrality.unwrap_or(1e-12))
                .map_err(CliError::from_core)?
        } else {
            config
        };
        Ok(ResolvedCase { name, config, spec, preset, alpha })
    }
}

fn polygon(n: usize, radius: f64, masses: Option<Vec<f64>>) -> Result<BodyConfiguration<f64>, CliError> {
    let base = regular_polygon(n, radius, 1.0).map_err(|e| CliError::Input(e.to_string()))?;
    match masses {
        None => Ok(base),
        Some(m) if m.len() == n => {
            BodyConfiguration::new_centered(m, base.positions().to_vec()).map_err(|e| CliError::Input(e.to_string()))
        }
        Some(m) => Err(CliError::Input(format!("{} masses for n = {n}", m.len()))),
    }
}

#[derive(Debug, Clone)]
pub struct ResolvedCase {
    pub name: String,
    pub config: BodyConfiguration<f64>,
    pub spec: PotentialSpec<f64>,
    pub preset: Option<&'static str>,
    /// Exponent for reference formulas (homogeneous presets only).
    pub alpha: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_json_uses_defaults() {
        let r: AnalysisRequest = serde_json::from_str(r#"{"case": "manev-triangle"}"#).unwrap();
        assert_eq!(r, AnalysisRequest::preset("manev-triangle"));
    }

    #[test]
    fn explicit_case_and_terms_parse() {
        let r: AnalysisRequest = serde_json::from_str(
            r#"{"case": {"n": 5, "radius": 2.0}, "potential": {"terms": [{"coefficient": 1, "exponent": 1}]},
                "outputs": ["omega", "verdict"]}"#,
        )
        .unwrap();
        assert!(matches!(r.case, CaseSpec::Explicit(ExplicitCase { n: 5, .. })));
        assert!(r.wants(Section::Verdict) && !r.wants(Section::Oracle));
        let c = r.resolve().unwrap();
        assert_eq!(c.config.n(), 5);
        assert!((c.config.radius() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn schema_violations_are_input_errors() {
        assert!(serde_json::from_str::<AnalysisRequest>(r#"{"case": "x", "bogus": 1}"#).is_err());
        let mut r = AnalysisRequest::preset("manev-triangle");
        r.schema = "relstab.request/0".into();
        assert!(matches!(r.resolve(), Err(CliError::Input(_))));
        assert!(matches!(AnalysisRequest::preset("hexagon").resolve(), Err(CliError::Input(_))));
        let r = AnalysisRequest::preset("manev-triangle").with_alpha(2.0);
        assert!(matches!(r.resolve(), Err(CliError::Input(_))));
    }

    #[test]
    fn command_line_potentials() {
        assert_eq!(PotentialRequest::parse("1.5").unwrap(), PotentialRequest::Homogeneous { alpha: 1.5 });
        assert_eq!(PotentialRequest::parse("manev").unwrap().to_spec().unwrap(), PotentialSpec::manev());
        let t = PotentialRequest::parse("1:1, 0.5:3").unwrap().to_spec().unwrap();
        assert_eq!(t, PotentialSpec::from_pairs(&[(1.0, 1.0), (0.5, 3.0)]).unwrap());
        assert!(PotentialRequest::parse("1:x").is_err());
        assert!(PotentialRequest::parse("yukawa").unwrap().to_spec().is_err());
    }
}
