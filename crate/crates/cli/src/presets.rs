//! The six named cases, plus `polygon(n)` for any other regular polygon.

use crate::error::CliError;
use crate::request::PotentialRequest;
use relstab_core::PotentialSpec;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetPotential {
    /// `1/r^α`, α chosen per request (default 1).
    Homogeneous,
    Manev,
    Schwarzschild,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Preset {
    pub name: &'static str,
    pub n: usize,
    pub potential: PresetPotential,
}

pub const PRESETS: [Preset; 6] = [
    Preset { name: "triangle-homogeneous", n: 3, potential: PresetPotential::Homogeneous },
    Preset { name: "square-homogeneous", n: 4, potential: PresetPotential::Homogeneous },
    Preset { name: "manev-triangle", n: 3, potential: PresetPotential::Manev },
    Preset { name: "schwarzschild-triangle", n: 3, potential: PresetPotential::Schwarzschild },
    Preset { name: "manev-square", n: 4, potential: PresetPotential::Manev },
    Preset { name: "schwarzschild-square", n: 4, potential: PresetPotential::Schwarzschild },
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|p| p.name)
}

pub fn find_preset(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

/// `polygon(n)` or `polygon(n, potential)`, where the potential uses the
/// command-line syntax (`1.5`, `manev`, `1:1,1:3`). `None` for other names.
pub fn parse_polygon_name(name: &str) -> Result<Option<(usize, Option<PotentialRequest>)>, CliError> {
    let Some(inner) = name.strip_prefix("polygon(").and_then(|s| s.strip_suffix(')')) else {
        return Ok(None);
    };
    let (count, potential) = match inner.split_once(',') {
        Some((c, p)) => (c, Some(PotentialRequest::parse(p)?)),
        None => (inner, None),
    };
    match count.trim().parse::<usize>() {
        Ok(n) if n >= 2 => Ok(Some((n, potential))),
        _ => Err(CliError::Input(format!("`{name}`: expected polygon(n) with n >= 2"))),
    }
}

impl Preset {
    /// The potential for this preset and the exponent used to evaluate
    /// reference formulas. Only homogeneous presets take an override.
    pub fn potential(&self, request: Option<&PotentialRequest>) -> Result<(PotentialSpec<f64>, Option<f64>), CliError> {
        match (self.potential, request) {
            (PresetPotential::Homogeneous, None) => Ok((PotentialSpec::homogeneous(1.0).expect("valid"), Some(1.0))),
            (PresetPotential::Homogeneous, Some(req)) => {
                let spec = req.to_spec()?;
                let alpha = spec.homogeneity().ok_or_else(|| {
                    CliError::Input(format!("preset `{}` needs a single-term potential", self.name))
                })?;
                if spec.terms()[0].coefficient != 1.0 {
                    return Err(CliError::Input(format!("preset `{}` has unit coefficient", self.name)));
                }
                Ok((spec, Some(alpha)))
            }
            (fixed, req) => {
                let spec = match fixed {
                    PresetPotential::Manev => PotentialSpec::manev(),
                    _ => PotentialSpec::schwarzschild(),
                };
                if let Some(req) = req {
                    if req.to_spec()? != spec {
                        return Err(CliError::Input(format!("preset `{}` fixes its potential", self.name)));
                    }
                }
                Ok((spec, Some(1.0)))
            }
        }
    }

    pub fn description(&self) -> String {
        let shape = if self.n == 3 { "equilateral triangle" } else { "square" };
        let pot = match self.potential {
            PresetPotential::Homogeneous => "1/r^alpha (alpha selectable, default 1)",
            PresetPotential::Manev => "Manev 1/r + 1/r^2",
            PresetPotential::Schwarzschild => "Schwarzschild 1/r + 1/r^3",
        };
        format!("{shape}, unit masses, circumradius 1, {pot}")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PresetListing {
    pub name: &'static str,
    pub n: usize,
    pub description: String,
    pub reference_omega_squared: String,
    /// Set when the published value is known to be wrong.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_flag: Option<String>,
}

pub fn listing() -> Vec<PresetListing> {
    PRESETS
        .iter()
        .map(|p| PresetListing {
            name: p.name,
            n: p.n,
            description: p.description(),
            reference_omega_squared: crate::reference::preset_reference(p.name)
                .map(|r| r.omega_squared.expr.clone())
                .unwrap_or_default(),
            reference_flag: crate::reference::preset_reference(p.name).and_then(|r| r.omega_squared.flag.clone()),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_has_reference_data() {
        for p in PRESETS {
            assert!(crate::reference::preset_reference(p.name).is_some(), "{}", p.name);
        }
        assert_eq!(listing().len(), 6);
    }

    #[test]
    fn polygon_names() {
        assert_eq!(parse_polygon_name("polygon(5)").unwrap(), Some((5, None)));
        assert_eq!(
            parse_polygon_name("polygon(4, 2.5)").unwrap(),
            Some((4, Some(PotentialRequest::Homogeneous { alpha: 2.5 })))
        );
        let (_, p) = parse_polygon_name("polygon(3, 1:1,1:3)").unwrap().unwrap();
        assert_eq!(p.unwrap().to_spec().unwrap(), PotentialSpec::schwarzschild());
        assert_eq!(parse_polygon_name("manev-square").unwrap(), None);
        assert!(parse_polygon_name("polygon(x)").is_err());
        assert!(parse_polygon_name("polygon(1)").is_err());
    }

    #[test]
    fn homogeneous_override() {
        let p = find_preset("triangle-homogeneous").unwrap();
        let (spec, alpha) = p.potential(Some(&PotentialRequest::Homogeneous { alpha: 2.5 })).unwrap();
        assert_eq!(alpha, Some(2.5));
        assert_eq!(spec.homogeneity(), Some(2.5));
        assert!(p.potential(Some(&PotentialRequest::Named("manev".into()))).is_err());
        let m = find_preset("manev-square").unwrap();
        assert!(m.potential(Some(&PotentialRequest::Named("manev".into()))).is_ok());
    }
}
