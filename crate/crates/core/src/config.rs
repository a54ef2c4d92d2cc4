//! TOML run configuration with [circuit], [offsets] and [numerics] sections.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Numerics;
use crate::params::{CircuitForm, CircuitSpec, Offsets};

/// Either circuit form; the populated keys decide which.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CircuitSection {
    #[serde(rename = "E_C", alias = "e_c")]
    pub e_c: Option<f64>,
    #[serde(rename = "E_C_int", alias = "e_c_int")]
    pub e_c_int: Option<f64>,
    pub k: Option<f64>,
    pub lambda: Option<f64>,
    #[serde(rename = "E_J_Sigma", alias = "e_j_sigma")]
    pub e_j_sigma: Option<f64>,
    #[serde(rename = "C", alias = "c")]
    pub c: Option<f64>,
    #[serde(rename = "C_J1", alias = "c_j1")]
    pub c_j1: Option<f64>,
    #[serde(rename = "C_J2", alias = "c_j2")]
    pub c_j2: Option<f64>,
    #[serde(rename = "E_J1", alias = "e_j1")]
    pub e_j1: Option<f64>,
    #[serde(rename = "E_J2", alias = "e_j2")]
    pub e_j2: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OffsetSection {
    pub n_g1: Option<f64>,
    pub n_g2: Option<f64>,
    pub n_g: Option<f64>,
    #[serde(rename = "N_g", alias = "n_big_g")]
    pub n_big_g: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub circuit: Option<CircuitSection>,
    pub offsets: OffsetSection,
    pub numerics: Numerics,
}

fn missing(form: &str, names: &[(&str, Option<f64>)]) -> Option<String> {
    let absent: Vec<&str> = names
        .iter()
        .filter(|(_, v)| v.is_none())
        .map(|(n, _)| *n)
        .collect();
    (!absent.is_empty()).then(|| format!("{form} form is missing {}", absent.join(", ")))
}

impl CircuitSection {
    pub fn form(&self) -> Result<CircuitForm> {
        let energy = [
            ("E_C", self.e_c),
            ("E_C_int", self.e_c_int),
            ("k", self.k),
            ("lambda", self.lambda),
            ("E_J_Sigma", self.e_j_sigma),
        ];
        let capacitance = [
            ("C", self.c),
            ("C_J1", self.c_j1),
            ("C_J2", self.c_j2),
            ("E_J1", self.e_j1),
            ("E_J2", self.e_j2),
        ];
        let any = |set: &[(&str, Option<f64>)]| set.iter().any(|(_, v)| v.is_some());
        match (any(&energy), any(&capacitance)) {
            (true, true) => Err(Error::Validation(
                "[circuit] mixes energy-form and capacitance-form keys".into(),
            )),
            (false, false) => Err(Error::Validation("[circuit] is empty".into())),
            (true, false) => {
                // E_C_int may be left out for the classical model; k defaults to 0
                let required = [
                    ("E_C", self.e_c),
                    ("lambda", self.lambda),
                    ("E_J_Sigma", self.e_j_sigma),
                ];
                if let Some(m) = missing("energy", &required) {
                    return Err(Error::Validation(m));
                }
                Ok(CircuitForm::Energy {
                    e_c: self.e_c.unwrap_or_default(),
                    e_c_int: self.e_c_int,
                    k: self.k.unwrap_or(0.0),
                    lambda: self.lambda.unwrap_or_default(),
                    e_j_sigma: self.e_j_sigma.unwrap_or_default(),
                })
            }
            (false, true) => {
                if let Some(m) = missing("capacitance", &capacitance) {
                    return Err(Error::Validation(m));
                }
                Ok(CircuitForm::Capacitance {
                    c: self.c.unwrap_or_default(),
                    c_j1: self.c_j1.unwrap_or_default(),
                    c_j2: self.c_j2.unwrap_or_default(),
                    e_j1: self.e_j1.unwrap_or_default(),
                    e_j2: self.e_j2.unwrap_or_default(),
                })
            }
        }
    }
}

impl OffsetSection {
    pub fn offsets(&self) -> Result<Offsets> {
        let junction = self.n_g1.is_some() || self.n_g2.is_some();
        let mode = self.n_g.is_some() || self.n_big_g.is_some();
        match (junction, mode) {
            (true, true) => Err(Error::Validation(
                "[offsets] mixes junction (n_g1, n_g2) and mode (n_g, N_g) offsets".into(),
            )),
            (false, true) => Ok(Offsets::Mode {
                n_g: self.n_g.unwrap_or(0.0),
                n_big_g: self.n_big_g.unwrap_or(0.0),
            }),
            _ => Ok(Offsets::Junction {
                n_g1: self.n_g1.unwrap_or(0.0),
                n_g2: self.n_g2.unwrap_or(0.0),
            }),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text)
            .map_err(|e| Error::Validation(format!("config: {}", e.message())))?;
        config.numerics.validate()?;
        config.offsets.offsets()?;
        if let Some(c) = &config.circuit {
            c.form()?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Validation(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_toml_str(&text)
    }

    /// The circuit, or a validation error when the config has no [circuit] section.
    pub fn circuit_spec(&self) -> Result<CircuitSpec> {
        let circuit = self
            .circuit
            .as_ref()
            .ok_or_else(|| Error::Validation("config has no [circuit] section".into()))?;
        Ok(CircuitSpec::new(circuit.form()?, self.offsets.offsets()?))
    }
}
