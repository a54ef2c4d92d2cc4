//! Circuit parameters and the conversions between capacitance and energy form.
//!
//! Energies are E/h in GHz, capacitances in fF, charges in Cooper pairs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
const PLANCK: f64 = 6.626_070_15e-34;

/// e²/h expressed in GHz·fF, so that `E2_OVER_H / (2 C)` is a charging energy in GHz.
pub const E2_OVER_H: f64 = ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / PLANCK * 1e6;

/// Charging energy e²/2C in GHz for a capacitance in fF.
pub fn charging_energy(capacitance_ff: f64) -> f64 {
    E2_OVER_H / (2.0 * capacitance_ff)
}

/// Capacitance in fF whose charging energy e²/2C equals `energy_ghz`.
pub fn capacitance_for(energy_ghz: f64) -> f64 {
    E2_OVER_H / (2.0 * energy_ghz)
}

/// Junction asymmetry 4 E_J1 E_J2 / (E_J1 + E_J2)².
pub fn junction_asymmetry(e_j1: f64, e_j2: f64) -> f64 {
    let sum = e_j1 + e_j2;
    if sum == 0.0 {
        return 0.0;
    }
    4.0 * e_j1 * e_j2 / (sum * sum)
}

/// Splits a total Josephson energy into (E_J1, E_J2) with E_J1 ≤ E_J2.
pub fn split_josephson(e_j_sigma: f64, lambda: f64) -> (f64, f64) {
    let root = (1.0 - lambda).max(0.0).sqrt();
    (
        0.5 * e_j_sigma * (1.0 - root),
        0.5 * e_j_sigma * (1.0 + root),
    )
}

/// Maps junction offset charges (n_g1, n_g2) to qubit/internal offsets (n_g, N_g).
pub fn transform_offsets(n_g1: f64, n_g2: f64, k: f64) -> (f64, f64) {
    (0.5 * (1.0 - k) * n_g1 + 0.5 * (1.0 + k) * n_g2, n_g1 - n_g2)
}

/// Inverse of [`transform_offsets`].
pub fn junction_offsets(n_g: f64, n_big_g: f64, k: f64) -> (f64, f64) {
    (
        n_g + 0.5 * (1.0 + k) * n_big_g,
        n_g - 0.5 * (1.0 - k) * n_big_g,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum CircuitForm {
    Capacitance {
        c: f64,
        c_j1: f64,
        c_j2: f64,
        e_j1: f64,
        e_j2: f64,
    },
    Energy {
        e_c: f64,
        /// Not needed by the classical single-mode model.
        e_c_int: Option<f64>,
        k: f64,
        lambda: f64,
        e_j_sigma: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum Offsets {
    Junction { n_g1: f64, n_g2: f64 },
    Mode { n_g: f64, n_big_g: f64 },
}

impl Default for Offsets {
    fn default() -> Self {
        Offsets::Junction {
            n_g1: 0.0,
            n_g2: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub circuit: CircuitForm,
    pub offsets: Offsets,
}

/// Parameters of the qubit mode alone; enough for the classical model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitParams {
    pub e_c: f64,
    pub lambda: f64,
    pub e_j_sigma: f64,
    pub n_g: f64,
}

/// Every energy scale, asymmetry and offset of the circuit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub e_c1: f64,
    pub e_c2: f64,
    pub g: f64,
    pub e_c: f64,
    pub e_c_int: f64,
    pub e_j1: f64,
    pub e_j2: f64,
    pub e_j_sigma: f64,
    pub e_j_delta: f64,
    pub lambda: f64,
    pub k: f64,
    pub c: f64,
    pub c_j1: f64,
    pub c_j2: f64,
    pub n_g1: f64,
    pub n_g2: f64,
    pub n_g: f64,
    pub n_big_g: f64,
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Validation(format!("{name} must be finite, got {v}")))
    }
}

impl CircuitSpec {
    pub fn new(circuit: CircuitForm, offsets: Offsets) -> Self {
        CircuitSpec { circuit, offsets }
    }

    pub fn derive(&self) -> Result<DerivedParams> {
        match self.circuit {
            CircuitForm::Capacitance { .. } => derive_from_capacitances(self),
            CircuitForm::Energy { .. } => derive_from_energies(self),
        }
    }

    /// Qubit-mode parameters without requiring the internal charging energy.
    pub fn qubit_params(&self) -> Result<QubitParams> {
        match self.circuit {
            CircuitForm::Energy {
                e_c,
                e_c_int: None,
                k,
                lambda,
                e_j_sigma,
            } => {
                for (name, v) in [
                    ("E_C", e_c),
                    ("k", k),
                    ("lambda", lambda),
                    ("E_J_Sigma", e_j_sigma),
                ] {
                    check_finite(name, v)?;
                }
                if e_c <= 0.0 {
                    return Err(Error::Domain(format!("E_C must be positive, got {e_c}")));
                }
                if !(0.0..=1.0).contains(&lambda) {
                    return Err(Error::Domain(format!(
                        "lambda must lie in [0, 1], got {lambda}"
                    )));
                }
                if e_j_sigma < 0.0 {
                    return Err(Error::Domain(format!(
                        "E_J_Sigma must be nonnegative, got {e_j_sigma}"
                    )));
                }
                let n_g = match self.offsets {
                    Offsets::Junction { n_g1, n_g2 } => transform_offsets(n_g1, n_g2, k).0,
                    Offsets::Mode { n_g, .. } => n_g,
                };
                Ok(QubitParams {
                    e_c,
                    lambda,
                    e_j_sigma,
                    n_g,
                })
            }
            _ => Ok(self.derive()?.qubit()),
        }
    }
}

impl DerivedParams {
    pub fn qubit(&self) -> QubitParams {
        QubitParams {
            e_c: self.e_c,
            lambda: self.lambda,
            e_j_sigma: self.e_j_sigma,
            n_g: self.n_g,
        }
    }

    /// Same circuit with new qubit/internal offsets.
    pub fn with_mode_offsets(mut self, n_g: f64, n_big_g: f64) -> Self {
        let (n_g1, n_g2) = junction_offsets(n_g, n_big_g, self.k);
        self.n_g = n_g;
        self.n_big_g = n_big_g;
        self.n_g1 = n_g1;
        self.n_g2 = n_g2;
        self
    }

    /// Same circuit with new junction offsets.
    pub fn with_junction_offsets(mut self, n_g1: f64, n_g2: f64) -> Self {
        let (n_g, n_big_g) = transform_offsets(n_g1, n_g2, self.k);
        self.n_g = n_g;
        self.n_big_g = n_big_g;
        self.n_g1 = n_g1;
        self.n_g2 = n_g2;
        self
    }

    /// E_J_Sigma / E_C_int.
    pub fn internal_ratio(&self) -> f64 {
        self.e_j_sigma / self.e_c_int
    }

    /// Energy-form spec that reproduces these parameters.
    pub fn energy_spec(&self) -> CircuitSpec {
        CircuitSpec {
            circuit: CircuitForm::Energy {
                e_c: self.e_c,
                e_c_int: Some(self.e_c_int),
                k: self.k,
                lambda: self.lambda,
                e_j_sigma: self.e_j_sigma,
            },
            offsets: Offsets::Mode {
                n_g: self.n_g,
                n_big_g: self.n_big_g,
            },
        }
    }
}

fn from_capacitances(
    c: f64,
    c_j1: f64,
    c_j2: f64,
    e_j1: f64,
    e_j2: f64,
    offsets: Offsets,
) -> DerivedParams {
    let c_sum_j = c_j1 + c_j2;
    let c_sigma_sq = c * c_sum_j + c_j1 * c_j2;
    let k = (c_j1 - c_j2) / c_sum_j;
    let (n_g1, n_g2) = match offsets {
        Offsets::Junction { n_g1, n_g2 } => (n_g1, n_g2),
        Offsets::Mode { n_g, n_big_g } => junction_offsets(n_g, n_big_g, k),
    };
    let (n_g, n_big_g) = transform_offsets(n_g1, n_g2, k);
    DerivedParams {
        e_c1: E2_OVER_H * (c + c_j2) / (2.0 * c_sigma_sq),
        e_c2: E2_OVER_H * (c + c_j1) / (2.0 * c_sigma_sq),
        g: 4.0 * E2_OVER_H * c / c_sigma_sq,
        e_c: charging_energy(c + c_j1 * c_j2 / c_sum_j),
        e_c_int: charging_energy(c_sum_j),
        e_j1,
        e_j2,
        e_j_sigma: e_j1 + e_j2,
        e_j_delta: e_j1 - e_j2,
        lambda: junction_asymmetry(e_j1, e_j2),
        k,
        c,
        c_j1,
        c_j2,
        n_g1,
        n_g2,
        n_g,
        n_big_g,
    }
}

fn offsets_finite(offsets: &Offsets) -> Result<()> {
    match *offsets {
        Offsets::Junction { n_g1, n_g2 } => {
            check_finite("n_g1", n_g1)?;
            check_finite("n_g2", n_g2)
        }
        Offsets::Mode { n_g, n_big_g } => {
            check_finite("n_g", n_g)?;
            check_finite("N_g", n_big_g)
        }
    }
}

pub fn derive_from_capacitances(spec: &CircuitSpec) -> Result<DerivedParams> {
    let CircuitForm::Capacitance {
        c,
        c_j1,
        c_j2,
        e_j1,
        e_j2,
    } = spec.circuit
    else {
        return Err(Error::Validation(
            "expected a capacitance-form circuit".into(),
        ));
    };
    for (name, v) in [
        ("C", c),
        ("C_J1", c_j1),
        ("C_J2", c_j2),
        ("E_J1", e_j1),
        ("E_J2", e_j2),
    ] {
        check_finite(name, v)?;
    }
    offsets_finite(&spec.offsets)?;
    for (name, v) in [("C", c), ("C_J1", c_j1), ("C_J2", c_j2)] {
        if v <= 0.0 {
            return Err(Error::Domain(format!(
                "capacitance {name} must be positive, got {v} fF"
            )));
        }
    }
    for (name, v) in [("E_J1", e_j1), ("E_J2", e_j2)] {
        if v < 0.0 {
            return Err(Error::Domain(format!(
                "Josephson energy {name} must be nonnegative, got {v} GHz"
            )));
        }
    }
    Ok(from_capacitances(c, c_j1, c_j2, e_j1, e_j2, spec.offsets))
}

pub fn derive_from_energies(spec: &CircuitSpec) -> Result<DerivedParams> {
    let CircuitForm::Energy {
        e_c,
        e_c_int,
        k,
        lambda,
        e_j_sigma,
    } = spec.circuit
    else {
        return Err(Error::Validation("expected an energy-form circuit".into()));
    };
    let e_c_int =
        e_c_int.ok_or_else(|| Error::Validation("E_C_int is required for this model".into()))?;
    for (name, v) in [
        ("E_C", e_c),
        ("E_C_int", e_c_int),
        ("k", k),
        ("lambda", lambda),
        ("E_J_Sigma", e_j_sigma),
    ] {
        check_finite(name, v)?;
    }
    offsets_finite(&spec.offsets)?;
    if e_c <= 0.0 || e_c_int <= 0.0 {
        return Err(Error::Domain(format!(
            "charging energies must be positive, got E_C = {e_c}, E_C_int = {e_c_int}"
        )));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!(
            "lambda must lie in [0, 1], got {lambda}"
        )));
    }
    if k.abs() >= 1.0 {
        return Err(Error::Domain(format!("|k| must be below 1, got {k}")));
    }
    if e_j_sigma < 0.0 {
        return Err(Error::Domain(format!(
            "E_J_Sigma must be nonnegative, got {e_j_sigma}"
        )));
    }
    let (e_j1, e_j2) = split_josephson(e_j_sigma, lambda);
    let c_sum_j = capacitance_for(e_c_int);
    let c_j1 = 0.5 * c_sum_j * (1.0 + k);
    let c_j2 = 0.5 * c_sum_j * (1.0 - k);
    let c = capacitance_for(e_c) - c_j1 * c_j2 / c_sum_j;
    if c <= 0.0 {
        return Err(Error::Domain(format!(
            "E_C = {e_c} GHz is too large for E_C_int = {e_c_int} GHz (shunt capacitance would be {c:.4} fF)"
        )));
    }
    let mut derived = from_capacitances(c, c_j1, c_j2, e_j1, e_j2, spec.offsets);
    // Keep the requested values bit-exact rather than their round trip.
    derived.e_c = e_c;
    derived.e_c_int = e_c_int;
    derived.k = k;
    derived.lambda = lambda;
    derived.e_j_sigma = e_j_sigma;
    Ok(derived)
}

/// Fixed-constraint parameter families used by the reproduction studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    LambdaSweep,
    RatioSweep,
    KSweep,
}

impl SweepKind {
    pub const ALL: [SweepKind; 3] = [
        SweepKind::LambdaSweep,
        SweepKind::RatioSweep,
        SweepKind::KSweep,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SweepKind::LambdaSweep => "lambda-sweep",
            SweepKind::RatioSweep => "ratio-sweep",
            SweepKind::KSweep => "k-sweep",
        }
    }
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepKind::ALL
            .into_iter()
            .find(|kind| kind.as_str() == s)
            .ok_or_else(|| {
                Error::Validation(format!(
                    "unknown sweep `{s}` (expected one of lambda-sweep, ratio-sweep, k-sweep)"
                ))
            })
    }
}

/// The point every sweep passes through.
///
/// The qubit is held in the transmon regime through λ E_J_Sigma / 4 = `qubit_ratio` · E_C.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepAnchor {
    pub e_c: f64,
    pub qubit_ratio: f64,
    pub lambda: f64,
    pub internal_ratio: f64,
    pub k: f64,
}

impl SweepAnchor {
    /// λ = 0.95, E_J_Sigma / E_C_int = 32, k = 0, E_C = 0.2 GHz, λ E_J_Sigma / 4 = 50 E_C.
    pub const STAR: SweepAnchor = SweepAnchor {
        e_c: 0.2,
        qubit_ratio: 50.0,
        lambda: 0.95,
        internal_ratio: 32.0,
        k: 0.0,
    };

    /// Balanced junctions with E_J_Sigma = 40 GHz, used by the charge dispersion studies.
    pub const BALANCED: SweepAnchor = SweepAnchor {
        lambda: 1.0,
        ..SweepAnchor::STAR
    };

    pub fn params(&self) -> Result<DerivedParams> {
        self.point(self.lambda, self.internal_ratio, self.k)
    }

    fn point(&self, lambda: f64, internal_ratio: f64, k: f64) -> Result<DerivedParams> {
        if lambda <= 0.0 {
            return Err(Error::Domain(format!(
                "lambda must be positive on a constrained sweep, got {lambda}"
            )));
        }
        if internal_ratio <= 0.0 {
            return Err(Error::Domain(format!(
                "E_J_Sigma/E_C_int must be positive, got {internal_ratio}"
            )));
        }
        let e_j_sigma = 4.0 * self.qubit_ratio * self.e_c / lambda;
        let spec = CircuitSpec::new(
            CircuitForm::Energy {
                e_c: self.e_c,
                e_c_int: Some(e_j_sigma / internal_ratio),
                k,
                lambda,
                e_j_sigma,
            },
            Offsets::default(),
        );
        derive_from_energies(&spec)
    }

    pub fn sweep_point(&self, kind: SweepKind, value: f64) -> Result<DerivedParams> {
        match kind {
            SweepKind::LambdaSweep => self.point(value, self.internal_ratio, self.k),
            SweepKind::RatioSweep => self.point(self.lambda, value, self.k),
            SweepKind::KSweep => self.point(self.lambda, self.internal_ratio, value),
        }
    }
}

/// Parameters along one of the constrained sweeps through the star configuration.
pub fn build_constrained_sweep(kind: SweepKind, grid: &[f64]) -> Result<Vec<DerivedParams>> {
    if grid.is_empty() {
        return Err(Error::Validation("sweep grid is empty".into()));
    }
    grid.iter()
        .map(|&v| SweepAnchor::STAR.sweep_point(kind, v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cap_spec(c: f64, c_j1: f64, c_j2: f64, e_j1: f64, e_j2: f64) -> CircuitSpec {
        CircuitSpec::new(
            CircuitForm::Capacitance {
                c,
                c_j1,
                c_j2,
                e_j1,
                e_j2,
            },
            Offsets::default(),
        )
    }

    fn energy_spec(e_c: f64, e_c_int: f64, k: f64, lambda: f64, e_j_sigma: f64) -> CircuitSpec {
        CircuitSpec::new(
            CircuitForm::Energy {
                e_c,
                e_c_int: Some(e_c_int),
                k,
                lambda,
                e_j_sigma,
            },
            Offsets::default(),
        )
    }

    #[test]
    fn device_capacitances_give_caption_energies() {
        let p = derive_from_capacitances(&cap_spec(93.0, 8.0, 8.0, 20.0, 20.0)).unwrap();
        assert!((p.e_c - 0.1996).abs() < 5e-4, "E_C = {}", p.e_c);
        assert!((p.e_c_int - 1.211).abs() < 1e-3, "E_C_int = {}", p.e_c_int);
        // caption quotes 0.2 and 1.25 GHz as rounded values
        assert!((p.e_c - 0.2).abs() / 0.2 < 0.01);
        assert!((p.e_c_int - 1.25).abs() / 1.25 < 0.04);
        assert_eq!(p.lambda, 1.0);
        assert_eq!(p.e_j_delta, 0.0);
        assert_eq!(p.e_j_sigma, 40.0);
        assert_eq!(p.k, 0.0);
        assert_relative_eq!(p.e_c1, p.e_c2);
    }

    #[test]
    fn charge_constant_matches_codata() {
        assert_relative_eq!(E2_OVER_H, 38.7405, max_relative = 2e-6);
        assert_relative_eq!(charging_energy(1.0), 19.370, max_relative = 1e-4);
    }

    #[test]
    fn lambda_from_unequal_junctions() {
        let p = derive_from_capacitances(&cap_spec(93.0, 8.0, 8.0, 10.0, 30.0)).unwrap();
        assert_relative_eq!(p.lambda, 0.75, max_relative = 1e-15);
    }

    #[test]
    fn energy_form_splits_junctions() {
        let p = derive_from_energies(&energy_spec(0.2, 1.25, 0.0, 1.0, 40.0)).unwrap();
        assert_eq!((p.e_j1, p.e_j2), (20.0, 20.0));

        let p = derive_from_energies(&energy_spec(0.2, 1.25, 0.0, 0.9, 40.0)).unwrap();
        // root of r² − (4/λ − 2) r + 1 = 0
        let b: f64 = 4.0 / 0.9 - 2.0;
        let r = 0.5 * (b + (b * b - 4.0).sqrt());
        assert_relative_eq!(p.e_j2 / p.e_j1, r, max_relative = 1e-12);
        assert!((p.e_j2 / p.e_j1 - 1.925).abs() < 1e-3);
        assert!(p.e_j1 <= p.e_j2);
    }

    #[test]
    fn energy_form_reconstructs_capacitances() {
        let p = derive_from_energies(&energy_spec(0.2, 1.25, 0.0, 1.0, 40.0)).unwrap();
        let c_j = E2_OVER_H / 2.5 / 2.0;
        assert_relative_eq!(p.c_j1, c_j, max_relative = 1e-14);
        assert_relative_eq!(p.c_j2, c_j, max_relative = 1e-14);
        assert!((p.c_j1 - 7.748).abs() < 1e-3, "C_J = {}", p.c_j1);
        assert!((p.c - 92.98).abs() < 1e-2, "C = {}", p.c);
    }

    #[test]
    fn shunt_would_be_negative() {
        let err = derive_from_energies(&energy_spec(6.0, 1.25, 0.0, 1.0, 40.0)).unwrap_err();
        assert!(matches!(err, Error::Domain(_)), "{err}");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            derive_from_capacitances(&cap_spec(0.0, 8.0, 8.0, 20.0, 20.0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            derive_from_capacitances(&cap_spec(93.0, -1.0, 8.0, 20.0, 20.0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            derive_from_energies(&energy_spec(0.2, 1.25, 1.0, 1.0, 40.0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            derive_from_energies(&energy_spec(0.2, 1.25, 0.0, 1.5, 40.0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            derive_from_energies(&cap_spec(93.0, 8.0, 8.0, 20.0, 20.0)),
            Err(Error::Validation(_))
        ));
        let missing = CircuitSpec::new(
            CircuitForm::Energy {
                e_c: 0.2,
                e_c_int: None,
                k: 0.0,
                lambda: 1.0,
                e_j_sigma: 40.0,
            },
            Offsets::default(),
        );
        assert!(matches!(missing.derive(), Err(Error::Validation(_))));
        assert_eq!(missing.qubit_params().unwrap().e_j_sigma, 40.0);
    }

    #[test]
    fn offset_transform_examples() {
        let (n_g, n_big_g) = transform_offsets(0.3, 0.1, 0.0);
        assert_relative_eq!(n_g, 0.2, max_relative = 1e-15);
        assert_relative_eq!(n_big_g, 0.2, max_relative = 1e-14);
        assert_eq!(transform_offsets(0.0, 0.0, 0.3), (0.0, 0.0));
        assert_eq!(transform_offsets(1.0, 0.0, 0.5), (0.25, 1.0));
    }

    #[test]
    fn kinetic_form_is_diagonalized_by_the_mode_transformation() {
        // n1 = n + (1+k)/2 N, n2 = n − (1−k)/2 N inserted into
        // 4E_C1 n1² + 4E_C2 n2² − g n1 n2 must give 4E_C n² + 4E_C_int N².
        for &(c, c_j1, c_j2) in &[(93.0, 8.0, 8.0), (60.0, 12.0, 5.0), (150.0, 3.0, 9.0)] {
            let p = derive_from_capacitances(&cap_spec(c, c_j1, c_j2, 1.0, 1.0)).unwrap();
            let (a, b) = (0.5 * (1.0 + p.k), -0.5 * (1.0 - p.k));
            let k11 = 4.0 * p.e_c1;
            let k22 = 4.0 * p.e_c2;
            let k12 = -0.5 * p.g;
            let nn = k11 + k22 + 2.0 * k12;
            let big = k11 * a * a + k22 * b * b + 2.0 * k12 * a * b;
            let cross = k11 * a + k22 * b + k12 * (a + b);
            assert_relative_eq!(nn, 4.0 * p.e_c, max_relative = 1e-12);
            assert_relative_eq!(big, 4.0 * p.e_c_int, max_relative = 1e-12);
            assert!(cross.abs() < 1e-12 * nn, "cross term {cross}");
        }
    }

    #[test]
    fn lambda_sweep_caption_points() {
        let pts = build_constrained_sweep(SweepKind::LambdaSweep, &[1.0, 0.5]).unwrap();
        assert_relative_eq!(pts[0].e_j_sigma, 40.0, max_relative = 1e-14);
        assert_relative_eq!(pts[0].e_c_int, 1.25, max_relative = 1e-14);
        assert_relative_eq!(pts[1].e_j_sigma, 80.0, max_relative = 1e-14);
        assert_relative_eq!(pts[1].e_c_int, 2.5, max_relative = 1e-14);
        assert!(build_constrained_sweep(SweepKind::LambdaSweep, &[0.0]).is_err());
        assert!(build_constrained_sweep(SweepKind::RatioSweep, &[]).is_err());
        assert!("sideways".parse::<SweepKind>().is_err());
    }

    #[test]
    fn sweeps_meet_at_the_star() {
        let star = SweepAnchor::STAR.params().unwrap();
        let a = build_constrained_sweep(SweepKind::LambdaSweep, &[0.95]).unwrap()[0];
        let b = build_constrained_sweep(SweepKind::RatioSweep, &[32.0]).unwrap()[0];
        let c = build_constrained_sweep(SweepKind::KSweep, &[0.0]).unwrap()[0];
        assert_eq!(a, star);
        assert_eq!(b, star);
        assert_eq!(c, star);
        assert_relative_eq!(
            star.lambda * star.e_j_sigma / 4.0,
            50.0 * star.e_c,
            max_relative = 1e-14
        );
        assert_relative_eq!(star.internal_ratio(), 32.0, max_relative = 1e-14);
    }

    proptest! {
        #[test]
        fn capacitance_energy_round_trip(
            c in 20.0..300.0f64,
            c_j1 in 1.0..30.0f64,
            c_j2 in 1.0..30.0f64,
            e_j1 in 0.5..60.0f64,
            e_j2 in 0.5..60.0f64,
            n_g1 in -1.0..1.0f64,
            n_g2 in -1.0..1.0f64,
        ) {
            let mut spec = cap_spec(c, c_j1, c_j2, e_j1, e_j2);
            spec.offsets = Offsets::Junction { n_g1, n_g2 };
            let p = derive_from_capacitances(&spec).unwrap();
            let q = derive_from_energies(&p.energy_spec()).unwrap();
            let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-300);
            prop_assert!(rel(q.c, c) < 1e-12);
            prop_assert!(rel(q.c_j1 + q.c_j2, c_j1 + c_j2) < 1e-12);
            prop_assert!(rel(q.c_j1.min(q.c_j2), c_j1.min(c_j2)) < 1e-12);
            prop_assert!(rel(q.c_j1, c_j1) < 1e-12);
            prop_assert!(rel(q.e_j1.min(q.e_j2), e_j1.min(e_j2)) < 1e-12);
            prop_assert!(rel(q.e_j1.max(q.e_j2), e_j1.max(e_j2)) < 1e-12);
            prop_assert!(rel(q.e_c1, p.e_c1) < 1e-12);
            prop_assert!(rel(q.g, p.g) < 1e-12);
            prop_assert!((q.n_g1 - n_g1).abs() < 1e-12 && (q.n_g2 - n_g2).abs() < 1e-12);
        }

        #[test]
        fn lambda_is_exchange_symmetric(e_j1 in 0.0..50.0f64, e_j2 in 0.01..50.0f64) {
            let a = junction_asymmetry(e_j1, e_j2);
            prop_assert_eq!(a, junction_asymmetry(e_j2, e_j1));
            prop_assert!((0.0..=1.0 + 1e-15).contains(&a));
            if e_j1 != e_j2 {
                prop_assert!(a < 1.0);
            }
        }

        #[test]
        fn internal_energy_depends_on_junction_sum_only(c in 20.0..200.0f64, s in 2.0..40.0f64, f in 0.05..0.95f64) {
            let p = derive_from_capacitances(&cap_spec(c, s * f, s * (1.0 - f), 1.0, 1.0)).unwrap();
            let q = derive_from_capacitances(&cap_spec(c, s * 0.5, s * 0.5, 1.0, 1.0)).unwrap();
            prop_assert!((p.e_c_int - q.e_c_int).abs() < 1e-12 * q.e_c_int);
            prop_assert!(q.k == 0.0 && q.e_c1 == q.e_c2);
        }

        #[test]
        fn offset_maps_invert(n_g1 in -2.0..2.0f64, n_g2 in -2.0..2.0f64, k in -0.9..0.9f64) {
            let (n_g, n_big_g) = transform_offsets(n_g1, n_g2, k);
            let (a, b) = junction_offsets(n_g, n_big_g, k);
            prop_assert!((a - n_g1).abs() < 1e-12 && (b - n_g2).abs() < 1e-12);
        }
    }
}
