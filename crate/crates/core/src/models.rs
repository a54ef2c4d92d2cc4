//! Closed-form potentials and effective Josephson energies of the double-junction element.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{charge_of, ChargeBasisOperator};
use crate::params::DerivedParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelId {
    FullTwoMode,
    SimplifiedTwoMode,
    Classical,
    BoAnalytic,
    BoNumeric,
}

impl ModelId {
    pub const ALL: [ModelId; 5] = [
        ModelId::FullTwoMode,
        ModelId::SimplifiedTwoMode,
        ModelId::Classical,
        ModelId::BoAnalytic,
        ModelId::BoNumeric,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelId::FullTwoMode => "full-two-mode",
            ModelId::SimplifiedTwoMode => "simplified-two-mode",
            ModelId::Classical => "classical",
            ModelId::BoAnalytic => "bo-analytic",
            ModelId::BoNumeric => "bo-numeric",
        }
    }

    pub fn is_two_mode(&self) -> bool {
        matches!(self, ModelId::FullTwoMode | ModelId::SimplifiedTwoMode)
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let id = match s {
            "full" | "full-two-mode" => ModelId::FullTwoMode,
            "simplified" | "simplified-two-mode" => ModelId::SimplifiedTwoMode,
            "classical" => ModelId::Classical,
            "bo" | "bo-analytic" => ModelId::BoAnalytic,
            "bo-numeric" => ModelId::BoNumeric,
            _ => {
                return Err(Error::Validation(format!(
                    "unknown model `{s}` (expected one of full-two-mode, simplified-two-mode, classical, bo-analytic, bo-numeric)"
                )))
            }
        };
        Ok(id)
    }
}

/// g(φ) = √(1 − λ sin²(φ/2)).
pub fn g_factor(phi: f64, lambda: f64) -> f64 {
    let s = (0.5 * phi).sin();
    (1.0 - lambda * s * s).max(0.0).sqrt()
}

/// Classical energy-phase relation −E_J_Sigma g(φ).
pub fn u_classical(phi: f64, lambda: f64, e_j_sigma: f64) -> f64 {
    -e_j_sigma * g_factor(phi, lambda)
}

/// s(φ) = sign cos(φ/2), taken as +1 on the closed interval |φ| ≤ π.
pub fn s_of_phi(phi: f64) -> f64 {
    if phi.abs() <= PI || (0.5 * phi).cos() > 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// f(φ) = kφ/2 + arctan((E_JΔ/E_JΣ) tan(φ/2)), continuous on (−π, π) with finite limits at ±π.
pub fn f_of_phi(phi: f64, p: &DerivedParams) -> f64 {
    let r = if p.e_j_sigma == 0.0 {
        0.0
    } else {
        p.e_j_delta / p.e_j_sigma
    };
    let half = 0.5 * phi;
    let arctan = if r == 0.0 {
        0.0
    } else if half.cos() == 0.0 {
        FRAC_PI_2 * (r * half.sin()).signum()
    } else {
        (r * half.tan()).atan()
    };
    0.5 * p.k * phi + arctan
}

/// Minimum of the internal-mode potential at fixed φ.
pub fn theta_min(phi: f64, p: &DerivedParams) -> f64 {
    f_of_phi(phi, p) + 0.5 * PI * (1.0 - s_of_phi(phi))
}

/// Potential of the transformed two-mode Hamiltonian,
/// −E_JΣ cos(φ/2) cos(θ − kφ/2) − E_JΔ sin(φ/2) sin(θ − kφ/2).
pub fn u_transformed(phi: f64, theta: f64, p: &DerivedParams) -> f64 {
    let psi = theta - 0.5 * p.k * phi;
    let half = 0.5 * phi;
    -p.e_j_sigma * half.cos() * psi.cos() - p.e_j_delta * half.sin() * psi.sin()
}

/// −E_J1 cos φ1 − E_J2 cos φ2.
pub fn u_junctions(phi1: f64, phi2: f64, p: &DerivedParams) -> f64 {
    -p.e_j1 * phi1.cos() - p.e_j2 * phi2.cos()
}

/// Junction phases for given qubit and internal phases.
pub fn junction_phases(phi: f64, theta: f64, k: f64) -> (f64, f64) {
    (theta + 0.5 * (1.0 - k) * phi, 0.5 * (1.0 + k) * phi - theta)
}

/// U′(φ, θ) = −s(φ) E_JΣ cos(θ − f(φ)) g(φ).
pub fn u_prime(phi: f64, theta: f64, p: &DerivedParams) -> f64 {
    -s_of_phi(phi) * p.e_j_sigma * (theta - f_of_phi(phi, p)).cos() * g_factor(phi, p.lambda)
}

/// −E_JΣ cos θ g(φ): the transformed potential with its minima line moved to θ = 0.
pub fn u_simple(phi: f64, theta: f64, lambda: f64, e_j_sigma: f64) -> f64 {
    -e_j_sigma * theta.cos() * g_factor(phi, lambda)
}

/// Josephson energy seen by the internal mode at fixed φ.
pub fn ej_eff_internal(phi: f64, lambda: f64, e_j_sigma: f64) -> f64 {
    e_j_sigma * g_factor(phi, lambda)
}

/// Josephson energy seen by the qubit mode, λ E_JΣ / 4.
pub fn ej_eff_slow(lambda: f64, e_j_sigma: f64) -> f64 {
    0.25 * lambda * e_j_sigma
}

/// 4 E_C_int (N − N_g)² + E_J,eff(φ) (1 − cos θ) in the internal charge basis.
pub fn fast_hamiltonian_at_phi(
    phi: f64,
    p: &DerivedParams,
    n_big_g: f64,
    n_cut: usize,
) -> Result<ChargeBasisOperator> {
    transmon_operator(
        p.e_c_int,
        ej_eff_internal(phi, p.lambda, p.e_j_sigma),
        n_big_g,
        n_cut,
        true,
    )
}

/// 4 E_C (n − n_g)² − E_J cos θ, optionally shifted by +E_J.
pub fn transmon_operator(
    e_c: f64,
    e_j: f64,
    n_g: f64,
    n_cut: usize,
    shifted: bool,
) -> Result<ChargeBasisOperator> {
    let shift = if shifted { e_j } else { 0.0 };
    ChargeBasisOperator::from_elements(&[n_cut], 1, |r, c| {
        if r == c {
            let q = charge_of(r, n_cut) as f64 - n_g;
            4.0 * e_c * q * q + shift
        } else {
            -0.5 * e_j
        }
    })
}
