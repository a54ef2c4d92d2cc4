//! Charge-basis Hamiltonians of the one- and two-mode models.

use crate::error::{Error, Result};
use crate::models::g_factor;
use crate::numerics::Numerics;
use crate::operator::{charge_of, ChargeBasisOperator};
use crate::params::DerivedParams;
use crate::potential::{sample_and_fourier, PeriodicPotential};

const ODD_CONTENT_LIMIT: f64 = 1e-10;
const BAND_DROP: f64 = 1e-12;

/// Harmonics of an even potential that survive the band-drop threshold.
fn retained_bands(potential: &PeriodicPotential, max_offset: usize) -> Result<Vec<f64>> {
    let odd = potential.odd_content();
    if odd > ODD_CONTENT_LIMIT {
        return Err(Error::UnsupportedPotential { odd });
    }
    let m_top = potential.m_max().min(max_offset);
    let largest = potential.cos[1..=potential.m_max()]
        .iter()
        .fold(0.0f64, |a, v| a.max(v.abs()));
    let mut bands: Vec<f64> = (0..=m_top)
        .map(|m| {
            let u = potential.cos[m];
            if m > 0 && u.abs() < BAND_DROP * largest {
                0.0
            } else {
                u
            }
        })
        .collect();
    while bands.len() > 1 && *bands.last().unwrap() == 0.0 {
        bands.pop();
    }
    Ok(bands)
}

/// 4 E_C (n − n_g)² + U(φ), with the m-th harmonic on the m-th off-diagonal as U_m/2.
pub fn build_single_mode(
    e_c: f64,
    n_g: f64,
    potential: &PeriodicPotential,
    n_cut: usize,
) -> Result<ChargeBasisOperator> {
    let bands = retained_bands(potential, 2 * n_cut)?;
    let kd = bands.len() - 1;
    ChargeBasisOperator::from_elements(&[n_cut], kd, |r, c| {
        let m = r.abs_diff(c);
        if m == 0 {
            let q = charge_of(r, n_cut) as f64 - n_g;
            4.0 * e_c * q * q + bands[0]
        } else {
            0.5 * bands[m]
        }
    })
}

fn check_two_mode_cutoff(n_cut: usize) -> Result<()> {
    if n_cut < 5 {
        Err(Error::Validation(format!(
            "two-mode cutoff must be at least 5, got {n_cut}"
        )))
    } else {
        Ok(())
    }
}

/// Junction-charge Hamiltonian
/// 4E_C1(n1−n_g1)² + 4E_C2(n2−n_g2)² − g(n1−n_g1)(n2−n_g2) − E_J1 cos φ1 − E_J2 cos φ2,
/// indexed with n1 major.
pub fn build_two_mode_full(p: &DerivedParams, n_cut: usize) -> Result<ChargeBasisOperator> {
    check_two_mode_cutoff(n_cut)?;
    let w = 2 * n_cut + 1;
    ChargeBasisOperator::from_elements(&[n_cut, n_cut], w, |r, c| {
        let (r1, r2) = (r / w, r % w);
        let (c1, c2) = (c / w, c % w);
        if r == c {
            let q1 = charge_of(r1, n_cut) as f64 - p.n_g1;
            let q2 = charge_of(r2, n_cut) as f64 - p.n_g2;
            4.0 * p.e_c1 * q1 * q1 + 4.0 * p.e_c2 * q2 * q2 - p.g * q1 * q2
        } else if r2 == c2 && r1.abs_diff(c1) == 1 {
            -0.5 * p.e_j1
        } else if r1 == c1 && r2.abs_diff(c2) == 1 {
            -0.5 * p.e_j2
        } else {
            0.0
        }
    })
}

/// Fourier series of g(φ) = √(1 − λ sin²(φ/2)).
pub fn g_series(lambda: f64, numerics: &Numerics) -> Result<PeriodicPotential> {
    sample_and_fourier(
        |phi| g_factor(phi, lambda),
        numerics.fourier_grid,
        numerics.m_max,
    )
}

/// 4E_C(n−n_g)² + 4E_C_int(N−N_g)² − E_JΣ cos θ g(φ), indexed with N major.
pub fn build_two_mode_simplified(
    p: &DerivedParams,
    n_cut: usize,
    numerics: &Numerics,
) -> Result<ChargeBasisOperator> {
    build_two_mode_simplified_with(p, n_cut, &g_series(p.lambda, numerics)?)
}

/// As [`build_two_mode_simplified`] with a precomputed series of g(φ).
pub fn build_two_mode_simplified_with(
    p: &DerivedParams,
    n_cut: usize,
    g: &PeriodicPotential,
) -> Result<ChargeBasisOperator> {
    check_two_mode_cutoff(n_cut)?;
    let bands = retained_bands(g, 2 * n_cut)?;
    let w = 2 * n_cut + 1;
    let kd = w + bands.len() - 1;
    ChargeBasisOperator::from_elements(&[n_cut, n_cut], kd, |r, c| {
        let (rn_big, rn) = (r / w, r % w);
        let (cn_big, cn) = (c / w, c % w);
        if r == c {
            let q = charge_of(rn, n_cut) as f64 - p.n_g;
            let big_q = charge_of(rn_big, n_cut) as f64 - p.n_big_g;
            4.0 * p.e_c * q * q + 4.0 * p.e_c_int * big_q * big_q
        } else if rn_big.abs_diff(cn_big) == 1 {
            let m = rn.abs_diff(cn);
            match bands.get(m) {
                Some(&b) if m == 0 => -0.5 * p.e_j_sigma * b,
                Some(&b) => -0.25 * p.e_j_sigma * b,
                None => 0.0,
            }
        } else {
            0.0
        }
    })
}
