//! Born–Oppenheimer reduction onto the qubit phase and the offset-charge
//! dispersion the qubit inherits from the internal mode.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::{eigensolve, solve_converged, Spectrum};
use crate::error::{Error, Result};
use crate::hamiltonian::build_single_mode;
use crate::models::{fast_hamiltonian_at_phi, g_factor, u_classical};
use crate::numerics::Numerics;
use crate::operator::{charge_of, ChargeBasisOperator};
use crate::params::DerivedParams;
use crate::potential::{phase_grid, sample_and_fourier, PeriodicPotential};
use crate::spline::PeriodicSpline;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoVariant {
    Analytic,
    Numeric,
}

/// √(2 E_C_int E_JΣ) · g(φ)^{1/2}: zero-point energy of the internal mode in the harmonic approximation.
pub fn u_corr_analytic(phi: f64, p: &DerivedParams) -> f64 {
    (2.0 * p.e_c_int * p.e_j_sigma).sqrt() * g_factor(phi, p.lambda).sqrt()
}

/// Ground energy of the internal mode, tabulated over φ and interpolated periodically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericCorrection {
    pub n_big_g: f64,
    /// Node phases, −π to π inclusive.
    pub phi: Vec<f64>,
    pub energy: Vec<f64>,
    spline: PeriodicSpline,
}

impl NumericCorrection {
    pub fn eval(&self, phi: f64) -> f64 {
        self.spline.eval(phi)
    }
}

/// Internal-mode ground energy of 4E_C_int(N − N_g)² + E_J,eff(φ)(1 − cos θ) on `points` φ nodes spanning [−π, π].
pub fn u_corr_numeric(
    p: &DerivedParams,
    n_big_g: f64,
    numerics: &Numerics,
) -> Result<NumericCorrection> {
    let points = numerics.bo_phi_points;
    let policy = numerics.single_mode_policy();
    let phi: Vec<f64> = (0..points)
        .map(|i| -PI + 2.0 * PI * i as f64 / (points - 1) as f64)
        .collect();
    let energy = phi
        .par_iter()
        .map(|&x| {
            let s = solve_converged(
                &|n| fast_hamiltonian_at_phi(x, p, n_big_g, n),
                1,
                false,
                &policy,
            )?;
            Ok(s.eigenvalues[0])
        })
        .collect::<Result<Vec<f64>>>()?;
    let spline = PeriodicSpline::new(energy[..points - 1].to_vec())?;
    Ok(NumericCorrection {
        n_big_g,
        phi,
        energy,
        spline,
    })
}

/// U_BO = U_classical + U_corr for one variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BOPotential {
    pub variant: BoVariant,
    pub classical: PeriodicPotential,
    pub u_corr: PeriodicPotential,
    pub u_bo: PeriodicPotential,
    pub params: DerivedParams,
    /// Present for the numeric variant.
    pub numeric: Option<NumericCorrection>,
}

/// Classical energy-phase relation tabulated on `n_grid` points.
pub fn classical_potential(
    p: &DerivedParams,
    n_grid: usize,
    m_max: usize,
) -> Result<PeriodicPotential> {
    sample_and_fourier(|x| u_classical(x, p.lambda, p.e_j_sigma), n_grid, m_max)
}

impl BOPotential {
    /// Builds the potential on the Fourier grid; the numeric variant solves at the internal offset `p.n_big_g`.
    pub fn build(p: &DerivedParams, variant: BoVariant, numerics: &Numerics) -> Result<Self> {
        let numeric = match variant {
            BoVariant::Analytic => None,
            BoVariant::Numeric => Some(u_corr_numeric(p, p.n_big_g, numerics)?),
        };
        let (n, m) = (numerics.fourier_grid, numerics.m_max);
        let classical = classical_potential(p, n, m)?;
        let u_corr = match &numeric {
            None => sample_and_fourier(|x| u_corr_analytic(x, p), n, m)?,
            Some(c) => sample_and_fourier(|x| c.eval(x), n, m)?,
        };
        let u_bo = classical.sum(&u_corr)?;
        Ok(BOPotential {
            variant,
            classical,
            u_corr,
            u_bo,
            params: *p,
            numeric,
        })
    }

    /// U_corr at any phase.
    pub fn corr_at(&self, phi: f64) -> f64 {
        match &self.numeric {
            None => u_corr_analytic(phi, &self.params),
            Some(c) => c.eval(phi),
        }
    }

    pub fn bo_at(&self, phi: f64) -> f64 {
        u_classical(phi, self.params.lambda, self.params.e_j_sigma) + self.corr_at(phi)
    }

    pub fn hamiltonian(&self, n_cut: usize) -> Result<ChargeBasisOperator> {
        build_single_mode(self.params.e_c, self.params.n_g, &self.u_bo, n_cut)
    }
}

/// 4E_C(n − n_g)² + U_BO(φ).
pub fn build_bo_hamiltonian(
    p: &DerivedParams,
    variant: BoVariant,
    n_cut: usize,
    numerics: &Numerics,
) -> Result<ChargeBasisOperator> {
    BOPotential::build(p, variant, numerics)?.hamiltonian(n_cut)
}

/// Peak-to-peak dispersion of the internal ground state at φ = 0 (asymptotic transmon form).
pub fn eps0_int(p: &DerivedParams) -> f64 {
    let r = p.e_j_sigma / p.e_c_int;
    32.0 * (2.0 / PI).sqrt() * p.e_c_int * (0.5 * r).powf(0.75) * (-(8.0 * r).sqrt()).exp()
}

/// φ dependence of the dispersion, g^{3/4} exp[−√(8E_JΣ/E_C_int)(√g − 1)], normalized to 1 at φ = 0.
pub fn u_disp_shape(phi: f64, p: &DerivedParams) -> f64 {
    let g = g_factor(phi, p.lambda);
    if g == 0.0 {
        return 0.0;
    }
    let r = p.e_j_sigma / p.e_c_int;
    g.powf(0.75) * (-(8.0 * r).sqrt() * (g.sqrt() - 1.0)).exp()
}

/// U_disp = ε_0^int · u_disp(φ) in GHz.
pub fn u_disp(phi: f64, p: &DerivedParams) -> f64 {
    let g = g_factor(phi, p.lambda);
    let r = p.e_j_sigma / p.e_c_int;
    32.0 * (2.0 / PI).sqrt()
        * p.e_c_int
        * (0.5 * r).powf(0.75)
        * g.powf(0.75)
        * (-(8.0 * r * g).sqrt()).exp()
}

/// Analytic correction with its first-order offset-charge dependence.
pub fn u_corr_with_charge(phi: f64, p: &DerivedParams, n_big_g: f64) -> f64 {
    let s = (PI * n_big_g).sin();
    u_corr_analytic(phi, p) + u_disp(phi, p) * s * s
}

/// Single-mode eigenvectors on a phase grid, ψ(φ_j) = Σ_n c_n e^{inφ_j}/√M.
pub fn phase_amplitudes(vector: &[f64], n_cut: usize, grid: &[f64]) -> Vec<Complex64> {
    let norm = 1.0 / (grid.len() as f64).sqrt();
    grid.iter()
        .map(|&x| {
            vector
                .iter()
                .enumerate()
                .map(|(i, &c)| Complex64::from_polar(c, charge_of(i, n_cut) as f64 * x))
                .sum::<Complex64>()
                * norm
        })
        .collect()
}

/// ⟨ψ|f(φ)|ψ⟩ for a single-mode charge vector, evaluated on a phase grid fine enough to be exact
/// for band-limited f.
pub fn phase_expectation(vector: &[f64], n_cut: usize, f: impl Fn(f64) -> f64) -> f64 {
    let m = 256usize.max(4 * (2 * n_cut + 1));
    let grid = phase_grid(m);
    phase_amplitudes(vector, n_cut, &grid)
        .iter()
        .zip(&grid)
        .map(|(a, &x)| a.norm_sqr() * f(x))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionModel {
    pub eps0_int: f64,
    /// Dimensionless shape u_disp on the plot grid.
    pub u_disp: PeriodicPotential,
    /// ε_0^int (⟨1|u_disp|1⟩ − ⟨0|u_disp|0⟩) with |0⟩, |1⟩ eigenstates of the analytic BO Hamiltonian.
    pub eps01_model: f64,
    pub n_cut_used: usize,
}

/// First-order qubit dispersion inherited from the internal mode.
pub fn eps01_model(p: &DerivedParams, numerics: &Numerics) -> Result<DispersionModel> {
    let bo = BOPotential::build(p, BoVariant::Analytic, numerics)?;
    let spectrum = solve_converged(
        &|n| bo.hamiltonian(n),
        2,
        true,
        &numerics.single_mode_policy(),
    )?;
    dispersion_from_spectrum(p, &spectrum, numerics)
}

fn dispersion_from_spectrum(
    p: &DerivedParams,
    spectrum: &Spectrum,
    numerics: &Numerics,
) -> Result<DispersionModel> {
    let vectors = spectrum
        .eigenvectors
        .as_ref()
        .ok_or_else(|| Error::Numeric("BO eigenvectors missing".into()))?;
    let n_cut = spectrum.n_cut_used;
    let shape = |x: f64| u_disp_shape(x, p);
    let w0 = phase_expectation(&vectors[0], n_cut, shape);
    let w1 = phase_expectation(&vectors[1], n_cut, shape);
    let eps0 = eps0_int(p);
    Ok(DispersionModel {
        eps0_int: eps0,
        u_disp: sample_and_fourier(shape, numerics.plot_grid, numerics.m_max)?,
        eps01_model: eps0 * (w1 - w0),
        n_cut_used: n_cut,
    })
}

/// Fast-mode ground energy at one φ, used for dispersion cross-checks.
pub fn fast_ground_energy(
    phi: f64,
    p: &DerivedParams,
    n_big_g: f64,
    numerics: &Numerics,
) -> Result<f64> {
    let s = solve_converged(
        &|n| fast_hamiltonian_at_phi(phi, p, n_big_g, n),
        1,
        false,
        &numerics.single_mode_policy(),
    )?;
    Ok(s.eigenvalues[0])
}

/// Lowest levels of a BO Hamiltonian at its converged cutoff.
pub fn bo_spectrum(
    bo: &BOPotential,
    n_levels: usize,
    with_vectors: bool,
    numerics: &Numerics,
) -> Result<Spectrum> {
    solve_converged(
        &|n| bo.hamiltonian(n),
        n_levels,
        with_vectors,
        &numerics.single_mode_policy(),
    )
}

/// Lowest levels of a BO Hamiltonian at a fixed cutoff.
pub fn bo_spectrum_at(bo: &BOPotential, n_levels: usize, n_cut: usize) -> Result<Spectrum> {
    eigensolve(&bo.hamiltonian(n_cut)?, n_levels, false)
}
