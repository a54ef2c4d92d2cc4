//! Discretization and convergence settings shared by every computation.

use serde::{Deserialize, Serialize};

use crate::eigen::ConvergencePolicy;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerics {
    /// Points of the FFT quadrature used for Fourier coefficients.
    #[serde(alias = "N_grid")]
    pub fourier_grid: usize,
    /// Points of tabulated potential curves.
    pub plot_grid: usize,
    /// Highest retained harmonic of single-mode potentials and of g(φ).
    pub m_max: usize,
    /// φ samples of the numeric correction potential, endpoints included.
    pub bo_phi_points: usize,
    /// Fixed starting cutoff for every mode; `None` uses the per-model defaults.
    pub n_cut: Option<usize>,
    pub n_cut_step: usize,
    pub n_cut_max: usize,
    /// Relative eigenvalue change that ends the cutoff loop.
    #[serde(alias = "tolerance")]
    pub tol: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            fourier_grid: 8192,
            plot_grid: 256,
            m_max: 32,
            bo_phi_points: 201,
            n_cut: None,
            n_cut_step: ConvergencePolicy::SINGLE_MODE.n_cut_step,
            n_cut_max: ConvergencePolicy::SINGLE_MODE.n_cut_max,
            tol: ConvergencePolicy::SINGLE_MODE.tol,
        }
    }
}

impl Numerics {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Validation(m));
        if !(self.tol > 0.0 && self.tol <= 1e-4) {
            return fail(format!("tolerance must lie in (0, 1e-4], got {}", self.tol));
        }
        if self.m_max == 0 {
            return fail("m_max must be at least 1".into());
        }
        if !self.fourier_grid.is_power_of_two() || self.fourier_grid < 4 * self.m_max {
            return fail(format!(
                "fourier_grid = {} must be a power of two and at least 4·m_max = {}",
                self.fourier_grid,
                4 * self.m_max
            ));
        }
        if !self.plot_grid.is_power_of_two() || self.plot_grid < 4 * self.m_max {
            return fail(format!(
                "plot_grid = {} must be a power of two and at least 4·m_max = {}",
                self.plot_grid,
                4 * self.m_max
            ));
        }
        if self.bo_phi_points < 8 {
            return fail(format!(
                "bo_phi_points must be at least 8, got {}",
                self.bo_phi_points
            ));
        }
        if self.n_cut_step == 0 {
            return fail("n_cut_step must be positive".into());
        }
        if let Some(n) = self.n_cut {
            if n < 5 || n > self.n_cut_max {
                return fail(format!(
                    "n_cut must lie in [5, {}], got {n}",
                    self.n_cut_max
                ));
            }
        }
        Ok(())
    }

    fn policy(&self, base: ConvergencePolicy) -> ConvergencePolicy {
        ConvergencePolicy {
            n_cut_start: self.n_cut.unwrap_or(base.n_cut_start),
            n_cut_step: self.n_cut_step,
            n_cut_max: self.n_cut_max,
            tol: self.tol,
        }
    }

    pub fn single_mode_policy(&self) -> ConvergencePolicy {
        self.policy(ConvergencePolicy::SINGLE_MODE)
    }

    pub fn two_mode_policy(&self) -> ConvergencePolicy {
        self.policy(ConvergencePolicy::TWO_MODE)
    }
}
