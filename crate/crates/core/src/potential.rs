//! Real 2π-periodic potentials tabulated on a uniform grid together with their
//! cosine (and sine) Fourier coefficients.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// φ_j = −π + 2πj/N for j = 0..N.
pub fn phase_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| -PI + TAU * j as f64 / n as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicPotential {
    /// U(φ_j) on [`phase_grid`].
    pub samples: Vec<f64>,
    /// U(φ) ≈ Σ_m cos[m] cos(mφ) + sin[m] sin(mφ); cos[0] is the mean.
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
    pub even: bool,
}

/// Tabulates `potential` and extracts its harmonics up to `m_max` by FFT quadrature.
///
/// For m ≥ 1 the cosine coefficient is U_m = (1/π)∫U cos(mφ)dφ; U_0 is the mean.
pub fn sample_and_fourier<F>(potential: F, n_grid: usize, m_max: usize) -> Result<PeriodicPotential>
where
    F: Fn(f64) -> f64,
{
    if !n_grid.is_power_of_two() || n_grid < 4 * m_max.max(1) {
        return Err(Error::Validation(format!(
            "grid size {n_grid} must be a power of two and at least 4·m_max = {}",
            4 * m_max.max(1)
        )));
    }
    let samples: Vec<f64> = phase_grid(n_grid).into_iter().map(&potential).collect();
    PeriodicPotential::from_samples(samples, m_max)
}

impl PeriodicPotential {
    pub fn from_samples(samples: Vec<f64>, m_max: usize) -> Result<Self> {
        let n = samples.len();
        if let Some((j, v)) = samples.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Numeric(format!(
                "potential sample {j} (φ = {:.6}) is not finite: {v}",
                -PI + TAU * j as f64 / n as f64
            )));
        }
        if m_max >= n / 2 {
            return Err(Error::Validation(format!(
                "m_max = {m_max} needs more than {n} samples"
            )));
        }
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);

        let norm = 2.0 / n as f64;
        let mut cos = Vec::with_capacity(m_max + 1);
        let mut sin = Vec::with_capacity(m_max + 1);
        for (m, x) in buf.iter().take(m_max + 1).enumerate() {
            // grid starts at −π: e^{−imφ_j} = (−1)^m e^{−2πimj/N}
            let x = if m % 2 == 1 { -x } else { *x };
            if m == 0 {
                cos.push(x.re / n as f64);
                sin.push(0.0);
            } else {
                cos.push(norm * x.re);
                sin.push(-norm * x.im);
            }
        }

        let scale = samples.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let even = (0..n).all(|j| (samples[j] - samples[(n - j) % n]).abs() <= 1e-12 * scale);
        Ok(PeriodicPotential {
            samples,
            cos,
            sin,
            even,
        })
    }

    pub fn n_grid(&self) -> usize {
        self.samples.len()
    }

    pub fn m_max(&self) -> usize {
        self.cos.len() - 1
    }

    pub fn grid(&self) -> Vec<f64> {
        phase_grid(self.samples.len())
    }

    /// Largest sine coefficient relative to the largest cosine coefficient.
    pub fn odd_content(&self) -> f64 {
        let even = self.cos.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let odd = self.sin.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if even == 0.0 {
            if odd == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            odd / even
        }
    }

    /// Truncated Fourier series at φ.
    pub fn reconstruct(&self, phi: f64) -> f64 {
        self.cos
            .iter()
            .zip(&self.sin)
            .enumerate()
            .map(|(m, (a, b))| {
                let x = m as f64 * phi;
                a * x.cos() + b * x.sin()
            })
            .sum()
    }

    /// Pointwise sum; both operands must share grid and harmonic order.
    pub fn sum(&self, other: &PeriodicPotential) -> Result<PeriodicPotential> {
        if self.samples.len() != other.samples.len() || self.cos.len() != other.cos.len() {
            return Err(Error::Validation(
                "potentials live on different grids".into(),
            ));
        }
        let add = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<_>>();
        Ok(PeriodicPotential {
            samples: add(&self.samples, &other.samples),
            cos: add(&self.cos, &other.cos),
            sin: add(&self.sin, &other.sin),
            even: self.even && other.even,
        })
    }
}
