//! Real symmetric operators over truncated integer-charge lattices.
//!
//! One or two periodic modes, each with charges n ∈ [−n_cut, n_cut]. For two
//! modes the flat index is `major · (2 n_cut + 1) + minor`. Entries are kept
//! in full band storage so that both triangles can be compared.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargeBasisOperator {
    cutoffs: Vec<usize>,
    dim: usize,
    kd: usize,
    /// Column-major band: A[r][c] at `(kd + r - c) + c * (2 kd + 1)`.
    band: Vec<f64>,
}

/// Charge value of a position on a single-mode lattice with cutoff `n_cut`.
#[inline]
pub fn charge_of(index: usize, n_cut: usize) -> i64 {
    index as i64 - n_cut as i64
}

impl ChargeBasisOperator {
    /// Evaluates `element(row, col)` for every pair within `kd` of the diagonal.
    pub fn from_elements<F>(cutoffs: &[usize], kd: usize, mut element: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> f64,
    {
        if cutoffs.is_empty() || cutoffs.len() > 2 {
            return Err(Error::Validation(format!(
                "operators have one or two modes, got {}",
                cutoffs.len()
            )));
        }
        let dim: usize = cutoffs.iter().map(|&c| 2 * c + 1).product();
        let kd = kd.min(dim - 1);
        let ld = 2 * kd + 1;
        let mut band = vec![0.0; ld * dim];
        for c in 0..dim {
            let lo = c.saturating_sub(kd);
            let hi = (c + kd).min(dim - 1);
            for r in lo..=hi {
                let v = element(r, c);
                if !v.is_finite() {
                    return Err(Error::Numeric(format!("operator entry ({r}, {c}) is {v}")));
                }
                band[kd + r - c + c * ld] = v;
            }
        }
        Ok(ChargeBasisOperator {
            cutoffs: cutoffs.to_vec(),
            dim,
            kd,
            band,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn half_bandwidth(&self) -> usize {
        self.kd
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        if r.abs_diff(c) > self.kd {
            0.0
        } else {
            self.band[self.kd + r - c + c * (2 * self.kd + 1)]
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.get(r, c)).collect())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.band.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    /// max |A − Aᵀ|.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for c in 0..self.dim {
            for r in c + 1..=(c + self.kd).min(self.dim - 1) {
                worst = worst.max((self.get(r, c) - self.get(c, r)).abs());
            }
        }
        worst
    }

    /// Lower band in LAPACK layout (`ldab = kd + 1`).
    pub(crate) fn lower_band(&self) -> Vec<f64> {
        let ldab = self.kd + 1;
        let mut ab = vec![0.0; ldab * self.dim];
        for c in 0..self.dim {
            for r in c..=(c + self.kd).min(self.dim - 1) {
                ab[(r - c) + c * ldab] = self.get(r, c);
            }
        }
        ab
    }

    /// Applies the operator to a vector.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let ld = 2 * self.kd + 1;
        let mut y = vec![0.0; self.dim];
        for (c, &xc) in x.iter().enumerate() {
            let lo = c.saturating_sub(self.kd);
            let hi = (c + self.kd).min(self.dim - 1);
            let col = &self.band[c * ld + self.kd + lo - c..=c * ld + self.kd + hi - c];
            y[lo..=hi]
                .iter_mut()
                .zip(col)
                .for_each(|(yr, a)| *yr += a * xc);
        }
        y
    }
}
