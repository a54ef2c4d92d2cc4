//! Periodic cubic spline on a uniform grid.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicSpline {
    /// Values at x_i = −π + i·2π/n, i = 0..n.
    values: Vec<f64>,
    /// Second derivatives at the same nodes.
    curvature: Vec<f64>,
}

impl PeriodicSpline {
    /// `values` sampled at the `n` distinct nodes of one period starting at −π.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n < 3 {
            return Err(Error::Validation(format!(
                "a periodic spline needs at least 3 nodes, got {n}"
            )));
        }
        let h = TAU / n as f64;
        let rhs: Vec<f64> = (0..n)
            .map(|i| {
                let prev = values[(i + n - 1) % n];
                let next = values[(i + 1) % n];
                6.0 * (next - 2.0 * values[i] + prev) / (h * h)
            })
            .collect();
        let curvature = solve_cyclic(1.0, 4.0, 1.0, &rhs);
        Ok(PeriodicSpline { values, curvature })
    }

    pub fn nodes(&self) -> usize {
        self.values.len()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.values.len();
        let h = TAU / n as f64;
        let t = (x + PI).rem_euclid(TAU) / h;
        let i = (t.floor() as usize).min(n - 1);
        let a = t - i as f64;
        let b = 1.0 - a;
        let j = (i + 1) % n;
        let (y0, y1) = (self.values[i], self.values[j]);
        let (m0, m1) = (self.curvature[i], self.curvature[j]);
        b * y0 + a * y1 + h * h / 6.0 * ((b * b * b - b) * m0 + (a * a * a - a) * m1)
    }
}

/// Solves the cyclic system with constant sub-, main- and super-diagonal
/// (corner entries equal to the off-diagonals) by Sherman–Morrison.
fn solve_cyclic(lower: f64, diag: f64, upper: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let gamma = -diag;
    let mut main = vec![diag; n];
    main[0] = diag - gamma;
    main[n - 1] = diag - lower * upper / gamma;
    let x = thomas(lower, &main, upper, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = lower;
    let z = thomas(lower, &main, upper, &u);
    let factor = (x[0] + upper * x[n - 1] / gamma) / (1.0 + z[0] + upper * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - factor * zi).collect()
}

fn thomas(lower: f64, main: &[f64], upper: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper / main[0];
    d[0] = rhs[0] / main[0];
    for i in 1..n {
        let m = main[i] - lower * c[i - 1];
        c[i] = upper / m;
        d[i] = (rhs[i] - lower * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}
