//! Level classification, model comparison, harmonic tables and charge dispersion.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bo::{fast_ground_energy, BOPotential, BoVariant};
use crate::eigen::{eigensolve, solve_converged, LevelLabel, Spectrum};
use crate::error::{Error, Result};
use crate::hamiltonian::{
    build_single_mode, build_two_mode_full, build_two_mode_simplified_with, g_series,
};
use crate::models::{fast_hamiltonian_at_phi, transmon_operator, u_classical, ModelId};
use crate::numerics::Numerics;
use crate::operator::charge_of;
use crate::params::{DerivedParams, QubitParams};
use crate::potential::{phase_grid, sample_and_fourier, PeriodicPotential};

/// Levels requested from two-mode solves, enough for seven qubit excitations plus internal states.
pub const TWO_MODE_LEVELS: usize = 12;
/// Levels requested from single-mode solves.
pub const SINGLE_MODE_LEVELS: usize = 10;

const AMBIGUOUS_LOW: f64 = 0.45;
const AMBIGUOUS_HIGH: f64 = 0.55;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub labels: Vec<LevelLabel>,
    /// Weight of each state in the adiabatic ground channel of the internal mode.
    pub weights: Vec<f64>,
    /// Indices of states with weights in [0.45, 0.55].
    pub ambiguous: Vec<usize>,
}

/// Labels simplified two-mode eigenstates by their weight w = Σ_φ |⟨χ_0^φ|ψ(φ, ·)⟩|² in the
/// internal ground channel; w ≥ 0.5 is a qubit level.
pub fn classify_levels(spectrum: &Spectrum, p: &DerivedParams) -> Result<Classification> {
    let vectors = spectrum
        .eigenvectors
        .as_ref()
        .ok_or_else(|| Error::Validation("classification needs eigenvectors".into()))?;
    let n_cut = spectrum.n_cut_used;
    let w = 2 * n_cut + 1;
    if spectrum.dim != w * w {
        return Err(Error::Validation(
            "classification needs a two-mode spectrum".into(),
        ));
    }
    let grid = phase_grid(2 * w);
    let norm = 1.0 / (grid.len() as f64).sqrt();
    let channels = grid
        .iter()
        .map(|&x| {
            let s = eigensolve(&fast_hamiltonian_at_phi(x, p, p.n_big_g, n_cut)?, 1, true)?;
            Ok(s.eigenvectors.unwrap().swap_remove(0))
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let phases: Vec<Vec<Complex64>> = grid
        .iter()
        .map(|&x| {
            (0..w)
                .map(|i| Complex64::from_polar(norm, charge_of(i, n_cut) as f64 * x))
                .collect()
        })
        .collect();

    let weights: Vec<f64> = vectors
        .iter()
        .map(|v| {
            grid.iter()
                .enumerate()
                .map(|(j, _)| {
                    let overlap: Complex64 = (0..w)
                        .map(|big| {
                            let row = &v[big * w..(big + 1) * w];
                            let psi: Complex64 =
                                row.iter().zip(&phases[j]).map(|(c, e)| e * c).sum();
                            psi * channels[j][big]
                        })
                        .sum();
                    overlap.norm_sqr()
                })
                .sum()
        })
        .collect();

    let mut next = 0;
    let labels = weights
        .iter()
        .map(|&wt| {
            if wt >= 0.5 {
                next += 1;
                LevelLabel::Qubit(next - 1)
            } else {
                LevelLabel::InternalExcited
            }
        })
        .collect();
    let ambiguous = weights
        .iter()
        .enumerate()
        .filter(|(_, &wt)| (AMBIGUOUS_LOW..=AMBIGUOUS_HIGH).contains(&wt))
        .map(|(i, _)| i)
        .collect();
    Ok(Classification {
        labels,
        weights,
        ambiguous,
    })
}

/// A labelled two-mode spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoModeSpectrum {
    pub spectrum: Spectrum,
    pub classification: Classification,
}

impl TwoModeSpectrum {
    /// Position of the first internal excitation among the levels, if any was found.
    pub fn first_internal(&self) -> Option<usize> {
        self.spectrum
            .labels
            .iter()
            .position(|l| *l == LevelLabel::InternalExcited)
    }

    /// Number of qubit levels below the first internal excitation.
    pub fn qubit_levels_below_internal(&self) -> usize {
        let stop = self.first_internal().unwrap_or(self.spectrum.len());
        self.spectrum.labels[..stop]
            .iter()
            .filter(|l| matches!(l, LevelLabel::Qubit(_)))
            .count()
    }
}

fn simplified_labelled(
    p: &DerivedParams,
    n_levels: usize,
    numerics: &Numerics,
) -> Result<TwoModeSpectrum> {
    let g = g_series(p.lambda, numerics)?;
    let mut spectrum = solve_converged(
        &|n| build_two_mode_simplified_with(p, n, &g),
        n_levels,
        true,
        &numerics.two_mode_policy(),
    )?;
    let classification = classify_levels(&spectrum, p)?;
    spectrum.labels = classification.labels.clone();
    Ok(TwoModeSpectrum {
        spectrum,
        classification,
    })
}

/// Converged two-mode spectrum with qubit/internal labels.
///
/// Exact-model levels take the labels of the simplified model's levels with the same index.
pub fn two_mode_spectrum(
    model: ModelId,
    p: &DerivedParams,
    n_levels: usize,
    numerics: &Numerics,
) -> Result<TwoModeSpectrum> {
    let simplified = simplified_labelled(p, n_levels, numerics)?;
    match model {
        ModelId::SimplifiedTwoMode => Ok(simplified),
        ModelId::FullTwoMode => {
            let mut spectrum = solve_converged(
                &|n| build_two_mode_full(p, n),
                n_levels,
                false,
                &numerics.two_mode_policy(),
            )?;
            spectrum.labels = simplified.classification.labels.clone();
            Ok(TwoModeSpectrum {
                spectrum,
                classification: simplified.classification,
            })
        }
        other => Err(Error::Validation(format!(
            "{other} is not a two-mode model"
        ))),
    }
}

/// Converged spectrum of the classical single-mode model.
pub fn classical_spectrum(
    q: &QubitParams,
    n_levels: usize,
    with_vectors: bool,
    numerics: &Numerics,
) -> Result<Spectrum> {
    let pot = sample_and_fourier(
        |x| u_classical(x, q.lambda, q.e_j_sigma),
        numerics.fourier_grid,
        numerics.m_max,
    )?;
    solve_converged(
        &|n| build_single_mode(q.e_c, q.n_g, &pot, n),
        n_levels,
        with_vectors,
        &numerics.single_mode_policy(),
    )
}

/// Converged spectrum of a BO single-mode model.
pub fn bo_model_spectrum(
    p: &DerivedParams,
    variant: BoVariant,
    n_levels: usize,
    with_vectors: bool,
    numerics: &Numerics,
) -> Result<Spectrum> {
    let bo = BOPotential::build(p, variant, numerics)?;
    solve_converged(
        &|n| bo.hamiltonian(n),
        n_levels,
        with_vectors,
        &numerics.single_mode_policy(),
    )
}

/// Converged spectrum of any model; two-mode spectra are labelled.
pub fn model_spectrum(
    model: ModelId,
    p: &DerivedParams,
    n_levels: usize,
    numerics: &Numerics,
) -> Result<Spectrum> {
    match model {
        ModelId::FullTwoMode | ModelId::SimplifiedTwoMode => {
            Ok(two_mode_spectrum(model, p, n_levels, numerics)?.spectrum)
        }
        ModelId::Classical => classical_spectrum(&p.qubit(), n_levels, false, numerics),
        ModelId::BoAnalytic => bo_model_spectrum(p, BoVariant::Analytic, n_levels, false, numerics),
        ModelId::BoNumeric => bo_model_spectrum(p, BoVariant::Numeric, n_levels, false, numerics),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// δ_i = |E′_i − E_i| / E_i over qubit excitation energies, i = 1..
    pub delta: Vec<f64>,
    /// Δ_j = Σ_{i ≤ j} δ_i.
    pub cumulative: Vec<f64>,
    /// Set when fewer than the requested levels were available.
    pub warning: Option<String>,
}

impl ErrorReport {
    /// Δ_j for 1-based j.
    pub fn cumulative_at(&self, j: usize) -> Option<f64> {
        j.checked_sub(1)
            .and_then(|i| self.cumulative.get(i).copied())
    }
}

/// Relative errors of the candidate's qubit excitation energies against the reference's.
pub fn error_metrics(reference: &Spectrum, candidate: &Spectrum, j_max: usize) -> ErrorReport {
    let r = reference.qubit_excitations();
    let c = candidate.qubit_excitations();
    let n = j_max.min(r.len()).min(c.len());
    let delta: Vec<f64> = r
        .iter()
        .zip(&c)
        .take(n)
        .map(|(e, e2)| (e2 - e).abs() / e)
        .collect();
    let cumulative = delta
        .iter()
        .scan(0.0, |acc, d| {
            *acc += d;
            Some(*acc)
        })
        .collect();
    let warning = (n < j_max).then(|| {
        format!(
            "only {n} of {j_max} qubit excitations available (reference {}, candidate {})",
            r.len(),
            c.len()
        )
    });
    ErrorReport {
        delta,
        cumulative,
        warning,
    }
}

/// Exact reference and single-mode candidates at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelComparison {
    pub params: DerivedParams,
    pub reference: TwoModeSpectrum,
    pub candidates: Vec<(ModelId, Spectrum)>,
}

impl ModelComparison {
    pub fn report(&self, model: ModelId, j_max: usize) -> Option<ErrorReport> {
        self.candidates
            .iter()
            .find(|(id, _)| *id == model)
            .map(|(_, s)| error_metrics(&self.reference.spectrum, s, j_max))
    }
}

pub fn compare_models(
    p: &DerivedParams,
    candidates: &[ModelId],
    numerics: &Numerics,
) -> Result<ModelComparison> {
    let reference = two_mode_spectrum(ModelId::FullTwoMode, p, TWO_MODE_LEVELS, numerics)?;
    let candidates = candidates
        .iter()
        .map(|&id| Ok((id, model_spectrum(id, p, SINGLE_MODE_LEVELS, numerics)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ModelComparison {
        params: *p,
        reference,
        candidates,
    })
}

/// U_m / |U_1| for m = 2..=m_max.
pub fn harmonic_table(potential: &PeriodicPotential, m_max: usize) -> Result<Vec<f64>> {
    if m_max > potential.m_max() {
        return Err(Error::Validation(format!(
            "potential carries harmonics up to {}, requested {m_max}",
            potential.m_max()
        )));
    }
    let u1 = potential.cos.get(1).copied().unwrap_or(0.0);
    let largest = potential.cos[1..]
        .iter()
        .fold(0.0f64, |a, v| a.max(v.abs()));
    if u1.abs() <= 1e-14 * largest || u1 == 0.0 {
        return Err(Error::Normalization { u1 });
    }
    Ok((2..=m_max).map(|m| potential.cos[m] / u1.abs()).collect())
}

/// Peak-to-peak E_01 dispersion of a single cosine transmon over its offset charge.
pub fn transmon_reference(e_c: f64, e_j: f64, numerics: &Numerics) -> Result<f64> {
    if e_c <= 0.0 || e_j < 0.0 {
        return Err(Error::Domain(format!(
            "transmon needs E_C > 0 and E_J ≥ 0, got {e_c}, {e_j}"
        )));
    }
    let policy = numerics.single_mode_policy();
    let probe = solve_converged(
        &|n| transmon_operator(e_c, e_j, 0.0, n, false),
        2,
        false,
        &policy,
    )?;
    let e01 = |n_g: f64| -> Result<f64> {
        let s = eigensolve(
            &transmon_operator(e_c, e_j, n_g, probe.n_cut_used, false)?,
            2,
            false,
        )?;
        Ok(s.eigenvalues[1] - s.eigenvalues[0])
    };
    Ok((e01(0.5)? - e01(0.0)?).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DispersionTarget {
    /// Qubit E_0, E_1 of the exact two-mode model, with N_g applied as a gate charge on the island.
    FullTwoMode,
    /// E_0, E_1 of the BO model with the numeric correction solved at each N_g.
    BoNumeric,
    /// Internal ground state at φ = 0.
    FastOnly,
}

impl DispersionTarget {
    pub fn as_str(&self) -> &'static str {
        match self {
            DispersionTarget::FullTwoMode => "full-two-mode",
            DispersionTarget::BoNumeric => "bo-numeric",
            DispersionTarget::FastOnly => "fast-only",
        }
    }
}

impl fmt::Display for DispersionTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DispersionTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" | "full-two-mode" => Ok(DispersionTarget::FullTwoMode),
            "bo-numeric" => Ok(DispersionTarget::BoNumeric),
            "fast" | "fast-only" => Ok(DispersionTarget::FastOnly),
            _ => Err(Error::Validation(format!(
                "unknown dispersion model `{s}` (expected one of full-two-mode, bo-numeric, fast-only)"
            ))),
        }
    }
}

/// Energies as functions of the internal offset charge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionCurves {
    pub target: DispersionTarget,
    pub n_big_g: Vec<f64>,
    /// One curve per tracked level, each aligned with `n_big_g`.
    pub levels: Vec<Vec<f64>>,
    pub n_cut_used: usize,
}

/// Tracks the lowest levels of `target` over `grid` (values of N_g).
///
/// All points share one cutoff, fixed by converging at N_g = 0, so that differences between
/// points are free of truncation changes.
pub fn dispersion_sweep(
    target: DispersionTarget,
    p: &DerivedParams,
    grid: &[f64],
    numerics: &Numerics,
) -> Result<DispersionCurves> {
    if grid.iter().any(|g| !g.is_finite()) {
        return Err(Error::Validation("offset grid must be finite".into()));
    }
    let at = |n_big_g: f64| p.with_mode_offsets(p.n_g, n_big_g);
    let (rows, n_cut_used): (Vec<Vec<f64>>, usize) = match target {
        DispersionTarget::FastOnly => {
            let policy = numerics.single_mode_policy();
            let probe = solve_converged(
                &|n| fast_hamiltonian_at_phi(0.0, &at(0.0), 0.0, n),
                1,
                false,
                &policy,
            )?;
            let n_cut = probe.n_cut_used + policy.n_cut_step;
            let rows = grid
                .par_iter()
                .map(|&ng| {
                    Ok(vec![
                        eigensolve(&fast_hamiltonian_at_phi(0.0, p, ng, n_cut)?, 1, false)?
                            .eigenvalues[0],
                    ])
                })
                .collect::<Result<Vec<_>>>()?;
            (rows, n_cut)
        }
        DispersionTarget::FullTwoMode => {
            let base = at(0.0);
            // a gate charge on the island between the junctions shifts n1 only
            let at = |n_big_g: f64| base.with_junction_offsets(base.n_g1 + n_big_g, base.n_g2);
            let labelled = two_mode_spectrum(ModelId::FullTwoMode, &base, 4, numerics)?;
            let qubit: Vec<usize> = labelled
                .spectrum
                .labels
                .iter()
                .enumerate()
                .filter(|(_, l)| matches!(l, LevelLabel::Qubit(0) | LevelLabel::Qubit(1)))
                .map(|(i, _)| i)
                .collect();
            if qubit.len() < 2 {
                return Err(Error::Numeric(
                    "fewer than two qubit levels among the lowest four states".into(),
                ));
            }
            let n_levels = qubit[1] + 1;
            let n_cut = labelled.spectrum.n_cut_used;
            let rows = grid
                .par_iter()
                .map(|&ng| {
                    let s = eigensolve(&build_two_mode_full(&at(ng), n_cut)?, n_levels, false)?;
                    Ok(qubit.iter().map(|&i| s.eigenvalues[i]).collect())
                })
                .collect::<Result<Vec<_>>>()?;
            (rows, n_cut)
        }
        DispersionTarget::BoNumeric => {
            let policy = numerics.single_mode_policy();
            let base = BOPotential::build(&at(0.0), BoVariant::Numeric, numerics)?;
            let probe = solve_converged(&|n| base.hamiltonian(n), 2, false, &policy)?;
            let n_cut = probe.n_cut_used;
            let rows = grid
                .par_iter()
                .map(|&ng| {
                    let bo = BOPotential::build(&at(ng), BoVariant::Numeric, numerics)?;
                    Ok(eigensolve(&bo.hamiltonian(n_cut)?, 2, false)?.eigenvalues)
                })
                .collect::<Result<Vec<_>>>()?;
            (rows, n_cut)
        }
    };
    let width = rows.first().map_or(0, |r| r.len());
    let levels = (0..width)
        .map(|l| rows.iter().map(|r| r[l]).collect())
        .collect();
    Ok(DispersionCurves {
        target,
        n_big_g: grid.to_vec(),
        levels,
        n_cut_used,
    })
}

/// Peak-to-peak dispersion of the exact qubit transition, |E_01(N_g = 1/2) − E_01(0)|.
pub fn full_qubit_dispersion(p: &DerivedParams, numerics: &Numerics) -> Result<f64> {
    let c = dispersion_sweep(DispersionTarget::FullTwoMode, p, &[0.0, 0.5], numerics)?;
    let e01 = |i: usize| c.levels[1][i] - c.levels[0][i];
    Ok((e01(1) - e01(0)).abs())
}

/// Fast-mode dispersion at φ = 0 from two direct solves.
pub fn internal_dispersion(p: &DerivedParams, numerics: &Numerics) -> Result<f64> {
    Ok(fast_ground_energy(0.0, p, 0.5, numerics)? - fast_ground_energy(0.0, p, 0.0, numerics)?)
}
