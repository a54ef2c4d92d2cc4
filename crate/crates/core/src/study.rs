//! Named figure-reproduction studies and their tabular output.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    bo_model_spectrum, classical_spectrum, compare_models, dispersion_sweep, full_qubit_dispersion,
    harmonic_table, transmon_reference, two_mode_spectrum, DispersionTarget, ModelComparison,
    TWO_MODE_LEVELS,
};
use crate::bo::{classical_potential, eps01_model, u_disp, BOPotential, BoVariant};
use crate::eigen::solve_converged;
use crate::error::{Error, Result};
use crate::hamiltonian::{build_two_mode_full, build_two_mode_simplified_with, g_series};
use crate::models::{ej_eff_slow, theta_min, u_classical, u_prime, ModelId};
use crate::numerics::Numerics;
use crate::params::{build_constrained_sweep, DerivedParams, SweepAnchor, SweepKind};
use crate::potential::{phase_grid, sample_and_fourier};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StudyId {
    #[serde(rename = "fig1d")]
    Fig1d,
    #[serde(rename = "fig1e")]
    Fig1e,
    #[serde(rename = "fig2c")]
    Fig2c,
    #[serde(rename = "fig2d")]
    Fig2d,
    #[serde(rename = "fig3a")]
    Fig3a,
    #[serde(rename = "fig3b")]
    Fig3b,
    #[serde(rename = "fig3c")]
    Fig3c,
    #[serde(rename = "fig3d")]
    Fig3d,
    #[serde(rename = "fig4a")]
    Fig4a,
    #[serde(rename = "fig4bc")]
    Fig4bc,
    #[serde(rename = "fig5a")]
    Fig5a,
    #[serde(rename = "fig5b")]
    Fig5b,
    #[serde(rename = "fig5c")]
    Fig5c,
    #[serde(rename = "fig5d")]
    Fig5d,
    #[serde(rename = "figA1")]
    FigA1,
    #[serde(rename = "figA2")]
    FigA2,
}

impl StudyId {
    pub const ALL: [StudyId; 16] = [
        StudyId::Fig1d,
        StudyId::Fig1e,
        StudyId::Fig2c,
        StudyId::Fig2d,
        StudyId::Fig3a,
        StudyId::Fig3b,
        StudyId::Fig3c,
        StudyId::Fig3d,
        StudyId::Fig4a,
        StudyId::Fig4bc,
        StudyId::Fig5a,
        StudyId::Fig5b,
        StudyId::Fig5c,
        StudyId::Fig5d,
        StudyId::FigA1,
        StudyId::FigA2,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            StudyId::Fig1d => "fig1d",
            StudyId::Fig1e => "fig1e",
            StudyId::Fig2c => "fig2c",
            StudyId::Fig2d => "fig2d",
            StudyId::Fig3a => "fig3a",
            StudyId::Fig3b => "fig3b",
            StudyId::Fig3c => "fig3c",
            StudyId::Fig3d => "fig3d",
            StudyId::Fig4a => "fig4a",
            StudyId::Fig4bc => "fig4bc",
            StudyId::Fig5a => "fig5a",
            StudyId::Fig5b => "fig5b",
            StudyId::Fig5c => "fig5c",
            StudyId::Fig5d => "fig5d",
            StudyId::FigA1 => "figA1",
            StudyId::FigA2 => "figA2",
        }
    }

    pub fn valid_ids() -> String {
        StudyId::ALL
            .iter()
            .map(|s| s.as_str())
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for StudyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StudyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StudyId::ALL
            .iter()
            .copied()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownStudy {
                id: s.to_string(),
                valid: StudyId::valid_ids(),
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColumnData {
    Number(Vec<f64>),
    Text(Vec<String>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Number(v) => v.len(),
            ColumnData::Text(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub data: ColumnData,
}

impl Column {
    pub fn number(name: impl Into<String>, values: Vec<f64>) -> Self {
        Column {
            name: name.into(),
            data: ColumnData::Number(values),
        }
    }

    pub fn text(name: impl Into<String>, values: Vec<String>) -> Self {
        Column {
            name: name.into(),
            data: ColumnData::Text(values),
        }
    }
}

/// Parameters and cutoff behind one row or curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub label: String,
    pub params: DerivedParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_cut_used: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub id: StudyId,
    /// Name of the first column, the swept quantity.
    pub axis: String,
    pub columns: Vec<Column>,
    pub provenance: Vec<Provenance>,
}

impl StudyResult {
    pub fn new(id: StudyId, columns: Vec<Column>, provenance: Vec<Provenance>) -> Result<Self> {
        validate_columns(id.as_str(), &columns)?;
        let axis = columns.first().map(|c| c.name.clone()).unwrap_or_default();
        Ok(StudyResult {
            id,
            axis,
            columns,
            provenance,
        })
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.data.len())
    }

    pub fn header(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    /// Numeric column by name.
    pub fn values(&self, name: &str) -> Option<&[f64]> {
        match self.column(name).map(|c| &c.data) {
            Some(ColumnData::Number(v)) => Some(v),
            _ => None,
        }
    }

    /// CSV with a header row; numbers in scientific notation with 12 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_columns_csv(&self.columns, out)
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        out.write_all(b"\n")?;
        Ok(())
    }
}

/// Equal column lengths and finite numbers; `label` names the table in errors.
pub fn validate_columns(label: &str, columns: &[Column]) -> Result<()> {
    let rows = columns.first().map_or(0, |c| c.data.len());
    if let Some(bad) = columns.iter().find(|c| c.data.len() != rows) {
        return Err(Error::Numeric(format!(
            "{label}: column `{}` has {} rows, expected {rows}",
            bad.name,
            bad.data.len()
        )));
    }
    for c in columns {
        if let ColumnData::Number(v) = &c.data {
            if let Some(i) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::Numeric(format!(
                    "{label}: column `{}` row {i} is {}",
                    c.name, v[i]
                )));
            }
        }
    }
    Ok(())
}

/// Header row, then one record per row; numbers through [`format_number`].
pub fn write_columns_csv<W: Write>(columns: &[Column], out: W) -> Result<()> {
    let rows = columns.first().map_or(0, |c| c.data.len());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns.iter().map(|c| c.name.as_str()))?;
    for r in 0..rows {
        let record: Vec<String> = columns
            .iter()
            .map(|c| match &c.data {
                ColumnData::Number(v) => format_number(v[r]),
                ColumnData::Text(v) => Ok(v[r].clone()),
            })
            .collect::<Result<_>>()?;
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// `{:.11e}`, refusing non-finite values; negative zero prints as zero.
pub fn format_number(x: f64) -> Result<String> {
    if x.is_finite() {
        Ok(format!("{:.11e}", x + 0.0))
    } else {
        Err(Error::Numeric(format!(
            "refusing to write non-finite value {x}"
        )))
    }
}

/// λ grid of the asymmetry sweeps: 26 points on [0.5, 1].
pub fn lambda_grid() -> Vec<f64> {
    (0..26).map(|i| 0.5 + 0.02 * i as f64).collect()
}

/// Log-spaced E_JΣ/E_C_int grid: 25 points on [8, 64].
pub fn ratio_grid() -> Vec<f64> {
    (0..25).map(|i| 8.0 * 8f64.powf(i as f64 / 24.0)).collect()
}

/// Capacitance asymmetry grid: 25 points on [0, 0.6].
pub fn k_grid() -> Vec<f64> {
    (0..25).map(|i| 0.025 * i as f64).collect()
}

/// Internal offset grid: 41 points on [0, 1].
pub fn offset_grid() -> Vec<f64> {
    (0..41).map(|i| 0.025 * i as f64).collect()
}

/// λ grid of the classical harmonic table: 0.05, 0.10, …, 1.
pub fn harmonic_lambda_grid() -> Vec<f64> {
    (1..=20).map(|i| 0.05 * i as f64).collect()
}

/// Cumulative levels plotted against the sweeps.
pub const SWEEP_LEVELS: usize = 3;
/// Levels of the star-configuration breakdown panel.
pub const STAR_LEVELS: usize = 7;
/// Internal-to-Josephson ratios of the dispersion-potential curves.
pub const DISPERSION_CURVE_RATIOS: [f64; 3] = [8.0, 16.0, 32.0];
/// Asymmetries of the potential-line curves.
pub const LINE_LAMBDAS: [f64; 4] = [0.5, 0.75, 0.9, 1.0];
/// Asymmetries of the potential-comparison panels.
pub const CORRECTION_LAMBDAS: [f64; 2] = [0.5, 1.0];
/// Ratio of the offset-charge panel.
pub const OFFSET_PANEL_RATIO: f64 = 8.0;

fn provenance(
    label: impl Into<String>,
    params: &DerivedParams,
    n_cut_used: Option<usize>,
) -> Provenance {
    Provenance {
        label: label.into(),
        params: *params,
        n_cut_used,
    }
}

/// Column-major table from per-point rows.
fn transpose(rows: &[Vec<f64>], width: usize) -> Vec<Vec<f64>> {
    (0..width)
        .map(|c| rows.iter().map(|r| r[c]).collect())
        .collect()
}

fn anchored(kind: SweepKind, grid: &[f64], anchor: SweepAnchor) -> Result<Vec<DerivedParams>> {
    grid.iter().map(|&v| anchor.sweep_point(kind, v)).collect()
}

fn cumulative(c: &ModelComparison, model: ModelId, j: usize) -> Result<f64> {
    c.report(model, j)
        .and_then(|r| r.cumulative_at(j))
        .ok_or_else(|| Error::Numeric(format!("no Δ_{j} for {model} at λ = {}", c.params.lambda)))
}

pub fn reproduce_study(id: StudyId, numerics: &Numerics) -> Result<StudyResult> {
    numerics.validate()?;
    match id {
        StudyId::Fig1d => fig1d(numerics),
        StudyId::Fig1e => fig1e(numerics),
        StudyId::Fig2c => fig2c(numerics),
        StudyId::Fig2d => fig2d(numerics),
        StudyId::Fig3a => fig3a(numerics),
        StudyId::Fig3b => accuracy_sweep(id, SweepKind::LambdaSweep, &lambda_grid(), numerics),
        StudyId::Fig3c => accuracy_sweep(id, SweepKind::RatioSweep, &ratio_grid(), numerics),
        StudyId::Fig3d => accuracy_sweep(id, SweepKind::KSweep, &k_grid(), numerics),
        StudyId::Fig4a => fig4a(numerics),
        StudyId::Fig4bc => fig4bc(numerics),
        StudyId::Fig5a => fig5a(numerics),
        StudyId::Fig5b => fig5b(numerics),
        StudyId::Fig5c => fig5c(numerics),
        StudyId::Fig5d => fig5d(numerics),
        StudyId::FigA1 => fig_a1(numerics),
        StudyId::FigA2 => fig_a2(numerics),
    }
}

fn fig1d(numerics: &Numerics) -> Result<StudyResult> {
    let grid = harmonic_lambda_grid();
    let points = build_constrained_sweep(SweepKind::LambdaSweep, &grid)?;
    let rows = points
        .par_iter()
        .map(|p| {
            let pot = classical_potential(p, numerics.fourier_grid, numerics.m_max)?;
            harmonic_table(&pot, 4)
        })
        .collect::<Result<Vec<_>>>()?;
    let cols = transpose(&rows, 3);
    let mut columns = vec![Column::number("lambda", grid)];
    for (m, c) in (2..=4).zip(cols) {
        columns.push(Column::number(format!("U{m}_ratio"), c));
    }
    let prov = points
        .iter()
        .map(|p| provenance(format!("lambda={}", p.lambda), p, None))
        .collect();
    StudyResult::new(StudyId::Fig1d, columns, prov)
}

fn fig1e(numerics: &Numerics) -> Result<StudyResult> {
    let p = SweepAnchor::BALANCED.params()?;
    let full = two_mode_spectrum(ModelId::FullTwoMode, &p, TWO_MODE_LEVELS, numerics)?;
    let classical = classical_spectrum(&p.qubit(), STAR_LEVELS + 1, false, numerics)?;
    let bo = bo_model_spectrum(&p, BoVariant::Analytic, STAR_LEVELS + 1, false, numerics)?;
    let full_q = full.spectrum.qubit_excitations();
    let n = STAR_LEVELS.min(full_q.len());
    let internal = full
        .first_internal()
        .map(|i| full.spectrum.excitations[i])
        .ok_or_else(|| Error::Numeric("no internal excitation among the computed levels".into()))?;
    let columns = vec![
        Column::number("j", (1..=n).map(|j| j as f64).collect()),
        Column::number("E_classical", classical.excitations[1..=n].to_vec()),
        Column::number("E_full", full_q[..n].to_vec()),
        Column::number("E_bo", bo.excitations[1..=n].to_vec()),
        Column::number("E_internal", vec![internal; n]),
    ];
    StudyResult::new(
        StudyId::Fig1e,
        columns,
        vec![provenance("balanced", &p, Some(full.spectrum.n_cut_used))],
    )
}

fn fig2c(numerics: &Numerics) -> Result<StudyResult> {
    let grid = phase_grid(numerics.plot_grid);
    let points = build_constrained_sweep(SweepKind::LambdaSweep, &LINE_LAMBDAS)?;
    let mut columns = vec![Column::number("phi", grid.clone())];
    let mut prov = Vec::new();
    for p in &points {
        let scale = p.e_j_sigma;
        let min: Vec<f64> = grid
            .iter()
            .map(|&x| u_prime(x, theta_min(x, p), p) / scale)
            .collect();
        let max: Vec<f64> = grid
            .iter()
            .map(|&x| u_prime(x, theta_min(x, p) + std::f64::consts::PI, p) / scale)
            .collect();
        columns.push(Column::number(format!("min_lambda_{}", p.lambda), min));
        columns.push(Column::number(format!("max_lambda_{}", p.lambda), max));
        prov.push(provenance(format!("lambda={}", p.lambda), p, None));
    }
    StudyResult::new(StudyId::Fig2c, columns, prov)
}

/// δ_i of the simplified against the exact two-mode model over the lowest levels.
pub fn simplified_fidelity(
    p: &DerivedParams,
    levels: usize,
    numerics: &Numerics,
) -> Result<(Vec<f64>, usize)> {
    let policy = numerics.two_mode_policy();
    let g = g_series(p.lambda, numerics)?;
    let simple = solve_converged(
        &|n| build_two_mode_simplified_with(p, n, &g),
        levels + 1,
        false,
        &policy,
    )?;
    let full = solve_converged(&|n| build_two_mode_full(p, n), levels + 1, false, &policy)?;
    let delta = (1..=levels)
        .map(|i| (simple.excitations[i] - full.excitations[i]).abs() / full.excitations[i])
        .collect();
    Ok((delta, full.n_cut_used.max(simple.n_cut_used)))
}

fn fig2d(numerics: &Numerics) -> Result<StudyResult> {
    let grid = lambda_grid();
    let points = build_constrained_sweep(SweepKind::LambdaSweep, &grid)?;
    let rows = points
        .par_iter()
        .map(|p| simplified_fidelity(p, SWEEP_LEVELS, numerics))
        .collect::<Result<Vec<_>>>()?;
    let deltas: Vec<Vec<f64>> = rows.iter().map(|(d, _)| d.clone()).collect();
    let mut columns = vec![Column::number("lambda", grid)];
    for (i, c) in transpose(&deltas, SWEEP_LEVELS).into_iter().enumerate() {
        columns.push(Column::number(format!("delta_{}", i + 1), c));
    }
    let prov = points
        .iter()
        .zip(&rows)
        .map(|(p, (_, n))| provenance(format!("lambda={}", p.lambda), p, Some(*n)))
        .collect();
    StudyResult::new(StudyId::Fig2d, columns, prov)
}

fn fig3a(numerics: &Numerics) -> Result<StudyResult> {
    let p = SweepAnchor::STAR.params()?;
    let c = compare_models(&p, &[ModelId::Classical, ModelId::BoAnalytic], numerics)?;
    let below = c.reference.qubit_levels_below_internal();
    let js: Vec<usize> = (1..=STAR_LEVELS).collect();
    let series = |m: ModelId| {
        js.iter()
            .map(|&j| cumulative(&c, m, j))
            .collect::<Result<Vec<f64>>>()
    };
    let columns = vec![
        Column::number("j", js.iter().map(|&j| j as f64).collect()),
        Column::number("Delta_classical", series(ModelId::Classical)?),
        Column::number("Delta_bo", series(ModelId::BoAnalytic)?),
        Column::number(
            "above_internal",
            js.iter()
                .map(|&j| if j >= below { 1.0 } else { 0.0 })
                .collect(),
        ),
    ];
    StudyResult::new(
        StudyId::Fig3a,
        columns,
        vec![provenance(
            "star",
            &p,
            Some(c.reference.spectrum.n_cut_used),
        )],
    )
}

fn sweep_axis(kind: SweepKind) -> &'static str {
    match kind {
        SweepKind::LambdaSweep => "lambda",
        SweepKind::RatioSweep => "ratio",
        SweepKind::KSweep => "k",
    }
}

fn accuracy_sweep(
    id: StudyId,
    kind: SweepKind,
    grid: &[f64],
    numerics: &Numerics,
) -> Result<StudyResult> {
    let points = build_constrained_sweep(kind, grid)?;
    let rows = points
        .par_iter()
        .map(|p| {
            let c = compare_models(p, &[ModelId::Classical, ModelId::BoAnalytic], numerics)?;
            Ok((
                vec![
                    cumulative(&c, ModelId::Classical, SWEEP_LEVELS)?,
                    cumulative(&c, ModelId::BoAnalytic, SWEEP_LEVELS)?,
                ],
                c.reference.spectrum.n_cut_used,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<Vec<f64>> = rows.iter().map(|(v, _)| v.clone()).collect();
    let cols = transpose(&values, 2);
    let columns = vec![
        Column::number(sweep_axis(kind), grid.to_vec()),
        Column::number("Delta3_classical", cols[0].clone()),
        Column::number("Delta3_bo", cols[1].clone()),
    ];
    let prov = points
        .iter()
        .zip(grid)
        .zip(&rows)
        .map(|((p, x), (_, n))| provenance(format!("{}={x}", sweep_axis(kind)), p, Some(*n)))
        .collect();
    StudyResult::new(id, columns, prov)
}

fn fig4a(numerics: &Numerics) -> Result<StudyResult> {
    let grid = lambda_grid();
    let points = build_constrained_sweep(SweepKind::LambdaSweep, &grid)?;
    let rows = points
        .par_iter()
        .map(|p| {
            let bo = BOPotential::build(p, BoVariant::Analytic, numerics)?;
            let mut row = harmonic_table(&bo.classical, 4)?;
            row.extend(harmonic_table(&bo.u_bo, 4)?);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let cols = transpose(&rows, 6);
    let mut columns = vec![Column::number("lambda", grid)];
    let names = [
        "U2_classical",
        "U3_classical",
        "U4_classical",
        "U2_bo",
        "U3_bo",
        "U4_bo",
    ];
    for (name, c) in names.iter().zip(cols) {
        columns.push(Column::number(*name, c));
    }
    let prov = points
        .iter()
        .map(|p| provenance(format!("lambda={}", p.lambda), p, None))
        .collect();
    StudyResult::new(StudyId::Fig4a, columns, prov)
}

fn fig4bc(numerics: &Numerics) -> Result<StudyResult> {
    let grid = phase_grid(numerics.plot_grid);
    let points = build_constrained_sweep(SweepKind::LambdaSweep, &CORRECTION_LAMBDAS)?;
    let mut columns = vec![Column::number("phi", grid.clone())];
    let mut prov = Vec::new();
    for p in &points {
        let bo = BOPotential::build(p, BoVariant::Analytic, numerics)?;
        let classical: Vec<f64> = grid
            .iter()
            .map(|&x| u_classical(x, p.lambda, p.e_j_sigma))
            .collect();
        let corr: Vec<f64> = grid.iter().map(|&x| bo.corr_at(x)).collect();
        let total: Vec<f64> = classical.iter().zip(&corr).map(|(a, b)| a + b).collect();
        columns.push(Column::number(
            format!("classical_lambda_{}", p.lambda),
            classical,
        ));
        columns.push(Column::number(format!("bo_lambda_{}", p.lambda), total));
        columns.push(Column::number(format!("corr_lambda_{}", p.lambda), corr));
        prov.push(provenance(format!("lambda={}", p.lambda), p, None));
    }
    StudyResult::new(StudyId::Fig4bc, columns, prov)
}

/// Fixed E_C, λ = 1 and E_JΣ of the dispersion figures at a given E_JΣ/E_C_int.
pub fn dispersion_params(ratio: f64) -> Result<DerivedParams> {
    SweepAnchor::BALANCED.sweep_point(SweepKind::RatioSweep, ratio)
}

fn fig5a(numerics: &Numerics) -> Result<StudyResult> {
    let p = dispersion_params(OFFSET_PANEL_RATIO)?;
    let grid = offset_grid();
    let fast = dispersion_sweep(DispersionTarget::FastOnly, &p, &grid, numerics)?;
    let full = dispersion_sweep(DispersionTarget::FullTwoMode, &p, &grid, numerics)?;
    let columns = vec![
        Column::number("Ng", grid),
        Column::number("internal_E0", fast.levels[0].clone()),
        Column::number("qubit_E0", full.levels[0].clone()),
        Column::number("qubit_E1", full.levels[1].clone()),
    ];
    let prov = vec![
        provenance("fast-only", &p, Some(fast.n_cut_used)),
        provenance("full-two-mode", &p, Some(full.n_cut_used)),
    ];
    StudyResult::new(StudyId::Fig5a, columns, prov)
}

fn fig5b(numerics: &Numerics) -> Result<StudyResult> {
    let grid = phase_grid(numerics.plot_grid);
    let mut columns = vec![Column::number("phi", grid.clone())];
    let mut prov = Vec::new();
    for r in DISPERSION_CURVE_RATIOS {
        let p = dispersion_params(r)?;
        columns.push(Column::number(
            format!("U_disp_r{r}"),
            grid.iter().map(|&x| u_disp(x, &p)).collect(),
        ));
        prov.push(provenance(format!("ratio={r}"), &p, None));
    }
    StudyResult::new(StudyId::Fig5b, columns, prov)
}

/// Transmon with the qubit charging energy and Josephson energy λE_JΣ/4.
pub fn transmon_for(p: &DerivedParams, numerics: &Numerics) -> Result<f64> {
    transmon_reference(p.e_c, ej_eff_slow(p.lambda, p.e_j_sigma), numerics)
}

fn fig5c(numerics: &Numerics) -> Result<StudyResult> {
    let grid = ratio_grid();
    let points = grid
        .iter()
        .map(|&r| dispersion_params(r))
        .collect::<Result<Vec<_>>>()?;
    let transmon = transmon_for(&points[0], numerics)?;
    let rows = points
        .par_iter()
        .map(|p| {
            let model = eps01_model(p, numerics)?;
            Ok((
                vec![full_qubit_dispersion(p, numerics)?, model.eps01_model.abs()],
                model.n_cut_used,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<Vec<f64>> = rows.iter().map(|(v, _)| v.clone()).collect();
    let cols = transpose(&values, 2);
    let columns = vec![
        Column::number("ratio", grid.clone()),
        Column::number("eps01_full", cols[0].clone()),
        Column::number("eps01_model", cols[1].clone()),
        Column::number("eps01_transmon", vec![transmon; grid.len()]),
    ];
    let prov = points
        .iter()
        .zip(&grid)
        .zip(&rows)
        .map(|((p, r), (_, n))| provenance(format!("ratio={r}"), p, Some(*n)))
        .collect();
    StudyResult::new(StudyId::Fig5c, columns, prov)
}

/// |U_m| of U_disp in GHz for m = 1..=4.
pub fn dispersion_harmonics(p: &DerivedParams, numerics: &Numerics) -> Result<Vec<f64>> {
    let pot = sample_and_fourier(|x| u_disp(x, p), numerics.fourier_grid, numerics.m_max)?;
    Ok(pot.cos[1..=4].iter().map(|c| c.abs()).collect())
}

/// |U_m| of U_disp over |U_1| of the qubit's BO potential, m = 1..=4.
pub fn relative_dispersion_harmonics(p: &DerivedParams, numerics: &Numerics) -> Result<Vec<f64>> {
    let bo = BOPotential::build(p, BoVariant::Analytic, numerics)?;
    let u1 = bo.u_bo.cos[1].abs();
    if u1 == 0.0 {
        return Err(Error::Normalization { u1 });
    }
    Ok(dispersion_harmonics(p, numerics)?
        .into_iter()
        .map(|c| c / u1)
        .collect())
}

fn fig5d(numerics: &Numerics) -> Result<StudyResult> {
    let grid = ratio_grid();
    let points = grid
        .iter()
        .map(|&r| dispersion_params(r))
        .collect::<Result<Vec<_>>>()?;
    let rows = points
        .par_iter()
        .map(|p| {
            let mut row = dispersion_harmonics(p, numerics)?;
            row.extend(relative_dispersion_harmonics(p, numerics)?);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut columns = vec![Column::number("ratio", grid.clone())];
    let cols = transpose(&rows, 8);
    for (i, c) in cols.into_iter().enumerate() {
        let name = if i < 4 {
            format!("abs_U{}", i + 1)
        } else {
            format!("rel_U{}", i - 3)
        };
        columns.push(Column::number(name, c));
    }
    let prov = points
        .iter()
        .zip(&grid)
        .map(|(p, r)| provenance(format!("ratio={r}"), p, None))
        .collect();
    StudyResult::new(StudyId::Fig5d, columns, prov)
}

/// Star-configuration panel followed by the three constrained sweeps.
fn panels() -> Result<Vec<(&'static str, f64, DerivedParams)>> {
    let mut out = Vec::new();
    for (name, kind, grid) in [
        ("lambda", SweepKind::LambdaSweep, lambda_grid()),
        ("ratio", SweepKind::RatioSweep, ratio_grid()),
        ("k", SweepKind::KSweep, k_grid()),
    ] {
        for (x, p) in grid.iter().zip(anchored(kind, &grid, SweepAnchor::STAR)?) {
            out.push((name, *x, p));
        }
    }
    Ok(out)
}

fn fig_a1(numerics: &Numerics) -> Result<StudyResult> {
    let star = SweepAnchor::STAR.params()?;
    let models = [ModelId::BoAnalytic, ModelId::BoNumeric];
    let c = compare_models(&star, &models, numerics)?;
    let mut panel = Vec::new();
    let mut xs = Vec::new();
    let mut analytic = Vec::new();
    let mut numeric = Vec::new();
    let mut prov = Vec::new();
    for j in 1..=STAR_LEVELS {
        panel.push("j".to_string());
        xs.push(j as f64);
        analytic.push(cumulative(&c, ModelId::BoAnalytic, j)?);
        numeric.push(cumulative(&c, ModelId::BoNumeric, j)?);
    }
    prov.push(provenance(
        "star",
        &star,
        Some(c.reference.spectrum.n_cut_used),
    ));
    let sweeps = panels()?;
    let rows = sweeps
        .par_iter()
        .map(|(_, _, p)| {
            let c = compare_models(p, &models, numerics)?;
            Ok((
                cumulative(&c, ModelId::BoAnalytic, SWEEP_LEVELS)?,
                cumulative(&c, ModelId::BoNumeric, SWEEP_LEVELS)?,
                c.reference.spectrum.n_cut_used,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    for ((name, x, p), (a, n, cut)) in sweeps.iter().zip(rows) {
        panel.push(name.to_string());
        xs.push(*x);
        analytic.push(a);
        numeric.push(n);
        prov.push(provenance(format!("{name}={x}"), p, Some(cut)));
    }
    let columns = vec![
        Column::text("panel", panel),
        Column::number("x", xs),
        Column::number("Delta_bo_analytic", analytic),
        Column::number("Delta_bo_numeric", numeric),
    ];
    StudyResult::new(StudyId::FigA1, columns, prov)
}

fn fig_a2(numerics: &Numerics) -> Result<StudyResult> {
    let sweeps = panels()?;
    let rows = sweeps
        .par_iter()
        .map(|(_, _, p)| {
            let c = compare_models(p, &[ModelId::BoNumeric], numerics)?;
            let report = c
                .report(ModelId::BoNumeric, SWEEP_LEVELS)
                .filter(|r| r.delta.len() == SWEEP_LEVELS)
                .ok_or_else(|| {
                    Error::Numeric(format!(
                        "fewer than {SWEEP_LEVELS} qubit levels at λ = {}",
                        p.lambda
                    ))
                })?;
            Ok((report.delta, c.reference.spectrum.n_cut_used))
        })
        .collect::<Result<Vec<_>>>()?;
    let deltas: Vec<Vec<f64>> = rows.iter().map(|(d, _)| d.clone()).collect();
    let mut columns = vec![
        Column::text(
            "panel",
            sweeps.iter().map(|(n, _, _)| n.to_string()).collect(),
        ),
        Column::number("x", sweeps.iter().map(|(_, x, _)| *x).collect()),
    ];
    for (i, c) in transpose(&deltas, SWEEP_LEVELS).into_iter().enumerate() {
        columns.push(Column::number(format!("delta_{}", i + 1), c));
    }
    let prov = sweeps
        .iter()
        .zip(&rows)
        .map(|((name, x, p), (_, n))| provenance(format!("{name}={x}"), p, Some(*n)))
        .collect();
    StudyResult::new(StudyId::FigA2, columns, prov)
}
