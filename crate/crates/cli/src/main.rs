//! `djspec`: spectra, potentials, harmonics, offset-charge sweeps and figure studies.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use djspec::analysis::{classical_spectrum, dispersion_sweep, model_spectrum, DispersionTarget};
use djspec::bo::{u_disp, BOPotential, BoVariant};
use djspec::config::RunConfig;
use djspec::eigen::{LevelLabel, Spectrum};
use djspec::error::{Error, Result};
use djspec::models::{theta_min, u_classical, u_prime, ModelId};
use djspec::numerics::Numerics;
use djspec::params::{CircuitSpec, DerivedParams, QubitParams};
use djspec::potential::{phase_grid, PeriodicPotential};
use djspec::study::{
    offset_grid, reproduce_study, validate_columns, write_columns_csv, Column, StudyId,
};

#[derive(Parser, Debug)]
#[command(
    name = "djspec",
    version,
    about = "Double-junction circuit spectra and studies"
)]
struct Cli {
    /// TOML file with [circuit], [offsets] and [numerics] sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; JSON for `spectrum`, CSV otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Fixed starting charge cutoff for every mode.
    #[arg(long, global = true)]
    ncut: Option<usize>,
    /// Relative eigenvalue change that ends the cutoff loop.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lowest levels of one model.
    Spectrum {
        #[arg(long, default_value = "full-two-mode")]
        model: String,
        #[arg(long, default_value_t = 6)]
        levels: usize,
    },
    /// One of the named figure studies; needs no circuit.
    Study {
        #[arg(long)]
        study: String,
    },
    /// Potential curves on the plot grid.
    Potentials {
        #[arg(
            long,
            value_enum,
            value_delimiter = ',',
            default_value = "classical,bo,corr"
        )]
        which: Vec<Curve>,
        /// BO variant behind the `bo` and `corr` curves.
        #[arg(long, default_value = "bo-analytic")]
        model: String,
    },
    /// Fourier harmonics of a single-mode potential.
    Harmonics {
        #[arg(long, default_value = "bo-analytic")]
        model: String,
        #[arg(long, default_value_t = 4)]
        m_max: usize,
    },
    /// Energies against the internal offset charge N_g.
    Dispersion {
        #[arg(long, default_value = "full-two-mode")]
        model: String,
        /// Evenly spaced N_g points on [0, 1].
        #[arg(long)]
        points: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Curve {
    Classical,
    Bo,
    Corr,
    UDisp,
    UPrimeMinmax,
}

#[derive(Serialize)]
#[serde(untagged)]
enum ParamsEcho {
    Full(DerivedParams),
    Qubit(QubitParams),
}

#[derive(Serialize)]
struct SpectrumReport {
    model: ModelId,
    eigenvalues: Vec<f64>,
    excitations: Vec<f64>,
    labels: Vec<LevelLabel>,
    n_cut_used: usize,
    dim: usize,
    params: ParamsEcho,
}

enum Output {
    Table(Vec<Column>),
    Json(serde_json::Value),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("djspec: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Validation("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Validation(format!("cannot start thread pool: {e}")))?;
    }
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let numerics = numerics(cli, &config)?;
    let output = match &cli.command {
        Command::Spectrum { model, levels } => spectrum(&config, model, *levels, &numerics, cli)?,
        Command::Study { study } => {
            let id: StudyId = study.parse()?;
            let result = reproduce_study(id, &numerics)?;
            match cli.format {
                Some(Format::Json) => Output::Json(serde_json::to_value(&result)?),
                _ => Output::Table(result.columns),
            }
        }
        Command::Potentials { which, model } => {
            Output::Table(potentials(&config, which, model, &numerics)?)
        }
        Command::Harmonics { model, m_max } => {
            Output::Table(harmonics(&config, model, *m_max, &numerics)?)
        }
        Command::Dispersion { model, points } => {
            Output::Table(dispersion(&config, model, *points, &numerics)?)
        }
    };
    emit(output, cli)
}

fn numerics(cli: &Cli, config: &RunConfig) -> Result<Numerics> {
    let mut numerics = config.numerics;
    if let Some(n) = cli.ncut {
        numerics.n_cut = Some(n);
    }
    if let Some(t) = cli.tol {
        numerics.tol = t;
    }
    numerics.validate()?;
    Ok(numerics)
}

fn circuit(config: &RunConfig) -> Result<CircuitSpec> {
    if config.circuit.is_none() {
        return Err(Error::Validation(
            "this command needs a circuit; pass --config with a [circuit] section".into(),
        ));
    }
    config.circuit_spec()
}

fn bo_variant(model: ModelId) -> Result<BoVariant> {
    match model {
        ModelId::BoAnalytic => Ok(BoVariant::Analytic),
        ModelId::BoNumeric => Ok(BoVariant::Numeric),
        other => Err(Error::Validation(format!(
            "expected bo-analytic or bo-numeric, got {other}"
        ))),
    }
}

fn spectrum(
    config: &RunConfig,
    model: &str,
    levels: usize,
    numerics: &Numerics,
    cli: &Cli,
) -> Result<Output> {
    let model: ModelId = model.parse()?;
    let spec = circuit(config)?;
    let (s, params): (Spectrum, ParamsEcho) = if model == ModelId::Classical {
        let q = spec.qubit_params()?;
        (
            classical_spectrum(&q, levels, false, numerics)?,
            ParamsEcho::Qubit(q),
        )
    } else {
        let p = spec.derive()?;
        (
            model_spectrum(model, &p, levels, numerics)?,
            ParamsEcho::Full(p),
        )
    };
    if cli.format == Some(Format::Csv) {
        let labels = s.labels.iter().map(label_text).collect();
        return Ok(Output::Table(vec![
            Column::number(
                "level",
                (0..s.eigenvalues.len()).map(|i| i as f64).collect(),
            ),
            Column::number("energy", s.eigenvalues),
            Column::number("excitation", s.excitations),
            Column::text("label", labels),
        ]));
    }
    let report = SpectrumReport {
        model,
        eigenvalues: s.eigenvalues,
        excitations: s.excitations,
        labels: s.labels,
        n_cut_used: s.n_cut_used,
        dim: s.dim,
        params,
    };
    Ok(Output::Json(serde_json::to_value(&report)?))
}

fn label_text(label: &LevelLabel) -> String {
    match label {
        LevelLabel::Qubit(i) => format!("qubit-{i}"),
        LevelLabel::InternalExcited => "internal-excited".into(),
        LevelLabel::Unlabeled => "unlabeled".into(),
    }
}

fn potentials(
    config: &RunConfig,
    which: &[Curve],
    model: &str,
    numerics: &Numerics,
) -> Result<Vec<Column>> {
    let mut which = which.to_vec();
    which.sort();
    which.dedup();
    let spec = circuit(config)?;
    let grid = phase_grid(numerics.plot_grid);
    let mut columns = vec![Column::number("phi", grid.clone())];
    if which == [Curve::Classical] {
        let q = spec.qubit_params()?;
        let classical = grid.iter().map(|&x| u_classical(x, q.lambda, q.e_j_sigma));
        columns.push(Column::number("classical", classical.collect()));
        return Ok(columns);
    }
    let p = spec.derive()?;
    let needs_bo = which.iter().any(|c| matches!(c, Curve::Bo | Curve::Corr));
    let bo = if needs_bo {
        Some(BOPotential::build(
            &p,
            bo_variant(model.parse()?)?,
            numerics,
        )?)
    } else {
        None
    };
    for curve in which {
        let sample = |f: &dyn Fn(f64) -> f64| grid.iter().map(|&x| f(x)).collect::<Vec<f64>>();
        match curve {
            Curve::Classical => columns.push(Column::number(
                "classical",
                sample(&|x| u_classical(x, p.lambda, p.e_j_sigma)),
            )),
            Curve::Bo => {
                let bo = bo.as_ref().expect("built above");
                columns.push(Column::number(
                    "bo",
                    sample(&|x| u_classical(x, p.lambda, p.e_j_sigma) + bo.corr_at(x)),
                ));
            }
            Curve::Corr => {
                let bo = bo.as_ref().expect("built above");
                columns.push(Column::number("corr", sample(&|x| bo.corr_at(x))));
            }
            Curve::UDisp => columns.push(Column::number("u_disp", sample(&|x| u_disp(x, &p)))),
            Curve::UPrimeMinmax => {
                columns.push(Column::number(
                    "u_prime_min",
                    sample(&|x| u_prime(x, theta_min(x, &p), &p)),
                ));
                columns.push(Column::number(
                    "u_prime_max",
                    sample(&|x| u_prime(x, theta_min(x, &p) + std::f64::consts::PI, &p)),
                ));
            }
        }
    }
    Ok(columns)
}

fn harmonics(
    config: &RunConfig,
    model: &str,
    m_max: usize,
    numerics: &Numerics,
) -> Result<Vec<Column>> {
    let model: ModelId = model.parse()?;
    if model.is_two_mode() {
        return Err(Error::Validation(format!(
            "{model} has no single-mode potential; use classical, bo-analytic or bo-numeric"
        )));
    }
    let spec = circuit(config)?;
    let potential: PeriodicPotential = match model {
        ModelId::Classical => {
            let q = spec.qubit_params()?;
            djspec::potential::sample_and_fourier(
                |x| u_classical(x, q.lambda, q.e_j_sigma),
                numerics.fourier_grid,
                numerics.m_max,
            )?
        }
        other => BOPotential::build(&spec.derive()?, bo_variant(other)?, numerics)?.u_bo,
    };
    if m_max < 1 || m_max > potential.m_max() {
        return Err(Error::Validation(format!(
            "--m-max must lie in [1, {}], got {m_max}",
            potential.m_max()
        )));
    }
    let u1 = potential.cos[1].abs();
    if u1 == 0.0 {
        return Err(Error::Normalization { u1 });
    }
    let m: Vec<f64> = (1..=m_max).map(|m| m as f64).collect();
    let u: Vec<f64> = (1..=m_max).map(|m| potential.cos[m]).collect();
    let ratio: Vec<f64> = u.iter().map(|c| c / u1).collect();
    Ok(vec![
        Column::number("m", m),
        Column::number("U_m", u),
        Column::number("U_m_over_abs_U1", ratio),
    ])
}

fn dispersion(
    config: &RunConfig,
    model: &str,
    points: Option<usize>,
    numerics: &Numerics,
) -> Result<Vec<Column>> {
    let target: DispersionTarget = model.parse()?;
    let p = circuit(config)?.derive()?;
    let grid = match points {
        None => offset_grid(),
        Some(n) if n >= 2 => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
        Some(n) => {
            return Err(Error::Validation(format!(
                "--points must be at least 2, got {n}"
            )))
        }
    };
    let curves = dispersion_sweep(target, &p, &grid, numerics)?;
    let mut columns = vec![Column::number("Ng", curves.n_big_g)];
    for (i, level) in curves.levels.into_iter().enumerate() {
        columns.push(Column::number(format!("E{i}"), level));
    }
    Ok(columns)
}

fn emit(output: Output, cli: &Cli) -> Result<()> {
    let sink: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match output {
        Output::Table(columns) => {
            validate_columns("output", &columns)?;
            if cli.format == Some(Format::Json) {
                serde_json::to_writer_pretty(&mut sink, &columns)?;
                sink.write_all(b"\n")?;
            } else {
                write_columns_csv(&columns, &mut sink)?;
            }
        }
        Output::Json(value) => {
            check_finite_json(&value)?;
            serde_json::to_writer_pretty(&mut sink, &value)?;
            sink.write_all(b"\n")?;
        }
    }
    sink.flush()?;
    Ok(())
}

/// serde_json writes non-finite floats as null; refuse them instead.
fn check_finite_json(value: &serde_json::Value) -> Result<()> {
    match value {
        serde_json::Value::Null => Err(Error::Numeric(
            "refusing to write a non-finite value".into(),
        )),
        serde_json::Value::Array(items) => items.iter().try_for_each(check_finite_json),
        serde_json::Value::Object(map) => map.values().try_for_each(check_finite_json),
        _ => Ok(()),
    }
}
