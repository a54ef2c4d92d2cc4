use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed, mixed or incomplete input.
    #[error("validation error: {0}")]
    Validation(String),

    /// Input is well formed but lies outside the physical domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("potential has odd (sine) content {odd:.3e} relative to its even part; only even potentials are supported")]
    UnsupportedPotential { odd: f64 },

    #[error("fundamental harmonic |U_1| = {u1:.3e} is too small to normalize by")]
    Normalization { u1: f64 },

    #[error("eigenvalues not converged at n_cut = {n_cut}: last change {change:.3e}")]
    Convergence {
        n_cut: usize,
        change: f64,
        previous: Vec<f64>,
        last: Vec<f64>,
    },

    #[error("LAPACK {routine} failed with info = {info}")]
    Lapack { routine: &'static str, info: i32 },

    #[error("unknown study `{id}`; valid ids: {valid}")]
    UnknownStudy { id: String, valid: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_)
            | Error::Domain(_)
            | Error::UnknownStudy { .. }
            | Error::Normalization { .. }
            | Error::UnsupportedPotential { .. } => 2,
            Error::Numeric(_) | Error::Convergence { .. } | Error::Lapack { .. } => 3,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => 1,
        }
    }
}
