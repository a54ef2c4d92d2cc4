//! Low-energy spectrum of the capacitively shunted double-Josephson-junction
//! circuit in four models: exact two-mode, simplified two-mode, classical
//! single-mode and Born–Oppenheimer single-mode.

pub mod analysis;
pub mod bo;
pub mod config;
pub mod eigen;
pub mod error;
pub mod hamiltonian;
pub mod models;
pub mod numerics;
pub mod operator;
pub mod params;
pub mod potential;
pub mod spline;
pub mod study;

pub use error::{Error, Result};
