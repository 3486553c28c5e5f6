//! Gaussian non-Hermitian random matrices in the symmetry classes A, AI† and
//! AII†: sampling, spectral statistics, Monte Carlo moments of characteristic
//! polynomials, replica (sigma-model) integrals and closed-form asymptotics.

pub mod asymptotics;
pub mod charpoly;
pub mod ensembles;
pub mod error;
pub mod export;
pub mod linalg;
pub mod nlsm;
pub mod parallel;
pub mod quadrature;
pub mod spectra;
pub mod special;
pub mod stats;

pub use ensembles::{EnsembleSpec, SymmetryClass};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use parallel::Execution;

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
