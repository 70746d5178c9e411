//! Numerical laboratory for coupled-wire constructions of mixed-state
//! symmetry-protected phases with modulated (dipole, multipole, subsystem)
//! U(1) symmetries.
//!
//! * [`wire`]: chiral channels, modulated generators, symmetric gapping vectors.
//! * [`anomaly`]: anomaly pairing, flux insertion and closed/open realizability.
//! * [`gaussian`]: lattice edge Dirac model and Slater-determinant algebra.
//! * [`ensemble`]: disorder ensembles, linear and Rényi-2 correlators, decay fits.
//! * [`ed`]: many-body exact diagonalization used as an oracle.
//! * [`verify`]: the end-to-end acceptance checks.

pub mod config;
pub mod error;
pub mod rng;
pub mod anomaly;
pub mod gaussian;
pub mod wire;
pub mod ed;
pub mod ensemble;
pub mod verify;

pub use error::{Error, Result};

/// Library version, echoed in every machine-readable output.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
