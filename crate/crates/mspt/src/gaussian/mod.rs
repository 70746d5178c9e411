//! Free-fermion machinery: the lattice edge Dirac ring, its Slater ground
//! states, and overlap / transition / Wick evaluation.

mod hamiltonian;
mod slater;

pub use hamiltonian::{
    build_edge_hamiltonian, ground_state, left, right, spectral_flow, spectral_flow_charge,
    MassProfile, SingleParticleHamiltonian, SpectralFlowRow, MIN_SITES, ZERO_MODE_TOL,
};
pub(crate) use hamiltonian::fill_negative;
pub use slater::{
    overlap, random_orthonormal, random_slater_state, transition_bilinear,
    transition_density_via_inverse, wick_expectation, wick_with_correlation, Ladder, SlaterState,
    TransitionKernel, MAX_WICK_LENGTH, ORTHONORMALITY_TOL,
};
pub(crate) use slater::determinant;
