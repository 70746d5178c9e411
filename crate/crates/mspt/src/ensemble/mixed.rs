//! Small ensembles assembled into explicit many-body density matrices.

use serde::{Deserialize, Serialize};

use super::{map_valid_samples, EnsembleSpec, SamplingStats};
use crate::ed::{
    assemble_density_matrix, orbit_average, slater_to_fock, strong_symmetry_check, weak_symmetry_check,
    DensityMatrixED, SymmetryCheck, SymmetryOpED, MAX_ED_MODES,
};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryTarget {
    /// Global charge `exp(iθ N)`.
    Charge,
    /// Edge dipole `exp(iθ N_L)`.
    Dipole,
}

impl SymmetryTarget {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "charge" | "e" => Ok(SymmetryTarget::Charge),
            "dipole" | "d" => Ok(SymmetryTarget::Dipole),
            _ => Err(Error::invalid("generator", format!("`{s}` is not one of charge, dipole"))),
        }
    }

    fn op(self, sites: usize, angle: f64) -> Result<SymmetryOpED> {
        match self {
            SymmetryTarget::Charge => SymmetryOpED::charge(2 * sites, angle),
            SymmetryTarget::Dipole => SymmetryOpED::edge_dipole(sites, angle),
        }
    }
}

/// Equal-weight mixture of the valid ground states of `spec`.
pub fn ensemble_density_matrix(spec: &EnsembleSpec) -> Result<(DensityMatrixED, SamplingStats)> {
    if 2 * spec.n_sites > MAX_ED_MODES {
        return Err(Error::Capacity(format!(
            "{} sites need {} modes, the dense oracle stops at {MAX_ED_MODES}",
            spec.n_sites,
            2 * spec.n_sites
        )));
    }
    let (states, stats) = map_valid_samples(spec, |_, _, s| slater_to_fock(s))?;
    let states = states.into_iter().collect::<Result<Vec<_>>>()?;
    let w = vec![1.0 / states.len() as f64; states.len()];
    Ok((assemble_density_matrix(&states, &w)?, stats))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub generator: SymmetryTarget,
    pub angle: f64,
    /// Whether ρ was averaged over the dipole rotation orbit first.
    pub orbit_averaged: bool,
    pub strong: SymmetryCheck,
    pub weak: SymmetryCheck,
    /// Particle numbers carrying weight in ρ.
    pub charge_sectors: Vec<usize>,
    pub sampling: SamplingStats,
}

/// Strong and weak checks of `target` at `angle` on the dense ensemble
/// density matrix, optionally after averaging over dipole rotations.
pub fn symmetry_report(
    spec: &EnsembleSpec,
    target: SymmetryTarget,
    angle: f64,
    orbit_averaged: bool,
) -> Result<SymmetryReport> {
    let (mut rho, sampling) = ensemble_density_matrix(spec)?;
    if orbit_averaged {
        rho = orbit_average(&rho, &SymmetryTarget::Dipole.op(spec.n_sites, 0.0)?)?;
    }
    let op = target.op(spec.n_sites, angle)?;
    Ok(SymmetryReport {
        generator: target,
        angle,
        orbit_averaged,
        strong: strong_symmetry_check(&rho, &op)?,
        weak: weak_symmetry_check(&rho, &op)?,
        charge_sectors: rho.charge_sectors(1e-12),
        sampling,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{WindingRule, WindingWeight};
    use super::*;
    use std::f64::consts::PI;

    fn small(seed: u64) -> EnsembleSpec {
        EnsembleSpec::new(4, 6, seed)
    }

    #[test]
    fn fixed_winding_is_strongly_symmetric() {
        let r = symmetry_report(&small(1), SymmetryTarget::Charge, PI, false).unwrap();
        assert!(r.strong.pass && r.weak.pass, "{r:?}");
        assert_eq!(r.charge_sectors, vec![4]);
    }

    #[test]
    fn winding_mixture_breaks_strong_only() {
        let mut spec = small(2);
        spec.winding = WindingRule::Mixture(vec![WindingWeight { w: 0, p: 0.5 }, WindingWeight { w: 1, p: 0.5 }]);
        spec.samples = 10;
        let r = symmetry_report(&spec, SymmetryTarget::Charge, PI, true).unwrap();
        assert!(!r.strong.pass);
        assert!(r.weak.pass, "{r:?}");
        assert_eq!(r.charge_sectors, vec![4, 5]);
    }

    #[test]
    fn dipole_needs_the_orbit_average() {
        let spec = small(3);
        let raw = symmetry_report(&spec, SymmetryTarget::Dipole, 0.7, false).unwrap();
        assert!(!raw.weak.pass);
        let avg = symmetry_report(&spec, SymmetryTarget::Dipole, 0.7, true).unwrap();
        assert!(avg.weak.pass);
    }

    #[test]
    fn large_rings_are_refused() {
        assert!(matches!(ensemble_density_matrix(&EnsembleSpec::new(8, 4, 1)), Err(Error::Capacity(_))));
    }
}
