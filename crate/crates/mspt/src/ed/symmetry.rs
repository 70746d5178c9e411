//! Strong and weak symmetry tests for density matrices.

use faer::Mat;
use num_complex::Complex64 as C64;
use serde::Serialize;

use super::{frobenius, DensityMatrixED, FockSpace};
use crate::error::{Error, Result};
use crate::wire::{SymmetryGenerator, WireArray};

pub const SYMMETRY_TOL: f64 = 1e-10;

/// `exp(iθ Σ_a w_a n_a)`, diagonal in the occupation basis.
#[derive(Clone, Debug)]
pub struct SymmetryOpED {
    pub name: String,
    pub weights: Vec<i64>,
    pub angle: f64,
    diag: Vec<C64>,
}

impl SymmetryOpED {
    pub fn from_weights(name: impl Into<String>, weights: Vec<i64>, angle: f64) -> Result<Self> {
        let space = FockSpace::new(weights.len())?;
        let diag = (0..space.dim())
            .map(|s| C64::from_polar(1.0, angle * Self::charge_of(&weights, s) as f64))
            .collect();
        Ok(SymmetryOpED { name: name.into(), weights, angle, diag })
    }

    /// Mode weights `q_a f_g(x_a)` taken from a channel array.
    pub fn from_generator(array: &WireArray, g: &SymmetryGenerator, angle: f64) -> Result<Self> {
        Self::from_weights(g.name.clone(), array.charge_row(g), angle)
    }

    /// Total particle number on `modes` orbitals.
    pub fn charge(modes: usize, angle: f64) -> Result<Self> {
        Self::from_weights("charge", vec![1; modes], angle)
    }

    /// Edge dipole rotation on the Dirac ring: the left-moving component
    /// carries dipole charge 1, the right-moving one 0.
    pub fn edge_dipole(sites: usize, angle: f64) -> Result<Self> {
        Self::from_weights("dipole", (0..2 * sites).map(|a| (a % 2) as i64).collect(), angle)
    }

    fn charge_of(weights: &[i64], state: usize) -> i64 {
        weights.iter().enumerate().filter(|(a, _)| state >> a & 1 == 1).map(|(_, w)| w).sum()
    }

    pub fn diagonal(&self) -> &[C64] {
        &self.diag
    }

    pub fn at_angle(&self, angle: f64) -> Self {
        Self::from_weights(self.name.clone(), self.weights.clone(), angle).expect("same size")
    }

    /// Smallest and largest eigenvalue of `Σ_a w_a n_a`.
    pub fn charge_range(&self) -> (i64, i64) {
        let lo = self.weights.iter().filter(|&&w| w < 0).sum();
        let hi = self.weights.iter().filter(|&&w| w > 0).sum();
        (lo, hi)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetryCheck {
    pub pass: bool,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

fn check_dims(rho: &DensityMatrixED, op: &SymmetryOpED) -> Result<()> {
    if op.diag.len() != rho.dim() {
        return Err(Error::Dimension(format!(
            "operator on {} states, density matrix on {}",
            op.diag.len(),
            rho.dim()
        )));
    }
    Ok(())
}

/// `Uρ = e^{iφ}ρ` with the phase fitted from `tr[Uρ]`.
pub fn strong_symmetry_check(rho: &DensityMatrixED, op: &SymmetryOpED) -> Result<SymmetryCheck> {
    check_dims(rho, op)?;
    let r = rho.matrix();
    let d = rho.dim();
    let u_rho = Mat::<C64>::from_fn(d, d, |i, j| op.diag[i] * r[(i, j)]);
    let t: C64 = (0..d).map(|i| u_rho[(i, i)]).sum();
    if t.norm() < 1e-14 {
        return Ok(SymmetryCheck {
            pass: false,
            residual: frobenius(&u_rho),
            phase: None,
            diagnostic: Some("tr[Uρ] vanishes while Uρ does not: no global phase fits".into()),
        });
    }
    let phase = t.arg();
    let e = C64::from_polar(1.0, phase);
    let residual = frobenius(&Mat::<C64>::from_fn(d, d, |i, j| u_rho[(i, j)] - e * r[(i, j)]));
    Ok(SymmetryCheck { pass: residual <= SYMMETRY_TOL, residual, phase: Some(phase), diagnostic: None })
}

/// `UρU† = ρ`.
pub fn weak_symmetry_check(rho: &DensityMatrixED, op: &SymmetryOpED) -> Result<SymmetryCheck> {
    check_dims(rho, op)?;
    let r = rho.matrix();
    let d = rho.dim();
    let diff = Mat::<C64>::from_fn(d, d, |i, j| op.diag[i] * r[(i, j)] * op.diag[j].conj() - r[(i, j)]);
    let residual = frobenius(&diff);
    Ok(SymmetryCheck { pass: residual <= SYMMETRY_TOL, residual, phase: None, diagnostic: None })
}

/// Average `U(β) ρ U(β)†` over `β_k = 2πk/K` with `K` one more than the
/// spread of the generator's eigenvalues, which projects exactly onto the
/// block-diagonal part.
pub fn orbit_average(rho: &DensityMatrixED, op: &SymmetryOpED) -> Result<DensityMatrixED> {
    check_dims(rho, op)?;
    let (lo, hi) = op.charge_range();
    let k = (hi - lo + 1) as usize;
    let d = rho.dim();
    let r = rho.matrix();
    let mut acc = Mat::<C64>::zeros(d, d);
    for step in 0..k {
        let u = op.at_angle(2.0 * std::f64::consts::PI * step as f64 / k as f64);
        for j in 0..d {
            for i in 0..d {
                acc[(i, j)] += u.diag[i] * r[(i, j)] * u.diag[j].conj();
            }
        }
    }
    let scale = C64::new(1.0 / k as f64, 0.0);
    DensityMatrixED::new(Mat::from_fn(d, d, |i, j| acc[(i, j)] * scale))
}
