use std::f64::consts::PI;

use faer::{Mat, Side};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};

use super::SlaterState;

/// Tolerance below which an eigenvalue counts as a zero mode.
pub const ZERO_MODE_TOL: f64 = 1e-9;
pub const MIN_SITES: usize = 2;

/// Row index of the right-moving component on site `y`.
pub fn right(y: usize) -> usize {
    2 * y
}

/// Row index of the left-moving component on site `y`.
pub fn left(y: usize) -> usize {
    2 * y + 1
}

/// Complex mass `|m|(y) e^{iα(y)}` on a ring. `phase` is a lift of the
/// phase field on sites `0..N`; continuing it across the ring adds
/// `2π·winding`, so `α(N) = α(0) + 2π w`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MassProfile {
    pub magnitude: Vec<f64>,
    pub phase: Vec<f64>,
    pub winding: i64,
}

impl MassProfile {
    pub fn new(magnitude: Vec<f64>, phase: Vec<f64>, winding: i64) -> Result<Self> {
        if magnitude.len() != phase.len() {
            return Err(Error::Dimension(format!(
                "{} magnitudes for {} phases",
                magnitude.len(),
                phase.len()
            )));
        }
        if magnitude.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::invalid("magnitude", "must be finite and nonnegative"));
        }
        if phase.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("phase", "must be finite"));
        }
        Ok(MassProfile { magnitude, phase, winding })
    }

    /// Uniform magnitude with a linear phase `2π w y / N`.
    pub fn uniform(n: usize, m: f64, winding: i64) -> Self {
        let phase = (0..n).map(|y| 2.0 * PI * winding as f64 * y as f64 / n as f64).collect();
        MassProfile { magnitude: vec![m; n], phase, winding }
    }

    pub fn len(&self) -> usize {
        self.phase.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phase.is_empty()
    }

    /// Bond increments of the lifted phase, the last one across the ring.
    pub fn increments(&self) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|y| {
                if y + 1 < n {
                    self.phase[y + 1] - self.phase[y]
                } else {
                    self.phase[0] + 2.0 * PI * self.winding as f64 - self.phase[y]
                }
            })
            .collect()
    }

    /// Accumulated lifted increment over 2π; equals `winding` up to rounding.
    pub fn tracked_winding(&self) -> f64 {
        self.increments().iter().sum::<f64>() / (2.0 * PI)
    }

    /// Winding of `e^{iα}` read off from principal-value bond increments.
    /// Differs from `winding` when some bond turns the phase by more than π.
    pub fn principal_winding(&self) -> i64 {
        let total: f64 = self
            .increments()
            .iter()
            .map(|d| d - 2.0 * PI * (d / (2.0 * PI)).round())
            .sum();
        (total / (2.0 * PI)).round() as i64
    }
}

/// Lattice Dirac ring with `M = 2N` orbitals ordered `(R_0, L_0, R_1, …)`.
#[derive(Clone, Debug)]
pub struct SingleParticleHamiltonian {
    pub n_sites: usize,
    pub velocity: f64,
    pub wilson: f64,
    pub twist: f64,
    pub matrix: Mat<C64>,
}

impl SingleParticleHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Frobenius norm of `H - H†`.
    pub fn hermiticity_residual(&self) -> f64 {
        let h = &self.matrix;
        let n = h.nrows();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += (h[(i, j)] - h[(j, i)].conj()).norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.matrix
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Numerical(format!("eigenvalues: {e:?}")))
    }

    /// Eigenvalues in ascending order and the matching eigenvectors.
    pub fn diagonalize(&self) -> Result<(Vec<f64>, Mat<C64>)> {
        let evd = self
            .matrix
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Numerical(format!("eigendecomposition: {e:?}")))?;
        let s = evd.S().column_vector();
        let energies = (0..s.nrows()).map(|i| s[i].re).collect();
        Ok((energies, evd.U().to_owned()))
    }
}

/// Assemble the ring Hamiltonian
///
/// ```text
/// H = Σ_k v sin k (R†R − L†L)
///   + Σ_y |m|(y) (e^{iα(y)} R†L + h.c.)
///   + Σ_k b (1 − cos k) (R†L + h.c.)
/// ```
///
/// with symmetric-difference hopping and the twist `θ` attached to the bond
/// that closes the ring. The Wilson term gaps the doublers at `k = π`.
pub fn build_edge_hamiltonian(
    n: usize,
    velocity: f64,
    profile: &MassProfile,
    wilson: f64,
    twist: f64,
) -> Result<SingleParticleHamiltonian> {
    if n < MIN_SITES {
        return Err(Error::invalid("n", format!("need at least {MIN_SITES} sites, got {n}")));
    }
    if profile.len() != n {
        return Err(Error::Dimension(format!("profile has {} sites, ring has {n}", profile.len())));
    }
    if !(velocity.is_finite() && wilson.is_finite() && twist.is_finite()) {
        return Err(Error::invalid("hamiltonian", "parameters must be finite"));
    }
    let dim = 2 * n;
    let mut h = Mat::<C64>::zeros(dim, dim);
    let mut add = |i: usize, j: usize, v: C64| h[(i, j)] += v;
    let half_b = C64::new(wilson / 2.0, 0.0);
    for y in 0..n {
        let yp = (y + 1) % n;
        let ph = if yp == 0 { C64::from_polar(1.0, twist) } else { C64::new(1.0, 0.0) };
        let t = C64::new(0.0, -velocity / 2.0) * ph;
        add(right(y), right(yp), t);
        add(right(yp), right(y), t.conj());
        add(left(y), left(yp), -t);
        add(left(yp), left(y), -t.conj());

        let mass = C64::from_polar(profile.magnitude[y], profile.phase[y]);
        add(left(y), right(y), mass.conj() + wilson);
        add(right(y), left(y), mass + wilson);

        add(left(y), right(yp), -half_b * ph);
        add(right(yp), left(y), -half_b * ph.conj());
        add(left(yp), right(y), -half_b * ph.conj());
        add(right(y), left(yp), -half_b * ph);
    }
    let out = SingleParticleHamiltonian { n_sites: n, velocity, wilson, twist, matrix: h };
    let res = out.hermiticity_residual();
    assert!(res < 1e-12, "non-Hermitian assembly, residual {res:e}");
    Ok(out)
}

/// Slater determinant filling every negative-energy orbital.
pub fn ground_state(h: &SingleParticleHamiltonian) -> Result<SlaterState> {
    let (energies, vectors) = h.diagonalize()?;
    fill_negative(&energies, &vectors, "")
}

pub(crate) fn fill_negative(energies: &[f64], vectors: &Mat<C64>, context: &str) -> Result<SlaterState> {
    if let Some(&e) = energies.iter().min_by(|a, b| a.abs().total_cmp(&b.abs())) {
        if e.abs() < ZERO_MODE_TOL {
            return Err(Error::ZeroMode { energy: e, tol: ZERO_MODE_TOL, context: context.to_string() });
        }
    }
    // Eigenvalues arrive in ascending order, so the occupied block is a prefix.
    let p = energies.iter().take_while(|&&e| e < 0.0).count();
    Ok(SlaterState::from_columns(vectors.subcols(0, p).to_owned()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralFlowRow {
    pub winding: i64,
    pub particles: usize,
    pub delta_q: i64,
    /// Smallest |E| of the single-particle spectrum.
    pub gap: f64,
}

/// Ground-state charge across a family of uniform-magnitude profiles with
/// phase `2π w y / N`, relative to `w = 0`.
pub fn spectral_flow(
    n: usize,
    velocity: f64,
    mass: f64,
    wilson: f64,
    windings: &[i64],
) -> Result<Vec<SpectralFlowRow>> {
    let count = |w: i64| -> Result<(usize, f64)> {
        let h = build_edge_hamiltonian(n, velocity, &MassProfile::uniform(n, mass, w), wilson, 0.0)?;
        let (energies, vectors) = h.diagonalize()?;
        let gap = energies.iter().fold(f64::INFINITY, |g, e| g.min(e.abs()));
        let state = fill_negative(&energies, &vectors, &format!(" at winding {w}"))?;
        Ok((state.particles(), gap))
    };
    let (p0, _) = count(0)?;
    windings
        .iter()
        .map(|&w| {
            let (p, gap) = count(w)?;
            Ok(SpectralFlowRow { winding: w, particles: p, delta_q: p as i64 - p0 as i64, gap })
        })
        .collect()
}

pub fn spectral_flow_charge(n: usize, velocity: f64, mass: f64, wilson: f64, w: i64) -> Result<i64> {
    Ok(spectral_flow(n, velocity, mass, wilson, &[w])?[0].delta_q)
}
