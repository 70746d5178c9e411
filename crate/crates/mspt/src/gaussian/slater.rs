use faer::linalg::solvers::DenseSolveCore;
use faer::Mat;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// Particle-number eigenstate `Π_i (Σ_a U_ai c†_a) |0⟩` given by an
/// `M × P` matrix with orthonormal columns.
#[derive(Clone, Debug)]
pub struct SlaterState {
    orbitals: Mat<C64>,
}

impl SlaterState {
    pub fn new(orbitals: Mat<C64>) -> Result<Self> {
        let s = SlaterState { orbitals };
        let r = s.orthonormality_residual();
        if r > ORTHONORMALITY_TOL {
            return Err(Error::invalid("orbitals", format!("not orthonormal, residual {r:e}")));
        }
        Ok(s)
    }

    pub(crate) fn from_columns(orbitals: Mat<C64>) -> Self {
        SlaterState { orbitals }
    }

    pub fn orbitals(&self) -> &Mat<C64> {
        &self.orbitals
    }

    pub fn modes(&self) -> usize {
        self.orbitals.nrows()
    }

    pub fn particles(&self) -> usize {
        self.orbitals.ncols()
    }

    /// Max-entry deviation of `U†U` from the identity.
    pub fn orthonormality_residual(&self) -> f64 {
        let g = self.orbitals.adjoint() * &self.orbitals;
        let mut r = 0.0f64;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let id = if i == j { 1.0 } else { 0.0 };
                r = r.max((g[(i, j)] - id).norm());
            }
        }
        r
    }

    /// `C[a][b] = ⟨c†_a c_b⟩ = Σ_i conj(U_ai) U_bi`.
    pub fn correlation_matrix(&self) -> Mat<C64> {
        let u = &self.orbitals;
        u.conjugate() * u.transpose()
    }

    /// Same many-body state up to the phase `det(w)`.
    pub fn rotated(&self, w: &Mat<C64>) -> Result<SlaterState> {
        if w.nrows() != self.particles() || w.ncols() != self.particles() {
            return Err(Error::Dimension("rotation must be P × P".into()));
        }
        SlaterState::new(&self.orbitals * w)
    }
}

/// Haar-like random orthonormal columns via Gram–Schmidt on a complex
/// Gaussian matrix.
pub fn random_orthonormal<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Mat<C64> {
    assert!(cols <= rows);
    let mut m = Mat::<C64>::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    for j in 0..cols {
        for _ in 0..2 {
            for k in 0..j {
                let mut dot = C64::new(0.0, 0.0);
                for i in 0..rows {
                    dot += m[(i, k)].conj() * m[(i, j)];
                }
                for i in 0..rows {
                    let v = m[(i, k)];
                    m[(i, j)] -= dot * v;
                }
            }
        }
        let norm = (0..rows).map(|i| m[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..rows {
            m[(i, j)] /= norm;
        }
    }
    m
}

pub fn random_slater_state<R: Rng + ?Sized>(rng: &mut R, modes: usize, particles: usize) -> SlaterState {
    SlaterState::from_columns(random_orthonormal(rng, modes, particles))
}

fn check_pair(s1: &SlaterState, s2: &SlaterState) -> Result<()> {
    if s1.modes() != s2.modes() || s1.particles() != s2.particles() {
        return Err(Error::Dimension(format!(
            "states with (M, P) = ({}, {}) and ({}, {})",
            s1.modes(),
            s1.particles(),
            s2.modes(),
            s2.particles()
        )));
    }
    Ok(())
}

pub(crate) fn determinant(m: &Mat<C64>) -> C64 {
    if m.nrows() == 0 {
        return C64::new(1.0, 0.0);
    }
    m.as_ref().determinant()
}

/// `⟨S1|S2⟩ = det(U1† U2)`.
pub fn overlap(s1: &SlaterState, s2: &SlaterState) -> Result<C64> {
    check_pair(s1, s2)?;
    Ok(determinant(&(s1.orbitals.adjoint() * &s2.orbitals)))
}

/// Precomputed pieces for `⟨U| c†_a c_b |V⟩ = [V adj(U†V) U†]_{ba}`.
///
/// The adjugate is built from an SVD, `O = W Σ Z†`, as
/// `adj(O) = det(W) conj(det Z) · Z diag(Π_{j≠i} σ_j) W†`, which stays
/// finite and exact when `O` is singular (where `O⁻¹` does not exist).
pub struct TransitionKernel {
    overlap: C64,
    /// `V adj(O)`, shape M × P.
    left: Mat<C64>,
    /// `U`, shape M × P.
    right: Mat<C64>,
}

impl TransitionKernel {
    pub fn new(s1: &SlaterState, s2: &SlaterState) -> Result<Self> {
        check_pair(s1, s2)?;
        let p = s1.particles();
        let (u, v) = (&s1.orbitals, &s2.orbitals);
        if p == 0 {
            return Ok(TransitionKernel { overlap: C64::new(1.0, 0.0), left: v.clone(), right: u.clone() });
        }
        let o = u.adjoint() * v;
        let svd = o.svd().map_err(|e| Error::Numerical(format!("svd: {e:?}")))?;
        let (w, z) = (svd.U().to_owned(), svd.V().to_owned());
        let sig: Vec<f64> = (0..p).map(|i| svd.S().column_vector()[i].re).collect();
        let phase = determinant(&w) * determinant(&z).conj();
        let cofactors: Vec<f64> = (0..p)
            .map(|i| sig.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, s)| s).product())
            .collect();
        let det = phase * sig.iter().product::<f64>();
        // Z · diag(cofactors) · W†
        let zd = Mat::<C64>::from_fn(p, p, |r, c| z[(r, c)] * cofactors[c] * phase);
        let adj = &zd * w.adjoint();
        Ok(TransitionKernel { overlap: det, left: v * &adj, right: u.clone() })
    }

    pub fn overlap(&self) -> C64 {
        self.overlap
    }

    /// `⟨S1| c†_a c_b |S2⟩`.
    pub fn element(&self, a: usize, b: usize) -> C64 {
        let p = self.left.ncols();
        let mut s = C64::new(0.0, 0.0);
        for i in 0..p {
            s += self.left[(b, i)] * self.right[(a, i)].conj();
        }
        s
    }

    /// `T[i][j] = ⟨S1| c†_{modes[i]} c_{modes[j]} |S2⟩` on a subset of modes.
    pub fn left_block(&self, modes: &[usize]) -> Mat<C64> {
        let p = self.left.ncols();
        let l = Mat::<C64>::from_fn(modes.len(), p, |i, k| self.left[(modes[i], k)]);
        let r = Mat::<C64>::from_fn(modes.len(), p, |i, k| self.right[(modes[i], k)]);
        r.conjugate() * l.transpose()
    }

    /// Full matrix `T[a][b] = ⟨S1| c†_a c_b |S2⟩`.
    pub fn matrix(&self) -> Mat<C64> {
        (&self.left * self.right.adjoint()).transpose().to_owned()
    }
}

/// `⟨S1| c†_a c_b |S2⟩`.
pub fn transition_bilinear(s1: &SlaterState, s2: &SlaterState, a: usize, b: usize) -> Result<C64> {
    let m = s1.modes();
    if a >= m || b >= m {
        return Err(Error::Dimension(format!("mode index out of range for {m} modes")));
    }
    Ok(TransitionKernel::new(s1, s2)?.element(a, b))
}

/// `⟨S1|S2⟩ · V (U†V)⁻¹ U†`-style transition density through an explicit
/// inverse; only valid for a nonsingular overlap and kept as a cross-check
/// of the adjugate route.
pub fn transition_density_via_inverse(s1: &SlaterState, s2: &SlaterState) -> Result<Mat<C64>> {
    check_pair(s1, s2)?;
    let o = s1.orbitals.adjoint() * &s2.orbitals;
    let det = determinant(&o);
    if det.norm() < 1e-12 {
        return Err(Error::Numerical("overlap is singular".into()));
    }
    let inv = o.partial_piv_lu().inverse();
    let t = &s2.orbitals * inv * s1.orbitals.adjoint();
    Ok(Mat::from_fn(t.nrows(), t.ncols(), |a, b| t[(b, a)] * det))
}

/// A creation or annihilation operator on one mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    Create(usize),
    Annihilate(usize),
}

impl Ladder {
    fn mode(self) -> usize {
        match self {
            Ladder::Create(a) | Ladder::Annihilate(a) => a,
        }
    }
}

pub const MAX_WICK_LENGTH: usize = 4;

/// `⟨S| o_1 o_2 … o_n |S⟩` for `n ≤ 4` by Wick contraction.
pub fn wick_expectation(s: &SlaterState, ops: &[Ladder]) -> Result<C64> {
    wick_with_correlation(&s.correlation_matrix(), ops)
}

/// Wick contraction against a given correlation matrix `C[a][b] = ⟨c†_a c_b⟩`.
pub fn wick_with_correlation(c: &Mat<C64>, ops: &[Ladder]) -> Result<C64> {
    if ops.len() > MAX_WICK_LENGTH {
        return Err(Error::Unsupported(format!(
            "{} operators; at most {MAX_WICK_LENGTH} supported",
            ops.len()
        )));
    }
    if let Some(o) = ops.iter().find(|o| o.mode() >= c.nrows()) {
        return Err(Error::Dimension(format!("mode {} out of range", o.mode())));
    }
    let creates = ops.iter().filter(|o| matches!(o, Ladder::Create(_))).count();
    if 2 * creates != ops.len() {
        return Ok(C64::new(0.0, 0.0));
    }
    let pair = |x: Ladder, y: Ladder| -> C64 {
        match (x, y) {
            (Ladder::Create(a), Ladder::Annihilate(b)) => c[(a, b)],
            (Ladder::Annihilate(a), Ladder::Create(b)) => {
                let delta = if a == b { 1.0 } else { 0.0 };
                C64::new(delta, 0.0) - c[(b, a)]
            }
            _ => C64::new(0.0, 0.0),
        }
    };
    Ok(match ops {
        [] => C64::new(1.0, 0.0),
        [a, b] => pair(*a, *b),
        [a, b, x, y] => {
            pair(*a, *b) * pair(*x, *y) - pair(*a, *x) * pair(*b, *y) + pair(*a, *y) * pair(*b, *x)
        }
        _ => unreachable!("odd lengths have unequal counts"),
    })
}
