//! Dense many-body exact diagonalization for at most 14 modes.
//!
//! Basis states are bitstrings with mode 0 the least significant bit. The
//! state with occupied modes `r_1 < r_2 < … < r_P` is
//! `c†_{r_1} c†_{r_2} … c†_{r_P} |0⟩`, so `c†_a` acting on it picks up
//! `(-1)^{#occupied modes below a}`.

mod crosscheck;
mod symmetry;

use faer::{Mat, Side};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{determinant, Ladder, SlaterState};

pub use crosscheck::{crosscheck_gaussian, CrosscheckReport};
pub use symmetry::{
    orbit_average, strong_symmetry_check, weak_symmetry_check, SymmetryCheck, SymmetryOpED,
    SYMMETRY_TOL,
};

pub const MAX_ED_MODES: usize = 14;
pub const PSD_TOL: f64 = 1e-12;
pub const EPR_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FockSpace {
    modes: usize,
}

impl FockSpace {
    pub fn new(modes: usize) -> Result<Self> {
        if modes > MAX_ED_MODES {
            return Err(Error::Capacity(format!("{modes} modes exceeds the ED limit of {MAX_ED_MODES}")));
        }
        Ok(FockSpace { modes })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        1 << self.modes
    }

    /// Basis indices with exactly `p` particles, ascending.
    pub fn sector(&self, p: usize) -> Vec<usize> {
        (0..self.dim()).filter(|s| s.count_ones() as usize == p).collect()
    }
}

fn modes_of_dim(dim: usize) -> Result<usize> {
    if !dim.is_power_of_two() {
        return Err(Error::Dimension(format!("{dim} is not a Fock-space dimension")));
    }
    let m = dim.trailing_zeros() as usize;
    FockSpace::new(m).map(|_| m)
}

/// Apply one ladder operator to a basis state; `None` if it annihilates it.
pub fn ladder_on_basis(op: Ladder, state: usize) -> Option<(usize, f64)> {
    let (a, create) = match op {
        Ladder::Create(a) => (a, true),
        Ladder::Annihilate(a) => (a, false),
    };
    let bit = 1usize << a;
    if (state & bit != 0) == create {
        return None;
    }
    let sign = if (state & (bit - 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
    Some((state ^ bit, sign))
}

/// `o_1 o_2 … o_n |ψ⟩`, applying `o_n` first.
pub fn apply_string(ops: &[Ladder], psi: &[C64]) -> Vec<C64> {
    let mut cur = psi.to_vec();
    for &op in ops.iter().rev() {
        let mut next = vec![C64::new(0.0, 0.0); cur.len()];
        for (s, amp) in cur.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            if let Some((t, sign)) = ladder_on_basis(op, s) {
                next[t] += *amp * sign;
            }
        }
        cur = next;
    }
    cur
}

pub fn inner(bra: &[C64], ket: &[C64]) -> C64 {
    bra.iter().zip(ket).map(|(a, b)| a.conj() * b).sum()
}

/// `⟨bra| o_1 … o_n |ket⟩`.
pub fn matrix_element(bra: &[C64], ops: &[Ladder], ket: &[C64]) -> C64 {
    inner(bra, &apply_string(ops, ket))
}

/// Fock-space amplitudes `det U[rows, :]` of a Slater state.
pub fn slater_to_fock(s: &SlaterState) -> Result<Vec<C64>> {
    let space = FockSpace::new(s.modes())?;
    let u = s.orbitals();
    let p = s.particles();
    let mut psi = vec![C64::new(0.0, 0.0); space.dim()];
    for idx in space.sector(p) {
        let rows: Vec<usize> = (0..s.modes()).filter(|a| idx >> a & 1 == 1).collect();
        let sub = Mat::<C64>::from_fn(p, p, |i, j| u[(rows[i], j)]);
        psi[idx] = determinant(&sub);
    }
    Ok(psi)
}

/// Many-body matrix of `Σ_ab h[a][b] c†_a c_b`.
pub fn bilinear_operator(h: &Mat<C64>) -> Result<Mat<C64>> {
    let m = h.nrows();
    let space = FockSpace::new(m)?;
    let mut out = Mat::<C64>::zeros(space.dim(), space.dim());
    for s in 0..space.dim() {
        for b in 0..m {
            let Some((t1, s1)) = ladder_on_basis(Ladder::Annihilate(b), s) else { continue };
            for a in 0..m {
                if h[(a, b)].norm_sqr() == 0.0 {
                    continue;
                }
                if let Some((t2, s2)) = ladder_on_basis(Ladder::Create(a), t1) {
                    out[(t2, s)] += h[(a, b)] * (s1 * s2);
                }
            }
        }
    }
    Ok(out)
}

/// Many-body matrix of an operator string.
pub fn string_operator(m: usize, ops: &[Ladder]) -> Result<Mat<C64>> {
    let space = FockSpace::new(m)?;
    let mut out = Mat::<C64>::zeros(space.dim(), space.dim());
    for s in 0..space.dim() {
        let mut cur = Some((s, 1.0));
        for &op in ops.iter().rev() {
            cur = cur.and_then(|(t, sign)| ladder_on_basis(op, t).map(|(u, g)| (u, sign * g)));
        }
        if let Some((t, sign)) = cur {
            out[(t, s)] += C64::new(sign, 0.0);
        }
    }
    Ok(out)
}

fn frobenius(m: &Mat<C64>) -> f64 {
    let mut s = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            s += m[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

fn trace(m: &Mat<C64>) -> C64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

/// Trace-one positive semidefinite operator on a Fock space.
#[derive(Clone, Debug)]
pub struct DensityMatrixED {
    matrix: Mat<C64>,
    modes: usize,
}

impl DensityMatrixED {
    /// Validate Hermiticity, unit trace and positivity.
    pub fn new(matrix: Mat<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Dimension("density matrix must be square".into()));
        }
        let modes = modes_of_dim(matrix.nrows())?;
        let rho = DensityMatrixED { matrix, modes };
        let herm = frobenius(&(&rho.matrix - rho.matrix.adjoint()));
        if herm > PSD_TOL {
            return Err(Error::Numerical(format!("density matrix not Hermitian ({herm:e})")));
        }
        let tr = rho.trace();
        if (tr - 1.0).norm() > PSD_TOL {
            return Err(Error::Numerical(format!("density matrix trace {tr}")));
        }
        let min = rho.eigenvalues()?.into_iter().fold(f64::INFINITY, f64::min);
        if min < -PSD_TOL {
            return Err(Error::Numerical(format!("density matrix eigenvalue {min:e} < 0")));
        }
        Ok(rho)
    }

    pub fn matrix(&self) -> &Mat<C64> {
        &self.matrix
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        trace(&self.matrix)
    }

    pub fn purity(&self) -> f64 {
        (0..self.dim())
            .flat_map(|i| (0..self.dim()).map(move |j| (i, j)))
            .map(|(i, j)| self.matrix[(i, j)].norm_sqr())
            .sum()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.matrix
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Numerical(format!("eigenvalues: {e:?}")))
    }

    /// `tr[ρ O]`.
    pub fn expectation(&self, op: &Mat<C64>) -> C64 {
        trace(&(&self.matrix * op))
    }

    /// Choi vector `|ρ⟩⟩ = Σ_ij ρ_ij |i⟩|j⟩`, row-major.
    pub fn choi_vector(&self) -> Vec<C64> {
        let d = self.dim();
        (0..d * d).map(|k| self.matrix[(k / d, k % d)]).collect()
    }

    /// Total particle numbers carrying weight above `tol` on the diagonal.
    pub fn charge_sectors(&self, tol: f64) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.dim())
            .filter(|&s| self.matrix[(s, s)].re > tol)
            .map(|s| s.count_ones() as usize)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// `ρ = Σ_k p_k |ψ_k⟩⟨ψ_k|`.
pub fn assemble_density_matrix(states: &[Vec<C64>], weights: &[f64]) -> Result<DensityMatrixED> {
    if states.is_empty() || states.len() != weights.len() {
        return Err(Error::Dimension(format!("{} states, {} weights", states.len(), weights.len())));
    }
    if weights.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
        return Err(Error::invalid("weights", "must be nonnegative"));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::invalid("weights", format!("sum to {total}, not 1")));
    }
    let dim = states[0].len();
    modes_of_dim(dim)?;
    let mut rho = Mat::<C64>::zeros(dim, dim);
    for (psi, &w) in states.iter().zip(weights) {
        if psi.len() != dim {
            return Err(Error::Dimension("states of different dimension".into()));
        }
        let norm = inner(psi, psi).re;
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::invalid("states", format!("state norm² {norm} is not 1")));
        }
        if w == 0.0 {
            continue;
        }
        for j in 0..dim {
            let cj = psi[j].conj() * w;
            if cj.norm_sqr() == 0.0 {
                continue;
            }
            for i in 0..dim {
                rho[(i, j)] += psi[i] * cj;
            }
        }
    }
    DensityMatrixED::new(rho)
}

#[derive(Clone, Debug, Serialize)]
pub struct EprIdentity {
    pub lhs_re: f64,
    pub lhs_im: f64,
    pub rhs_re: f64,
    pub rhs_im: f64,
    pub deviation: f64,
    pub equal: bool,
}

/// Compare `tr[ρAρB]/tr[ρ²]` with the expectation of `A ⊗ Bᵀ` in the
/// doubled purification after projecting the two ancillas onto `Σ_k |kk⟩`.
///
/// The purification is `|Ψ⟩ = Σ_k √λ_k |v_k⟩_s |k⟩_a`; the second copy is
/// complex conjugated, so the projected state has amplitudes
/// `Ψ_pp(s1, s2) = Σ_k Ψ(s1,k) conj(Ψ(s2,k))`.
pub fn epr_renyi_identity(rho: &DensityMatrixED, a: &Mat<C64>, b: &Mat<C64>) -> Result<EprIdentity> {
    let d = rho.dim();
    if a.nrows() != d || a.ncols() != d || b.nrows() != d || b.ncols() != d {
        return Err(Error::Dimension("operators must match the density matrix".into()));
    }
    let purity = rho.purity();
    if purity < 1e-14 {
        return Err(Error::IllConditioned(format!("tr ρ² = {purity:e}")));
    }
    let r = rho.matrix();
    let lhs = trace(&(r * a * r * b)) / purity;

    let evd = r
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical(format!("eigendecomposition: {e:?}")))?;
    let lam = evd.S().column_vector();
    let kept: Vec<usize> = (0..d).filter(|&k| lam[k].re > 1e-15).collect();
    let u = evd.U();
    let psi = Mat::<C64>::from_fn(d, kept.len(), |s, k| u[(s, kept[k])] * lam[kept[k]].re.sqrt());
    let projected = &psi * psi.adjoint();

    // (A ⊗ Bᵀ) acting on the pair index (s1, s2) of Ψ_pp.
    let acted = a * &projected * b;
    let mut num = C64::new(0.0, 0.0);
    let mut norm = 0.0;
    for i in 0..d {
        for j in 0..d {
            num += projected[(i, j)].conj() * acted[(i, j)];
            norm += projected[(i, j)].norm_sqr();
        }
    }
    let rhs = num / norm;
    let deviation = (lhs - rhs).norm();
    Ok(EprIdentity {
        lhs_re: lhs.re,
        lhs_im: lhs.im,
        rhs_re: rhs.re,
        rhs_im: rhs.im,
        deviation,
        equal: deviation <= EPR_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::random_slater_state;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C64> {
        let v: Vec<C64> = (0..dim).map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
        let n = inner(&v, &v).re.sqrt();
        v.into_iter().map(|x| x / n).collect()
    }

    #[test]
    fn anticommutation_on_basis() {
        // c_a c†_b + c†_b c_a = δ_ab on random states
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = random_state(&mut rng, 16);
        for a in 0..4 {
            for b in 0..4 {
                let x = apply_string(&[Ladder::Annihilate(a), Ladder::Create(b)], &psi);
                let y = apply_string(&[Ladder::Create(b), Ladder::Annihilate(a)], &psi);
                for s in 0..16 {
                    let want = if a == b { psi[s] } else { C64::new(0.0, 0.0) };
                    assert!((x[s] + y[s] - want).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn slater_amplitudes_are_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let s = random_slater_state(&mut rng, 6, 3);
        let psi = slater_to_fock(&s).unwrap();
        assert!((inner(&psi, &psi).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn density_matrix_examples() {
        let mut e0 = vec![C64::new(0.0, 0.0); 4];
        let mut e1 = e0.clone();
        e0[1] = C64::new(1.0, 0.0);
        e1[2] = C64::new(1.0, 0.0);
        let rho = assemble_density_matrix(&[e0.clone()], &[1.0]).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-14);
        let mixed = assemble_density_matrix(&[e0, e1], &[0.5, 0.5]).unwrap();
        let mut ev = mixed.eigenvalues().unwrap();
        ev.sort_by(|a, b| b.total_cmp(a));
        assert!((ev[0] - 0.5).abs() < 1e-14 && (ev[1] - 0.5).abs() < 1e-14 && ev[2].abs() < 1e-14);
    }

    #[test]
    fn many_slater_states_give_psd_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let states: Vec<Vec<C64>> = (0..50)
            .map(|_| slater_to_fock(&random_slater_state(&mut rng, 8, 4)).unwrap())
            .collect();
        let rho = assemble_density_matrix(&states, &[0.02; 50]).unwrap();
        assert!(rho.eigenvalues().unwrap().iter().all(|&e| e > -1e-12));
    }

    #[test]
    fn assembly_rejects_bad_weights_and_sizes() {
        let psi = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        assert!(assemble_density_matrix(&[psi.clone()], &[0.5]).is_err());
        assert!(assemble_density_matrix(&[psi.clone()], &[-1.0]).is_err());
        assert!(assemble_density_matrix(&[vec![C64::new(1.0, 0.0); 3]], &[1.0]).is_err());
        assert!(FockSpace::new(15).is_err());
    }

    #[test]
    fn epr_identity_special_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let psi = random_state(&mut rng, 16);
        let rho = assemble_density_matrix(&[psi.clone()], &[1.0]).unwrap();
        let mut h = Mat::<C64>::zeros(4, 4);
        h[(0, 2)] = C64::new(1.0, 0.5);
        h[(3, 1)] = C64::new(-0.3, 0.2);
        let a = bilinear_operator(&h).unwrap();
        let b = bilinear_operator(&h.adjoint().to_owned()).unwrap();
        let r = epr_renyi_identity(&rho, &a, &b).unwrap();
        assert!(r.equal);
        // pure ρ: lhs = ⟨A⟩⟨B⟩
        let ea = rho.expectation(&a);
        let eb = rho.expectation(&b);
        assert!((C64::new(r.lhs_re, r.lhs_im) - ea * eb).norm() < 1e-12);
        let id = Mat::<C64>::identity(16, 16);
        let r = epr_renyi_identity(&rho, &id, &id).unwrap();
        assert!((r.lhs_re - 1.0).abs() < 1e-12 && r.lhs_im.abs() < 1e-12);
    }

    #[test]
    fn choi_norm_is_purity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let states: Vec<Vec<C64>> = (0..3).map(|_| random_state(&mut rng, 8)).collect();
        let rho = assemble_density_matrix(&states, &[0.2, 0.3, 0.5]).unwrap();
        let n2: f64 = rho.choi_vector().iter().map(|z| z.norm_sqr()).sum();
        assert!((n2 - rho.purity()).abs() < 1e-14);
    }
}
