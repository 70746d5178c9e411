//! Brute-force validation of the Slater-determinant algebra.

use std::collections::BTreeMap;

use faer::Mat;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::{assemble_density_matrix, bilinear_operator, inner, matrix_element, slater_to_fock, FockSpace};
use crate::ensemble::renyi2_explicit;
use crate::error::{Error, Result};
use crate::gaussian::{wick_expectation, Ladder, SlaterState, TransitionKernel};

pub const CROSSCHECK_MAX_MODES: usize = 10;

#[derive(Clone, Debug, Serialize)]
pub struct CrosscheckReport {
    pub modes: usize,
    pub particles: usize,
    pub checks: usize,
    pub max_deviation: f64,
    /// Largest deviation per kind of quantity.
    pub deviations: BTreeMap<String, f64>,
}

/// Lowest `p` orbitals of a random Hermitian matrix with a clear gap above
/// them.
fn random_gapped_state<R: Rng + ?Sized>(rng: &mut R, m: usize, p: usize) -> Result<SlaterState> {
    for _ in 0..100 {
        let mut h = Mat::<C64>::zeros(m, m);
        for i in 0..m {
            h[(i, i)] = C64::new(rng.sample(StandardNormal), 0.0);
            for j in 0..i {
                let z = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        let evd = h
            .self_adjoint_eigen(faer::Side::Lower)
            .map_err(|e| Error::Numerical(format!("{e:?}")))?;
        let s = evd.S().column_vector();
        if p == 0 || p == m || s[p].re - s[p - 1].re > 1e-3 {
            return SlaterState::new(evd.U().subcols(0, p).to_owned());
        }
    }
    Err(Error::Numerical("no gapped random Hamiltonian found".into()))
}

fn random_string<R: Rng + ?Sized>(rng: &mut R, m: usize, len: usize) -> Vec<Ladder> {
    let mut ops: Vec<Ladder> = (0..len / 2)
        .flat_map(|_| [Ladder::Create(rng.gen_range(0..m)), Ladder::Annihilate(rng.gen_range(0..m))])
        .collect();
    // Random order; the expectation is still number conserving.
    for i in (1..ops.len()).rev() {
        ops.swap(i, rng.gen_range(0..=i));
    }
    ops
}

/// Compare overlaps, transition elements, Wick strings and Rényi-2 terms of
/// two random gapped ground states against the dense Fock-space result.
pub fn crosscheck_gaussian<R: Rng + ?Sized>(rng: &mut R, modes: usize) -> Result<CrosscheckReport> {
    if modes == 0 || modes > CROSSCHECK_MAX_MODES {
        return Err(Error::Capacity(format!("crosscheck supports 1..={CROSSCHECK_MAX_MODES} modes")));
    }
    FockSpace::new(modes)?;
    let p = modes / 2;
    let s1 = random_gapped_state(rng, modes, p)?;
    let s2 = random_gapped_state(rng, modes, p)?;
    let psi1 = slater_to_fock(&s1)?;
    let psi2 = slater_to_fock(&s2)?;

    let mut dev: BTreeMap<String, f64> = BTreeMap::new();
    let mut checks = 0;
    let mut record = |kind: &str, d: f64| {
        let e = dev.entry(kind.to_string()).or_insert(0.0);
        *e = e.max(d);
        checks += 1;
    };

    let kernel = TransitionKernel::new(&s1, &s2)?;
    record("overlap", (kernel.overlap() - inner(&psi1, &psi2)).norm());
    for a in 0..modes {
        for b in 0..modes {
            let ed = matrix_element(&psi1, &[Ladder::Create(a), Ladder::Annihilate(b)], &psi2);
            record("transition", (kernel.element(a, b) - ed).norm());
        }
    }

    record("identity", (wick_expectation(&s1, &[])? - inner(&psi1, &psi1)).norm());
    for k in 0..12 {
        let ops = random_string(rng, modes, if k % 3 == 0 { 2 } else { 4 });
        let ed = matrix_element(&psi1, &ops, &psi1);
        record("wick", (wick_expectation(&s1, &ops)? - ed).norm());
    }

    let w: f64 = rng.gen_range(0.2..0.8);
    let weights = [w, 1.0 - w];
    let rho = assemble_density_matrix(&[psi1, psi2], &weights)?;
    let r = rho.matrix();
    let purity = rho.purity();
    let pairs: Vec<(usize, usize)> =
        (0..4).map(|_| (rng.gen_range(0..modes), rng.gen_range(0..modes))).collect();
    let gauss = renyi2_explicit(&[s1, s2], &weights, &pairs)?;
    for (&(a, b), g) in pairs.iter().zip(gauss) {
        let mut h = Mat::<C64>::zeros(modes, modes);
        h[(a, b)] = C64::new(1.0, 0.0);
        let op = bilinear_operator(&h)?;
        let op_dag = op.adjoint().to_owned();
        let num = r * &op * r * &op_dag;
        let tr: C64 = (0..num.nrows()).map(|i| num[(i, i)]).sum();
        record("renyi2", (C64::new(g, 0.0) - tr / purity).norm());
    }

    let max_deviation = dev.values().copied().fold(0.0, f64::max);
    Ok(CrosscheckReport { modes, particles: p, checks, max_deviation, deviations: dev })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eight_mode_crosscheck() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let r = crosscheck_gaussian(&mut rng, 8).unwrap();
        assert!(r.max_deviation < 1e-10, "{r:?}");
        assert!(r.deviations["identity"] < 1e-13);
        assert!(crosscheck_gaussian(&mut rng, 11).is_err());
    }
}
