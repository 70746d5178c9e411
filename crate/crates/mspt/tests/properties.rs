use faer::Mat;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use mspt::anomaly::{anomaly_matrix, random_channel_set, region_matrices, ChannelSet};
use mspt::ed::{
    assemble_density_matrix, bilinear_operator, epr_renyi_identity, orbit_average, slater_to_fock,
    strong_symmetry_check, weak_symmetry_check, DensityMatrixED, FockSpace, SymmetryOpED,
};
use mspt::ensemble::{renyi2_explicit, sample_mass_profile, EnsembleSpec};
use mspt::gaussian::{random_orthonormal, random_slater_state, spectral_flow_charge};
use mspt::verify::ledger_flux_consistent;
use mspt::wire::{
    blocks, charge_of, enumerate_symmetric_vertices, hnf::lattice_rank, is_symmetric, null_pairing, Axis,
    ChiralMode, SymmetryGenerator, VertexVector, WireArray,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn dense_vector(r: &mut ChaCha8Rng, n: usize) -> Vec<i64> {
    (0..n).map(|_| r.gen_range(-3..=3)).collect()
}

fn translated(a: &WireArray, x0: i64) -> WireArray {
    let modes = a
        .modes
        .iter()
        .map(|m| ChiralMode { position: m.position.translated(Axis::X, x0), ..m.clone() })
        .collect();
    let gens = a
        .generators
        .iter()
        .map(|g| SymmetryGenerator { modulation: g.modulation.shifted(Axis::X, x0), ..g.clone() })
        .collect();
    WireArray { modes, generators: gens, regions: a.regions.clone() }
}

fn random_state(r: &mut ChaCha8Rng, space: &FockSpace, sector: usize) -> Vec<C64> {
    let mut psi = vec![C64::new(0.0, 0.0); space.dim()];
    for s in space.sector(sector) {
        psi[s] = C64::new(r.sample(StandardNormal), r.sample(StandardNormal));
    }
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    psi.iter().map(|z| z / norm).collect()
}

/// Mixture of random states, each in sector `p` or `p + spread`.
fn random_rho(r: &mut ChaCha8Rng, modes: usize, spread: usize) -> DensityMatrixED {
    let space = FockSpace::new(modes).unwrap();
    let k = r.gen_range(1..=4);
    let p = r.gen_range(0..=modes - spread);
    let states: Vec<_> = (0..k)
        .map(|_| {
            let sector = p + r.gen_range(0..=spread);
            random_state(r, &space, sector)
        })
        .collect();
    let mut w: Vec<f64> = (0..k).map(|_| r.gen_range(0.1..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    assemble_density_matrix(&states, &w).unwrap()
}

fn random_hermitian(r: &mut ChaCha8Rng, m: usize) -> Mat<C64> {
    let mut h = Mat::<C64>::zeros(m, m);
    for i in 0..m {
        h[(i, i)] = C64::new(r.sample(StandardNormal), 0.0);
        for j in 0..i {
            let z = C64::new(r.sample(StandardNormal), r.sample(StandardNormal));
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    h
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn charge_is_linear(seed in any::<u64>()) {
        let mut r = rng(seed);
        let set = random_channel_set(&mut r);
        let n = set.modes.len();
        let (d1, d2) = (dense_vector(&mut r, n), dense_vector(&mut r, n));
        let sum: Vec<i64> = d1.iter().zip(&d2).map(|(a, b)| a + b).collect();
        let v = |d: &[i64]| VertexVector::from_dense(&set, d).unwrap();
        for g in &set.generators {
            prop_assert_eq!(
                charge_of(&v(&sum), g, &set).unwrap(),
                charge_of(&v(&d1), g, &set).unwrap() + charge_of(&v(&d2), g, &set).unwrap()
            );
            prop_assert_eq!(charge_of(&v(&d1).negated(), g, &set).unwrap(), -charge_of(&v(&d1), g, &set).unwrap());
        }
        prop_assert_eq!(null_pairing(&v(&d1), &v(&d2), &set).unwrap(), null_pairing(&v(&d2), &v(&d1), &set).unwrap());
    }

    #[test]
    fn origin_shift_leaves_charges_and_anomalies(seed in any::<u64>(), x0 in -4i64..=4) {
        let mut r = rng(seed);
        let set = random_channel_set(&mut r);
        let moved = translated(&set, x0);
        let d = dense_vector(&mut r, set.modes.len());
        for (g, h) in set.generators.iter().zip(&moved.generators) {
            prop_assert_eq!(
                charge_of(&VertexVector::from_dense(&set, &d).unwrap(), g, &set).unwrap(),
                charge_of(&VertexVector::from_dense(&moved, &d).unwrap(), h, &moved).unwrap()
            );
        }
        prop_assert_eq!(anomaly_matrix(&set), anomaly_matrix(&moved));
    }

    #[test]
    fn anomaly_matrix_is_symmetric_and_additive(seed in any::<u64>()) {
        let set: ChannelSet = random_channel_set(&mut rng(seed));
        let a = anomaly_matrix(&set);
        let k = a.generators.len();
        let mut sum = vec![vec![0i64; k]; k];
        for part in region_matrices(&set).values() {
            prop_assert_eq!(&part.generators, &a.generators);
            for i in 0..k {
                for j in 0..k {
                    sum[i][j] += part.entries[i][j];
                }
            }
        }
        for i in 0..k {
            for j in 0..k {
                prop_assert_eq!(a.entries[i][j], a.entries[j][i]);
            }
        }
        prop_assert_eq!(sum, a.entries.clone());
    }

    #[test]
    fn ledger_matches_flux(seed in any::<u64>()) {
        prop_assert!(ledger_flux_consistent(&random_channel_set(&mut rng(seed))).unwrap());
    }

    #[test]
    fn enumeration_is_closed(seed in any::<u64>()) {
        let set = random_channel_set(&mut rng(seed));
        prop_assume!(set.modes.len() <= 5);
        let e = enumerate_symmetric_vertices(&set, 2).unwrap();
        let basis: Vec<Vec<i64>> = e.basis.iter().map(|v| v.to_dense(&set).unwrap()).collect();
        prop_assert_eq!(lattice_rank(&basis), e.rank());
        for s in &e.solutions {
            prop_assert!(is_symmetric(s, &set).unwrap());
            prop_assert_eq!(null_pairing(s, s, &set).unwrap(), 0);
            let mut with = basis.clone();
            with.push(s.to_dense(&set).unwrap());
            prop_assert_eq!(lattice_rank(&with), e.rank());
        }
    }

    #[test]
    fn renyi2_is_gauge_invariant(seed in any::<u64>(), modes in 3usize..=6) {
        let mut r = rng(seed);
        let p = r.gen_range(1..modes);
        let k = r.gen_range(1..=3);
        let states: Vec<_> = (0..k).map(|_| random_slater_state(&mut r, modes, p)).collect();
        let rotated: Vec<_> = states.iter().map(|s| s.rotated(&random_orthonormal(&mut r, p, p)).unwrap()).collect();
        let w: Vec<f64> = (0..k).map(|_| r.gen_range(0.1..1.0)).collect();
        let pairs: Vec<(usize, usize)> = (0..modes).flat_map(|a| (0..modes).map(move |b| (a, b))).collect();
        let x = renyi2_explicit(&states, &w, &pairs).unwrap();
        let y = renyi2_explicit(&rotated, &w, &pairs).unwrap();
        for (a, b) in x.iter().zip(&y) {
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn charge_rotation_is_2pi_periodic(modes in 1usize..=8, theta in -7.0f64..7.0) {
        let a = SymmetryOpED::charge(modes, theta).unwrap();
        let b = a.at_angle(theta + 2.0 * std::f64::consts::PI);
        for (x, y) in a.diagonal().iter().zip(b.diagonal()) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn strong_implies_weak(seed in any::<u64>(), modes in 2usize..=6, spread in 0usize..=1, avg in any::<bool>()) {
        let mut r = rng(seed);
        let mut rho = random_rho(&mut r, modes, spread);
        if avg {
            rho = orbit_average(&rho, &SymmetryOpED::charge(modes, 0.0).unwrap()).unwrap();
        }
        let op = SymmetryOpED::charge(modes, r.gen_range(0.1..3.0)).unwrap();
        let strong = strong_symmetry_check(&rho, &op).unwrap();
        if strong.pass {
            prop_assert!(weak_symmetry_check(&rho, &op).unwrap().pass);
        }
        if spread == 0 {
            prop_assert!(strong.pass);
        }
    }

    #[test]
    fn epr_identity_holds(seed in any::<u64>(), modes in 2usize..=5) {
        let mut r = rng(seed);
        let rho = random_rho(&mut r, modes, 1);
        let a = bilinear_operator(&random_hermitian(&mut r, modes)).unwrap();
        let b = bilinear_operator(&random_hermitian(&mut r, modes)).unwrap();
        let id = epr_renyi_identity(&rho, &a, &b).unwrap();
        prop_assert!(id.deviation < 1e-12, "{id:?}");
    }

    #[test]
    fn choi_norm_is_purity(seed in any::<u64>(), modes in 1usize..=6) {
        let mut r = rng(seed);
        let rho = random_rho(&mut r, modes, 1);
        let norm: f64 = rho.choi_vector().iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((norm - rho.purity()).abs() < 1e-12);
    }

    #[test]
    fn fock_embedding_is_normalized(seed in any::<u64>(), modes in 1usize..=8) {
        let mut r = rng(seed);
        let p = r.gen_range(0..=modes);
        let psi = slater_to_fock(&random_slater_state(&mut r, modes, p)).unwrap();
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn spectral_flow_is_additive(n in 24usize..=40, m in 0.3f64..0.8, w1 in -1i64..=1, w2 in -1i64..=1) {
        let q = |w| spectral_flow_charge(n, 1.0, m, 1.0, w).unwrap();
        prop_assert_eq!(q(w1) + q(w2), q(w1 + w2));
        prop_assert_eq!(q(w1), w1);
    }

    #[test]
    fn profiles_are_deterministic(seed in any::<u64>(), index in 0u64..1000, n in 8usize..=64) {
        let spec = EnsembleSpec::new(n, 10, seed);
        prop_assert_eq!(sample_mass_profile(&spec, index), sample_mass_profile(&spec, index));
    }
}

#[test]
fn building_blocks_enumerate_closed() {
    for name in blocks::BLOCK_NAMES {
        let b = blocks::block(name).unwrap();
        let e = enumerate_symmetric_vertices(&b, 2).unwrap();
        for s in &e.solutions {
            assert!(is_symmetric(s, &b).unwrap());
            assert_eq!(null_pairing(s, s, &b).unwrap(), 0);
        }
    }
}
