//! Disorder ensembles of edge ground states and their correlators.
//!
//! A sample is the ground state of the edge ring with a mass phase
//!
//! ```text
//! α(y) = Σ_{n=1}^{N/2-1} (a_n cos k_n y + b_n sin k_n y) + β + 2π w y / N
//! ```
//!
//! with `a_n, b_n ~ N(0, s_n²)`, `s_n² = (g/n) exp(-(n/(N/4))²)` and a
//! uniform global phase `β`. The `1/n` spectrum makes `α` log-correlated
//! with stiffness `g`; the Gaussian taper is the UV cutoff.

mod fit;
mod linear;
mod mixed;
mod renyi;

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{build_edge_hamiltonian, fill_negative, MassProfile, SlaterState, MIN_SITES};
use crate::rng::substream;

pub use fit::{fit_decay, DecayModel, FitRecord, LineFit, MIN_BINS_AFTER_SHRINK, MIN_FIT_BINS};
pub use linear::{linear_correlator, uniform_propagator_length, CorrelatorEstimate, Operator};
pub use mixed::{ensemble_density_matrix, symmetry_report, SymmetryReport, SymmetryTarget};
pub use renyi::{renyi2_correlator, renyi2_explicit};

pub const DEFAULT_PAIR_BUDGET: usize = 10_000;
/// Draws allowed per requested sample before the ensemble gives up.
pub const OVERSAMPLING_CAP: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindingWeight {
    pub w: i64,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindingRule {
    Fixed(i64),
    Mixture(Vec<WindingWeight>),
}

impl WindingRule {
    pub fn sectors(&self) -> Vec<i64> {
        match self {
            WindingRule::Fixed(w) => vec![*w],
            WindingRule::Mixture(ws) => ws.iter().map(|x| x.w).collect(),
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        match self {
            WindingRule::Fixed(w) => *w,
            WindingRule::Mixture(ws) => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for x in ws {
                    acc += x.p;
                    if u < acc {
                        return x.w;
                    }
                }
                ws.last().expect("validated nonempty").w
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub n_sites: usize,
    pub samples: usize,
    pub seed: u64,
    pub mass: f64,
    pub stiffness: f64,
    pub winding: WindingRule,
    pub wilson: f64,
    pub velocity: f64,
    #[serde(default = "default_pairs")]
    pub pair_budget: usize,
}

fn default_pairs() -> usize {
    DEFAULT_PAIR_BUDGET
}

impl EnsembleSpec {
    /// `m̄ = 0.5`, `g = 0.5`, `b = 1`, `v = 1`, winding 0.
    pub fn new(n_sites: usize, samples: usize, seed: u64) -> Self {
        EnsembleSpec {
            n_sites,
            samples,
            seed,
            mass: 0.5,
            stiffness: 0.5,
            winding: WindingRule::Fixed(0),
            wilson: 1.0,
            velocity: 1.0,
            pair_budget: DEFAULT_PAIR_BUDGET,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < MIN_SITES {
            return Err(Error::invalid("n_sites", format!("need at least {MIN_SITES}")));
        }
        if self.samples < 2 {
            return Err(Error::invalid("samples", "need at least 2"));
        }
        if !(self.stiffness >= 0.0 && self.stiffness.is_finite()) {
            return Err(Error::invalid("stiffness", "must be finite and nonnegative"));
        }
        if !(self.mass >= 0.0 && self.mass.is_finite()) {
            return Err(Error::invalid("mass", "must be finite and nonnegative"));
        }
        if !(self.wilson.is_finite() && self.velocity.is_finite() && self.velocity > 0.0) {
            return Err(Error::invalid("velocity", "velocity must be positive and wilson finite"));
        }
        if let WindingRule::Mixture(ws) = &self.winding {
            if ws.is_empty() {
                return Err(Error::invalid("winding", "mixture needs at least one sector"));
            }
            if ws.iter().any(|x| !(x.p >= 0.0)) {
                return Err(Error::invalid("winding", "probabilities must be nonnegative"));
            }
            let total: f64 = ws.iter().map(|x| x.p).sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::invalid("winding", format!("probabilities sum to {total}")));
            }
        }
        Ok(())
    }

    /// Correlation length `v / m̄` of the uniform massive edge.
    pub fn xi(&self) -> f64 {
        self.velocity / self.mass
    }

    /// Particle number of a valid sample in sector `w`.
    pub fn expected_particles(&self, w: i64) -> i64 {
        self.n_sites as i64 + w
    }
}

/// Amplitude variances `s_n²` for `n = 1 ..= N/2 - 1`.
pub fn mode_variances(n_sites: usize, stiffness: f64) -> Vec<f64> {
    let cutoff = n_sites as f64 / 4.0;
    (1..(n_sites / 2).max(1))
        .map(|n| {
            let n = n as f64;
            stiffness / n * (-(n / cutoff).powi(2)).exp()
        })
        .collect()
}

/// `Var[α(y) - α(y+d)] = 2 Σ_n s_n² (1 - cos k_n d)` of the synthesized field.
pub fn phase_difference_variance(n_sites: usize, stiffness: f64, d: usize) -> f64 {
    mode_variances(n_sites, stiffness)
        .iter()
        .enumerate()
        .map(|(i, s2)| {
            let k = 2.0 * PI * (i + 1) as f64 / n_sites as f64;
            2.0 * s2 * (1.0 - (k * d as f64).cos())
        })
        .sum()
}

/// Phase field from Fourier amplitudes `a_n`, `b_n`, global phase and winding.
pub(crate) fn synthesize_phase(n_sites: usize, a: &[f64], b: &[f64], beta: f64, w: i64) -> Vec<f64> {
    (0..n_sites)
        .map(|y| {
            let mut s = beta + 2.0 * PI * w as f64 * y as f64 / n_sites as f64;
            for (i, (an, bn)) in a.iter().zip(b).enumerate() {
                let k = 2.0 * PI * (i + 1) as f64 / n_sites as f64;
                s += an * (k * y as f64).cos() + bn * (k * y as f64).sin();
            }
            s
        })
        .collect()
}

/// Deterministic draw `index` of the ensemble.
pub fn sample_mass_profile(spec: &EnsembleSpec, index: u64) -> MassProfile {
    let mut rng = substream(spec.seed, "profile", index);
    let w = spec.winding.draw(&mut rng);
    let var = mode_variances(spec.n_sites, spec.stiffness);
    let mut a = Vec::with_capacity(var.len());
    let mut b = Vec::with_capacity(var.len());
    for s2 in &var {
        let sd = s2.sqrt();
        a.push(sd * rng.sample::<f64, _>(StandardNormal));
        b.push(sd * rng.sample::<f64, _>(StandardNormal));
    }
    let beta = rng.gen_range(0.0..2.0 * PI);
    let phase = synthesize_phase(spec.n_sites, &a, &b, beta, w);
    MassProfile { magnitude: vec![spec.mass; spec.n_sites], phase, winding: w }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Rejection {
    ZeroMode,
    /// Ground-state charge differs from `N + w`: a steep local phase gradient
    /// closed the gap somewhere along the spectral flow.
    Sector,
}

/// Ground state of a profile, rejected when gapless or in the wrong sector.
pub(crate) fn solve_profile(
    spec: &EnsembleSpec,
    profile: &MassProfile,
) -> std::result::Result<SlaterState, Rejection> {
    let h = build_edge_hamiltonian(spec.n_sites, spec.velocity, profile, spec.wilson, 0.0)
        .expect("spec validated");
    let (e, v) = h.diagonalize().map_err(|_| Rejection::ZeroMode)?;
    let s = fill_negative(&e, &v, "").map_err(|_| Rejection::ZeroMode)?;
    if s.particles() as i64 != spec.expected_particles(profile.winding) {
        return Err(Rejection::Sector);
    }
    Ok(s)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SamplingStats {
    pub requested: usize,
    pub valid: usize,
    pub attempted: usize,
    pub rejected_zero_mode: usize,
    pub rejected_sector: usize,
}

/// Map `f` over the first `spec.samples` valid draws, in index order.
///
/// Invalid draws are skipped and counted; at most `3 K` draws are tried and
/// fewer than `K/2` valid ones is an error.
pub(crate) fn map_valid_samples<T, F>(spec: &EnsembleSpec, f: F) -> Result<(Vec<T>, SamplingStats)>
where
    T: Send,
    F: Fn(u64, &MassProfile, &SlaterState) -> T + Sync,
{
    spec.validate()?;
    let k = spec.samples;
    let cap = OVERSAMPLING_CAP * k;
    let mut stats = SamplingStats { requested: k, ..Default::default() };
    let mut out = Vec::with_capacity(k);
    let mut next = 0usize;
    while out.len() < k && next < cap {
        let batch: Vec<u64> = (next..(next + k - out.len()).min(cap)).map(|i| i as u64).collect();
        next += batch.len();
        let eval = |&i: &u64| {
            let p = sample_mass_profile(spec, i);
            solve_profile(spec, &p).map(|s| f(i, &p, &s))
        };
        let results: Vec<_> = par_map(&batch, eval);
        for r in results {
            stats.attempted += 1;
            match r {
                Ok(v) if out.len() < k => out.push(v),
                Ok(_) => {}
                Err(Rejection::ZeroMode) => stats.rejected_zero_mode += 1,
                Err(Rejection::Sector) => stats.rejected_sector += 1,
            }
        }
    }
    stats.valid = out.len();
    if 2 * out.len() < k {
        return Err(Error::Ensemble(format!(
            "only {} valid samples of {k} requested after {} draws",
            out.len(),
            stats.attempted
        )));
    }
    Ok((out, stats))
}

#[cfg(feature = "parallel")]
pub(crate) fn par_map<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    F: Fn(&I) -> T,
{
    items.iter().map(f).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindingReport {
    /// sector w → ground-state particle number of the uniform profile
    pub charges: Vec<(i64, usize)>,
    pub strong_symmetry_broken: bool,
}

/// Ground-state charge of each winding sector of the winding rule.
pub fn winding_charge_report(spec: &EnsembleSpec) -> Result<WindingReport> {
    spec.validate()?;
    let mut sectors = spec.winding.sectors();
    sectors.sort_unstable();
    sectors.dedup();
    let mut charges = Vec::new();
    for w in sectors {
        let p = MassProfile::uniform(spec.n_sites, spec.mass, w);
        let h = build_edge_hamiltonian(spec.n_sites, spec.velocity, &p, spec.wilson, 0.0)?;
        let (e, v) = h.diagonalize()?;
        let s = fill_negative(&e, &v, &format!(" in winding sector {w}"))?;
        charges.push((w, s.particles()));
    }
    let mut distinct: Vec<usize> = charges.iter().map(|c| c.1).collect();
    distinct.sort_unstable();
    distinct.dedup();
    Ok(WindingReport { strong_symmetry_broken: distinct.len() > 1, charges })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_stiffness_gives_constant_plus_winding() {
        let mut spec = EnsembleSpec::new(32, 4, 3);
        spec.stiffness = 0.0;
        spec.winding = WindingRule::Fixed(2);
        let p = sample_mass_profile(&spec, 0);
        let beta = p.phase[0];
        for (y, a) in p.phase.iter().enumerate() {
            let want = beta + 2.0 * PI * 2.0 * y as f64 / 32.0;
            assert!((a - want).abs() < 1e-12);
        }
        assert_eq!(p.winding, 2);
        assert!((p.tracked_winding() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn profiles_are_deterministic() {
        let spec = EnsembleSpec::new(48, 4, 9);
        assert_eq!(sample_mass_profile(&spec, 5), sample_mass_profile(&spec, 5));
        assert_ne!(sample_mass_profile(&spec, 5), sample_mass_profile(&spec, 6));
    }

    #[test]
    fn winding_reports() {
        let mut spec = EnsembleSpec::new(32, 4, 1);
        spec.winding = WindingRule::Mixture(vec![WindingWeight { w: 0, p: 0.5 }, WindingWeight { w: 1, p: 0.5 }]);
        let r = winding_charge_report(&spec).unwrap();
        assert_eq!(r.charges, vec![(0, 32), (1, 33)]);
        assert!(r.strong_symmetry_broken);
        spec.winding = WindingRule::Fixed(0);
        assert!(!winding_charge_report(&spec).unwrap().strong_symmetry_broken);
        spec.winding = WindingRule::Mixture(vec![WindingWeight { w: -1, p: 0.5 }, WindingWeight { w: 1, p: 0.5 }]);
        assert_eq!(winding_charge_report(&spec).unwrap().charges, vec![(-1, 31), (1, 33)]);
    }

    #[test]
    fn validation() {
        let mut spec = EnsembleSpec::new(32, 1, 1);
        assert!(spec.validate().is_err());
        spec.samples = 4;
        spec.winding = WindingRule::Mixture(vec![WindingWeight { w: 0, p: 0.4 }]);
        assert!(spec.validate().is_err());
        spec.winding = WindingRule::Fixed(0);
        spec.stiffness = -1.0;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn synthesized_variance_is_log_like() {
        // Slope of Var[α(y) - α(y+d)] against log d on [2, N/8] is 2g.
        let (n, g) = (128, 0.5);
        let ds: Vec<f64> = (2..=n / 8).map(|d| d as f64).collect();
        let v: Vec<f64> = (2..=n / 8).map(|d| phase_difference_variance(n, g, d)).collect();
        let x: Vec<f64> = ds.iter().map(|d| d.ln()).collect();
        let (mx, mv) = (x.iter().sum::<f64>() / x.len() as f64, v.iter().sum::<f64>() / v.len() as f64);
        let slope = x.iter().zip(&v).map(|(a, b)| (a - mx) * (b - mv)).sum::<f64>()
            / x.iter().map(|a| (a - mx).powi(2)).sum::<f64>();
        assert!((slope - 2.0 * g).abs() < 0.15 * 2.0 * g, "{slope}");
    }

    #[test]
    fn sampled_variance_matches_synthesized() {
        let (n, k) = (128, 10_000u64);
        let spec = EnsembleSpec::new(n, k as usize, 21);
        let ds: Vec<usize> = (2..=n / 8).collect();
        let mut acc = vec![0.0; ds.len()];
        for i in 0..k {
            let p = sample_mass_profile(&spec, i).phase;
            for (slot, &d) in acc.iter_mut().zip(&ds) {
                *slot += (0..n).map(|y| (p[(y + d) % n] - p[y]).powi(2)).sum::<f64>() / n as f64;
            }
        }
        for (v, &d) in acc.iter().zip(&ds) {
            let emp = v / k as f64;
            let want = phase_difference_variance(n, spec.stiffness, d);
            assert!((emp - want).abs() < 0.05 * want, "d={d}: {emp} vs {want}");
        }
    }
}
