//! Ensemble averages of two-point functions that are linear in the state.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use faer::Mat;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::fit::{fit_decay, FitRecord};
use super::{map_valid_samples, EnsembleSpec, SamplingStats};
use crate::error::{Error, Result};
use crate::gaussian::{build_edge_hamiltonian, ground_state, left, right, MassProfile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Operator {
    /// `G(y) = c†_{yR} c_{yL}`: charge neutral, dipole charged. The
    /// correlator is `⟨G†(y') G(y)⟩`.
    G,
    /// `⟨c†_{y'L} c_{yL}⟩`: single fermion propagator.
    S,
    /// Rényi-2 correlator of `ψ†_L(y) ψ_L(y')`.
    Renyi2,
}

impl Operator {
    pub fn name(self) -> &'static str {
        match self {
            Operator::G => "G",
            Operator::S => "S",
            Operator::Renyi2 => "renyi2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "g" => Ok(Operator::G),
            "s" => Ok(Operator::S),
            "renyi2" | "r2" => Ok(Operator::Renyi2),
            _ => Err(Error::invalid("operator", format!("`{s}` is not one of G, S, renyi2"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelatorEstimate {
    pub operator: Operator,
    pub n_sites: usize,
    pub distances: Vec<usize>,
    pub values: Vec<C64>,
    pub stderr: Vec<f64>,
    pub fit: FitRecord,
    pub sampling: SamplingStats,
    pub diagnostics: BTreeMap<String, f64>,
}

impl CorrelatorEstimate {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn csv(&self) -> String {
        let mut s = String::from("distance,mean_re,mean_im,stderr\n");
        for ((d, v), e) in self.distances.iter().zip(&self.values).zip(&self.stderr) {
            writeln!(s, "{d},{:.12e},{:.12e},{:.12e}", v.re, v.im, e).expect("string write");
        }
        s
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "operator": self.operator.name(),
            "fit_model": self.fit.model,
            "exponent_or_length": self.fit.exponent_or_length,
            "r2": self.fit.r2,
            "margin": self.fit.margin,
            "fit_window": [self.fit.window.0, self.fit.window.1],
            "n_valid_samples": self.sampling.valid,
            "n_rejected": self.sampling.attempted - self.sampling.valid,
            "diagnostics": self.diagnostics,
        })
    }
}

/// Default fit window `[4, N/4]`.
pub fn default_window(n_sites: usize) -> (usize, usize) {
    (4, n_sites / 4)
}

/// `⟨G†(y')G(y)⟩ = ⟨c†_{y'L} c_{y'R} c†_{yR} c_{yL}⟩` by Wick's theorem.
pub(crate) fn g_pair(c: &Mat<C64>, y: usize, yp: usize) -> C64 {
    let (a, b, cc, d) = (left(yp), right(yp), right(y), left(y));
    let delta = if b == cc { 1.0 } else { 0.0 };
    c[(a, b)] * c[(cc, d)] + c[(a, d)] * (C64::new(delta, 0.0) - c[(cc, b)])
}

/// `⟨G(y)⟩ = ⟨c†_{yR} c_{yL}⟩` on every site.
pub(crate) fn g_local(c: &Mat<C64>, n: usize) -> Vec<C64> {
    (0..n).map(|y| c[(right(y), left(y))]).collect()
}

/// Average of `f(y, y')` over anchors `y` and `y' = y ± d`, for `d = 1..=N/2`.
fn ring_average(n: usize, f: impl Fn(usize, usize) -> C64) -> Vec<C64> {
    (1..=n / 2)
        .map(|d| {
            let mut acc = C64::new(0.0, 0.0);
            for y in 0..n {
                acc += f(y, (y + d) % n) + f(y, (y + n - d) % n);
            }
            acc / (2 * n) as f64
        })
        .collect()
}

/// Average of `f(y, y + d)` over anchors, for `d = 1..=N/2`. Used for the
/// chiral propagator, whose odd part would cancel between `±d`.
fn directed_average(n: usize, f: impl Fn(usize, usize) -> C64) -> Vec<C64> {
    (1..=n / 2).map(|d| (0..n).map(|y| f(y, (y + d) % n)).sum::<C64>() / n as f64).collect()
}

/// Ring-averaged raw correlator of one sample.
pub(crate) fn sample_curve(c: &Mat<C64>, n: usize, op: Operator) -> Vec<C64> {
    match op {
        Operator::S => directed_average(n, |y, yp| c[(left(yp), left(y))]),
        _ => ring_average(n, |y, yp| g_pair(c, y, yp)),
    }
}

/// Mean and standard error across samples, bin by bin.
pub(crate) fn mean_and_stderr(curves: &[Vec<C64>]) -> (Vec<C64>, Vec<f64>) {
    let k = curves.len() as f64;
    let bins = curves[0].len();
    let mut mean = vec![C64::new(0.0, 0.0); bins];
    for c in curves {
        for (m, v) in mean.iter_mut().zip(c) {
            *m += v / k;
        }
    }
    let stderr = (0..bins)
        .map(|i| {
            let var: f64 = curves.iter().map(|c| (c[i] - mean[i]).norm_sqr()).sum::<f64>() / (k - 1.0);
            (var / k).sqrt()
        })
        .collect();
    (mean, stderr)
}

/// Ensemble average of `S`, or of the ensemble-connected `G` correlator
/// `tr[ρG†(y')G(y)] - tr[ρG†(y')] tr[ρG(y)]`, fitted over `[4, N/4]`.
pub fn linear_correlator(spec: &EnsembleSpec, op: Operator) -> Result<CorrelatorEstimate> {
    if op == Operator::Renyi2 {
        return Err(Error::Unsupported("the Rényi-2 correlator is not linear in ρ".into()));
    }
    let n = spec.n_sites;
    let (samples, sampling) = map_valid_samples(spec, |_, _, s| {
        let c = s.correlation_matrix();
        (sample_curve(&c, n, op), if op == Operator::G { g_local(&c, n) } else { Vec::new() })
    })?;
    let mut curves: Vec<Vec<C64>> = samples.iter().map(|s| s.0.clone()).collect();
    if op == Operator::G {
        // Connected in the ensemble: subtract tr[ρG†(y')] tr[ρG(y)]. The
        // subtraction is linear in each sample's ⟨G(y)⟩, so it is applied
        // sample by sample and the error bars keep their meaning.
        let k = samples.len() as f64;
        let mut gbar = vec![C64::new(0.0, 0.0); n];
        for (_, g) in &samples {
            for (m, v) in gbar.iter_mut().zip(g) {
                *m += v / k;
            }
        }
        for (curve, (_, g)) in curves.iter_mut().zip(&samples) {
            let sub = ring_average(n, |y, yp| gbar[yp].conj() * g[y]);
            for (v, s) in curve.iter_mut().zip(sub) {
                *v -= s;
            }
        }
    }
    let (values, stderr) = mean_and_stderr(&curves);
    let distances: Vec<usize> = (1..=n / 2).collect();
    let mags: Vec<f64> = values.iter().map(|v| v.norm()).collect();
    let fit = fit_decay(&distances, &mags, default_window(n))?;
    Ok(CorrelatorEstimate {
        operator: op,
        n_sites: n,
        distances,
        values,
        stderr,
        fit,
        sampling,
        diagnostics: BTreeMap::new(),
    })
}

/// Exponential decay length of `|S(d)|` for the uniform, winding-free mass,
/// fitted on `[⌈3ξ⌉, N/4]` with `ξ = v/m̄`.
pub fn uniform_propagator_length(spec: &EnsembleSpec) -> Result<f64> {
    spec.validate()?;
    let n = spec.n_sites;
    let h = build_edge_hamiltonian(n, spec.velocity, &MassProfile::uniform(n, spec.mass, 0), spec.wilson, 0.0)?;
    let s = ground_state(&h)?;
    let curve = sample_curve(&s.correlation_matrix(), n, Operator::S);
    let mags: Vec<f64> = curve.iter().map(|v| v.norm()).collect();
    let distances: Vec<usize> = (1..=n / 2).collect();
    let lo = (3.0 * spec.xi()).ceil() as usize;
    let fit = fit_decay(&distances, &mags, (lo.max(1), n / 4))?;
    Ok(-1.0 / fit.exponential.slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::random_slater_state;
    use crate::gaussian::wick_with_correlation;
    use crate::gaussian::Ladder::{Annihilate, Create};
    use rand::SeedableRng;

    #[test]
    fn g_pair_matches_wick() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let n = 4;
        let s = random_slater_state(&mut rng, 2 * n, n);
        let c = s.correlation_matrix();
        for y in 0..n {
            for yp in 0..n {
                let full = wick_with_correlation(
                    &c,
                    &[Create(left(yp)), Annihilate(right(yp)), Create(right(y)), Annihilate(left(y))],
                )
                .unwrap();
                assert!((full - g_pair(&c, y, yp)).norm() < 1e-12);
                // G†(y')G(y) and G†(y)G(y') are Hermitian conjugates.
                assert!((g_pair(&c, y, yp) - g_pair(&c, yp, y).conj()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn stderr_of_identical_curves_vanishes() {
        let c = vec![C64::new(1.0, 2.0), C64::new(-0.5, 0.0)];
        let (m, e) = mean_and_stderr(&[c.clone(), c.clone(), c]);
        assert_eq!(m[0], C64::new(1.0, 2.0));
        assert!(e.iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn uniform_length_tracks_v_over_m() {
        let spec = EnsembleSpec::new(96, 4, 1);
        let xi = uniform_propagator_length(&spec).unwrap();
        assert!(xi > 0.5 * spec.xi() && xi < 1.5 * spec.xi(), "{xi}");
    }
}
