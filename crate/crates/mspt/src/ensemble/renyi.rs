//! Rényi-2 correlator of the fermion propagator,
//!
//! ```text
//! R(y, y') = tr[ρ A ρ A†] / tr[ρ²],   A = c†_{y'L} c_{yL},
//! ```
//!
//! for the disorder-averaged mixture `ρ = E[|ψ_α⟩⟨ψ_α|]`.
//!
//! Both traces are double averages over independent phase fields `α, α'`
//! of `|⟨ψ_α|A|ψ_α'⟩|²` and `|⟨ψ_α|ψ_α'⟩|²`. The overlap of two generic
//! draws is exponentially small in `N`, so the plain double sum over a finite
//! sample is dominated by its diagonal. Instead the pair `(α, α')` is drawn
//! directly from a proposal that concentrates near `α ≈ α'` and on
//! configurations where the difference is a single `2π` phase kink, and the
//! estimate is reweighted by the exact prior. With midpoint `w = (α + α')/2`
//! and difference `u = α' - α` the prior factorizes, so `w` is sampled
//! exactly and only `u` is importance sampled.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use faer::linalg::solvers::DenseSolveCore;
use faer::{Mat, Side};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::fit::fit_decay;
use super::linear::{default_window, CorrelatorEstimate, Operator};
use super::{mode_variances, par_map, solve_profile, synthesize_phase, EnsembleSpec, SamplingStats, WindingRule};
use crate::error::{Error, Result};
use crate::gaussian::{build_edge_hamiltonian, fill_negative, left, right, MassProfile, SlaterState, TransitionKernel};
use crate::rng::substream;

/// Pairs whose denominator terms have an effective sample size below this
/// make the estimate unusable.
pub const MIN_DENOMINATOR_ESS: f64 = 10.0;
const NULL_COMPONENT_WEIGHT: f64 = 0.2;

/// Exact finite-ensemble Rényi-2 ratio for explicit weighted states,
/// `Σ p_i p_j |⟨i|c†_a c_b|j⟩|² / Σ p_i p_j |⟨i|j⟩|²`, one value per `(a, b)`.
pub fn renyi2_explicit(states: &[SlaterState], weights: &[f64], pairs: &[(usize, usize)]) -> Result<Vec<f64>> {
    if states.len() != weights.len() || states.is_empty() {
        return Err(Error::Dimension(format!("{} states, {} weights", states.len(), weights.len())));
    }
    let modes = states[0].modes();
    if states.iter().any(|s| s.modes() != modes) {
        return Err(Error::Dimension("states on different mode counts".into()));
    }
    if pairs.iter().any(|&(a, b)| a >= modes || b >= modes) {
        return Err(Error::Dimension(format!("mode index out of range for {modes} modes")));
    }
    let mut num = vec![0.0; pairs.len()];
    let mut den = 0.0;
    for (i, si) in states.iter().enumerate() {
        for (j, sj) in states.iter().enumerate() {
            if si.particles() != sj.particles() {
                continue;
            }
            let k = TransitionKernel::new(si, sj)?;
            let w = weights[i] * weights[j];
            den += w * k.overlap().norm_sqr();
            for (n, &(a, b)) in num.iter_mut().zip(pairs) {
                *n += w * k.element(a, b).norm_sqr();
            }
        }
    }
    if den < 1e-12 {
        return Err(Error::IllConditioned(format!("tr ρ² estimate {den:e} is below 1e-12")));
    }
    Ok(num.into_iter().map(|n| n / den).collect())
}

/// Coordinates `(a_1..a_M, b_1..b_M, β)` of the phase field.
struct Basis {
    n: usize,
    modes: usize,
    /// Prior precision of `u` per coordinate; zero for `β`.
    prior_prec: Vec<f64>,
    /// Standard deviation of each midpoint coordinate (excluding `β`).
    mid_sd: Vec<f64>,
}

impl Basis {
    fn new(spec: &EnsembleSpec) -> Self {
        let var = mode_variances(spec.n_sites, spec.stiffness);
        let s2: Vec<f64> = var.iter().chain(&var).copied().collect();
        let mut prior_prec: Vec<f64> = s2.iter().map(|s| 1.0 / (2.0 * s)).collect();
        prior_prec.push(0.0);
        Basis {
            n: spec.n_sites,
            modes: var.len(),
            prior_prec,
            mid_sd: s2.iter().map(|s| (s / 2.0).sqrt()).collect(),
        }
    }

    fn dim(&self) -> usize {
        2 * self.modes + 1
    }

    fn beta(&self) -> usize {
        2 * self.modes
    }

    fn row(&self, x: usize, y: usize) -> f64 {
        let k = |i: usize| 2.0 * PI * (i + 1) as f64 * y as f64 / self.n as f64;
        if x < self.modes {
            k(x).cos()
        } else if x < 2 * self.modes {
            k(x - self.modes).sin()
        } else {
            1.0
        }
    }

    fn phase(&self, z: &[f64], w: i64) -> Vec<f64> {
        let m = self.modes;
        synthesize_phase(self.n, &z[..m], &z[m..2 * m], z[2 * m], w)
    }

    /// Projection of a site profile onto the coordinates.
    fn coords(&self, profile: &[f64]) -> Vec<f64> {
        let n = self.n as f64;
        (0..self.dim())
            .map(|x| {
                let s: f64 = profile.iter().enumerate().map(|(y, p)| self.row(x, y) * p).sum();
                if x == self.beta() {
                    s / n
                } else {
                    2.0 * s / n
                }
            })
            .collect()
    }

    /// `-½ uᵀ diag(prior_prec) u`.
    fn log_prior(&self, u: &[f64]) -> f64 {
        -0.5 * u.iter().zip(&self.prior_prec).map(|(a, p)| a * a * p).sum::<f64>()
    }
}

/// Fubini–Study metric `Re ⟨∂_x ψ|(1 - |ψ⟩⟨ψ|)|∂_x' ψ⟩` of the reference
/// ground state with respect to the field coordinates.
fn fidelity_metric(spec: &EnsembleSpec, basis: &Basis, reference: &MassProfile) -> Result<Mat<f64>> {
    let n = spec.n_sites;
    let h = build_edge_hamiltonian(n, spec.velocity, reference, spec.wilson, 0.0)?;
    let (e, v) = h.diagonalize()?;
    let occ = fill_negative(&e, &v, " in the Rényi-2 reference state")?.particles();
    let unocc = 2 * n - occ;
    // Column y: ⟨u|∂H/∂α(y)|o⟩ / (E_u - E_o), flattened over (u, o).
    let k = Mat::<C64>::from_fn(unocc * occ, n, |r, y| {
        let (u, o) = (occ + r / occ, r % occ);
        let m = reference.magnitude[y];
        let dlr = C64::new(0.0, -m) * C64::from_polar(1.0, -reference.phase[y]);
        let drl = C64::new(0.0, m) * C64::from_polar(1.0, reference.phase[y]);
        let amp = v[(left(y), u)].conj() * v[(right(y), o)] * dlr + v[(right(y), u)].conj() * v[(left(y), o)] * drl;
        amp / (e[u] - e[o])
    });
    let bt = Mat::<C64>::from_fn(n, basis.dim(), |y, x| C64::new(basis.row(x, y), 0.0));
    let mx = &k * &bt;
    let f = mx.adjoint() * &mx;
    Ok(Mat::from_fn(basis.dim(), basis.dim(), |i, j| f[(i, j)].re))
}

/// Single `2π s` phase kink over `d` consecutive sites with width `ξ`.
fn kink_profile(n: usize, d: usize, s: f64, xi: f64) -> Vec<f64> {
    let (nf, df) = (n as f64, d as f64);
    (0..n)
        .map(|y| {
            let x = (y as f64 - df / 2.0 + nf / 2.0).rem_euclid(nf) - nf / 2.0 + df / 2.0;
            PI * s * ((x / xi).tanh() - ((x - df) / xi).tanh())
        })
        .collect()
}

/// Gaussian mixture over `u` sharing the precision `P = diag(prior) + 2F`.
struct Proposal {
    dim: usize,
    beta: usize,
    precision: Mat<f64>,
    chol: Mat<f64>,
    centers: Vec<Vec<f64>>,
    /// `P c` per center and `cᵀ P c`.
    pc: Vec<Vec<f64>>,
    cpc: Vec<f64>,
    log_pi: Vec<f64>,
    images: i64,
}

impl Proposal {
    fn new(spec: &EnsembleSpec, basis: &Basis, metric: &Mat<f64>) -> Result<Self> {
        let dim = basis.dim();
        let precision = Mat::<f64>::from_fn(dim, dim, |i, j| {
            2.0 * metric[(i, j)] + if i == j { basis.prior_prec[i] } else { 0.0 }
        });
        let llt = precision
            .llt(Side::Lower)
            .map_err(|e| Error::Numerical(format!("proposal precision not positive definite: {e:?}")))?;
        let cov = llt.inverse();
        let cov_llt = cov
            .llt(Side::Lower)
            .map_err(|e| Error::Numerical(format!("proposal covariance: {e:?}")))?;
        let chol = cov_llt.L().to_owned();
        let two_f = Mat::<f64>::from_fn(dim, dim, |i, j| 2.0 * metric[(i, j)]);
        let gain = &cov * &two_f;

        let n = spec.n_sites;
        let mut centers = vec![vec![0.0; dim]];
        for d in 1..n {
            for s in [1.0, -1.0] {
                let delta = basis.coords(&kink_profile(n, d, s, spec.xi()));
                centers.push((0..dim).map(|i| (0..dim).map(|j| gain[(i, j)] * delta[j]).sum()).collect());
            }
        }
        let kinks = (centers.len() - 1) as f64;
        let log_pi = (0..centers.len())
            .map(|c| if c == 0 { NULL_COMPONENT_WEIGHT.ln() } else { ((1.0 - NULL_COMPONENT_WEIGHT) / kinks).ln() })
            .collect();
        let pc: Vec<Vec<f64>> =
            centers.iter().map(|c| (0..dim).map(|i| (0..dim).map(|j| precision[(i, j)] * c[j]).sum()).collect()).collect();
        let cpc = centers.iter().zip(&pc).map(|(c, p)| dot(c, p)).collect();
        let beta = basis.beta();
        let sd_beta = cov[(beta, beta)].sqrt();
        let max_c = centers.iter().map(|c| c[beta].abs()).fold(0.0, f64::max);
        let images = 1 + ((max_c + 6.0 * sd_beta) / (2.0 * PI)).ceil() as i64;
        Ok(Proposal { dim, beta, precision, chol, centers, pc, cpc, log_pi, images })
    }

    fn weights(&self) -> Vec<f64> {
        self.log_pi.iter().map(|l| l.exp()).collect()
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R, component: usize) -> Vec<f64> {
        let xi: Vec<f64> = (0..self.dim).map(|_| rng.sample(StandardNormal)).collect();
        let c = &self.centers[component];
        let mut u: Vec<f64> = (0..self.dim).map(|i| c[i] + (0..=i).map(|j| self.chol[(i, j)] * xi[j]).sum::<f64>()).collect();
        u[self.beta] = (u[self.beta] + PI).rem_euclid(2.0 * PI) - PI;
        u
    }

    /// Log density of the mixture, wrapped in `β`, up to a shared constant.
    fn log_density(&self, u: &[f64]) -> f64 {
        let pu: Vec<f64> = (0..self.dim).map(|i| (0..self.dim).map(|j| self.precision[(i, j)] * u[j]).sum()).collect();
        let upu = dot(u, &pu);
        let (pb, pbb) = (pu[self.beta], self.precision[(self.beta, self.beta)]);
        let mut terms = Vec::with_capacity(self.centers.len() * (2 * self.images as usize + 1));
        for c in 0..self.centers.len() {
            let cpu = dot(&self.pc[c], u);
            let cb = self.pc[c][self.beta];
            for j in -self.images..=self.images {
                let t = 2.0 * PI * j as f64;
                let quad = upu + 2.0 * t * pb + t * t * pbb - 2.0 * (cpu + t * cb) + self.cpc[c];
                terms.push(self.log_pi[c] - 0.5 * quad);
            }
        }
        log_sum_exp(&terms)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Proportional integer allocation by largest remainder.
fn allocate(total: usize, weights: &[f64]) -> Vec<usize> {
    let raw: Vec<f64> = weights.iter().map(|w| w * total as f64).collect();
    let mut counts: Vec<usize> = raw.iter().map(|r| r.floor() as usize).collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| (raw[b] - raw[b].floor()).total_cmp(&(raw[a] - raw[a].floor())).then(a.cmp(&b)));
    let missing = total - counts.iter().sum::<usize>();
    for &i in order.iter().take(missing) {
        counts[i] += 1;
    }
    counts
}

struct PairTerm {
    log_w: f64,
    overlap: f64,
    /// Anchor-averaged `|T(yL + d, yL)|²` for `d = 0..N`.
    numer: Vec<f64>,
}

/// Importance-sampled Rényi-2 correlator of `ψ†_L ψ_L`, using
/// `spec.pair_budget` pairs. Only fixed winding sectors are supported.
pub fn renyi2_correlator(spec: &EnsembleSpec) -> Result<CorrelatorEstimate> {
    spec.validate()?;
    let w = match spec.winding {
        WindingRule::Fixed(w) => w,
        WindingRule::Mixture(_) => {
            return Err(Error::Unsupported("the Rényi-2 estimator needs a fixed winding sector".into()))
        }
    };
    if spec.pair_budget < 2 {
        return Err(Error::invalid("pair_budget", "need at least 2 pairs"));
    }
    let n = spec.n_sites;
    let basis = Basis::new(spec);
    let reference = MassProfile::uniform(n, spec.mass, w);
    let metric = fidelity_metric(spec, &basis, &reference)?;
    let proposal = Proposal::new(spec, &basis, &metric)?;
    let counts = allocate(spec.pair_budget, &proposal.weights());
    let components: Vec<usize> = counts.iter().enumerate().flat_map(|(c, &k)| std::iter::repeat(c).take(k)).collect();
    let indices: Vec<usize> = (0..components.len()).collect();

    let solve = |phase: Vec<f64>| solve_profile(spec, &MassProfile { magnitude: vec![spec.mass; n], phase, winding: w });
    let eval = |&i: &usize| -> Option<PairTerm> {
        let mut rng = substream(spec.seed, "renyi2-pair", i as u64);
        let mut mid: Vec<f64> = basis.mid_sd.iter().map(|sd| sd * rng.sample::<f64, _>(StandardNormal)).collect();
        mid.push(rng.gen_range(0.0..2.0 * PI));
        let u = proposal.sample(&mut rng, components[i]);
        let z1: Vec<f64> = mid.iter().zip(&u).map(|(m, d)| m - d / 2.0).collect();
        let z2: Vec<f64> = mid.iter().zip(&u).map(|(m, d)| m + d / 2.0).collect();
        let s1 = solve(basis.phase(&z1, w)).ok()?;
        let s2 = solve(basis.phase(&z2, w)).ok()?;
        let k = TransitionKernel::new(&s1, &s2).ok()?;
        let t = k.left_block(&(0..n).map(left).collect::<Vec<_>>());
        let numer = (0..n)
            .map(|d| (0..n).map(|y| t[((y + d) % n, y)].norm_sqr()).sum::<f64>() / n as f64)
            .collect();
        Some(PairTerm { log_w: basis.log_prior(&u) - proposal.log_density(&u), overlap: k.overlap().norm_sqr(), numer })
    };
    let terms: Vec<Option<PairTerm>> = par_map(&indices, eval);
    let skipped = terms.iter().filter(|t| t.is_none()).count();
    let terms: Vec<PairTerm> = terms.into_iter().flatten().collect();
    let sampling = SamplingStats {
        requested: spec.pair_budget,
        valid: terms.len(),
        attempted: indices.len(),
        rejected_zero_mode: 0,
        rejected_sector: skipped,
    };
    if terms.len() < 2 {
        return Err(Error::Ensemble(format!("{skipped} of {} pairs invalid", indices.len())));
    }

    let max_lw = terms.iter().map(|t| t.log_w).fold(f64::NEG_INFINITY, f64::max);
    let wts: Vec<f64> = terms.iter().map(|t| (t.log_w - max_lw).exp()).collect();
    let ess = wts.iter().sum::<f64>().powi(2) / wts.iter().map(|x| x * x).sum::<f64>();
    let dterms: Vec<f64> = terms.iter().zip(&wts).map(|(t, w)| w * t.overlap).collect();
    let den_ess = dterms.iter().sum::<f64>().powi(2) / dterms.iter().map(|x| x * x).sum::<f64>();
    if !(den_ess >= MIN_DENOMINATOR_ESS) {
        return Err(Error::IllConditioned(format!(
            "denominator effective sample size {den_ess:.2} below {MIN_DENOMINATOR_ESS}"
        )));
    }

    let m = terms.len() as f64;
    let dbar = dterms.iter().sum::<f64>() / m;
    let distances: Vec<usize> = (1..=n / 2).collect();
    let mut values = Vec::with_capacity(distances.len());
    let mut stderr = Vec::with_capacity(distances.len());
    for &d in &distances {
        let nterms: Vec<f64> = terms
            .iter()
            .zip(&wts)
            .map(|(t, w)| w * 0.5 * (t.numer[d] + t.numer[(n - d) % n]))
            .collect();
        let nbar = nterms.iter().sum::<f64>() / m;
        let r = nbar / dbar;
        // Delta method for a ratio of means.
        let var: f64 = nterms.iter().zip(&dterms).map(|(a, b)| (a - r * b).powi(2)).sum::<f64>() / (m - 1.0);
        values.push(C64::new(r, 0.0));
        stderr.push((var / m).sqrt() / dbar);
    }
    let mags: Vec<f64> = values.iter().map(|v| v.re).collect();
    let fit = fit_decay(&distances, &mags, default_window(n))?;
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("ess".to_string(), ess);
    diagnostics.insert("denominator_ess".to_string(), den_ess);
    diagnostics.insert("pairs".to_string(), m);
    Ok(CorrelatorEstimate { operator: Operator::Renyi2, n_sites: n, distances, values, stderr, fit, sampling, diagnostics })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::random_slater_state;
    use rand::SeedableRng;

    #[test]
    fn explicit_single_state_is_squared_transition() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let s = random_slater_state(&mut rng, 6, 3);
        let c = s.correlation_matrix();
        let r = renyi2_explicit(&[s], &[1.0], &[(0, 1), (2, 2)]).unwrap();
        assert!((r[0] - c[(0, 1)].norm_sqr()).abs() < 1e-12);
        assert!((r[1] - c[(2, 2)].norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn explicit_skips_mismatched_sectors() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let a = random_slater_state(&mut rng, 4, 1);
        let b = random_slater_state(&mut rng, 4, 2);
        let alone = renyi2_explicit(&[a.clone()], &[1.0], &[(0, 1)]).unwrap();
        let mixed = renyi2_explicit(&[a, b.clone()], &[0.5, 0.5], &[(0, 1)]).unwrap();
        let bonly = renyi2_explicit(&[b], &[1.0], &[(0, 1)]).unwrap();
        // Equal-weight sectors: numerator and denominator both split evenly.
        assert!((mixed[0] - 0.5 * (alone[0] + bonly[0])).abs() < 1e-12);
    }

    #[test]
    fn allocation_is_exact() {
        let c = allocate(10, &[0.2, 0.4, 0.4]);
        assert_eq!(c, vec![2, 4, 4]);
        let c = allocate(7, &[0.5, 0.25, 0.25]);
        assert_eq!(c.iter().sum::<usize>(), 7);
        assert_eq!(c, vec![3, 2, 2]);
    }

    #[test]
    fn kink_winds_once() {
        let p = kink_profile(64, 20, 1.0, 2.0);
        assert!((p[10] - 2.0 * PI).abs() < 1e-3);
        assert!(p[50].abs() < 1e-3);
    }

    #[test]
    fn coordinates_invert_synthesis() {
        let spec = EnsembleSpec::new(16, 2, 1);
        let b = Basis::new(&spec);
        let z: Vec<f64> = (0..b.dim()).map(|i| 0.1 * i as f64 - 0.3).collect();
        let back = b.coords(&b.phase(&z, 0));
        for (x, y) in z.iter().zip(&back) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn small_ring_estimate_runs() {
        let mut spec = EnsembleSpec::new(48, 2, 5);
        spec.pair_budget = 300;
        let r = renyi2_correlator(&spec).unwrap();
        assert_eq!(r.values.len(), 24);
        assert!(r.diagnostics["denominator_ess"] >= MIN_DENOMINATOR_ESS);
        assert!(r.values.iter().all(|v| v.re > 0.0 && v.re <= 1.0 + 1e-9));
    }
}
