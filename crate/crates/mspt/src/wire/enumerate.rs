//! Exhaustive search for symmetric, condensable vertex vectors.

use serde::Serialize;

use super::hnf::{gcd, hermite_normal_form, lattice_rank};
use super::{VertexVector, WireArray};
use crate::error::{Error, Result};

pub const DEFAULT_BOUND: i64 = 3;
pub const MAX_ENUMERATION_MODES: usize = 12;
/// Raw solutions kept before the search reports truncation.
const MAX_RAW_SOLUTIONS: usize = 200_000;
/// Candidates considered by the clique search.
const MAX_CANDIDATES: usize = 4_096;
/// Search-tree nodes visited before the clique search gives up on exhaustiveness.
const MAX_CLIQUE_NODES: u64 = 5_000_000;

#[derive(Clone, Debug, Serialize)]
pub struct Enumeration {
    pub bound: i64,
    /// Hermite basis of the lattice spanned by the raw solutions.
    pub basis: Vec<VertexVector>,
    /// Every in-bound solution, lexicographic in mode order.
    pub solutions: Vec<VertexVector>,
    pub truncated: bool,
}

impl Enumeration {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GappableSet {
    pub bound: i64,
    pub vertices: Vec<VertexVector>,
    pub fully_gapped: bool,
    /// False when a search cap was hit and the set is only known to be maximal
    /// among the candidates visited.
    pub exhaustive: bool,
}

/// Enumerate nonzero `Λ` with `|Λ_j| ≤ bound` that are neutral under every
/// generator and have vanishing self pairing `Σ χ_j Λ_j²`.
///
/// A vertex with nonzero self pairing cannot be condensed, so it is not a
/// gapping term even when it is neutral.
pub fn enumerate_symmetric_vertices(block: &WireArray, bound: i64) -> Result<Enumeration> {
    if bound < 1 {
        return Err(Error::invalid("bound", "must be at least 1"));
    }
    let m = block.modes.len();
    if m > MAX_ENUMERATION_MODES {
        return Err(Error::Capacity(format!(
            "{m} modes exceeds the exhaustive-search limit of {MAX_ENUMERATION_MODES}"
        )));
    }
    let rows: Vec<Vec<i64>> = block.generators.iter().map(|g| block.charge_row(g)).collect();
    let chi = block.chirality_signs();

    let mut search = Search::new(&rows, &chi, bound);
    search.run();

    let dense = search.found;
    let basis = hermite_normal_form(&dense)
        .into_iter()
        .map(|r| VertexVector::from_dense(block, &r))
        .collect::<Result<Vec<_>>>()?;
    let solutions = dense
        .iter()
        .map(|r| VertexVector::from_dense(block, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(Enumeration { bound, basis, solutions, truncated: search.truncated })
}

struct Search<'a> {
    rows: &'a [Vec<i64>],
    chi: &'a [i64],
    bound: i64,
    /// suffix_abs[g][j] = bound · Σ_{k≥j} |rows[g][k]|
    suffix_abs: Vec<Vec<i64>>,
    /// Largest positive / negative self pairing reachable from index j on.
    suffix_pos: Vec<i64>,
    suffix_neg: Vec<i64>,
    partial: Vec<i64>,
    current: Vec<i64>,
    found: Vec<Vec<i64>>,
    truncated: bool,
}

impl<'a> Search<'a> {
    fn new(rows: &'a [Vec<i64>], chi: &'a [i64], bound: i64) -> Self {
        let m = chi.len();
        let suffix_abs = rows
            .iter()
            .map(|r| {
                let mut s = vec![0; m + 1];
                for j in (0..m).rev() {
                    s[j] = s[j + 1] + bound * r[j].abs();
                }
                s
            })
            .collect();
        let mut suffix_pos = vec![0; m + 1];
        let mut suffix_neg = vec![0; m + 1];
        for j in (0..m).rev() {
            suffix_pos[j] = suffix_pos[j + 1] + if chi[j] > 0 { bound * bound } else { 0 };
            suffix_neg[j] = suffix_neg[j + 1] + if chi[j] < 0 { bound * bound } else { 0 };
        }
        Search {
            rows,
            chi,
            bound,
            suffix_abs,
            suffix_pos,
            suffix_neg,
            // Last slot tracks the self pairing.
            partial: vec![0; rows.len() + 1],
            current: vec![0; m],
            found: Vec::new(),
            truncated: false,
        }
    }

    fn run(&mut self) {
        self.visit(0);
    }

    fn feasible(&self, j: usize) -> bool {
        let ng = self.rows.len();
        for g in 0..ng {
            if self.partial[g].abs() > self.suffix_abs[g][j] {
                return false;
            }
        }
        let s = self.partial[ng];
        s <= self.suffix_neg[j] && -s <= self.suffix_pos[j]
    }

    fn visit(&mut self, j: usize) {
        if self.truncated {
            return;
        }
        let m = self.chi.len();
        if j == m {
            if self.partial.iter().all(|&p| p == 0) && self.current.iter().any(|&c| c != 0) {
                if self.found.len() == MAX_RAW_SOLUTIONS {
                    self.truncated = true;
                    return;
                }
                self.found.push(self.current.clone());
            }
            return;
        }
        let ng = self.rows.len();
        for c in -self.bound..=self.bound {
            for g in 0..ng {
                self.partial[g] += c * self.rows[g][j];
            }
            self.partial[ng] += self.chi[j] * c * c;
            self.current[j] = c;
            if self.feasible(j + 1) {
                self.visit(j + 1);
            }
            for g in 0..ng {
                self.partial[g] -= c * self.rows[g][j];
            }
            self.partial[ng] -= self.chi[j] * c * c;
        }
        self.current[j] = 0;
    }
}

/// Largest set of linearly independent symmetric vertices whose mutual and
/// self pairings all vanish.
pub fn max_gappable_set(block: &WireArray, bound: i64) -> Result<GappableSet> {
    let m = block.modes.len();
    let n_right = block.chirality_signs().iter().filter(|&&c| c > 0).count();
    if m % 2 != 0 || 2 * n_right != m {
        return Err(Error::invalid(
            "modes",
            format!("need equal numbers of right and left movers, got {n_right} of {m} right"),
        ));
    }
    let enumeration = enumerate_symmetric_vertices(block, bound)?;
    let chi = block.chirality_signs();

    // Primitive representatives with a positive leading coefficient.
    let mut candidates: Vec<Vec<i64>> = Vec::new();
    for v in &enumeration.solutions {
        let d = v.to_dense(block)?;
        let g = d.iter().fold(0, |acc, &c| gcd(acc, c));
        let lead = d.iter().find(|&&c| c != 0).copied().unwrap_or(1);
        if g == 1 && lead > 0 {
            candidates.push(d);
        }
    }
    let mut exhaustive = !enumeration.truncated;
    if candidates.len() > MAX_CANDIDATES {
        candidates.truncate(MAX_CANDIDATES);
        exhaustive = false;
    }

    let pair = |a: &[i64], b: &[i64]| -> i64 {
        a.iter().zip(b).zip(&chi).map(|((x, y), c)| c * x * y).sum()
    };
    let n = candidates.len();
    let null: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| pair(&candidates[i], &candidates[j]) == 0).collect())
        .collect();

    let target = m / 2;
    let mut clique = Clique {
        candidates: &candidates,
        null: &null,
        target,
        best: Vec::new(),
        nodes: 0,
        exhausted_budget: false,
    };
    clique.extend(0, &mut Vec::new());
    if clique.exhausted_budget {
        exhaustive = false;
    }
    let best = clique.best;
    let vertices = best
        .iter()
        .map(|&i| VertexVector::from_dense(block, &candidates[i]))
        .collect::<Result<Vec<_>>>()?;
    Ok(GappableSet { bound, fully_gapped: vertices.len() == target, vertices, exhaustive })
}

struct Clique<'a> {
    candidates: &'a [Vec<i64>],
    null: &'a [Vec<bool>],
    target: usize,
    best: Vec<usize>,
    nodes: u64,
    exhausted_budget: bool,
}

impl Clique<'_> {
    fn extend(&mut self, start: usize, current: &mut Vec<usize>) {
        if current.len() > self.best.len() {
            self.best = current.clone();
        }
        if self.best.len() == self.target || self.exhausted_budget {
            return;
        }
        let n = self.candidates.len();
        for i in start..n {
            if current.len() + (n - i) <= self.best.len() {
                return;
            }
            self.nodes += 1;
            if self.nodes > MAX_CLIQUE_NODES {
                self.exhausted_budget = true;
                return;
            }
            if !current.iter().all(|&k| self.null[k][i]) {
                continue;
            }
            let mut rows: Vec<Vec<i64>> =
                current.iter().map(|&k| self.candidates[k].clone()).collect();
            rows.push(self.candidates[i].clone());
            if lattice_rank(&rows) != rows.len() {
                continue;
            }
            current.push(i);
            self.extend(i + 1, current);
            current.pop();
            if self.best.len() == self.target || self.exhausted_budget {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::blocks;
    use super::*;

    fn dense(e: &Enumeration, a: &WireArray) -> Vec<Vec<i64>> {
        e.basis.iter().map(|v| v.to_dense(a).unwrap()).collect()
    }

    #[test]
    fn tdi_block_has_single_gapping_vector() {
        let a = blocks::tdi_block();
        let e = enumerate_symmetric_vertices(&a, 2).unwrap();
        assert_eq!(dense(&e, &a), vec![vec![1, -1, -1, 1]]);
        let g = max_gappable_set(&a, 3).unwrap();
        assert_eq!(g.vertices.len(), 1);
        assert!(!g.fully_gapped);
        assert!(g.exhaustive);
    }

    #[test]
    fn tdi_edge_pair_cannot_be_gapped() {
        let a = blocks::tdi_edge_pair();
        let e = enumerate_symmetric_vertices(&a, 3).unwrap();
        assert_eq!(e.rank(), 0);
        assert!(e.solutions.is_empty());
        let g = max_gappable_set(&a, 3).unwrap();
        assert!(g.vertices.is_empty());
        assert!(!g.fully_gapped);
    }

    #[test]
    fn hoti_block_rank_one() {
        let a = blocks::hoti_block();
        let e = enumerate_symmetric_vertices(&a, 2).unwrap();
        assert_eq!(dense(&e, &a), vec![vec![1, -1, -1, 1]]);
    }

    #[test]
    fn helical_pairs_fully_gap() {
        let a = blocks::helical_pairs();
        let g = max_gappable_set(&a, 3).unwrap();
        assert_eq!(g.vertices.len(), 2);
        assert!(g.fully_gapped);
    }

    #[test]
    fn solutions_are_lexicographic_and_negation_closed() {
        let a = blocks::helical_pairs();
        let e = enumerate_symmetric_vertices(&a, 2).unwrap();
        let d: Vec<Vec<i64>> = e.solutions.iter().map(|v| v.to_dense(&a).unwrap()).collect();
        assert!(d.windows(2).all(|w| w[0] < w[1]));
        for v in &d {
            let neg: Vec<i64> = v.iter().map(|c| -c).collect();
            assert!(d.binary_search(&neg).is_ok());
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(enumerate_symmetric_vertices(&blocks::tdi_block(), 0).is_err());
        let mut a = blocks::tdi_block();
        a.modes.pop();
        assert!(max_gappable_set(&a, 2).is_err());
    }
}
