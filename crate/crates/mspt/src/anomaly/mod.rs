//! Anomaly pairing over channel sets, flux insertion and realizability.
//!
//! Every channel contributes `χ q² f_g(x) f_h(x)` to `A[g,h]`, the
//! `h`-charge pumped through it by a unit `g` flux. A gapped bulk can end
//! on the channel content only if the totals vanish; in an open system
//! entries between two weak generators may be dumped into an environment.

mod scenarios;

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::wire::{
    Axis, ChiralMode, Chirality, Modulation, Position, Strength, SymmetryGenerator, WireArray,
};

pub use scenarios::{scenario, Expected, Scenario, SCENARIO_NAMES};

/// Channel content of a boundary; same shape as a [`WireArray`].
pub type ChannelSet = WireArray;

pub const UNASSIGNED_REGION: &str = "unassigned";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnomalyMatrix {
    pub generators: Vec<String>,
    pub entries: Vec<Vec<i64>>,
}

impl AnomalyMatrix {
    pub fn get(&self, g: &str, h: &str) -> Option<i64> {
        let i = self.generators.iter().position(|n| n == g)?;
        let j = self.generators.iter().position(|n| n == h)?;
        Some(self.entries[i][j])
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|&v| v == 0)
    }
}

fn matrix_over<'a>(set: &ChannelSet, modes: impl Iterator<Item = &'a ChiralMode>) -> AnomalyMatrix {
    let k = set.generators.len();
    let mut entries = vec![vec![0i64; k]; k];
    for m in modes {
        let f: Vec<i64> = set.generators.iter().map(|g| g.modulation.eval(&m.position)).collect();
        let w = m.chirality.sign() * m.base_charge * m.base_charge;
        for i in 0..k {
            for j in 0..k {
                entries[i][j] += w * f[i] * f[j];
            }
        }
    }
    AnomalyMatrix { generators: set.generators.iter().map(|g| g.name.clone()).collect(), entries }
}

pub fn anomaly_matrix(set: &ChannelSet) -> AnomalyMatrix {
    matrix_over(set, set.modes.iter())
}

fn region_label<'a>(set: &'a ChannelSet, m: &ChiralMode) -> &'a str {
    set.region_of(&m.id).unwrap_or(UNASSIGNED_REGION)
}

/// Matrices restricted to each region; modes without a region are grouped
/// under [`UNASSIGNED_REGION`].
pub fn region_matrices(set: &ChannelSet) -> BTreeMap<String, AnomalyMatrix> {
    let mut labels: Vec<String> = set.modes.iter().map(|m| region_label(set, m).to_string()).collect();
    labels.sort();
    labels.dedup();
    labels
        .into_iter()
        .map(|l| {
            let mat = matrix_over(set, set.modes.iter().filter(|m| region_label(set, m) == l));
            (l, mat)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChannelShift {
    pub mode: String,
    pub delta_n: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChargeLedger {
    /// region → generator h → change of h-charge
    pub per_region: BTreeMap<String, BTreeMap<String, i64>>,
    pub totals: BTreeMap<String, i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FluxReport {
    pub generator: String,
    pub shifts: Vec<ChannelShift>,
    /// Positions as declared.
    pub declared: ChargeLedger,
    /// Positions translated so that the leftmost channel sits at x = 1.
    pub unit_offset: ChargeLedger,
    pub unit_offset_shift: i64,
}

fn ledger(set: &ChannelSet, shifts: &[i64]) -> ChargeLedger {
    let mut per_region: BTreeMap<String, BTreeMap<String, i64>> = BTreeMap::new();
    let mut totals: BTreeMap<String, i64> =
        set.generators.iter().map(|h| (h.name.clone(), 0)).collect();
    for (m, &dn) in set.modes.iter().zip(shifts) {
        let region = per_region.entry(region_label(set, m).to_string()).or_default();
        for h in &set.generators {
            let dq = dn * m.base_charge * h.modulation.eval(&m.position);
            *region.entry(h.name.clone()).or_default() += dq;
            *totals.get_mut(&h.name).expect("seeded above") += dq;
        }
    }
    ChargeLedger { per_region, totals }
}

/// Thread a unit flux of generator `g` through the system and record the
/// spectral-flow occupation shifts `Δn_c = χ_c q_c f_g(x_c)`.
pub fn flux_insertion(set: &ChannelSet, g: &str) -> Result<FluxReport> {
    let gen = set.generator(g)?;
    let shifts: Vec<i64> = set
        .modes
        .iter()
        .map(|m| m.chirality.sign() * m.base_charge * gen.modulation.eval(&m.position))
        .collect();
    let declared = ledger(set, &shifts);

    let min_x = set.modes.iter().map(|m| m.position.x).min().unwrap_or(1);
    let shift = 1 - min_x;
    let mut moved = set.clone();
    for m in &mut moved.modes {
        m.position = m.position.translated(Axis::X, shift);
    }
    let unit_offset = ledger(&moved, &shifts);

    Ok(FluxReport {
        generator: g.to_string(),
        shifts: set
            .modes
            .iter()
            .zip(&shifts)
            .map(|(m, &d)| ChannelShift { mode: m.id.clone(), delta_n: d })
            .collect(),
        declared,
        unit_offset,
        unit_offset_shift: shift,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub g: String,
    pub h: String,
    pub value: i64,
    /// False for entries between two weak generators, which an environment
    /// can absorb.
    pub fatal: bool,
    pub explanation: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub closed_realizable: bool,
    pub open_realizable: bool,
    pub violated_entries: Vec<Violation>,
}

pub fn realizability(set: &ChannelSet) -> Verdict {
    let a = anomaly_matrix(set);
    let mut violated = Vec::new();
    for (i, g) in set.generators.iter().enumerate() {
        for (j, h) in set.generators.iter().enumerate().skip(i) {
            let value = a.entries[i][j];
            if value == 0 {
                continue;
            }
            violated.push(describe(g, h, value));
        }
    }
    Verdict {
        closed_realizable: violated.is_empty(),
        open_realizable: violated.iter().all(|v| !v.fatal),
        violated_entries: violated,
    }
}

fn describe(g: &SymmetryGenerator, h: &SymmetryGenerator, value: i64) -> Violation {
    let fatal = g.is_strong() || h.is_strong();
    let pumped = format!(
        "a unit `{}` flux pumps {value} unit(s) of `{}` charge through the boundary",
        g.name, h.name
    );
    let explanation = if fatal {
        let strong = if h.is_strong() { &h.name } else { &g.name };
        format!(
            "{pumped}; `{strong}` is strong, so the mismatch cannot be handed to an environment"
        )
    } else {
        format!("{pumped}; both generators are weak, so the charge is ancilla-absorbed")
    };
    Violation { g: g.name.clone(), h: h.name.clone(), value, fatal, explanation }
}

/// Random channel content for property tests: a handful of channels on a
/// small grid with polynomial and plane generators of mixed strength.
pub fn random_channel_set<R: Rng + ?Sized>(rng: &mut R) -> ChannelSet {
    let n_modes = rng.gen_range(1..=10);
    let regions = ["left", "bulk", "right"];
    let mut modes = Vec::with_capacity(n_modes);
    let mut region_members: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for i in 0..n_modes {
        let pos = if rng.gen_bool(0.5) {
            Position::x(rng.gen_range(-5..=5))
        } else {
            Position::xy(rng.gen_range(-5..=5), rng.gen_range(0..=3))
        };
        let chi = if rng.gen_bool(0.5) { Chirality::Right } else { Chirality::Left };
        let q = [1, 1, 1, 2, -1][rng.gen_range(0..5)];
        let id = format!("c{i}");
        if rng.gen_bool(0.8) {
            region_members.entry(regions[rng.gen_range(0..3)]).or_default().push(id.clone());
        }
        modes.push(ChiralMode::new(id, pos, chi).with_charge(q));
    }
    let n_gen = rng.gen_range(1..=4);
    let mut generators = Vec::with_capacity(n_gen);
    for k in 0..n_gen {
        let strength = if rng.gen_bool(0.5) { Strength::Strong } else { Strength::Weak };
        let modulation = match rng.gen_range(0..4) {
            0 => Modulation::Polynomial { axis: Axis::X, coeffs: vec![1] },
            1 => Modulation::Polynomial { axis: Axis::X, coeffs: vec![0, 1] },
            2 => Modulation::Polynomial {
                axis: if rng.gen_bool(0.5) { Axis::X } else { Axis::Y },
                coeffs: (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(-2..=2)).collect(),
            },
            _ => Modulation::PlaneIndicator {
                axis: if rng.gen_bool(0.5) { Axis::X } else { Axis::Y },
                value: rng.gen_range(-2..=2),
            },
        };
        generators.push(SymmetryGenerator::new(format!("g{k}"), modulation, strength));
    }
    WireArray::new(modes, generators)
        .and_then(|a| a.with_regions(region_members))
        .expect("generated ids are unique")
}
