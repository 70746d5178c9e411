//! Versioned JSON file formats for channel blocks and ensembles.
//!
//! Block file:
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "modes": [{"id": "a", "x": 0, "chirality": 1}, {"id": "b", "x": 1, "chirality": -1}],
//!   "generators": [
//!     {"name": "e", "modulation": {"polynomial": {"axis": "x", "coeffs": [1]}}, "strength": "strong"},
//!     {"name": "p", "modulation": {"plane": {"axis": "y", "value": 0}}, "strength": "weak"}
//!   ],
//!   "regions": {"left": ["a"], "right": ["b"]}
//! }
//! ```
//!
//! Ensemble file: `schema_version`, `n`, `samples`, `seed` and optional
//! `m`, `g`, `wilson`, `velocity`, `winding`, `pair_budget`, `generator`,
//! `angle`, `orbit_average`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ensemble::{EnsembleSpec, SymmetryTarget, WindingRule, DEFAULT_PAIR_BUDGET};
use crate::error::{Error, Result};
use crate::wire::{Axis, ChiralMode, Chirality, Modulation, Position, Strength, SymmetryGenerator, WireArray};

pub const SCHEMA_VERSION: u32 = 1;

fn check_version(v: u32) -> Result<()> {
    if v != SCHEMA_VERSION {
        return Err(Error::invalid("schema_version", format!("expected {SCHEMA_VERSION}, got {v}")));
    }
    Ok(())
}

fn one() -> i64 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub id: String,
    pub x: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<i64>,
    pub chirality: Chirality,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub flavor: String,
    #[serde(default = "one")]
    pub charge: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub x: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<i64>,
    pub value: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModulationConfig {
    Polynomial { axis: Axis, coeffs: Vec<i64> },
    Plane { axis: Axis, value: i64 },
    Tabulated(Vec<TableEntry>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub name: String,
    pub modulation: ModulationConfig,
    pub strength: Strength,
}

/// Verdicts a block file claims; the CLI exits 1 when they disagree.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_realizable: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub open_realizable: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fully_gapped: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockConfig {
    pub schema_version: u32,
    pub modes: Vec<ModeConfig>,
    pub generators: Vec<GeneratorConfig>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub regions: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expectations>,
}

impl BlockConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: BlockConfig = serde_json::from_str(text).map_err(|e| Error::invalid("block config", e.to_string()))?;
        check_version(c.schema_version)?;
        Ok(c)
    }

    pub fn to_wire_array(&self) -> Result<WireArray> {
        let modes = self
            .modes
            .iter()
            .map(|m| {
                let p = Position { x: m.x, y: m.y };
                ChiralMode::new(m.id.clone(), p, m.chirality).with_flavor(m.flavor.clone()).with_charge(m.charge)
            })
            .collect();
        let gens = self
            .generators
            .iter()
            .map(|g| {
                let modulation = match &g.modulation {
                    ModulationConfig::Polynomial { axis, coeffs } => {
                        Modulation::Polynomial { axis: *axis, coeffs: coeffs.clone() }
                    }
                    ModulationConfig::Plane { axis, value } => Modulation::PlaneIndicator { axis: *axis, value: *value },
                    ModulationConfig::Tabulated(rows) => {
                        Modulation::Tabulated(rows.iter().map(|r| (Position { x: r.x, y: r.y }, r.value)).collect())
                    }
                };
                SymmetryGenerator::new(g.name.clone(), modulation, g.strength)
            })
            .collect();
        WireArray::new(modes, gens)?.with_regions(self.regions.clone())
    }

    pub fn from_wire_array(a: &WireArray) -> Self {
        let modes = a
            .modes
            .iter()
            .map(|m| ModeConfig {
                id: m.id.clone(),
                x: m.position.x,
                y: m.position.y,
                chirality: m.chirality,
                flavor: m.flavor.clone(),
                charge: m.base_charge,
            })
            .collect();
        let generators = a
            .generators
            .iter()
            .map(|g| GeneratorConfig {
                name: g.name.clone(),
                modulation: match &g.modulation {
                    Modulation::Polynomial { axis, coeffs } => {
                        ModulationConfig::Polynomial { axis: *axis, coeffs: coeffs.clone() }
                    }
                    Modulation::PlaneIndicator { axis, value } => ModulationConfig::Plane { axis: *axis, value: *value },
                    Modulation::Tabulated(t) => ModulationConfig::Tabulated(
                        t.iter().map(|(p, v)| TableEntry { x: p.x, y: p.y, value: *v }).collect(),
                    ),
                },
                strength: g.strength,
            })
            .collect();
        let mut regions: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for m in &a.modes {
            if let Some(label) = a.region_of(&m.id) {
                regions.entry(label.to_string()).or_default().push(m.id.clone());
            }
        }
        BlockConfig { schema_version: SCHEMA_VERSION, modes, generators, regions, expect: None }
    }
}

fn d_m() -> f64 {
    0.5
}
fn d_g() -> f64 {
    0.5
}
fn d_one() -> f64 {
    1.0
}
fn d_winding() -> WindingRule {
    WindingRule::Fixed(0)
}
fn d_pairs() -> usize {
    DEFAULT_PAIR_BUDGET
}
fn d_target() -> SymmetryTarget {
    SymmetryTarget::Charge
}
fn d_angle() -> f64 {
    std::f64::consts::PI
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub schema_version: u32,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    #[serde(default = "d_m")]
    pub m: f64,
    #[serde(default = "d_g")]
    pub g: f64,
    #[serde(default = "d_one")]
    pub wilson: f64,
    #[serde(default = "d_one")]
    pub velocity: f64,
    #[serde(default = "d_winding")]
    pub winding: WindingRule,
    #[serde(default = "d_pairs")]
    pub pair_budget: usize,
    /// Generator tested by `symmetry-check`.
    #[serde(default = "d_target")]
    pub generator: SymmetryTarget,
    #[serde(default = "d_angle")]
    pub angle: f64,
    /// Average ρ over dipole rotations before the checks.
    #[serde(default)]
    pub orbit_average: bool,
}

impl EnsembleConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: EnsembleConfig =
            serde_json::from_str(text).map_err(|e| Error::invalid("ensemble config", e.to_string()))?;
        check_version(c.schema_version)?;
        c.spec().validate()?;
        Ok(c)
    }

    pub fn from_spec(spec: &EnsembleSpec) -> Self {
        EnsembleConfig {
            schema_version: SCHEMA_VERSION,
            n: spec.n_sites,
            samples: spec.samples,
            seed: spec.seed,
            m: spec.mass,
            g: spec.stiffness,
            wilson: spec.wilson,
            velocity: spec.velocity,
            winding: spec.winding.clone(),
            pair_budget: spec.pair_budget,
            generator: d_target(),
            angle: d_angle(),
            orbit_average: false,
        }
    }

    pub fn spec(&self) -> EnsembleSpec {
        EnsembleSpec {
            n_sites: self.n,
            samples: self.samples,
            seed: self.seed,
            mass: self.m,
            stiffness: self.g,
            winding: self.winding.clone(),
            wilson: self.wilson,
            velocity: self.velocity,
            pair_budget: self.pair_budget,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wire::blocks::block;

    #[test]
    fn block_round_trip() {
        for name in crate::wire::blocks::BLOCK_NAMES {
            let a = block(name).unwrap();
            let text = serde_json::to_string(&BlockConfig::from_wire_array(&a)).unwrap();
            assert_eq!(BlockConfig::from_json(&text).unwrap().to_wire_array().unwrap(), a);
        }
    }

    #[test]
    fn module_doc_example_parses() {
        let text = r#"{
          "schema_version": 1,
          "modes": [{"id": "a", "x": 0, "chirality": 1}, {"id": "b", "x": 1, "chirality": -1}],
          "generators": [
            {"name": "e", "modulation": {"polynomial": {"axis": "x", "coeffs": [1]}}, "strength": "strong"},
            {"name": "p", "modulation": {"plane": {"axis": "y", "value": 0}}, "strength": "weak"}
          ],
          "regions": {"left": ["a"], "right": ["b"]}
        }"#;
        let a = BlockConfig::from_json(text).unwrap().to_wire_array().unwrap();
        assert_eq!(a.modes.len(), 2);
        assert_eq!(a.region_of("b"), Some("right"));
    }

    #[test]
    fn unknown_keys_are_named() {
        let text = r#"{"schema_version": 1, "modes": [], "generators": [], "colour": 3}"#;
        let err = BlockConfig::from_json(text).unwrap_err().to_string();
        assert!(err.contains("colour"), "{err}");
        let text = r#"{"schema_version": 2, "modes": [], "generators": []}"#;
        assert!(BlockConfig::from_json(text).is_err());
    }

    #[test]
    fn ensemble_defaults_and_mixture() {
        let c = EnsembleConfig::from_json(
            r#"{"schema_version": 1, "n": 4, "samples": 6, "seed": 3,
                "winding": {"mixture": [{"w": 0, "p": 0.5}, {"w": 1, "p": 0.5}]}}"#,
        )
        .unwrap();
        assert_eq!(c.spec().mass, 0.5);
        assert_eq!(c.spec().winding.sectors(), vec![0, 1]);
        assert!(EnsembleConfig::from_json(r#"{"schema_version": 1, "n": 4, "samples": 1, "seed": 3}"#).is_err());
        assert_eq!(EnsembleConfig::from_spec(&c.spec()).spec(), c.spec());
    }
}
