//! Catalog of boundary channel contents with their expected verdicts.

use serde::Serialize;

use super::{anomaly_matrix, region_matrices, ChannelSet};
use crate::error::{Error, Result};
use crate::wire::{Axis, ChiralMode, Chirality, Position, Strength, SymmetryGenerator, WireArray};

pub const SCENARIO_NAMES: [&str; 8] = [
    "tdi-closed",
    "tdi-open",
    "charge-self-open",
    "hoti-closed",
    "hoti-open",
    "multipole-n2",
    "multipole-n3",
    "qhe-closed",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Expected {
    pub closed_realizable: bool,
    pub open_realizable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forced_top_self_anomaly: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub set: ChannelSet,
    pub expected: Expected,
    /// Degree of the highest multipole generator, for multipole scenarios.
    pub multipole_order: Option<usize>,
}

impl Scenario {
    /// Each edge carries a nonzero mixed anomaly between the two highest
    /// multipoles while the total self anomaly of the highest one survives.
    pub fn forced_top_self_anomaly(&self) -> Option<bool> {
        let n = self.multipole_order?;
        let top = format!("x{n}");
        let below = format!("x{}", n - 1);
        let per_edge = region_matrices(&self.set)
            .values()
            .all(|a| a.get(&top, &below).is_some_and(|v| v != 0));
        let total = anomaly_matrix(&self.set).get(&top, &top).is_some_and(|v| v != 0);
        Some(per_edge && total)
    }
}

const EDGE_SEPARATION: i64 = 4;

pub fn scenario(name: &str) -> Result<Scenario> {
    use Strength::{Strong, Weak};
    let s = match name {
        "tdi-closed" => tdi(Strong, "dipole insulator edges with strong charge and strong dipole", false),
        "tdi-open" => tdi(Weak, "dipole insulator edges with strong charge and weak dipole", true),
        "charge-self-open" => charge_self(),
        "hoti-closed" => hoti(Strong, "hinge channels with strong plane charges", false),
        "hoti-open" => hoti(Weak, "hinge channels with weak plane charges, strong total charge", true),
        "multipole-n2" => multipole(2),
        "multipole-n3" => multipole(3),
        "qhe-closed" => qhe(),
        other => return Err(Error::UnknownScenario(other.to_string())),
    };
    Ok(s)
}

fn edges(left: Vec<ChiralMode>, right: Vec<ChiralMode>, gens: Vec<SymmetryGenerator>) -> WireArray {
    let l: Vec<String> = left.iter().map(|m| m.id.clone()).collect();
    let r: Vec<String> = right.iter().map(|m| m.id.clone()).collect();
    let mut modes = left;
    modes.extend(right);
    WireArray::new(modes, gens)
        .and_then(|a| a.with_regions([("left-edge", l), ("right-edge", r)]))
        .expect("static scenario")
}

fn mode(id: &str, x: i64, chi: Chirality) -> ChiralMode {
    ChiralMode::new(id, Position::x(x), chi)
}

fn tdi(dipole: Strength, description: &str, open: bool) -> Scenario {
    use Chirality::{Left, Right};
    let l = EDGE_SEPARATION;
    let set = edges(
        vec![mode("phi1_R@0", 0, Right).with_flavor("1"), mode("phi2_L@1", 1, Left).with_flavor("2")],
        vec![
            mode(&format!("phi1_R@{l}"), l, Right).with_flavor("1"),
            mode(&format!("phi2_L@{}", l - 1), l - 1, Left).with_flavor("2"),
        ],
        vec![SymmetryGenerator::charge("e", Strength::Strong), SymmetryGenerator::dipole("d", dipole)],
    );
    let name = if dipole == Strength::Strong { "tdi-closed" } else { "tdi-open" };
    Scenario {
        name: name.into(),
        description: description.into(),
        set,
        expected: Expected { closed_realizable: false, open_realizable: open, forced_top_self_anomaly: None },
        multipole_order: None,
    }
}

fn charge_self() -> Scenario {
    let l = EDGE_SEPARATION;
    let set = edges(
        vec![mode("R@0", 0, Chirality::Right)],
        vec![mode(&format!("L@{l}"), l, Chirality::Left)],
        vec![
            SymmetryGenerator::charge("e", Strength::Strong),
            SymmetryGenerator::dipole("d", Strength::Weak),
        ],
    );
    Scenario {
        name: "charge-self-open".into(),
        description: "single chiral channel per edge, strong charge, weak dipole".into(),
        set,
        expected: Expected { closed_realizable: false, open_realizable: false, forced_top_self_anomaly: None },
        multipole_order: None,
    }
}

fn hoti(planes: Strength, description: &str, open: bool) -> Scenario {
    use Chirality::{Left, Right};
    let l = EDGE_SEPARATION;
    let hinges = [((0, 0), Left), ((0, l), Right), ((l, 0), Right), ((l, l), Left)];
    let mut modes = Vec::new();
    let mut regions = Vec::new();
    for ((x, y), chi) in hinges {
        let tag = if chi == Right { 'R' } else { 'L' };
        let id = format!("{tag}@({x},{y})");
        regions.push((format!("hinge({x},{y})"), vec![id.clone()]));
        modes.push(ChiralMode::new(id, Position::xy(x, y), chi));
    }
    let mut gens = vec![SymmetryGenerator::charge("e", Strength::Strong)];
    for v in [0, l] {
        gens.push(SymmetryGenerator::plane(format!("xz:y={v}"), Axis::Y, v, planes));
    }
    for v in [0, l] {
        gens.push(SymmetryGenerator::plane(format!("yz:x={v}"), Axis::X, v, planes));
    }
    let set = WireArray::new(modes, gens)
        .and_then(|a| a.with_regions(regions))
        .expect("static scenario");
    let name = if planes == Strength::Strong { "hoti-closed" } else { "hoti-open" };
    Scenario {
        name: name.into(),
        description: description.into(),
        set,
        expected: Expected { closed_realizable: false, open_realizable: open, forced_top_self_anomaly: None },
        multipole_order: None,
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Each edge is a finite-difference stencil of order `k = 2n - 1`: at
/// distance `j` from the edge sit `C(k, j)` channels of chirality
/// `(-1)^j`. Its pairings `Σ_j (-1)^j C(k,j) j^p` vanish for `p < k`, so
/// the lowest surviving per-edge entry is the mixed `x^n`–`x^(n-1)` one.
fn multipole(n: usize) -> Scenario {
    let k = 2 * n - 1;
    let l = (2 * k + 2) as i64;
    let mut left = Vec::new();
    let mut right = Vec::new();
    for j in 0..=k {
        let chi = if j % 2 == 0 { Chirality::Right } else { Chirality::Left };
        for c in 0..binomial(k, j) {
            left.push(mode(&format!("left:j={j}#{c}"), j as i64, chi));
            right.push(mode(&format!("right:j={j}#{c}"), l - j as i64, chi));
        }
    }
    let gens = (0..=n).map(|p| SymmetryGenerator::multipole(format!("x{p}"), p, Strength::Strong)).collect();
    let set = edges(left, right, gens);
    Scenario {
        name: format!("multipole-n{n}"),
        description: format!("edges with a per-edge mixed x^{n}-x^{} anomaly, all multipoles strong", n - 1),
        set,
        expected: Expected {
            closed_realizable: false,
            open_realizable: false,
            forced_top_self_anomaly: Some(true),
        },
        multipole_order: Some(n),
    }
}

fn qhe() -> Scenario {
    let l = EDGE_SEPARATION;
    let set = edges(
        vec![mode("R@0", 0, Chirality::Right)],
        vec![mode(&format!("L@{l}"), l, Chirality::Left)],
        vec![SymmetryGenerator::charge("e", Strength::Strong)],
    );
    Scenario {
        name: "qhe-closed".into(),
        description: "quantum Hall edge pair with charge only".into(),
        set,
        expected: Expected { closed_realizable: true, open_realizable: true, forced_top_self_anomaly: None },
        multipole_order: None,
    }
}

#[cfg(test)]
mod tests {
    use super::super::realizability;
    use super::*;

    #[test]
    fn catalog_matches_expectations() {
        for name in SCENARIO_NAMES {
            let s = scenario(name).unwrap();
            let v = realizability(&s.set);
            assert_eq!(v.closed_realizable, s.expected.closed_realizable, "{name}");
            assert_eq!(v.open_realizable, s.expected.open_realizable, "{name}");
            assert_eq!(s.forced_top_self_anomaly(), s.expected.forced_top_self_anomaly, "{name}");
        }
        assert!(scenario("nope").is_err());
    }

    #[test]
    fn hand_computed_entries() {
        let a = anomaly_matrix(&scenario("charge-self-open").unwrap().set);
        assert_eq!(a.get("d", "e"), Some(-4));
        assert_eq!(a.get("e", "e"), Some(0));
        let h = anomaly_matrix(&scenario("hoti-open").unwrap().set);
        assert_eq!(h.get("xz:y=0", "yz:x=0"), Some(-1));
        assert_eq!(h.get("e", "e"), Some(0));
    }

    #[test]
    fn octupole_arithmetic() {
        // Left stencil of order 5: Σ_j (-1)^j C(5,j) j^5 = -5! ; mixed x³x² entry.
        let s = scenario("multipole-n3").unwrap();
        let r = region_matrices(&s.set);
        assert_eq!(r["left-edge"].get("x3", "x2"), Some(-120));
        assert_eq!(r["right-edge"].get("x3", "x2"), Some(120));
        let total = anomaly_matrix(&s.set);
        for p in 0..=3usize {
            for q in 0..=3usize {
                let v = total.get(&format!("x{p}"), &format!("x{q}")).unwrap();
                if p + q < 6 {
                    assert_eq!(v, 0, "x{p} x{q}");
                }
            }
        }
        assert_ne!(total.get("x3", "x3"), Some(0));
    }
}
