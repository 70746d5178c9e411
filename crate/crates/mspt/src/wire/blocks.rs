//! Built-in building blocks used by `gap-scan`.

use super::{Axis, ChiralMode, Chirality, Position, Strength, SymmetryGenerator, WireArray};
use crate::error::{Error, Result};

pub const BLOCK_NAMES: [&str; 4] = ["tdi-block", "tdi-edge", "hoti-block", "helical-pairs"];

pub fn block(name: &str) -> Result<WireArray> {
    match name {
        "tdi-block" => Ok(tdi_block()),
        "tdi-edge" => Ok(tdi_edge_pair()),
        "hoti-block" => Ok(hoti_block()),
        "helical-pairs" => Ok(helical_pairs()),
        other => Err(Error::UnknownScenario(other.to_string())),
    }
}

fn charge_and_dipole() -> Vec<SymmetryGenerator> {
    vec![
        SymmetryGenerator::charge("e", Strength::Strong),
        SymmetryGenerator::dipole("d", Strength::Weak),
    ]
}

/// Dipole-insulator block spanning rows x = 0..2, modes ordered
/// `[φ¹_L(0), φ²_R(1), φ¹_R(1), φ²_L(2)]`.
pub fn tdi_block() -> WireArray {
    use Chirality::{Left, Right};
    let modes = vec![
        ChiralMode::new("phi1_L@0", Position::x(0), Left).with_flavor("1"),
        ChiralMode::new("phi2_R@1", Position::x(1), Right).with_flavor("2"),
        ChiralMode::new("phi1_R@1", Position::x(1), Right).with_flavor("1"),
        ChiralMode::new("phi2_L@2", Position::x(2), Left).with_flavor("2"),
    ];
    WireArray::new(modes, charge_and_dipole()).expect("static block")
}

/// Leftover helical pair at the left boundary.
pub fn tdi_edge_pair() -> WireArray {
    let modes = vec![
        ChiralMode::new("phi1_R@0", Position::x(0), Chirality::Right).with_flavor("1"),
        ChiralMode::new("phi2_L@1", Position::x(1), Chirality::Left).with_flavor("2"),
    ];
    WireArray::new(modes, charge_and_dipole()).expect("static block")
}

/// Hinge-insulator plaquette with every xz- and yz-plane charge conserved.
pub fn hoti_block() -> WireArray {
    use Chirality::{Left, Right};
    let modes = vec![
        ChiralMode::new("L@(0,0)", Position::xy(0, 0), Left),
        ChiralMode::new("R@(1,0)", Position::xy(1, 0), Right),
        ChiralMode::new("R@(0,1)", Position::xy(0, 1), Right),
        ChiralMode::new("L@(1,1)", Position::xy(1, 1), Left),
    ];
    let mut gens = Vec::new();
    for v in 0..2 {
        gens.push(SymmetryGenerator::plane(format!("xz:y={v}"), Axis::Y, v, Strength::Weak));
    }
    for v in 0..2 {
        gens.push(SymmetryGenerator::plane(format!("yz:x={v}"), Axis::X, v, Strength::Weak));
    }
    WireArray::new(modes, gens).expect("static block")
}

/// Two helical pairs on one wire with only charge conservation.
pub fn helical_pairs() -> WireArray {
    use Chirality::{Left, Right};
    let modes = vec![
        ChiralMode::new("R1", Position::x(0), Right).with_flavor("1"),
        ChiralMode::new("L1", Position::x(0), Left).with_flavor("1"),
        ChiralMode::new("R2", Position::x(0), Right).with_flavor("2"),
        ChiralMode::new("L2", Position::x(0), Left).with_flavor("2"),
    ];
    WireArray::new(modes, vec![SymmetryGenerator::charge("e", Strength::Strong)])
        .expect("static block")
}
