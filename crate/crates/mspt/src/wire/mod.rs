//! Chiral boson channels, modulated U(1) generators and symmetric gapping
//! vectors.

pub mod blocks;
mod enumerate;
pub mod hnf;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use enumerate::{
    enumerate_symmetric_vertices, max_gappable_set, Enumeration, GappableSet,
    DEFAULT_BOUND, MAX_ENUMERATION_MODES,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

/// Lattice position of a channel: `x`, or `(x, y)` for hinge cross-sections.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Position {
    pub x: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<i64>,
}

impl Position {
    pub fn x(x: i64) -> Self {
        Position { x, y: None }
    }

    pub fn xy(x: i64, y: i64) -> Self {
        Position { x, y: Some(y) }
    }

    /// Coordinate along `axis`; a missing `y` reads as 0.
    pub fn coord(&self, axis: Axis) -> i64 {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y.unwrap_or(0),
        }
    }

    pub fn translated(&self, axis: Axis, by: i64) -> Self {
        match axis {
            Axis::X => Position { x: self.x + by, y: self.y },
            Axis::Y => Position { x: self.x, y: Some(self.y.unwrap_or(0) + by) },
        }
    }
}

/// Right movers carry `+1`, left movers `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub enum Chirality {
    Right,
    Left,
}

impl Chirality {
    pub fn sign(self) -> i64 {
        match self {
            Chirality::Right => 1,
            Chirality::Left => -1,
        }
    }
}

impl TryFrom<i64> for Chirality {
    type Error = String;

    fn try_from(v: i64) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Chirality::Right),
            -1 => Ok(Chirality::Left),
            other => Err(format!("chirality must be +1 or -1, got {other}")),
        }
    }
}

impl From<Chirality> for i64 {
    fn from(c: Chirality) -> i64 {
        c.sign()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChiralMode {
    pub id: String,
    pub position: Position,
    pub chirality: Chirality,
    pub flavor: String,
    pub base_charge: i64,
}

impl ChiralMode {
    pub fn new(id: impl Into<String>, position: Position, chirality: Chirality) -> Self {
        ChiralMode { id: id.into(), position, chirality, flavor: String::new(), base_charge: 1 }
    }

    pub fn with_flavor(mut self, flavor: impl Into<String>) -> Self {
        self.flavor = flavor.into();
        self
    }

    pub fn with_charge(mut self, q: i64) -> Self {
        self.base_charge = q;
        self
    }
}

/// Spatial weight of a U(1) generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Modulation {
    /// `Σ_k coeffs[k] · t^k` with `t` the coordinate along `axis`.
    Polynomial { axis: Axis, coeffs: Vec<i64> },
    /// 1 on the plane `axis = value`, 0 elsewhere.
    PlaneIndicator { axis: Axis, value: i64 },
    /// Explicit table; positions absent from the table weigh 0.
    Tabulated(BTreeMap<Position, i64>),
}

impl Modulation {
    pub fn eval(&self, p: &Position) -> i64 {
        match self {
            Modulation::Polynomial { axis, coeffs } => {
                let t = p.coord(*axis);
                coeffs.iter().rev().fold(0, |acc, &c| acc * t + c)
            }
            Modulation::PlaneIndicator { axis, value } => i64::from(p.coord(*axis) == *value),
            Modulation::Tabulated(table) => table.get(p).copied().unwrap_or(0),
        }
    }

    /// The modulation seen from an origin moved to `x0` along `along`:
    /// `f'(t) = f(t - x0)`.
    pub fn shifted(&self, along: Axis, x0: i64) -> Modulation {
        match self {
            Modulation::Polynomial { axis, coeffs } if *axis == along => {
                // Expand Σ c_k (t - x0)^k in powers of t.
                let n = coeffs.len();
                let mut out = vec![0i64; n];
                for (k, &c) in coeffs.iter().enumerate() {
                    let mut binom = 1i64;
                    for j in 0..=k {
                        // term c · C(k,j) t^j (-x0)^(k-j)
                        let pow = (-x0).pow((k - j) as u32);
                        out[j] += c * binom * pow;
                        binom = binom * (k - j) as i64 / (j + 1) as i64;
                    }
                }
                Modulation::Polynomial { axis: *axis, coeffs: out }
            }
            Modulation::PlaneIndicator { axis, value } if *axis == along => {
                Modulation::PlaneIndicator { axis: *axis, value: value + x0 }
            }
            Modulation::Tabulated(table) => Modulation::Tabulated(
                table.iter().map(|(p, &v)| (p.translated(along, x0), v)).collect(),
            ),
            other => other.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strength {
    Strong,
    Weak,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryGenerator {
    pub name: String,
    pub modulation: Modulation,
    pub strength: Strength,
}

impl SymmetryGenerator {
    pub fn new(name: impl Into<String>, modulation: Modulation, strength: Strength) -> Self {
        SymmetryGenerator { name: name.into(), modulation, strength }
    }

    /// `f = x^n` along x.
    pub fn multipole(name: impl Into<String>, n: usize, strength: Strength) -> Self {
        let mut coeffs = vec![0; n + 1];
        coeffs[n] = 1;
        Self::new(name, Modulation::Polynomial { axis: Axis::X, coeffs }, strength)
    }

    pub fn charge(name: impl Into<String>, strength: Strength) -> Self {
        Self::multipole(name, 0, strength)
    }

    pub fn dipole(name: impl Into<String>, strength: Strength) -> Self {
        Self::multipole(name, 1, strength)
    }

    pub fn plane(name: impl Into<String>, axis: Axis, value: i64, strength: Strength) -> Self {
        Self::new(name, Modulation::PlaneIndicator { axis, value }, strength)
    }

    pub fn is_strong(&self) -> bool {
        self.strength == Strength::Strong
    }
}

/// An ordered set of channels together with the generators acting on them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WireArray {
    pub modes: Vec<ChiralMode>,
    pub generators: Vec<SymmetryGenerator>,
    /// mode id → region label
    pub regions: BTreeMap<String, String>,
}

impl WireArray {
    pub fn new(modes: Vec<ChiralMode>, generators: Vec<SymmetryGenerator>) -> Result<Self> {
        let mut ids = BTreeSet::new();
        for m in &modes {
            if !ids.insert(m.id.as_str()) {
                return Err(Error::invalid("modes", format!("duplicate mode id `{}`", m.id)));
            }
            if m.base_charge == 0 {
                return Err(Error::invalid(
                    "modes",
                    format!("mode `{}` has zero base charge", m.id),
                ));
            }
        }
        let mut names = BTreeSet::new();
        for g in &generators {
            if !names.insert(g.name.as_str()) {
                return Err(Error::invalid(
                    "generators",
                    format!("duplicate generator name `{}`", g.name),
                ));
            }
        }
        Ok(WireArray { modes, generators, regions: BTreeMap::new() })
    }

    /// Attach regions given as label → member ids.
    pub fn with_regions<I, L, M>(mut self, regions: I) -> Result<Self>
    where
        I: IntoIterator<Item = (L, Vec<M>)>,
        L: Into<String>,
        M: Into<String>,
    {
        for (label, members) in regions {
            let label = label.into();
            if members.is_empty() {
                return Err(Error::invalid("regions", format!("region `{label}` is empty")));
            }
            for id in members {
                let id = id.into();
                self.mode_index(&id)?;
                if let Some(prev) = self.regions.insert(id.clone(), label.clone()) {
                    if prev != label {
                        return Err(Error::invalid(
                            "regions",
                            format!("mode `{id}` assigned to both `{prev}` and `{label}`"),
                        ));
                    }
                }
            }
        }
        Ok(self)
    }

    pub fn mode_index(&self, id: &str) -> Result<usize> {
        self.modes
            .iter()
            .position(|m| m.id == id)
            .ok_or_else(|| Error::UnknownMode(id.to_string()))
    }

    pub fn generator(&self, name: &str) -> Result<&SymmetryGenerator> {
        self.generators
            .iter()
            .find(|g| g.name == name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn region_of(&self, id: &str) -> Option<&str> {
        self.regions.get(id).map(String::as_str)
    }

    pub fn region_labels(&self) -> Vec<String> {
        self.regions.values().cloned().collect::<BTreeSet<_>>().into_iter().collect()
    }

    /// Disjoint union; ids and generator names of `other` must not clash
    /// with `self` unless the generator definitions agree.
    pub fn union(&self, other: &WireArray) -> Result<WireArray> {
        let mut modes = self.modes.clone();
        modes.extend(other.modes.iter().cloned());
        let mut generators = self.generators.clone();
        for g in &other.generators {
            match generators.iter().find(|h| h.name == g.name) {
                Some(h) if h == g => {}
                Some(_) => {
                    return Err(Error::invalid(
                        "generators",
                        format!("conflicting definitions of `{}`", g.name),
                    ))
                }
                None => generators.push(g.clone()),
            }
        }
        let mut out = WireArray::new(modes, generators)?;
        out.regions = self.regions.clone();
        out.regions.extend(other.regions.iter().map(|(k, v)| (k.clone(), v.clone())));
        Ok(out)
    }

    pub fn chirality_signs(&self) -> Vec<i64> {
        self.modes.iter().map(|m| m.chirality.sign()).collect()
    }

    /// Per-mode coefficients `q_j f_g(x_j)` of generator `g`.
    pub fn charge_row(&self, g: &SymmetryGenerator) -> Vec<i64> {
        self.modes.iter().map(|m| m.base_charge * g.modulation.eval(&m.position)).collect()
    }
}

/// Integer coefficients of a vertex operator `exp(i Σ_j Λ_j φ_j)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct VertexVector {
    pub coeffs: BTreeMap<String, i64>,
}

impl VertexVector {
    pub fn new<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, i64)>,
        S: Into<String>,
    {
        VertexVector {
            coeffs: pairs.into_iter().filter(|(_, c)| *c != 0).map(|(s, c)| (s.into(), c)).collect(),
        }
    }

    /// Coefficients listed in the mode order of `array`.
    pub fn from_dense(array: &WireArray, dense: &[i64]) -> Result<Self> {
        if dense.len() != array.modes.len() {
            return Err(Error::Dimension(format!(
                "{} coefficients for {} modes",
                dense.len(),
                array.modes.len()
            )));
        }
        Ok(Self::new(array.modes.iter().map(|m| m.id.clone()).zip(dense.iter().copied())))
    }

    pub fn to_dense(&self, array: &WireArray) -> Result<Vec<i64>> {
        let mut out = vec![0; array.modes.len()];
        for (id, &c) in &self.coeffs {
            out[array.mode_index(id)?] = c;
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|&c| c == 0)
    }

    pub fn negated(&self) -> Self {
        VertexVector { coeffs: self.coeffs.iter().map(|(k, &c)| (k.clone(), -c)).collect() }
    }
}

/// Charge `Σ_j Λ_j q_j f_g(x_j)` carried by `v` under `g`.
pub fn charge_of(v: &VertexVector, g: &SymmetryGenerator, array: &WireArray) -> Result<i64> {
    let mut total = 0;
    for (id, &c) in &v.coeffs {
        let m = &array.modes[array.mode_index(id)?];
        total += c * m.base_charge * g.modulation.eval(&m.position);
    }
    Ok(total)
}

/// Chiral commutator pairing `Σ_j χ_j Λ1_j Λ2_j`.
pub fn null_pairing(v1: &VertexVector, v2: &VertexVector, array: &WireArray) -> Result<i64> {
    for id in v2.coeffs.keys() {
        array.mode_index(id)?;
    }
    let mut total = 0;
    for (id, &c) in &v1.coeffs {
        let m = &array.modes[array.mode_index(id)?];
        total += m.chirality.sign() * c * v2.coeffs.get(id).copied().unwrap_or(0);
    }
    Ok(total)
}

/// Neutral under every generator of `array`.
pub fn is_symmetric(v: &VertexVector, array: &WireArray) -> Result<bool> {
    for g in &array.generators {
        if charge_of(v, g, array)? != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tdi() -> WireArray {
        blocks::tdi_block()
    }

    #[test]
    fn tdi_vertex_is_neutral() {
        let a = tdi();
        let v = VertexVector::from_dense(&a, &[1, -1, -1, 1]).unwrap();
        assert_eq!(charge_of(&v, a.generator("e").unwrap(), &a).unwrap(), 0);
        assert_eq!(charge_of(&v, a.generator("d").unwrap(), &a).unwrap(), 0);
    }

    #[test]
    fn dipole_charge_of_outer_pair() {
        let a = tdi();
        let v = VertexVector::from_dense(&a, &[1, 0, 0, -1]).unwrap();
        assert_eq!(charge_of(&v, a.generator("d").unwrap(), &a).unwrap(), -2);
    }

    #[test]
    fn pairing_examples() {
        let a = tdi();
        let v = VertexVector::from_dense(&a, &[1, -1, -1, 1]).unwrap();
        assert_eq!(null_pairing(&v, &v, &a).unwrap(), 0);
        let e1 = VertexVector::from_dense(&a, &[1, 0, 0, 0]).unwrap();
        assert_eq!(null_pairing(&e1, &e1, &a).unwrap(), -1);
        let p = VertexVector::from_dense(&a, &[1, -1, 0, 0]).unwrap();
        let q = VertexVector::from_dense(&a, &[0, 0, 1, -1]).unwrap();
        assert_eq!(null_pairing(&p, &q, &a).unwrap(), 0);
    }

    #[test]
    fn unknown_mode_is_reported() {
        let a = tdi();
        let v = VertexVector::new([("nope", 1)]);
        let e = charge_of(&v, &a.generators[0], &a).unwrap_err();
        assert_eq!(e, Error::UnknownMode("nope".into()));
        assert!(null_pairing(&v, &v, &a).is_err());
    }

    #[test]
    fn polynomial_shift_expands_binomially() {
        // (t - 2)^2 = t^2 - 4t + 4
        let m = Modulation::Polynomial { axis: Axis::X, coeffs: vec![0, 0, 1] };
        match m.shifted(Axis::X, 2) {
            Modulation::Polynomial { coeffs, .. } => assert_eq!(coeffs, vec![4, -4, 1]),
            _ => unreachable!(),
        }
        for t in -3..5 {
            assert_eq!(m.shifted(Axis::X, 2).eval(&Position::x(t)), (t - 2) * (t - 2));
        }
    }

    #[test]
    fn validation_rejects_duplicates_and_empty_regions() {
        let m = ChiralMode::new("a", Position::x(0), Chirality::Right);
        assert!(WireArray::new(vec![m.clone(), m.clone()], vec![]).is_err());
        assert!(WireArray::new(vec![m.clone().with_charge(0)], vec![]).is_err());
        let a = WireArray::new(vec![m], vec![]).unwrap();
        assert!(a.clone().with_regions([("left", Vec::<String>::new())]).is_err());
        assert!(a.with_regions([("left", vec!["zz"])]).is_err());
    }

    #[test]
    fn chirality_serde_uses_signs() {
        assert_eq!(serde_json::to_string(&Chirality::Left).unwrap(), "-1");
        let c: Chirality = serde_json::from_str("1").unwrap();
        assert_eq!(c, Chirality::Right);
        assert!(serde_json::from_str::<Chirality>("2").is_err());
    }
}
