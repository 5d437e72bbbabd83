use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{QcaError, Space};
use crate::modring::ModMatrix;
use crate::pauli::QuditGate;
use crate::symplectic::{rowops, Register};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Site {
    pub cell: String,
    #[serde(default)]
    pub qudit: usize,
}

impl Site {
    pub fn new(cell: impl Into<String>, qudit: usize) -> Self {
        Site {
            cell: cell.into(),
            qudit,
        }
    }
}

fn one() -> i64 {
    1
}

/// One gate of a layer, addressed by cell id and qudit index within the cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "gate")]
pub enum Gate {
    H {
        cell: String,
        #[serde(default)]
        qudit: usize,
    },
    P {
        cell: String,
        #[serde(default)]
        qudit: usize,
        #[serde(default = "one")]
        power: i64,
    },
    #[serde(rename = "CZ")]
    Cz {
        a: Site,
        b: Site,
        #[serde(default = "one")]
        power: i64,
    },
    /// Moves every qudit of cell `c` to the same slot of cell `map[c]`.
    #[serde(rename = "PERM")]
    Perm { map: BTreeMap<String, String> },
}

impl Gate {
    pub fn h(cell: impl Into<String>, qudit: usize) -> Self {
        Gate::H {
            cell: cell.into(),
            qudit,
        }
    }

    pub fn p(cell: impl Into<String>, qudit: usize, power: i64) -> Self {
        Gate::P {
            cell: cell.into(),
            qudit,
            power,
        }
    }

    pub fn cz(a: Site, b: Site, power: i64) -> Self {
        Gate::Cz { a, b, power }
    }

    /// Cyclic translation by `s` cells of a ring space, or of any space numbered `0..n`.
    pub fn translation(space: &Space, s: i64) -> Self {
        let n = space.len() as i64;
        let map = (0..n)
            .map(|i| {
                let j = (i + s).rem_euclid(n.max(1));
                (
                    space.cells()[i as usize].clone(),
                    space.cells()[j as usize].clone(),
                )
            })
            .collect();
        Gate::Perm { map }
    }
}

/// A gate resolved to global qudit indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Resolved {
    H(usize),
    P(usize, u64),
    Cz(usize, usize, u64),
    /// Full qudit target map.
    Perm(Vec<usize>),
}

impl Resolved {
    pub(crate) fn apply(&self, m: &mut ModMatrix) {
        match self {
            Resolved::H(q) => rowops::hadamard(m, *q),
            Resolved::P(q, p) => rowops::phase(m, *q, *p),
            Resolved::Cz(a, b, c) => rowops::cz(m, *a, *b, *c),
            Resolved::Perm(target) => *m = rowops::permute(m, target),
        }
    }

    pub(crate) fn qudit_gate(&self) -> QuditGate {
        match self {
            Resolved::H(q) => QuditGate::H(*q),
            Resolved::P(q, p) => QuditGate::P(*q, *p),
            Resolved::Cz(a, b, c) => QuditGate::CZ(*a, *b, *c),
            Resolved::Perm(t) => QuditGate::Perm(t.clone()),
        }
    }
}

/// Ordered layers of gates with pairwise disjoint supports within each layer.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateScript {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
    pub layers: Vec<Vec<Gate>>,
}

pub(crate) struct ResolvedLayer {
    pub gates: Vec<Resolved>,
    pub diameter: u64,
}

impl GateScript {
    pub fn new(layers: Vec<Vec<Gate>>) -> Self {
        GateScript { d: None, layers }
    }

    pub fn is_empty(&self) -> bool {
        self.layers.iter().all(|l| l.is_empty())
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(|l| l.len()).sum()
    }

    /// Layers of `self` followed by those of `next`.
    pub fn then(mut self, next: GateScript) -> Self {
        self.layers.extend(next.layers);
        self
    }

    /// Check the script against a space and register and resolve qudit indices.
    pub(crate) fn resolve(
        &self,
        space: &Space,
        reg: &Register,
    ) -> Result<Vec<ResolvedLayer>, QcaError> {
        if let Some(d) = self.d {
            if d != reg.modulus() {
                return Err(QcaError::BadScript(format!(
                    "script is over Z_{d}, register over Z_{}",
                    reg.modulus()
                )));
            }
        }
        let ring = reg.ring();
        let site = |cell: &str, qudit: usize| -> Result<(usize, usize), QcaError> {
            let c = space.index_of(cell)?;
            if qudit >= reg.k()[c] {
                return Err(QcaError::BadScript(format!(
                    "cell {cell} has {} qudits, no qudit {qudit}",
                    reg.k()[c]
                )));
            }
            Ok((c, reg.qudit(c, qudit)))
        };
        let mut out = Vec::with_capacity(self.layers.len());
        for (li, layer) in self.layers.iter().enumerate() {
            let mut used = HashSet::new();
            let mut claim = |q: usize| -> Result<(), QcaError> {
                if !used.insert(q) {
                    return Err(QcaError::OverlappingSupports { layer: li });
                }
                Ok(())
            };
            let mut gates = Vec::with_capacity(layer.len());
            let mut diameter = 0;
            for gate in layer {
                match gate {
                    Gate::H { cell, qudit } => {
                        let (_, q) = site(cell, *qudit)?;
                        claim(q)?;
                        gates.push(Resolved::H(q));
                    }
                    Gate::P { cell, qudit, power } => {
                        let (_, q) = site(cell, *qudit)?;
                        claim(q)?;
                        gates.push(Resolved::P(q, ring.reduce(*power)));
                    }
                    Gate::Cz { a, b, power } => {
                        let (ca, qa) = site(&a.cell, a.qudit)?;
                        let (cb, qb) = site(&b.cell, b.qudit)?;
                        if qa == qb {
                            return Err(QcaError::BadScript("CZ on a single qudit".into()));
                        }
                        claim(qa)?;
                        claim(qb)?;
                        diameter = diameter.max(space.dist(ca, cb));
                        gates.push(Resolved::Cz(qa, qb, ring.reduce(*power)));
                    }
                    Gate::Perm { map } => {
                        let mut target: Vec<usize> = (0..reg.n_qudits()).collect();
                        let mut images = HashSet::new();
                        for (from, to) in map {
                            let (cf, ct) = (space.index_of(from)?, space.index_of(to)?);
                            if !images.insert(ct) {
                                return Err(QcaError::BadScript(format!(
                                    "PERM sends two cells to {to}"
                                )));
                            }
                            if reg.k()[cf] != reg.k()[ct] {
                                return Err(QcaError::BadScript(format!(
                                    "PERM between cells {from} and {to} of different sizes"
                                )));
                            }
                            if cf == ct {
                                continue;
                            }
                            diameter = diameter.max(space.dist(cf, ct));
                            for j in 0..reg.k()[cf] {
                                let q = reg.qudit(cf, j);
                                claim(q)?;
                                target[q] = reg.qudit(ct, j);
                            }
                        }
                        let sources: HashSet<usize> = map
                            .keys()
                            .map(|c| space.index_of(c))
                            .collect::<Result<_, _>>()?;
                        if sources != images {
                            return Err(QcaError::BadScript(
                                "PERM is not a bijection of its cells".into(),
                            ));
                        }
                        gates.push(Resolved::Perm(target));
                    }
                }
            }
            out.push(ResolvedLayer { gates, diameter });
        }
        Ok(out)
    }

    /// The gates as a single word on the register's qudits, first gate first.
    pub fn qudit_gates(&self, space: &Space, reg: &Register) -> Result<Vec<QuditGate>, QcaError> {
        Ok(self
            .resolve(space, reg)?
            .iter()
            .flat_map(|l| l.gates.iter().map(Resolved::qudit_gate))
            .collect())
    }

    /// Per-layer diameters: CZ distance, largest PERM displacement, 0 for one-qudit gates.
    pub fn layer_diameters(&self, space: &Space, reg: &Register) -> Result<Vec<u64>, QcaError> {
        Ok(self
            .resolve(space, reg)?
            .iter()
            .map(|l| l.diameter)
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modring::RingSpec;

    #[test]
    fn json_shape() {
        let text = r#"{"d":3,"layers":[[{"gate":"H","cell":"0"},
            {"gate":"CZ","a":{"cell":"1"},"b":{"cell":"2"},"power":2},
            {"gate":"P","cell":"3","qudit":0}],
            [{"gate":"PERM","map":{"0":"1","1":"0"}}]]}"#;
        let s: GateScript = serde_json::from_str(text).unwrap();
        assert_eq!(s.d, Some(3));
        assert_eq!(s.layers[0][2], Gate::p("3", 0, 1));
        let back: GateScript = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn resolution_errors() {
        let ring = RingSpec::new(3).unwrap();
        let space = Space::line(4);
        let reg = Register::new(&ring, space.cells().to_vec(), vec![1; 4]).unwrap();
        let overlap = GateScript::new(vec![vec![
            Gate::h("0", 0),
            Gate::cz(Site::new("0", 0), Site::new("1", 0), 1),
        ]]);
        assert!(matches!(
            overlap.resolve(&space, &reg),
            Err(QcaError::OverlappingSupports { layer: 0 })
        ));
        let unknown = GateScript::new(vec![vec![Gate::h("9", 0)]]);
        assert!(matches!(
            unknown.resolve(&space, &reg),
            Err(QcaError::UnknownCell(_))
        ));
        let mut map = BTreeMap::new();
        map.insert("0".to_string(), "1".to_string());
        let not_bijective = GateScript::new(vec![vec![Gate::Perm { map }]]);
        assert!(not_bijective.resolve(&space, &reg).is_err());
        let wrong_d = GateScript {
            d: Some(5),
            layers: vec![],
        };
        assert!(wrong_d.resolve(&space, &reg).is_err());
    }

    #[test]
    fn diameters() {
        let ring = RingSpec::new(2).unwrap();
        let space = Space::ring(6);
        let reg = Register::new(&ring, space.cells().to_vec(), vec![1; 6]).unwrap();
        let s = GateScript::new(vec![
            vec![
                Gate::cz(Site::new("0", 0), Site::new("2", 0), 1),
                Gate::h("3", 0),
            ],
            vec![Gate::translation(&space, 1)],
        ]);
        assert_eq!(s.layer_diameters(&space, &reg).unwrap(), vec![2, 1]);
    }
}
