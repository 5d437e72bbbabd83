//! Clifford QCAs on finite metric spaces.

mod gates;
mod space;

pub use gates::{Gate, GateScript, Site};
pub use space::{Space, Topology};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modring::{ModMatrix, RingError, RingSpec};
use crate::symplectic::{is_symplectic, Register, SymplecticError, SymplecticMap, XZBlocks};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QcaError {
    #[error("gates in layer {layer} have overlapping supports")]
    OverlappingSupports { layer: usize },
    #[error("unknown cell {0}")]
    UnknownCell(String),
    #[error("spaces or registers differ")]
    SpaceMismatch,
    #[error("bad partition: {0}")]
    BadPartition(String),
    #[error("bad space: {0}")]
    BadSpace(String),
    #[error("bad gate script: {0}")]
    BadScript(String),
    #[error("bad register: {0}")]
    BadRegister(String),
    #[error("block at distance {actual} exceeds declared radius {declared}")]
    RadiusExceeded { declared: u64, actual: u64 },
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// A symplectic automorphism of a register on a finite metric space, with a declared radius
/// bounding the distance between any cell and the cells its image touches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliffordQCA {
    space: Space,
    map: SymplecticMap,
    radius: u64,
}

/// Register whose cells are those of `space`, `k[i]` qudits each.
pub fn register_on(space: &Space, ring: &RingSpec, k: Vec<usize>) -> Result<Register, QcaError> {
    Ok(Register::new(ring, space.cells().to_vec(), k)?)
}

impl CliffordQCA {
    pub fn new(space: Space, map: SymplecticMap, radius: u64) -> Result<Self, QcaError> {
        if map.register().cells() != space.cells() {
            return Err(QcaError::SpaceMismatch);
        }
        let qca = CliffordQCA { space, map, radius };
        let actual = qca.tight_radius();
        if actual > radius {
            return Err(QcaError::RadiusExceeded {
                declared: radius,
                actual,
            });
        }
        Ok(qca)
    }

    /// Declared radius set to the tight radius.
    pub fn tight(space: Space, map: SymplecticMap) -> Result<Self, QcaError> {
        let mut qca = CliffordQCA::new(space, map, u64::MAX)?;
        qca.radius = qca.tight_radius();
        Ok(qca)
    }

    pub fn identity(space: &Space, register: &Register) -> Result<Self, QcaError> {
        CliffordQCA::new(space.clone(), SymplecticMap::identity(register), 0)
    }

    /// `k` qudits on every cell.
    pub fn identity_uniform(space: &Space, ring: &RingSpec, k: usize) -> Self {
        let reg = register_on(space, ring, vec![k; space.len()]).expect("matching lengths");
        CliffordQCA::identity(space, &reg).expect("identity is local")
    }

    /// Layers applied in order; the radius is the sum of the layer diameters.
    pub fn from_gates(
        script: &GateScript,
        space: &Space,
        register: &Register,
    ) -> Result<Self, QcaError> {
        if register.cells() != space.cells() {
            return Err(QcaError::SpaceMismatch);
        }
        let layers = script.resolve(space, register)?;
        let mut m = ModMatrix::identity(register.ring(), register.dim());
        let mut radius = 0;
        for layer in &layers {
            for g in &layer.gates {
                g.apply(&mut m);
            }
            radius += layer.diameter;
        }
        let map = SymplecticMap::new(register.clone(), m)?;
        CliffordQCA::new(space.clone(), map, radius)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn register(&self) -> &Register {
        self.map.register()
    }

    pub fn ring(&self) -> &RingSpec {
        self.map.register().ring()
    }

    pub fn map(&self) -> &SymplecticMap {
        &self.map
    }

    pub fn matrix(&self) -> &ModMatrix {
        self.map.matrix()
    }

    pub fn radius(&self) -> u64 {
        self.radius
    }

    pub fn blocks(&self) -> XZBlocks {
        self.map.to_xz_blocks()
    }

    /// Pairs `(i, j)` of cells such that the image of some generator on `j` touches `i`.
    pub fn support_pairs(&self) -> BTreeSet<(usize, usize)> {
        let reg = self.register();
        let m = self.matrix();
        let cell_of: Vec<usize> = (0..reg.dim()).map(|r| reg.cell_of_qudit(r / 2)).collect();
        let mut out = BTreeSet::new();
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                if m.get(r, c) != 0 {
                    out.insert((cell_of[r], cell_of[c]));
                }
            }
        }
        out
    }

    /// Largest distance between cells joined by a nonzero block.
    pub fn tight_radius(&self) -> u64 {
        self.support_pairs()
            .into_iter()
            .map(|(i, j)| self.space.dist(i, j))
            .max()
            .unwrap_or(0)
    }

    fn check_compatible(&self, other: &CliffordQCA) -> Result<(), QcaError> {
        if self.space != other.space || self.register() != other.register() {
            return Err(QcaError::SpaceMismatch);
        }
        Ok(())
    }

    /// `self` followed by `then`, i.e. the product `then * self`.
    pub fn compose(&self, then: &CliffordQCA) -> Result<Self, QcaError> {
        self.check_compatible(then)?;
        let map = then.map.after(&self.map)?;
        CliffordQCA::new(self.space.clone(), map, self.radius + then.radius)
    }

    /// Inverse with its tight radius as declared radius.
    pub fn inverse(&self) -> Self {
        CliffordQCA::tight(self.space.clone(), self.map.inverse()).expect("same space")
    }

    /// Cell-wise direct sum; in each cell the qudits of `self` come first.
    pub fn direct_sum(&self, other: &CliffordQCA) -> Result<Self, QcaError> {
        if self.space != other.space {
            return Err(QcaError::SpaceMismatch);
        }
        let (ra, rb) = (self.register(), other.register());
        let reg = ra.direct_sum(rb)?;
        let place_a: Vec<usize> = (0..ra.n_qudits())
            .map(|q| {
                let c = ra.cell_of_qudit(q);
                reg.qudit(c, q - ra.cell_qudits(c).start)
            })
            .collect();
        let place_b: Vec<usize> = (0..rb.n_qudits())
            .map(|q| {
                let c = rb.cell_of_qudit(q);
                reg.qudit(c, ra.k()[c] + q - rb.cell_qudits(c).start)
            })
            .collect();
        let mut m = ModMatrix::zeros(reg.ring(), reg.dim(), reg.dim());
        for (place, src) in [(&place_a, self.matrix()), (&place_b, other.matrix())] {
            for r in 0..src.rows() {
                for c in 0..src.cols() {
                    let v = src.get(r, c);
                    if v != 0 {
                        m.set(2 * place[r / 2] + r % 2, 2 * place[c / 2] + c % 2, v);
                    }
                }
            }
        }
        let map = SymplecticMap::new(reg, m)?;
        CliffordQCA::new(self.space.clone(), map, self.radius.max(other.radius))
    }

    /// `B = 0` and `C = 0` in the XZ block form.
    pub fn is_separated(&self) -> bool {
        self.blocks().is_separated()
    }

    fn check_partition(&self, partition: &[Vec<usize>]) -> Result<Vec<usize>, QcaError> {
        let n = self.space.len();
        let mut part_of = vec![usize::MAX; n];
        for (p, set) in partition.iter().enumerate() {
            for &c in set {
                if c >= n {
                    return Err(QcaError::BadPartition(format!("cell {c} out of range")));
                }
                if part_of[c] != usize::MAX {
                    return Err(QcaError::BadPartition(format!("cell {c} listed twice")));
                }
                part_of[c] = p;
            }
        }
        if let Some(c) = part_of.iter().position(|&p| p == usize::MAX) {
            return Err(QcaError::BadPartition(format!("cell {c} not covered")));
        }
        Ok(part_of)
    }

    /// Whether `self` is block diagonal with respect to a partition of the cells, with
    /// symplectic diagonal blocks.
    pub fn is_block_circuit(&self, partition: &[Vec<usize>]) -> Result<bool, QcaError> {
        let part_of = self.check_partition(partition)?;
        if self
            .support_pairs()
            .iter()
            .any(|&(i, j)| part_of[i] != part_of[j])
        {
            return Ok(false);
        }
        let reg = self.register();
        for set in partition {
            let idx: Vec<usize> = set
                .iter()
                .flat_map(|&c| reg.cell_qudits(c))
                .flat_map(|q| [2 * q, 2 * q + 1])
                .collect();
            let sub = self.matrix().select(&idx, &idx);
            let sub_reg = Register::qudits(reg.ring(), idx.len() / 2);
            if !is_symplectic(&sub, &sub_reg)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Finest partition for which `self` is block diagonal, if all its parts have
    /// diameter at most `max_diam`.
    pub fn find_circuit_partition(&self, max_diam: u64) -> Option<Vec<Vec<usize>>> {
        let n = self.space.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (i, j) in self.support_pairs() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for c in 0..n {
            let root = find(&mut parent, c);
            groups.entry(root).or_default().push(c);
        }
        let partition: Vec<Vec<usize>> = groups.into_values().collect();
        if partition
            .iter()
            .any(|set| self.space.diameter(set) > max_diam)
        {
            return None;
        }
        debug_assert!(self.is_block_circuit(&partition).unwrap_or(false));
        Some(partition)
    }

    /// Reduction modulo a divisor of `d`.
    pub fn reduce_mod(&self, ring: &RingSpec) -> Self {
        CliffordQCA {
            space: self.space.clone(),
            map: self.map.reduce_mod(ring),
            radius: self.radius,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
    pub k: Vec<usize>,
}

/// The JSON shape of a QCA before any of its invariants are checked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawQca {
    pub space: Space,
    pub register: RegisterJson,
    pub radius: u64,
    pub matrix: ModMatrix,
    #[serde(default = "site_major")]
    pub layout: String,
}

fn site_major() -> String {
    "site_major".into()
}

impl RawQca {
    pub fn register(&self) -> Result<Register, QcaError> {
        let ring = self.matrix.ring();
        if self.register.d.is_some_and(|d| d != ring.modulus()) {
            return Err(QcaError::BadRegister(
                "register d differs from matrix d".into(),
            ));
        }
        register_on(&self.space, ring, self.register.k.clone())
    }

    pub fn site_major_matrix(&self) -> Result<ModMatrix, QcaError> {
        match self.layout.as_str() {
            "site_major" => Ok(self.matrix.clone()),
            "xz_blocks" => Ok(XZBlocks::split(&self.matrix).to_site_major()),
            other => Err(SymplecticError::UnknownLayout(other.into()).into()),
        }
    }

    pub fn build(self) -> Result<CliffordQCA, QcaError> {
        let reg = self.register()?;
        let map = SymplecticMap::new(reg, self.site_major_matrix()?)?;
        CliffordQCA::new(self.space, map, self.radius)
    }
}

impl From<&CliffordQCA> for RawQca {
    fn from(q: &CliffordQCA) -> Self {
        RawQca {
            space: q.space.clone(),
            register: RegisterJson {
                d: Some(q.register().modulus()),
                k: q.register().k().to_vec(),
            },
            radius: q.radius,
            matrix: q.matrix().clone(),
            layout: site_major(),
        }
    }
}

impl Serialize for CliffordQCA {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawQca::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for CliffordQCA {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        RawQca::deserialize(de)?
            .build()
            .map_err(serde::de::Error::custom)
    }
}
