//! The standard symplectic structure on `Z_d^{2N}` and maps preserving it.
//!
//! Vectors use the site-major layout `(a_1, b_1, ..., a_N, b_N)`: index `2q` is the
//! X-exponent of qudit `q` and `2q + 1` its Z-exponent. Columns of a map are the
//! images of `X_1, Z_1, X_2, ...`.

mod basis;
mod blocks;
mod transvection;

pub use basis::{symplectic_basis, symplectic_basis_local};
pub use blocks::{site_to_xz_permutation, XZBlocks};
pub use transvection::{
    decompose_transvections, decompose_transvections_lifted, recompose, transvection, Transvection,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modring::{ModMatrix, RingError, RingSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymplecticError {
    #[error("vector length {got} does not match register dimension {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("block condition violated: {0}")]
    BlockConditionsViolated(String),
    #[error("matrix does not preserve the symplectic form")]
    NotSymplectic,
    #[error("matrix is not alternating")]
    NotAlternating,
    #[error("form is singular")]
    Singular,
    #[error("unknown layout {0:?}")]
    UnknownLayout(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Cells with per-cell qudit counts over `Z_d`. Qudits are numbered cell by cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Register {
    ring: RingSpec,
    cells: Vec<String>,
    k: Vec<usize>,
    offsets: Vec<usize>,
}

impl Register {
    pub fn new(
        ring: &RingSpec,
        cells: Vec<String>,
        k: Vec<usize>,
    ) -> Result<Self, SymplecticError> {
        if cells.len() != k.len() {
            return Err(SymplecticError::ShapeMismatch(format!(
                "{} cells but {} qudit counts",
                cells.len(),
                k.len()
            )));
        }
        let mut offsets = Vec::with_capacity(k.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for &ki in &k {
            acc += ki;
            offsets.push(acc);
        }
        Ok(Register {
            ring: ring.clone(),
            cells,
            k,
            offsets,
        })
    }

    /// `cells` cells named `0, 1, ...`, each carrying `k` qudits.
    pub fn uniform(ring: &RingSpec, cells: usize, k: usize) -> Self {
        let names = (0..cells).map(|i| i.to_string()).collect();
        Self::new(ring, names, vec![k; cells]).expect("consistent lengths")
    }

    /// `n` single-qudit cells.
    pub fn qudits(ring: &RingSpec, n: usize) -> Self {
        Self::uniform(ring, n, 1)
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn modulus(&self) -> u64 {
        self.ring.modulus()
    }

    pub fn cells(&self) -> &[String] {
        &self.cells
    }

    pub fn k(&self) -> &[usize] {
        &self.k
    }

    /// Total number of qudits `N`.
    pub fn n_qudits(&self) -> usize {
        *self.offsets.last().expect("nonempty offsets")
    }

    /// Module dimension `2N`.
    pub fn dim(&self) -> usize {
        2 * self.n_qudits()
    }

    /// Global index of qudit `j` in cell `cell`.
    pub fn qudit(&self, cell: usize, j: usize) -> usize {
        assert!(j < self.k[cell], "cell {cell} has {} qudits", self.k[cell]);
        self.offsets[cell] + j
    }

    /// Qudit range of a cell.
    pub fn cell_qudits(&self, cell: usize) -> std::ops::Range<usize> {
        self.offsets[cell]..self.offsets[cell + 1]
    }

    pub fn cell_of_qudit(&self, q: usize) -> usize {
        self.offsets.partition_point(|&o| o <= q) - 1
    }

    pub fn cell_index(&self, id: &str) -> Option<usize> {
        self.cells.iter().position(|c| c == id)
    }

    /// Same cells and counts over a different modulus.
    pub fn with_ring(&self, ring: &RingSpec) -> Self {
        Register {
            ring: ring.clone(),
            ..self.clone()
        }
    }

    /// Concatenate qudit counts cell by cell (the registers must share cells).
    pub fn direct_sum(&self, other: &Register) -> Result<Self, SymplecticError> {
        if self.cells != other.cells || self.modulus() != other.modulus() {
            return Err(SymplecticError::ShapeMismatch(
                "direct sum needs identical cells and modulus".into(),
            ));
        }
        let k = self.k.iter().zip(&other.k).map(|(a, b)| a + b).collect();
        Self::new(&self.ring, self.cells.clone(), k)
    }

    fn check_len(&self, v: &[u64]) -> Result<(), SymplecticError> {
        if v.len() != self.dim() {
            return Err(SymplecticError::LengthMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct RegisterJson {
    d: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cells: Option<Vec<String>>,
    k: Vec<usize>,
}

impl Serialize for Register {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RegisterJson {
            d: self.modulus(),
            cells: Some(self.cells.clone()),
            k: self.k.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Register {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = RegisterJson::deserialize(de)?;
        let ring = RingSpec::new(raw.d).map_err(serde::de::Error::custom)?;
        let cells = raw
            .cells
            .unwrap_or_else(|| (0..raw.k.len()).map(|i| i.to_string()).collect());
        Register::new(&ring, cells, raw.k).map_err(serde::de::Error::custom)
    }
}

/// `Omega(u, v) = sum_q (a_q f_q - b_q e_q)` for `u = (a, b)`, `v = (e, f)`.
pub fn omega(u: &[u64], v: &[u64], reg: &Register) -> Result<u64, SymplecticError> {
    reg.check_len(u)?;
    reg.check_len(v)?;
    Ok(omega_raw(reg.ring(), u, v))
}

pub(crate) fn omega_raw(ring: &RingSpec, u: &[u64], v: &[u64]) -> u64 {
    let d = ring.modulus();
    let mut acc = 0u64;
    for (x, y) in u.chunks_exact(2).zip(v.chunks_exact(2)) {
        acc = (acc + x[0] % d * (y[1] % d)) % d;
        acc = (acc + (d - x[1] % d) * (y[0] % d)) % d;
    }
    acc
}

/// Block-diagonal `[[0, 1], [-1, 0]]` per qudit.
pub fn j_matrix(ring: &RingSpec, n_qudits: usize) -> ModMatrix {
    let mut j = ModMatrix::zeros(ring, 2 * n_qudits, 2 * n_qudits);
    for q in 0..n_qudits {
        j.set(2 * q, 2 * q + 1, 1);
        j.set_signed(2 * q + 1, 2 * q, -1);
    }
    j
}

/// Whether `m^T J m == J`.
pub fn is_symplectic(m: &ModMatrix, reg: &Register) -> Result<bool, SymplecticError> {
    let n = reg.dim();
    if m.rows() != n || m.cols() != n {
        return Err(SymplecticError::ShapeMismatch(format!(
            "expected {n}x{n}, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if m.modulus() != reg.modulus() {
        return Err(SymplecticError::ShapeMismatch(format!(
            "matrix over Z_{} for a register over Z_{}",
            m.modulus(),
            reg.modulus()
        )));
    }
    Ok(preserves_form(m))
}

fn preserves_form(m: &ModMatrix) -> bool {
    // column pairs: Omega(m e_i, m e_j) == Omega(e_i, e_j)
    let ring = m.ring();
    let n = m.cols();
    let cols: Vec<Vec<u64>> = (0..n).map(|j| m.column(j)).collect();
    let d = ring.modulus();
    for i in 0..n {
        for j in i..n {
            let expected = match (i % 2, j - i) {
                (0, 1) => 1,
                _ => 0,
            };
            if omega_raw(ring, &cols[i], &cols[j]) != expected % d {
                return false;
            }
        }
    }
    true
}

/// A verified symplectic automorphism of a register, stored site-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticMap {
    register: Register,
    matrix: ModMatrix,
}

impl SymplecticMap {
    pub fn new(register: Register, matrix: ModMatrix) -> Result<Self, SymplecticError> {
        if !is_symplectic(&matrix, &register)? {
            return Err(SymplecticError::NotSymplectic);
        }
        Ok(SymplecticMap { register, matrix })
    }

    pub(crate) fn new_unchecked(register: Register, matrix: ModMatrix) -> Self {
        debug_assert!(preserves_form(&matrix));
        SymplecticMap { register, matrix }
    }

    pub fn identity(register: &Register) -> Self {
        SymplecticMap {
            matrix: ModMatrix::identity(register.ring(), register.dim()),
            register: register.clone(),
        }
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn matrix(&self) -> &ModMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ModMatrix {
        self.matrix
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }

    /// `self` applied after `first`, i.e. the matrix product `self * first`.
    pub fn after(&self, first: &SymplecticMap) -> Result<Self, SymplecticError> {
        if self.register != first.register {
            return Err(SymplecticError::ShapeMismatch("registers differ".into()));
        }
        Ok(SymplecticMap {
            register: self.register.clone(),
            matrix: &self.matrix * &first.matrix,
        })
    }

    /// `J^{-1} M^T J`, exact.
    pub fn inverse(&self) -> Self {
        let ring = self.register.ring();
        let j = j_matrix(ring, self.register.n_qudits());
        let jinv = -&j;
        let inv = &(&jinv * &self.matrix.transpose()) * &j;
        debug_assert!((&inv * &self.matrix).is_identity());
        SymplecticMap {
            register: self.register.clone(),
            matrix: inv,
        }
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        self.matrix.apply(v)
    }

    pub fn to_xz_blocks(&self) -> XZBlocks {
        XZBlocks::from_site_major(&self.matrix)
    }

    pub fn from_xz_blocks(register: Register, blocks: &XZBlocks) -> Result<Self, SymplecticError> {
        let m = blocks.to_site_major();
        if m.rows() != register.dim() {
            return Err(SymplecticError::ShapeMismatch(format!(
                "blocks of size {} for a register of {} qudits",
                blocks.n(),
                register.n_qudits()
            )));
        }
        Ok(SymplecticMap::new_unchecked(register, m))
    }

    /// Reduction modulo a divisor of `d`.
    pub fn reduce_mod(&self, ring: &RingSpec) -> Self {
        SymplecticMap {
            register: self.register.with_ring(ring),
            matrix: self.matrix.reduce_mod(ring),
        }
    }
}

/// Row updates applying an elementary gate after `m` (left multiplication).
pub mod rowops {
    use crate::modring::ModMatrix;

    /// Hadamard: `(a, b) -> (-b, a)`.
    pub fn hadamard(m: &mut ModMatrix, q: usize) {
        let d = m.modulus();
        for j in 0..m.cols() {
            let (a, b) = (m.get(2 * q, j), m.get(2 * q + 1, j));
            m.set(2 * q, j, (d - b) % d);
            m.set(2 * q + 1, j, a);
        }
    }

    /// Phase gate of the given power: `(a, b) -> (a, b + p a)`.
    pub fn phase(m: &mut ModMatrix, q: usize, p: u64) {
        let d = m.modulus();
        let p = p % d;
        for j in 0..m.cols() {
            let a = m.get(2 * q, j);
            if a != 0 {
                let b = m.get(2 * q + 1, j);
                m.set(2 * q + 1, j, (b + p * a) % d);
            }
        }
    }

    /// Controlled-Z of the given power: `b_1 += c a_2`, `b_2 += c a_1`.
    pub fn cz(m: &mut ModMatrix, q1: usize, q2: usize, c: u64) {
        let d = m.modulus();
        let c = c % d;
        for j in 0..m.cols() {
            let (a1, a2) = (m.get(2 * q1, j), m.get(2 * q2, j));
            let b1 = m.get(2 * q1 + 1, j);
            m.set(2 * q1 + 1, j, (b1 + c * a2) % d);
            let b2 = m.get(2 * q2 + 1, j);
            m.set(2 * q2 + 1, j, (b2 + c * a1) % d);
        }
    }

    /// Move qudit `q` to position `target[q]`.
    pub fn permute(m: &ModMatrix, target: &[usize]) -> ModMatrix {
        let mut out = ModMatrix::zeros(m.ring(), m.rows(), m.cols());
        for (q, &t) in target.iter().enumerate() {
            for j in 0..m.cols() {
                out.set(2 * t, j, m.get(2 * q, j));
                out.set(2 * t + 1, j, m.get(2 * q + 1, j));
            }
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct SymplecticMapJson {
    register: Register,
    layout: String,
    matrix: ModMatrix,
}

impl Serialize for SymplecticMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SymplecticMapJson {
            register: self.register.clone(),
            layout: "site_major".into(),
            matrix: self.matrix.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymplecticMap {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = SymplecticMapJson::deserialize(de)?;
        let m = match raw.layout.as_str() {
            "site_major" => raw.matrix,
            "xz_blocks" => XZBlocks::split(&raw.matrix).to_site_major(),
            other => {
                return Err(serde::de::Error::custom(SymplecticError::UnknownLayout(
                    other.into(),
                )))
            }
        };
        SymplecticMap::new(raw.register, m).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg(d: u64, n: usize) -> Register {
        Register::qudits(&RingSpec::new(d).unwrap(), n)
    }

    #[test]
    fn omega_examples() {
        let r = reg(5, 1);
        assert_eq!(omega(&[1, 0], &[0, 1], &r).unwrap(), 1);
        assert_eq!(omega(&[2, 3], &[2, 3], &r).unwrap(), 0);
        assert_eq!(omega(&[2, 3], &[1, 4], &r).unwrap(), 0);
        assert!(matches!(
            omega(&[1], &[0, 1], &r),
            Err(SymplecticError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn is_symplectic_examples() {
        let r = reg(5, 1);
        let ring = r.ring().clone();
        assert!(is_symplectic(&ModMatrix::identity(&ring, 2), &r).unwrap());
        let phase = ModMatrix::from_rows(&ring, &[vec![1, 0], vec![1, 1]]);
        assert!(is_symplectic(&phase, &r).unwrap());
        let bad = ModMatrix::from_rows(&ring, &[vec![1, 1], vec![0, 0]]);
        assert!(!is_symplectic(&bad, &r).unwrap());
        assert!(is_symplectic(&ModMatrix::identity(&ring, 3), &r).is_err());
    }

    #[test]
    fn inverse_is_exact() {
        let r = reg(4, 2);
        let ring = r.ring().clone();
        // CZ then phase on qudit 0
        let m = ModMatrix::from_rows(
            &ring,
            &[
                vec![1, 0, 0, 0],
                vec![1, 1, 1, 0],
                vec![0, 0, 1, 0],
                vec![1, 0, 0, 1],
            ],
        );
        let s = SymplecticMap::new(r, m).unwrap();
        assert!(s.after(&s.inverse()).unwrap().is_identity());
    }

    #[test]
    fn json_requires_layout() {
        let s = SymplecticMap::identity(&reg(3, 1));
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"layout\":\"site_major\""));
        let back: SymplecticMap = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let missing = text.replace(",\"layout\":\"site_major\"", "");
        assert!(serde_json::from_str::<SymplecticMap>(&missing).is_err());
    }
}
