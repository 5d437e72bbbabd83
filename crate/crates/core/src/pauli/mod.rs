//! Generalized Pauli operators with exact phases, Clifford gate tables and `kappa`.
//!
//! `X` is the shift `|j> -> |j+1>` and `Z` the clock `|j> -> xi^j |j>`, so `XZ = xi^{-1} ZX`.
//! Phases live in `Z_m` with `m = d` for odd `d` and `m = 2d` for even `d`; `xi = xi_m^{m/d}`.

mod dense;
mod table;

pub use dense::{
    dense_oracle_check, dense_power_matches, dense_product_matches, DenseFactor, MAX_DENSE_DIM,
};
pub use table::{kappa_of, GateTable, QuditGate};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modring::RingSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("operators act on registers of {left} and {right} qudits")]
    RegisterMismatch { left: usize, right: usize },
    #[error("gate table does not preserve the symplectic form")]
    NotSymplectic,
    #[error("gate table is not a group automorphism: {0}")]
    NotAutomorphism(String),
    #[error("dense dimension {dim} exceeds the oracle limit")]
    DimensionTooLarge { dim: u64 },
    #[error("table does not act by phases only")]
    NotInKernel,
    #[error("malformed gate table: {0}")]
    BadTable(String),
}

/// Phase bookkeeping for qudit dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhaseSpec {
    d: u64,
    m: u64,
}

impl PhaseSpec {
    pub fn new(d: u64) -> Self {
        assert!(d >= 2, "qudit dimension must be at least 2");
        PhaseSpec {
            d,
            m: if d.is_multiple_of(2) { 2 * d } else { d },
        }
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    /// Phase modulus.
    pub fn m(&self) -> u64 {
        self.m
    }

    /// Embedding `Z_d -> Z_m`, `t -> t * (m / d)`.
    pub fn twist(&self, t: u64) -> u64 {
        (t % self.d) * (self.m / self.d) % self.m
    }

    pub fn ring(&self) -> RingSpec {
        RingSpec::new(self.d).expect("valid dimension")
    }
}

/// `xi_m^phase * prod_i X_i^{a_i} Z_i^{b_i}` with `vec = (a_1, b_1, ..., a_n, b_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliOp {
    pub phase: u64,
    pub vec: Vec<u64>,
}

impl PauliOp {
    pub fn identity(n: usize) -> Self {
        PauliOp {
            phase: 0,
            vec: vec![0; 2 * n],
        }
    }

    pub fn x(n: usize, q: usize) -> Self {
        let mut p = Self::identity(n);
        p.vec[2 * q] = 1;
        p
    }

    pub fn z(n: usize, q: usize) -> Self {
        let mut p = Self::identity(n);
        p.vec[2 * q + 1] = 1;
        p
    }

    /// Generator `i` in the order `X_1, Z_1, X_2, ...`.
    pub fn generator(n: usize, i: usize) -> Self {
        let mut p = Self::identity(n);
        p.vec[i] = 1;
        p
    }

    pub fn n(&self) -> usize {
        self.vec.len() / 2
    }

    pub fn with_phase(mut self, phase: u64) -> Self {
        self.phase = phase;
        self
    }

    pub(crate) fn reduced(mut self, ps: &PhaseSpec) -> Self {
        self.phase %= ps.m;
        self.vec.iter_mut().for_each(|x| *x %= ps.d);
        self
    }
}

fn same_register(p: &PauliOp, q: &PauliOp) -> Result<(), PauliError> {
    if p.vec.len() != q.vec.len() {
        return Err(PauliError::RegisterMismatch {
            left: p.n(),
            right: q.n(),
        });
    }
    Ok(())
}

/// Normal-ordered product `p * q`.
pub fn pauli_mul(ps: &PhaseSpec, p: &PauliOp, q: &PauliOp) -> Result<PauliOp, PauliError> {
    same_register(p, q)?;
    let d = ps.d;
    // moving Z^b past X^e gives xi^{b e}
    let mut cross = 0u64;
    for (x, y) in p.vec.chunks_exact(2).zip(q.vec.chunks_exact(2)) {
        cross = (cross + (x[1] % d) * (y[0] % d)) % d;
    }
    let phase = (p.phase + q.phase + ps.twist(cross)) % ps.m;
    let vec = p.vec.iter().zip(&q.vec).map(|(a, b)| (a + b) % d).collect();
    Ok(PauliOp { phase, vec })
}

/// `Omega(vec p, vec q) = sum_i (a_i f_i - b_i e_i) mod d`.
///
/// With this exponent, `xi^Omega * p * q = q * p`.
pub fn commutation_exponent(ps: &PhaseSpec, p: &PauliOp, q: &PauliOp) -> Result<u64, PauliError> {
    same_register(p, q)?;
    Ok(crate::symplectic::omega_raw(&ps.ring(), &p.vec, &q.vec))
}

/// The inverse operator.
pub fn pauli_inverse(ps: &PhaseSpec, p: &PauliOp) -> PauliOp {
    let d = ps.d;
    let neg = PauliOp {
        phase: 0,
        vec: p.vec.iter().map(|&x| (d - x % d) % d).collect(),
    };
    let prod = pauli_mul(ps, p, &neg).expect("same register");
    PauliOp {
        phase: (ps.m - prod.phase) % ps.m,
        vec: neg.vec,
    }
}

/// `p^e` by repeated squaring.
pub fn pauli_pow(ps: &PhaseSpec, p: &PauliOp, mut e: u64) -> PauliOp {
    let mut acc = PauliOp::identity(p.n());
    let mut base = p.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = pauli_mul(ps, &acc, &base).expect("same register");
        }
        base = pauli_mul(ps, &base, &base).expect("same register");
        e >>= 1;
    }
    acc
}

/// Multiply a phase `xi_m^t` onto `p`.
pub fn times_phase(ps: &PhaseSpec, p: &PauliOp, t: u64) -> PauliOp {
    PauliOp {
        phase: (p.phase + t) % ps.m,
        vec: p.vec.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn product_examples() {
        let ps = PhaseSpec::new(3);
        let (x, z) = (PauliOp::x(1, 0), PauliOp::z(1, 0));
        let xz = pauli_mul(&ps, &x, &z).unwrap();
        assert_eq!(
            xz,
            PauliOp {
                phase: 0,
                vec: vec![1, 1]
            }
        );
        let zx = pauli_mul(&ps, &z, &x).unwrap();
        assert_eq!(
            zx,
            PauliOp {
                phase: 1,
                vec: vec![1, 1]
            }
        );

        let ps2 = PhaseSpec::new(2);
        assert_eq!(ps2.m(), 4);
        let y = PauliOp {
            phase: 0,
            vec: vec![1, 1],
        };
        let yy = pauli_mul(&ps2, &y, &y).unwrap();
        assert_eq!(
            yy,
            PauliOp {
                phase: 2,
                vec: vec![0, 0]
            }
        );
        assert!(pauli_mul(&ps, &x, &PauliOp::x(2, 0)).is_err());
    }

    #[test]
    fn commutation_examples() {
        let ps = PhaseSpec::new(5);
        let (x, z) = (PauliOp::x(1, 0), PauliOp::z(1, 0));
        assert_eq!(commutation_exponent(&ps, &x, &z).unwrap(), 1);
        assert_eq!(commutation_exponent(&ps, &x, &x).unwrap(), 0);
        let p = PauliOp {
            phase: 0,
            vec: vec![2, 3],
        };
        let q = PauliOp {
            phase: 0,
            vec: vec![1, 4],
        };
        assert_eq!(commutation_exponent(&ps, &p, &q).unwrap(), 0);
    }

    #[test]
    fn order_relations() {
        for d in [2u64, 3, 4, 5, 6] {
            let ps = PhaseSpec::new(d);
            let (x, z) = (PauliOp::x(1, 0), PauliOp::z(1, 0));
            assert_eq!(pauli_pow(&ps, &x, d), PauliOp::identity(1));
            assert_eq!(pauli_pow(&ps, &z, d), PauliOp::identity(1));
            let y = pauli_mul(&ps, &x, &z).unwrap();
            let expected = if d % 2 == 0 {
                ps.twist(1) * (d * (d - 1) / 2) % ps.m()
            } else {
                0
            };
            assert_eq!(pauli_pow(&ps, &y, d).phase, expected);
        }
    }

    fn op(d: u64, n: usize) -> impl Strategy<Value = PauliOp> {
        let m = PhaseSpec::new(d).m();
        (0..m, proptest::collection::vec(0..d, 2 * n))
            .prop_map(|(phase, vec)| PauliOp { phase, vec })
    }

    proptest! {
        #[test]
        fn commutation_law((d, p, q) in (prop::sample::select(vec![2u64, 3, 4, 6, 8, 9]), 1usize..=6)
            .prop_flat_map(|(d, n)| (Just(d), op(d, n), op(d, n))))
        {
            let ps = PhaseSpec::new(d);
            let pq = pauli_mul(&ps, &p, &q).unwrap();
            let qp = pauli_mul(&ps, &q, &p).unwrap();
            let w = commutation_exponent(&ps, &p, &q).unwrap();
            prop_assert_eq!(times_phase(&ps, &pq, ps.twist(w)), qp);
        }

        #[test]
        fn inverse_and_associativity(a in op(4, 3), b in op(4, 3), c in op(4, 3)) {
            let ps = PhaseSpec::new(4);
            let ab_c = pauli_mul(&ps, &pauli_mul(&ps, &a, &b).unwrap(), &c).unwrap();
            let a_bc = pauli_mul(&ps, &a, &pauli_mul(&ps, &b, &c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
            let inv = pauli_inverse(&ps, &a);
            prop_assert_eq!(pauli_mul(&ps, &a, &inv).unwrap(), PauliOp::identity(3));
            prop_assert_eq!(pauli_mul(&ps, &inv, &a).unwrap(), PauliOp::identity(3));
        }
    }
}
