use serde::{Deserialize, Serialize};

use super::SymplecticError;
use crate::modring::{ModMatrix, RingSpec};

/// A map in the (all-X | all-Z) layout, `[[A, B], [C, D]]`.
///
/// `A` and `C` are the X- and Z-parts of the images of the X generators,
/// `B` and `D` those of the Z generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct XZBlocks {
    pub a: ModMatrix,
    pub b: ModMatrix,
    pub c: ModMatrix,
    pub d: ModMatrix,
}

/// Permutation `P` with `P * v_site = v_xz`.
pub fn site_to_xz_permutation(ring: &RingSpec, n: usize) -> ModMatrix {
    let mut p = ModMatrix::zeros(ring, 2 * n, 2 * n);
    for q in 0..n {
        p.set(q, 2 * q, 1);
        p.set(n + q, 2 * q + 1, 1);
    }
    p
}

impl XZBlocks {
    /// Build from blocks, checking all six symplectic block identities.
    pub fn new(
        a: ModMatrix,
        b: ModMatrix,
        c: ModMatrix,
        d: ModMatrix,
    ) -> Result<Self, SymplecticError> {
        let n = a.rows();
        for (name, m) in [("A", &a), ("B", &b), ("C", &c), ("D", &d)] {
            if m.rows() != n || m.cols() != n {
                return Err(SymplecticError::ShapeMismatch(format!(
                    "block {name} is {}x{}, expected {n}x{n}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        let blocks = XZBlocks { a, b, c, d };
        blocks.check()?;
        Ok(blocks)
    }

    pub fn identity(ring: &RingSpec, n: usize) -> Self {
        XZBlocks {
            a: ModMatrix::identity(ring, n),
            b: ModMatrix::zeros(ring, n, n),
            c: ModMatrix::zeros(ring, n, n),
            d: ModMatrix::identity(ring, n),
        }
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    /// Name of the first violated block identity, if any.
    pub fn check(&self) -> Result<(), SymplecticError> {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        let eye = ModMatrix::identity(a.ring(), a.rows());
        let fail = |name: &str| Err(SymplecticError::BlockConditionsViolated(name.into()));
        if !(&a.transpose() * c).is_symmetric() {
            return fail("A^T C symmetric");
        }
        if !(&b.transpose() * d).is_symmetric() {
            return fail("B^T D symmetric");
        }
        if &(&a.transpose() * d) - &(&c.transpose() * b) != eye {
            return fail("A^T D - C^T B = I");
        }
        if !(a * &b.transpose()).is_symmetric() {
            return fail("A B^T symmetric");
        }
        if !(c * &d.transpose()).is_symmetric() {
            return fail("C D^T symmetric");
        }
        if &(a * &d.transpose()) - &(b * &c.transpose()) != eye {
            return fail("A D^T - B C^T = I");
        }
        Ok(())
    }

    pub fn from_site_major(m: &ModMatrix) -> Self {
        Self::split(&Self::permute_to_xz(m))
    }

    /// Split a `2N x 2N` matrix already in XZ layout into blocks (unchecked).
    pub fn split(m: &ModMatrix) -> Self {
        let n = m.rows() / 2;
        XZBlocks {
            a: m.submatrix(0..n, 0..n),
            b: m.submatrix(0..n, n..2 * n),
            c: m.submatrix(n..2 * n, 0..n),
            d: m.submatrix(n..2 * n, n..2 * n),
        }
    }

    pub fn joined(&self) -> ModMatrix {
        self.a.hstack(&self.b).vstack(&self.c.hstack(&self.d))
    }

    pub fn to_site_major(&self) -> ModMatrix {
        let m = self.joined();
        let n = self.n();
        let mut out = ModMatrix::zeros(m.ring(), 2 * n, 2 * n);
        let site = |i: usize| if i < n { 2 * i } else { 2 * (i - n) + 1 };
        for i in 0..2 * n {
            for j in 0..2 * n {
                out.set(site(i), site(j), m.get(i, j));
            }
        }
        out
    }

    fn permute_to_xz(m: &ModMatrix) -> ModMatrix {
        let n = m.rows() / 2;
        let mut out = ModMatrix::zeros(m.ring(), 2 * n, 2 * n);
        let xz = |i: usize| {
            if i.is_multiple_of(2) {
                i / 2
            } else {
                n + i / 2
            }
        };
        for i in 0..2 * n {
            for j in 0..2 * n {
                out.set(xz(i), xz(j), m.get(i, j));
            }
        }
        out
    }

    /// Whether `B = C = 0`.
    pub fn is_separated(&self) -> bool {
        self.b.is_zero() && self.c.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cz_and_hadamard_blocks() {
        let ring = RingSpec::new(5).unwrap();
        let cz = ModMatrix::from_rows(
            &ring,
            &[
                vec![1, 0, 0, 0],
                vec![0, 1, 1, 0],
                vec![0, 0, 1, 0],
                vec![1, 0, 0, 1],
            ],
        );
        let b = XZBlocks::from_site_major(&cz);
        assert!(b.a.is_identity() && b.d.is_identity() && b.b.is_zero());
        assert_eq!(b.c, ModMatrix::from_rows(&ring, &[vec![0, 1], vec![1, 0]]));
        assert!(b.check().is_ok());
        assert_eq!(b.to_site_major(), cz);

        let h = ModMatrix::from_rows(
            &ring,
            &[
                vec![0, -1, 0, 0],
                vec![1, 0, 0, 0],
                vec![0, 0, 0, -1],
                vec![0, 0, 1, 0],
            ],
        );
        let hb = XZBlocks::from_site_major(&h);
        assert!(hb.a.is_zero() && hb.d.is_zero());
        assert_eq!(hb.b, -&ModMatrix::identity(&ring, 2));
        assert!(hb.c.is_identity());
    }

    #[test]
    fn violations_are_named() {
        let ring = RingSpec::new(3).unwrap();
        let i = ModMatrix::identity(&ring, 1);
        let z = ModMatrix::zeros(&ring, 1, 1);
        let err = XZBlocks::new(i.clone(), z.clone(), z, i.scale(2)).unwrap_err();
        assert_eq!(
            err,
            SymplecticError::BlockConditionsViolated("A^T D - C^T B = I".into())
        );
    }

    #[test]
    fn permutation_matches_layout() {
        let ring = RingSpec::new(7).unwrap();
        let p = site_to_xz_permutation(&ring, 3);
        let v = [1u64, 2, 3, 4, 5, 6];
        assert_eq!(p.apply(&v), vec![1, 3, 5, 2, 4, 6]);
    }
}
