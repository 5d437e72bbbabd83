use serde::{Deserialize, Serialize};

use super::{omega_raw, Register, SymplecticError, SymplecticMap};
use crate::modring::{ModMatrix, PrimePower, RingSpec};

/// The transvection `x -> x + c * Omega(x, u) * u`.
///
/// With this sign convention `u = e_Z` (one qudit) and `c = 1` give `[[1, 0], [1, 1]]`,
/// the phase gate, while `u = e_X` gives `[[1, -1], [0, 1]]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transvection {
    pub u: Vec<u64>,
    pub c: u64,
}

impl Transvection {
    /// Functional `w` with `w . x = Omega(x, u)`.
    fn functional(&self, ring: &RingSpec) -> Vec<u64> {
        let mut w = vec![0u64; self.u.len()];
        for q in 0..self.u.len() / 2 {
            w[2 * q] = self.u[2 * q + 1];
            w[2 * q + 1] = ring.neg(self.u[2 * q]);
        }
        w
    }

    pub fn matrix(&self, ring: &RingSpec) -> ModMatrix {
        let n = self.u.len();
        let mut m = ModMatrix::identity(ring, n);
        let w = self.functional(ring);
        for i in 0..n {
            if self.u[i] == 0 {
                continue;
            }
            let s = ring.mul(self.c, self.u[i]);
            for j in 0..n {
                let v = ring.add(m.get(i, j), ring.mul(s, w[j]));
                m.set(i, j, v);
            }
        }
        m
    }

    /// `w <- tau * w`, in place.
    fn apply_left(&self, ring: &RingSpec, w: &mut ModMatrix) {
        let n = w.rows();
        let f = self.functional(ring);
        let d = ring.modulus();
        let mut r = vec![0u64; w.cols()];
        for (i, &fi) in f.iter().enumerate() {
            if fi == 0 {
                continue;
            }
            for (j, slot) in r.iter_mut().enumerate() {
                *slot = (*slot + fi * w.get(i, j)) % d;
            }
        }
        for i in 0..n {
            if self.u[i] == 0 {
                continue;
            }
            let s = ring.mul(self.c, self.u[i]);
            for (j, &rj) in r.iter().enumerate() {
                if rj != 0 {
                    let v = (w.get(i, j) + s * rj) % d;
                    w.set(i, j, v);
                }
            }
        }
    }

    pub fn inverse(&self, ring: &RingSpec) -> Self {
        Transvection {
            u: self.u.clone(),
            c: ring.neg(self.c),
        }
    }
}

pub fn transvection(u: &[u64], c: u64, reg: &Register) -> Result<SymplecticMap, SymplecticError> {
    if u.len() != reg.dim() {
        return Err(SymplecticError::LengthMismatch {
            expected: reg.dim(),
            got: u.len(),
        });
    }
    let ring = reg.ring();
    let t = Transvection {
        u: u.iter().map(|&x| x % ring.modulus()).collect(),
        c: c % ring.modulus(),
    };
    Ok(SymplecticMap::new_unchecked(reg.clone(), t.matrix(ring)))
}

/// The ordered product `t_1 * t_2 * ... * t_L`.
pub fn recompose(list: &[Transvection], reg: &Register) -> SymplecticMap {
    let ring = reg.ring();
    let mut m = ModMatrix::identity(ring, reg.dim());
    for t in list.iter().rev() {
        t.apply_left(ring, &mut m);
    }
    SymplecticMap::new_unchecked(reg.clone(), m)
}

/// Transvections over `Z_{p^k}` whose ordered product is `s` reduced modulo the factor.
///
/// Works qudit by qudit, clearing the image of `X_q` with at most two transvections and
/// that of `Z_q` with at most two more, so the list has length at most `4N`.
pub fn decompose_transvections(
    s: &SymplecticMap,
    factor: PrimePower,
) -> Result<Vec<Transvection>, SymplecticError> {
    let d = s.register().modulus();
    if !d.is_multiple_of(factor.value()) {
        return Err(SymplecticError::ShapeMismatch(format!(
            "{factor} does not divide {d}"
        )));
    }
    let ring = factor.ring();
    let mut w = s.matrix().reduce_to(factor);
    let n_q = s.register().n_qudits();
    let dim = 2 * n_q;
    let mut applied: Vec<Transvection> = Vec::new();
    let unit = |x: u64| factor.is_unit(x);
    let mut push = |t: Transvection, w: &mut ModMatrix| {
        if !t.c.is_multiple_of(ring.modulus()) && t.u.iter().any(|&x| x != 0) {
            t.apply_left(&ring, w);
            applied.push(t);
        }
    };

    for q in 0..n_q {
        let (xq, zq) = (2 * q, 2 * q + 1);
        // image of X_q -> e_{X_q}
        let x = w.column(xq);
        if !is_basis(&x, xq) {
            if !unit(x[zq]) {
                if unit(x[xq]) {
                    let c = ring.mul(ring.sub(1, x[zq]), ring.inverse(x[xq])?);
                    push(
                        Transvection {
                            u: basis(dim, zq),
                            c,
                        },
                        &mut w,
                    );
                } else {
                    let pos = (2 * (q + 1)..dim)
                        .find(|&i| unit(x[i]))
                        .ok_or(SymplecticError::NotSymplectic)?;
                    let mut u = basis(dim, zq);
                    // pair the unit entry with its conjugate coordinate
                    u[pos ^ 1] = 1;
                    push(Transvection { u, c: 1 }, &mut w);
                }
            }
            let x = w.column(xq);
            let target = basis(dim, xq);
            let pairing = omega_raw(&ring, &x, &target);
            let c = ring
                .inverse(pairing)
                .map_err(|_| SymplecticError::NotSymplectic)?;
            let u: Vec<u64> = target
                .iter()
                .zip(&x)
                .map(|(&t, &v)| ring.sub(t, v))
                .collect();
            push(Transvection { u, c }, &mut w);
        }
        // image of Z_q -> e_{Z_q}, keeping e_{X_q} fixed
        let y = w.column(zq);
        if y[zq] != 1 {
            return Err(SymplecticError::NotSymplectic);
        }
        if !is_basis(&y, zq) {
            if y[xq] != 1 {
                push(
                    Transvection {
                        u: basis(dim, xq),
                        c: ring.sub(y[xq], 1),
                    },
                    &mut w,
                );
            }
            let y = w.column(zq);
            let target = basis(dim, zq);
            let u: Vec<u64> = y
                .iter()
                .zip(&target)
                .map(|(&v, &t)| ring.sub(v, t))
                .collect();
            push(Transvection { u, c: 1 }, &mut w);
        }
    }
    if !w.is_identity() {
        return Err(SymplecticError::NotSymplectic);
    }
    // applied: T_m ... T_1 S = I, so S = T_1^{-1} ... T_m^{-1}
    Ok(applied.iter().map(|t| t.inverse(&ring)).collect())
}

/// Transvections over `Z_d` whose ordered product is `s`: each factor's list lifted by CRT.
pub fn decompose_transvections_lifted(
    s: &SymplecticMap,
) -> Result<Vec<Transvection>, SymplecticError> {
    let ring = s.register().ring().clone();
    if ring.is_local() {
        return decompose_transvections(s, ring.factors()[0]);
    }
    let mut out = Vec::new();
    for &f in ring.factors() {
        for t in decompose_transvections(s, f)? {
            out.push(Transvection {
                u: t.u.iter().map(|&x| ring.lift_from_factor(f, x)).collect(),
                c: ring.lift_from_factor(f, t.c),
            });
        }
    }
    Ok(out)
}

fn basis(n: usize, i: usize) -> Vec<u64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

fn is_basis(v: &[u64], i: usize) -> bool {
    v.iter().enumerate().all(|(j, &x)| x == u64::from(i == j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_symplectic;
    use rand::SeedableRng;

    #[test]
    fn transvection_examples() {
        let ring = RingSpec::new(5).unwrap();
        let reg = Register::qudits(&ring, 1);
        assert!(transvection(&[1, 0], 0, &reg).unwrap().is_identity());
        let phase = transvection(&[0, 1], 1, &reg).unwrap();
        assert_eq!(
            phase.matrix(),
            &ModMatrix::from_rows(&ring, &[vec![1, 0], vec![1, 1]])
        );
        let x = transvection(&[1, 0], 1, &reg).unwrap();
        assert_eq!(
            x.matrix(),
            &ModMatrix::from_rows(&ring, &[vec![1, -1], vec![0, 1]])
        );
        let reg2 = Register::qudits(&ring, 2);
        let u = [1, 2, 3, 4];
        let a = transvection(&u, 2, &reg2).unwrap();
        let b = transvection(&u, 4, &reg2).unwrap();
        assert_eq!(a.after(&b).unwrap(), transvection(&u, 6, &reg2).unwrap());
    }

    #[test]
    fn identity_decomposes_to_nothing() {
        let ring = RingSpec::new(9).unwrap();
        let reg = Register::qudits(&ring, 3);
        let s = SymplecticMap::identity(&reg);
        assert!(decompose_transvections(&s, ring.factors()[0])
            .unwrap()
            .is_empty());
    }

    #[test]
    fn phase_gate_over_three() {
        let ring = RingSpec::new(3).unwrap();
        let reg = Register::qudits(&ring, 1);
        let m = ModMatrix::from_rows(&ring, &[vec![1, 0], vec![1, 1]]);
        let s = SymplecticMap::new(reg.clone(), m).unwrap();
        let list = decompose_transvections(&s, ring.factors()[0]).unwrap();
        assert_eq!(recompose(&list, &reg), s);
    }

    #[test]
    fn random_recomposition() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for d in [2u64, 3, 4, 8, 9, 6, 12] {
            let ring = RingSpec::new(d).unwrap();
            for n in 1..=4 {
                let reg = Register::qudits(&ring, n);
                for _ in 0..20 {
                    let s = random_symplectic(&mut rng, &reg, 12);
                    let list = decompose_transvections_lifted(&s).unwrap();
                    assert!(list.len() <= 4 * n * ring.factors().len());
                    assert_eq!(recompose(&list, &reg), s);
                }
            }
        }
    }
}
