use serde::{Deserialize, Serialize};

use super::{is_nonsingular, EpsForm, FormError, Kind};
use crate::modring::{
    free_summand_basis, howell_basis, kernel, solve_linear, ModMatrix, RingError, RingSpec,
};

/// A free direct summand given by a canonical basis (columns).
///
/// Two Lagrangians compare equal exactly when they span the same submodule.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lagrangian {
    basis: ModMatrix,
}

impl Lagrangian {
    /// The span of the columns of `generators`, which must be a free summand.
    pub fn new(generators: &ModMatrix) -> Result<Self, FormError> {
        let basis = free_summand_basis(generators)
            .ok_or_else(|| FormError::NotLagrangian("span is not a free direct summand".into()))?;
        Ok(Lagrangian { basis })
    }

    /// Span of the first `r` basis vectors of `Z_d^{2r}`.
    pub fn standard(ring: &RingSpec, r: usize) -> Self {
        Lagrangian {
            basis: ModMatrix::identity(ring, r).vstack(&ModMatrix::zeros(ring, r, r)),
        }
    }

    /// Span of the last `r` basis vectors of `Z_d^{2r}`.
    pub fn standard_dual(ring: &RingSpec, r: usize) -> Self {
        Lagrangian {
            basis: ModMatrix::zeros(ring, r, r).vstack(&ModMatrix::identity(ring, r)),
        }
    }

    pub fn basis(&self) -> &ModMatrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn ambient(&self) -> usize {
        self.basis.rows()
    }

    /// Image under a linear map.
    pub fn image(&self, phi: &ModMatrix) -> Result<Self, FormError> {
        Self::new(&(phi * &self.basis))
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        solve_linear(&self.basis, v).is_ok()
    }
}

#[derive(Serialize, Deserialize)]
struct LagrangianJson {
    basis: ModMatrix,
}

impl Serialize for Lagrangian {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        LagrangianJson {
            basis: self.basis.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Lagrangian {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = LagrangianJson::deserialize(de)?;
        Lagrangian::new(&raw.basis).map_err(serde::de::Error::custom)
    }
}

fn same_column_span(a: &ModMatrix, b: &ModMatrix) -> bool {
    a.rows() == b.rows() && howell_basis(&a.transpose()) == howell_basis(&b.transpose())
}

/// Whether the column span of `basis` is a Lagrangian of `f`: the form vanishes on it,
/// the inclusion splits, and `x -> i^T b x` maps onto `L*` with kernel exactly `L`.
pub fn is_lagrangian_span(basis: &ModMatrix, f: &EpsForm) -> bool {
    if basis.rows() != f.rank() || basis.modulus() != f.ring().modulus() || !is_nonsingular(f) {
        return false;
    }
    let Some(canonical) = free_summand_basis(basis) else {
        return false;
    };
    let r = canonical.cols();
    if !f.pullback(&canonical).is_zero() {
        return false;
    }
    let adjoint = &canonical.transpose() * &f.bilinear();
    for i in 0..r {
        let mut e = vec![0; r];
        e[i] = 1;
        if solve_linear(&adjoint, &e).is_err() {
            return false;
        }
    }
    same_column_span(&kernel(&adjoint), &canonical)
}

pub fn is_lagrangian(l: &Lagrangian, f: &EpsForm) -> bool {
    is_lagrangian_span(&l.basis, f)
}

/// An isomorphism `phi: H_eps(L) -> f` with `phi(standard Lagrangian) = L`.
///
/// Columns are `[i | j']` where `i` is the basis of `L` and `j' = j + i k` corrects a
/// splitting `j` (with `i^T b j = I`) so that the form vanishes on its span.
pub fn lagrangian_to_hyperbolic(f: &EpsForm, l: &Lagrangian) -> Result<ModMatrix, FormError> {
    if !is_lagrangian(l, f) {
        return Err(FormError::NotLagrangian("input fails is_lagrangian".into()));
    }
    let ring = f.ring().clone();
    let i = l.basis();
    let r = i.cols();
    if f.rank() != 2 * r {
        return Err(FormError::NotLagrangian(format!(
            "rank {r} in a form of rank {}",
            f.rank()
        )));
    }
    let b = f.bilinear();
    let adjoint = &i.transpose() * &b;
    let mut j = ModMatrix::zeros(&ring, 2 * r, r);
    for c in 0..r {
        let mut e = vec![0; r];
        e[c] = 1;
        let x = solve_linear(&adjoint, &e).map_err(|err| match err {
            RingError::NoSolution { .. } => FormError::NoSplitting,
            other => FormError::Ring(other),
        })?;
        for (row, &v) in x.iter().enumerate() {
            j.set(row, c, v);
        }
    }
    let s = &(&j.transpose() * f.psi()) * &j;
    let k = correction(&s, f)?;
    let jp = &j + &(i * &k);
    let phi = i.hstack(&jp);

    let (h, _) = super::hyperbolic(&ring, r, f.epsilon(), f.kind());
    if &(&phi.transpose() * &b) * &phi != h.bilinear() || !f.pullback(&phi).same_class(&h) {
        return Err(FormError::InvariantViolated(
            "corrected splitting is not hyperbolic".into(),
        ));
    }
    if !phi.is_invertible() {
        return Err(FormError::InvariantViolated(
            "hyperbolic basis is not invertible".into(),
        ));
    }
    Ok(phi)
}

/// `k` with `j'^T psi j' = 0` (in `Q_eps` for the quadratic kind), given `s = j^T psi j`.
fn correction(s: &ModMatrix, f: &EpsForm) -> Result<ModMatrix, FormError> {
    let ring = s.ring();
    let r = s.rows();
    let eps = f.epsilon();
    match f.kind() {
        // class of j'^T psi j' is that of s + eps k
        Kind::Quadratic => Ok(if eps == 1 { -s } else { s.clone() }),
        // j'^T psi j' = s + eps k + k^T
        Kind::Symmetric => {
            let mut k = ModMatrix::zeros(ring, r, r);
            for a in 0..r {
                for c in 0..a {
                    let v = s.get(a, c);
                    if eps == -1 {
                        k.set(a, c, v);
                    } else {
                        k.set(a, c, ring.neg(v));
                    }
                }
                let diag = s.get(a, a);
                if eps == -1 {
                    if diag != 0 {
                        return Err(FormError::ObstructedCorrection);
                    }
                } else {
                    // 2 x = -s_aa
                    let target = ring.neg(diag);
                    let x = solve_linear(&ModMatrix::diagonal(ring, &[2]), &[target])
                        .map_err(|_| FormError::ObstructedCorrection)?;
                    k.set(a, a, x[0]);
                }
            }
            Ok(k)
        }
    }
}

/// `F + G = M` and `F ∩ G = 0`.
pub fn are_complementary(f_lag: &Lagrangian, g_lag: &Lagrangian, form: &EpsForm) -> bool {
    let m = form.rank();
    if f_lag.ambient() != m || g_lag.ambient() != m {
        return false;
    }
    let stacked = f_lag.basis().hstack(g_lag.basis());
    if stacked.cols() != m {
        // both are summands, so complementary spans need ranks adding to m
        return false;
    }
    let full = howell_basis(&stacked.transpose());
    let identity = howell_basis(&ModMatrix::identity(form.ring(), m));
    full == identity && kernel(&stacked).is_zero()
}
