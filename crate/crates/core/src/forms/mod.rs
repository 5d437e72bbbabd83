//! ε-symmetric and ε-quadratic forms over `Z_d`, Lagrangians and formations.

mod formation;
mod lagrangian;

pub use formation::{
    elementary_criterion, find_common_complement, trivial_formation_iso, Budget, Formation,
};
pub use lagrangian::{are_complementary, is_lagrangian, lagrangian_to_hyperbolic, Lagrangian};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modring::{ModMatrix, RingError, RingSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("no splitting of the Lagrangian inclusion exists")]
    NoSplitting,
    #[error("isotropic correction of the splitting is obstructed")]
    ObstructedCorrection,
    #[error("Lagrangians are not complementary")]
    NotComplementary,
    #[error("the proposed complement is not complementary to F")]
    NotAComplement,
    #[error("exhaustive search over {searched} candidates found no common complement")]
    NotFound { searched: u64 },
    #[error("search budget of {searched} candidates exhausted")]
    BudgetExceeded { searched: u64 },
    #[error("not a Lagrangian: {0}")]
    NotLagrangian(String),
    #[error("invalid form: {0}")]
    BadForm(String),
    #[error("internal invariant violated: {0}")]
    InvariantViolated(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Symmetric,
    Quadratic,
}

/// A form on `Z_d^m`. For the quadratic kind `psi` is one representative of its class
/// in `coker(1 - T_eps)`, with `T_eps(psi) = eps psi^T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsForm {
    epsilon: i64,
    kind: Kind,
    psi: ModMatrix,
}

impl EpsForm {
    pub fn new(epsilon: i64, kind: Kind, psi: ModMatrix) -> Result<Self, FormError> {
        if epsilon != 1 && epsilon != -1 {
            return Err(FormError::BadForm(format!(
                "epsilon must be 1 or -1, got {epsilon}"
            )));
        }
        if !psi.is_square() {
            return Err(FormError::BadForm(format!(
                "{}x{} matrix",
                psi.rows(),
                psi.cols()
            )));
        }
        if kind == Kind::Symmetric && psi != eps_transpose(&psi, epsilon) {
            return Err(FormError::BadForm("psi != eps psi^T".into()));
        }
        Ok(EpsForm { epsilon, kind, psi })
    }

    pub fn epsilon(&self) -> i64 {
        self.epsilon
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn psi(&self) -> &ModMatrix {
        &self.psi
    }

    pub fn ring(&self) -> &RingSpec {
        self.psi.ring()
    }

    /// Rank `m` of the underlying free module.
    pub fn rank(&self) -> usize {
        self.psi.rows()
    }

    /// `psi + eps psi^T` for the quadratic kind, `psi` itself for the symmetric kind.
    pub fn bilinear(&self) -> ModMatrix {
        match self.kind {
            Kind::Symmetric => self.psi.clone(),
            Kind::Quadratic => &self.psi + &eps_transpose(&self.psi, self.epsilon),
        }
    }

    /// `phi^T psi phi`, as a form of the same kind on the source of `phi`.
    pub fn pullback(&self, phi: &ModMatrix) -> EpsForm {
        EpsForm {
            epsilon: self.epsilon,
            kind: self.kind,
            psi: &(&phi.transpose() * &self.psi) * phi,
        }
    }

    /// Canonical representative: the matrix itself for symmetric forms; for quadratic
    /// forms entries above the diagonal are folded down with factor `eps`, and for
    /// `eps = -1` the diagonal is reduced modulo `gcd(2, d)`.
    pub fn normalized(&self) -> ModMatrix {
        match self.kind {
            Kind::Symmetric => self.psi.clone(),
            Kind::Quadratic => normalize_quadratic(&self.psi, self.epsilon),
        }
    }

    /// Equality of forms (of quadratic classes, for the quadratic kind).
    pub fn same_class(&self, other: &EpsForm) -> bool {
        self.epsilon == other.epsilon
            && self.kind == other.kind
            && self.psi.rows() == other.psi.rows()
            && self.normalized() == other.normalized()
    }

    /// Whether the form vanishes identically (in `Q_eps` for the quadratic kind).
    pub fn is_zero(&self) -> bool {
        self.normalized().is_zero()
    }
}

pub(crate) fn eps_transpose(m: &ModMatrix, eps: i64) -> ModMatrix {
    if eps == 1 {
        m.transpose()
    } else {
        -&m.transpose()
    }
}

fn normalize_quadratic(psi: &ModMatrix, eps: i64) -> ModMatrix {
    let ring = psi.ring();
    let n = psi.rows();
    let mut out = psi.clone();
    for i in 0..n {
        for j in i + 1..n {
            let up = out.get(i, j);
            let moved = if eps == 1 { up } else { ring.neg(up) };
            out.set(j, i, ring.add(out.get(j, i), moved));
            out.set(i, j, 0);
        }
        if eps == -1 {
            let g = crate::modring::gcd(2, ring.modulus());
            out.set(i, i, out.get(i, i) % g);
        }
    }
    out
}

/// Whether `psi + eps psi^T` (quadratic) or `psi` (symmetric) is invertible.
pub fn is_nonsingular(f: &EpsForm) -> bool {
    f.bilinear().is_invertible()
}

/// `H_eps(Z_d^r)` on `L + L*` and its Lagrangian `L`.
///
/// Quadratic representative `[[0, I], [0, 0]]`; symmetric form `[[0, I], [eps I, 0]]`.
pub fn hyperbolic(ring: &RingSpec, r: usize, epsilon: i64, kind: Kind) -> (EpsForm, Lagrangian) {
    let mut psi = ModMatrix::zeros(ring, 2 * r, 2 * r);
    for i in 0..r {
        psi.set(i, r + i, 1);
        if kind == Kind::Symmetric {
            psi.set_signed(r + i, i, epsilon);
        }
    }
    let form = EpsForm::new(epsilon, kind, psi).expect("hyperbolic forms are valid");
    (form, Lagrangian::standard(ring, r))
}

#[derive(Serialize, Deserialize)]
struct EpsFormJson {
    epsilon: i64,
    kind: Kind,
    m: usize,
    psi: ModMatrix,
}

impl Serialize for EpsForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        EpsFormJson {
            epsilon: self.epsilon,
            kind: self.kind,
            m: self.rank(),
            psi: self.psi.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for EpsForm {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = EpsFormJson::deserialize(de)?;
        if raw.m != raw.psi.rows() {
            return Err(serde::de::Error::custom("m does not match psi"));
        }
        EpsForm::new(raw.epsilon, raw.kind, raw.psi).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonsingular_examples() {
        let r6 = RingSpec::new(6).unwrap();
        let (h, _) = hyperbolic(&r6, 1, -1, Kind::Quadratic);
        assert!(is_nonsingular(&h));
        let zero = EpsForm::new(-1, Kind::Symmetric, ModMatrix::zeros(&r6, 2, 2)).unwrap();
        assert!(!is_nonsingular(&zero));
        let j = ModMatrix::from_rows(&r6, &[vec![0, 1], vec![-1, 0]]);
        assert!(is_nonsingular(
            &EpsForm::new(-1, Kind::Symmetric, j).unwrap()
        ));
    }

    #[test]
    fn hyperbolic_examples() {
        let r5 = RingSpec::new(5).unwrap();
        let (h0, l0) = hyperbolic(&r5, 0, -1, Kind::Symmetric);
        assert_eq!(h0.rank(), 0);
        assert_eq!(l0.rank(), 0);
        let (h1, l1) = hyperbolic(&r5, 1, -1, Kind::Symmetric);
        assert_eq!(
            h1.psi(),
            &ModMatrix::from_rows(&r5, &[vec![0, 1], vec![-1, 0]])
        );
        assert_eq!(l1.basis(), &ModMatrix::from_rows(&r5, &[vec![1], vec![0]]));
        let (h2, _) = hyperbolic(&r5, 2, 1, Kind::Quadratic);
        let expected = ModMatrix::from_rows(
            &r5,
            &[
                vec![0, 0, 1, 0],
                vec![0, 0, 0, 1],
                vec![0, 0, 0, 0],
                vec![0, 0, 0, 0],
            ],
        );
        assert_eq!(h2.psi(), &expected);
    }

    #[test]
    fn quadratic_classes() {
        let r4 = RingSpec::new(4).unwrap();
        let a = ModMatrix::from_rows(&r4, &[vec![1, 3], vec![0, 2]]);
        let chi = ModMatrix::from_rows(&r4, &[vec![3, 1], vec![2, 0]]);
        // a + (chi - eps chi^T) with eps = -1
        let b = &a + &(&chi + &chi.transpose());
        let fa = EpsForm::new(-1, Kind::Quadratic, a).unwrap();
        let fb = EpsForm::new(-1, Kind::Quadratic, b).unwrap();
        assert!(fa.same_class(&fb));
        assert_eq!(fa.bilinear(), fb.bilinear());
        let other = EpsForm::new(-1, Kind::Quadratic, ModMatrix::identity(&r4, 2)).unwrap();
        assert!(!fa.same_class(&other));
    }

    #[test]
    fn json_roundtrip() {
        let r3 = RingSpec::new(3).unwrap();
        let (h, _) = hyperbolic(&r3, 2, -1, Kind::Symmetric);
        let s = serde_json::to_string(&h).unwrap();
        assert!(s.contains("\"kind\":\"symmetric\""));
        let back: EpsForm = serde_json::from_str(&s).unwrap();
        assert_eq!(back, h);
    }
}
