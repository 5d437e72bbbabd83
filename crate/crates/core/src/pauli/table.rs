use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{pauli_inverse, pauli_mul, pauli_pow, PauliError, PauliOp, PhaseSpec};
use crate::modring::ModMatrix;
use crate::symplectic::{Register, SymplecticMap};

/// Images of the generators `X_1, Z_1, ..., X_n, Z_n` under a conjugation `P -> U^dag P U`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateTable {
    ps: PhaseSpec,
    images: Vec<PauliOp>,
}

impl GateTable {
    /// A table with the given images, checked to be a group automorphism.
    pub fn new(d: u64, images: Vec<PauliOp>) -> Result<Self, PauliError> {
        let t = Self::unchecked(d, images)?;
        t.check_automorphism()?;
        Ok(t)
    }

    fn unchecked(d: u64, images: Vec<PauliOp>) -> Result<Self, PauliError> {
        let ps = PhaseSpec::new(d);
        if !images.len().is_multiple_of(2) {
            return Err(PauliError::BadTable("odd number of images".into()));
        }
        let n = images.len() / 2;
        for img in &images {
            if img.vec.len() != 2 * n {
                return Err(PauliError::RegisterMismatch {
                    left: n,
                    right: img.n(),
                });
            }
            if img.phase >= ps.m() || img.vec.iter().any(|&x| x >= d) {
                return Err(PauliError::BadTable("unreduced entry".into()));
            }
        }
        Ok(GateTable { ps, images })
    }

    pub fn identity(d: u64, n: usize) -> Self {
        GateTable {
            ps: PhaseSpec::new(d),
            images: (0..2 * n).map(|i| PauliOp::generator(n, i)).collect(),
        }
    }

    pub fn phase_spec(&self) -> &PhaseSpec {
        &self.ps
    }

    pub fn d(&self) -> u64 {
        self.ps.d()
    }

    pub fn n(&self) -> usize {
        self.images.len() / 2
    }

    pub fn images(&self) -> &[PauliOp] {
        &self.images
    }

    pub fn image_x(&self, q: usize) -> &PauliOp {
        &self.images[2 * q]
    }

    pub fn image_z(&self, q: usize) -> &PauliOp {
        &self.images[2 * q + 1]
    }

    /// Symplectic and order conditions. For even `d` the image `xi_m^t X^a Z^b`
    /// of a generator has order `d` exactly when `t + a.b` is even.
    pub fn check_automorphism(&self) -> Result<(), PauliError> {
        kappa_of(self)?;
        if self.d().is_multiple_of(2) {
            for (i, img) in self.images.iter().enumerate() {
                let ab: u64 = img.vec.chunks_exact(2).map(|c| c[0] * c[1]).sum();
                if !(img.phase + ab).is_multiple_of(2) {
                    let label = generator_label(i);
                    return Err(PauliError::NotAutomorphism(format!(
                        "image of {label} does not have order {}",
                        self.d()
                    )));
                }
            }
        }
        Ok(())
    }

    /// `g(p)`: images multiplied in normal order, exponent by exponent.
    pub fn apply(&self, p: &PauliOp) -> Result<PauliOp, PauliError> {
        if p.n() != self.n() {
            return Err(PauliError::RegisterMismatch {
                left: self.n(),
                right: p.n(),
            });
        }
        let ps = &self.ps;
        let mut acc = PauliOp::identity(self.n()).with_phase(p.phase % ps.m());
        for (i, &e) in p.vec.iter().enumerate() {
            if e % ps.d() != 0 {
                acc = pauli_mul(ps, &acc, &pauli_pow(ps, &self.images[i], e % ps.d()))?;
            }
        }
        Ok(acc)
    }

    /// `self` after `first`: `P -> self(first(P))`.
    pub fn after(&self, first: &GateTable) -> Result<GateTable, PauliError> {
        if self.n() != first.n() || self.d() != first.d() {
            return Err(PauliError::RegisterMismatch {
                left: self.n(),
                right: first.n(),
            });
        }
        let images = first
            .images
            .iter()
            .map(|img| self.apply(img))
            .collect::<Result<_, _>>()?;
        Ok(GateTable {
            ps: self.ps,
            images,
        })
    }

    /// Conjugation by the Pauli operator `u`.
    pub fn pauli_conjugation(d: u64, u: &PauliOp) -> Self {
        let ps = PhaseSpec::new(d);
        let n = u.n();
        let uinv = pauli_inverse(&ps, u);
        let images = (0..2 * n)
            .map(|i| {
                let left = pauli_mul(&ps, &uinv, &PauliOp::generator(n, i)).expect("same register");
                pauli_mul(&ps, &left, u).expect("same register")
            })
            .collect();
        GateTable { ps, images }
    }

    /// For a table acting by phases only, the Pauli operator whose conjugation it is.
    ///
    /// With `g(X_q) = xi^mu X_q` and `g(Z_q) = xi^nu Z_q`, the operator is `X_q^nu Z_q^{-mu}`.
    pub fn kernel_layer(&self) -> Result<PauliOp, PauliError> {
        let ps = &self.ps;
        let n = self.n();
        let unit = ps.m() / ps.d();
        let mut vec = vec![0u64; 2 * n];
        for q in 0..n {
            let (gx, gz) = (self.image_x(q), self.image_z(q));
            if gx.vec != PauliOp::x(n, q).vec || gz.vec != PauliOp::z(n, q).vec {
                return Err(PauliError::NotInKernel);
            }
            if gx.phase % unit != 0 || gz.phase % unit != 0 {
                return Err(PauliError::NotAutomorphism(
                    "phase is not a power of xi".into(),
                ));
            }
            let (mu, nu) = (gx.phase / unit, gz.phase / unit);
            vec[2 * q] = nu % ps.d();
            vec[2 * q + 1] = (ps.d() - mu % ps.d()) % ps.d();
        }
        let u = PauliOp { phase: 0, vec };
        if GateTable::pauli_conjugation(ps.d(), &u) != *self {
            return Err(PauliError::NotInKernel);
        }
        Ok(u)
    }
}

fn generator_label(i: usize) -> String {
    format!(
        "{}{}",
        if i.is_multiple_of(2) { 'X' } else { 'Z' },
        i / 2 + 1
    )
}

fn parse_label(s: &str, n: usize) -> Option<usize> {
    let (kind, rest) = s.split_at(1);
    let q: usize = rest.parse().ok()?;
    if q == 0 || q > n {
        return None;
    }
    match kind {
        "X" => Some(2 * (q - 1)),
        "Z" => Some(2 * (q - 1) + 1),
        _ => None,
    }
}

/// The symplectic matrix whose columns are the vectors of the images of `X_i`, `Z_i`.
pub fn kappa_of(g: &GateTable) -> Result<SymplecticMap, PauliError> {
    let ring = g.ps.ring();
    let n = g.n();
    let mut m = ModMatrix::zeros(&ring, 2 * n, 2 * n);
    for (j, img) in g.images.iter().enumerate() {
        for (i, &x) in img.vec.iter().enumerate() {
            m.set(i, j, x);
        }
    }
    SymplecticMap::new(Register::qudits(&ring, n), m).map_err(|_| PauliError::NotSymplectic)
}

#[derive(Serialize, Deserialize)]
struct GateTableJson {
    d: u64,
    n: usize,
    images: BTreeMap<String, PauliOp>,
}

impl Serialize for GateTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GateTableJson {
            d: self.d(),
            n: self.n(),
            images: self
                .images
                .iter()
                .enumerate()
                .map(|(i, p)| (generator_label(i), p.clone()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GateTable {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = GateTableJson::deserialize(de)?;
        if raw.d < 2 {
            return Err(D::Error::custom("d must be at least 2"));
        }
        let mut images: Vec<Option<PauliOp>> = vec![None; 2 * raw.n];
        for (label, op) in raw.images {
            let i = parse_label(&label, raw.n)
                .ok_or_else(|| D::Error::custom(format!("unknown generator {label:?}")))?;
            images[i] = Some(op);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, o)| {
                o.ok_or_else(|| {
                    D::Error::custom(format!("missing image of {}", generator_label(i)))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        GateTable::unchecked(raw.d, images).map_err(D::Error::custom)
    }
}

/// A single Clifford gate on an `n`-qudit register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuditGate {
    /// `X -> Z`, `Z -> X^{-1}`.
    H(usize),
    /// `X -> XZ^p` (times `xi_{2d}^p` for even `d`), `Z -> Z`.
    P(usize, u64),
    /// `X_a -> X_a Z_b^c`, `X_b -> X_b Z_a^c`.
    CZ(usize, usize, u64),
    /// Qudit `q` moves to `target[q]`.
    Perm(Vec<usize>),
    /// Conjugation by a Pauli operator.
    Pauli(PauliOp),
}

impl QuditGate {
    pub fn table(&self, d: u64, n: usize) -> GateTable {
        let ps = PhaseSpec::new(d);
        let mut t = GateTable::identity(d, n);
        match *self {
            QuditGate::H(q) => {
                t.images[2 * q] = PauliOp::z(n, q);
                let mut xinv = PauliOp::identity(n);
                xinv.vec[2 * q] = d - 1;
                t.images[2 * q + 1] = xinv;
            }
            QuditGate::P(q, p) => {
                let p = p % d;
                let mut img = PauliOp::x(n, q);
                img.vec[2 * q + 1] = p;
                if d.is_multiple_of(2) {
                    img.phase = p;
                }
                t.images[2 * q] = img;
            }
            QuditGate::CZ(a, b, c) => {
                let c = c % d;
                t.images[2 * a].vec[2 * b + 1] = (t.images[2 * a].vec[2 * b + 1] + c) % d;
                t.images[2 * b].vec[2 * a + 1] = (t.images[2 * b].vec[2 * a + 1] + c) % d;
            }
            QuditGate::Perm(ref target) => {
                for (q, &tq) in target.iter().enumerate() {
                    t.images[2 * q] = PauliOp::x(n, tq);
                    t.images[2 * q + 1] = PauliOp::z(n, tq);
                }
            }
            QuditGate::Pauli(ref u) => {
                return GateTable::pauli_conjugation(d, &u.clone().reduced(&ps))
            }
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modring::RingSpec;

    #[test]
    fn kappa_examples() {
        let d = 5;
        let ring = RingSpec::new(d).unwrap();
        // phases only
        let u = PauliOp {
            phase: 0,
            vec: vec![2, 3, 1, 4],
        };
        let g = GateTable::pauli_conjugation(d, &u);
        assert!(kappa_of(&g).unwrap().is_identity());

        let cz = QuditGate::CZ(0, 1, 1).table(d, 2);
        let expected = ModMatrix::from_rows(
            &ring,
            &[
                vec![1, 0, 0, 0],
                vec![0, 1, 1, 0],
                vec![0, 0, 1, 0],
                vec![1, 0, 0, 1],
            ],
        );
        assert_eq!(kappa_of(&cz).unwrap().matrix(), &expected);

        let h = QuditGate::H(0).table(d, 1);
        let expected = ModMatrix::from_rows(&ring, &[vec![0, -1], vec![1, 0]]);
        assert_eq!(kappa_of(&h).unwrap().matrix(), &expected);
    }

    #[test]
    fn kappa_is_a_homomorphism() {
        for d in [2u64, 3, 4, 6] {
            let n = 3;
            let gates = [
                QuditGate::H(0),
                QuditGate::P(1, 1),
                QuditGate::CZ(0, 2, d - 1),
                QuditGate::Perm(vec![2, 0, 1]),
                QuditGate::H(2),
                QuditGate::P(0, 3),
            ];
            for w in gates.windows(2) {
                let (g, h) = (w[0].table(d, n), w[1].table(d, n));
                let gh = g.after(&h).unwrap();
                assert!(gh.check_automorphism().is_ok());
                let prod = kappa_of(&g).unwrap().after(&kappa_of(&h).unwrap()).unwrap();
                assert_eq!(kappa_of(&gh).unwrap(), prod);
            }
        }
    }

    #[test]
    fn kernel_layer_recovers_phases() {
        for d in [2u64, 3, 4, 5] {
            let ps = PhaseSpec::new(d);
            let unit = ps.m() / d;
            let mut images: Vec<PauliOp> = (0..4).map(|i| PauliOp::generator(2, i)).collect();
            images[0].phase = unit;
            images[3].phase = (d - 1) * unit;
            let g = GateTable::new(d, images).unwrap();
            let u = g.kernel_layer().unwrap();
            assert_eq!(GateTable::pauli_conjugation(d, &u), g);
        }
        let not_kernel = QuditGate::H(0).table(3, 1);
        assert_eq!(not_kernel.kernel_layer(), Err(PauliError::NotInKernel));
    }

    #[test]
    fn order_condition_for_even_d() {
        // X -> XZ without the xi_4 phase squares to a nontrivial scalar over d = 2
        let bad = vec![
            PauliOp {
                phase: 0,
                vec: vec![1, 1],
            },
            PauliOp::z(1, 0),
        ];
        assert!(matches!(
            GateTable::new(2, bad),
            Err(PauliError::NotAutomorphism(_))
        ));
        let good = vec![
            PauliOp {
                phase: 1,
                vec: vec![1, 1],
            },
            PauliOp::z(1, 0),
        ];
        assert!(GateTable::new(2, good).is_ok());
        let not_symplectic = vec![PauliOp::x(1, 0), PauliOp::x(1, 0)];
        assert_eq!(
            GateTable::new(3, not_symplectic),
            Err(PauliError::NotSymplectic)
        );
    }

    #[test]
    fn json_roundtrip() {
        let t = QuditGate::CZ(0, 1, 2).table(3, 2);
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.contains("\"X1\""));
        let back: GateTable = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }
}
