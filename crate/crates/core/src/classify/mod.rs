//! Invariants and certificates for Clifford QCAs: formations, triviality certificates
//! and the delooping index.

mod certificate;
mod index;

pub use certificate::{
    certify_trivial, prelayer_script, same_formation_equivalence, verify_certificate,
    CertificateReport, Prelayer, TrivialityCertificate,
};
pub use index::{delooping_index, delooping_index_with_band, split_at, DeloopingIndex};

use thiserror::Error;

use crate::forms::{hyperbolic, FormError, Formation, Kind, Lagrangian};
use crate::modring::{ModMatrix, RingError};
use crate::qca::{CliffordQCA, Gate, GateScript, QcaError, Site, Space};
use crate::symplectic::{Register, SymplecticError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("formations differ")]
    FormationsDiffer,
    #[error("no Hadamard pre-layer from strategy {0} makes the A block invertible")]
    ABlockSingular(String),
    #[error("cut {cut} is too close to the boundary: {reason}")]
    CutTooClose { cut: usize, reason: String },
    #[error("support reaches cell {cell} near the end of the line")]
    SupportTouchesBoundary { cell: usize },
    #[error("delooping index needs a line or ring space")]
    NotOneDimensional,
    #[error("certificate check failed: {0}")]
    CheckFailed(String),
    #[error(transparent)]
    Qca(#[from] QcaError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// `(H_{-1}(L), L, alpha L)` with `L` the X summand, in the (all-X | all-Z) layout.
pub fn formation_of(alpha: &CliffordQCA) -> Result<Formation, ClassifyError> {
    let ring = alpha.ring().clone();
    let n = alpha.register().n_qudits();
    let (form, l) = hyperbolic(&ring, n, -1, Kind::Symmetric);
    let b = alpha.blocks();
    let g = Lagrangian::new(&b.a.vstack(&b.c))?;
    Ok(Formation::new(form, l, g)?)
}

fn site_of(space: &Space, reg: &Register, q: usize) -> Site {
    let c = reg.cell_of_qudit(q);
    Site::new(space.cells()[c].clone(), q - reg.cell_qudits(c).start)
}

/// Phase and CZ gates realizing `[[I, 0], [C, I]]` for a symmetric qudit-level `C`.
///
/// Phase gates go in the first layer; each CZ goes in the first layer where both of its
/// qudits are still free.
pub fn symmetric_to_gates(
    c: &ModMatrix,
    space: &Space,
    reg: &Register,
) -> Result<GateScript, ClassifyError> {
    let n = reg.n_qudits();
    if c.rows() != n || c.cols() != n {
        return Err(ClassifyError::Qca(QcaError::SpaceMismatch));
    }
    if !c.is_symmetric() {
        return Err(ClassifyError::NotSymmetric);
    }
    let mut layers: Vec<Vec<Gate>> = Vec::new();
    let mut busy: Vec<Vec<bool>> = Vec::new();
    let mut place = |gate: Gate, qs: &[usize], layers: &mut Vec<Vec<Gate>>| {
        let at = (0..layers.len())
            .find(|&l| qs.iter().all(|&q| !busy[l][q]))
            .unwrap_or_else(|| {
                layers.push(Vec::new());
                busy.push(vec![false; n]);
                layers.len() - 1
            });
        for &q in qs {
            busy[at][q] = true;
        }
        layers[at].push(gate);
    };
    for q in 0..n {
        let p = c.get(q, q);
        if p != 0 {
            let s = site_of(space, reg, q);
            place(Gate::p(s.cell, s.qudit, p as i64), &[q], &mut layers);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let v = c.get(i, j);
            if v != 0 {
                let gate = Gate::cz(site_of(space, reg, i), site_of(space, reg, j), v as i64);
                place(gate, &[i, j], &mut layers);
            }
        }
    }
    Ok(GateScript {
        d: Some(reg.modulus()),
        layers,
    })
}

/// Hadamard on every listed qudit, as one layer.
pub fn hadamard_layer(space: &Space, reg: &Register, qudits: &[usize]) -> GateScript {
    let layer = qudits
        .iter()
        .map(|&q| {
            let s = site_of(space, reg, q);
            Gate::h(s.cell, s.qudit)
        })
        .collect::<Vec<_>>();
    GateScript {
        d: Some(reg.modulus()),
        layers: if layer.is_empty() {
            vec![]
        } else {
            vec![layer]
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::are_complementary;
    use crate::modring::RingSpec;
    use crate::qca::register_on;
    use crate::random::{random_symmetric, rng_from_seed};

    fn line(d: u64, n: usize) -> (Space, Register) {
        let ring = RingSpec::new(d).unwrap();
        let space = Space::line(n);
        let reg = register_on(&space, &ring, vec![1; n]).unwrap();
        (space, reg)
    }

    #[test]
    fn formation_examples() {
        let (space, reg) = line(3, 4);
        let id = CliffordQCA::identity(&space, &reg).unwrap();
        let fm = formation_of(&id).unwrap();
        assert_eq!(fm.f(), fm.g());
        let h = CliffordQCA::from_gates(&hadamard_layer(&space, &reg, &[0, 1, 2, 3]), &space, &reg)
            .unwrap();
        let fm = formation_of(&h).unwrap();
        assert_eq!(fm.g(), &Lagrangian::standard_dual(reg.ring(), 4));
        assert!(are_complementary(fm.f(), fm.g(), fm.form()));
        let phases = GateScript::new(vec![vec![Gate::p("0", 0, 1), Gate::p("2", 0, 2)]]);
        let p = CliffordQCA::from_gates(&phases, &space, &reg).unwrap();
        let graph = ModMatrix::identity(reg.ring(), 4)
            .vstack(&ModMatrix::diagonal(reg.ring(), &[1, 0, 2, 0]));
        assert_eq!(
            formation_of(&p).unwrap().g(),
            &Lagrangian::new(&graph).unwrap()
        );
    }

    #[test]
    fn symmetric_to_gates_examples() {
        let (space, reg) = line(3, 2);
        let zero = ModMatrix::zeros(reg.ring(), 2, 2);
        assert!(symmetric_to_gates(&zero, &space, &reg).unwrap().is_empty());
        let swap = ModMatrix::from_rows(reg.ring(), &[vec![0, 1], vec![1, 0]]);
        let s = symmetric_to_gates(&swap, &space, &reg).unwrap();
        assert_eq!(
            s.layers,
            vec![vec![Gate::cz(Site::new("0", 0), Site::new("1", 0), 1)]]
        );
        let (space1, reg1) = line(3, 1);
        let two = ModMatrix::diagonal(reg1.ring(), &[2]);
        let s = symmetric_to_gates(&two, &space1, &reg1).unwrap();
        assert_eq!(s.layers, vec![vec![Gate::p("0", 0, 2)]]);
        let bad = ModMatrix::from_rows(reg.ring(), &[vec![0, 1], vec![2, 0]]);
        assert_eq!(
            symmetric_to_gates(&bad, &space, &reg),
            Err(ClassifyError::NotSymmetric)
        );
    }

    #[test]
    fn symmetric_to_gates_roundtrip() {
        let mut rng = rng_from_seed(3);
        for d in [2u64, 4, 6, 9] {
            let ring = RingSpec::new(d).unwrap();
            let space = Space::line(3);
            let reg = register_on(&space, &ring, vec![2, 1, 2]).unwrap();
            for _ in 0..10 {
                let c = random_symmetric(&mut rng, &ring, 5);
                let s = symmetric_to_gates(&c, &space, &reg).unwrap();
                let q = CliffordQCA::from_gates(&s, &space, &reg).unwrap();
                let b = q.blocks();
                assert!(b.a.is_identity() && b.b.is_zero() && b.d.is_identity());
                assert_eq!(b.c, c);
            }
        }
    }
}
