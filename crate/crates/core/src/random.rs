//! Seeded generators for random test instances.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::modring::{ModMatrix, RingSpec};
use crate::qca::{CliffordQCA, Gate, GateScript, Site, Space, Topology};
use crate::symplectic::{rowops, Register, SymplecticMap, XZBlocks};

pub use rand::SeedableRng;

/// Deterministic generator used throughout the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Product of `gates` random H, phase and CZ gates on arbitrary qudits.
pub fn random_symplectic(rng: &mut impl Rng, reg: &Register, gates: usize) -> SymplecticMap {
    let ring = reg.ring();
    let n = reg.n_qudits();
    let d = ring.modulus();
    let mut m = ModMatrix::identity(ring, reg.dim());
    if n == 0 {
        return SymplecticMap::identity(reg);
    }
    for _ in 0..gates {
        let q = rng.gen_range(0..n);
        match rng.gen_range(0..3) {
            0 => rowops::hadamard(&mut m, q),
            1 => rowops::phase(&mut m, q, rng.gen_range(1..d.max(2))),
            _ if n > 1 => {
                let mut q2 = rng.gen_range(0..n - 1);
                if q2 >= q {
                    q2 += 1;
                }
                rowops::cz(&mut m, q, q2, rng.gen_range(1..d.max(2)));
            }
            _ => rowops::hadamard(&mut m, q),
        }
    }
    SymplecticMap::new(reg.clone(), m).expect("gate products are symplectic")
}

/// Uniform random matrix.
pub fn random_matrix(rng: &mut impl Rng, ring: &RingSpec, rows: usize, cols: usize) -> ModMatrix {
    let d = ring.modulus();
    let entries = (0..rows * cols).map(|_| rng.gen_range(0..d)).collect();
    ModMatrix::from_entries(ring, rows, cols, entries).expect("reduced entries")
}

/// Random invertible matrix, by rejection.
pub fn random_invertible(rng: &mut impl Rng, ring: &RingSpec, n: usize) -> ModMatrix {
    loop {
        let m = random_matrix(rng, ring, n, n);
        if m.is_invertible() {
            return m;
        }
    }
}

/// Random symmetric matrix.
pub fn random_symmetric(rng: &mut impl Rng, ring: &RingSpec, n: usize) -> ModMatrix {
    let d = ring.modulus();
    let mut m = ModMatrix::zeros(ring, n, n);
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(0..d);
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    m
}

/// Alternating layers of one-qudit gates (H or phase) and nearest-neighbour CZ gates on a
/// line or ring numbered `0..n`; the result has `cz_layers` CZ layers, so radius at most
/// `cz_layers`. Cells must carry one qudit each.
pub fn random_local_script(
    rng: &mut impl Rng,
    space: &Space,
    d: u64,
    cz_layers: usize,
) -> GateScript {
    let n = space.len();
    let wraps = space.topology() == Topology::Ring && n > 2 && n.is_multiple_of(2);
    let cell = |i: usize| space.cells()[i % n].clone();
    let mut layers = Vec::new();
    for l in 0..=cz_layers {
        let single: Vec<Gate> = (0..n)
            .filter_map(|i| match rng.gen_range(0..3) {
                0 => Some(Gate::h(cell(i), 0)),
                1 => Some(Gate::p(cell(i), 0, rng.gen_range(1..d.max(2)) as i64)),
                _ => None,
            })
            .collect();
        layers.push(single);
        if l == cz_layers || n < 2 {
            continue;
        }
        let offset = rng.gen_range(0..2);
        let last = if wraps { n } else { n - 1 };
        let mut pairs = Vec::new();
        for i in (offset..last).step_by(2) {
            if rng.gen_bool(0.7) {
                let c = rng.gen_range(1..d.max(2)) as i64;
                pairs.push(Gate::cz(
                    Site::new(cell(i), 0),
                    Site::new(cell(i + 1), 0),
                    c,
                ));
            }
        }
        layers.push(pairs);
    }
    GateScript { d: Some(d), layers }
}

/// Separated QCA `[[A, 0], [0, A^{-T}]]` with `A = I + E`, `E` supported on disjoint
/// neighbouring qudit pairs, so that both `A` and `A^{-1} = I - E` have radius at most 1.
pub fn random_separated(rng: &mut impl Rng, space: &Space, reg: &Register) -> CliffordQCA {
    let ring = reg.ring();
    let n = reg.n_qudits();
    let d = ring.modulus();
    let mut e = ModMatrix::zeros(ring, n, n);
    let offset = rng.gen_range(0..2);
    let mut i = offset;
    while i + 1 < n {
        if rng.gen_bool(0.7) {
            let v = rng.gen_range(0..d);
            if rng.gen_bool(0.5) {
                e.set(i, i + 1, v);
            } else {
                e.set(i + 1, i, v);
            }
        }
        i += 2;
    }
    let eye = ModMatrix::identity(ring, n);
    let a = &eye + &e;
    let a_inv_t = (&eye - &e).transpose();
    let blocks = XZBlocks {
        a,
        b: ModMatrix::zeros(ring, n, n),
        c: ModMatrix::zeros(ring, n, n),
        d: a_inv_t,
    };
    let map = SymplecticMap::new(reg.clone(), blocks.to_site_major()).expect("separated blocks");
    CliffordQCA::tight(space.clone(), map).expect("register on space")
}
