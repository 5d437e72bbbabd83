//! Exact dense-matrix oracle over the cyclotomic integers `Z[zeta_m]`.

use super::{pauli_mul, pauli_pow, GateTable, PauliError, PauliOp, PhaseSpec, QuditGate};
use crate::symplectic::omega_raw;

/// Largest Hilbert-space dimension `d^n` the oracle accepts.
pub const MAX_DENSE_DIM: u64 = 128;

/// Arithmetic in `Z[x] / Phi_m(x)`; elements are coefficient vectors of length `phi(m)`.
#[derive(Debug, Clone)]
struct Cyclo {
    m: usize,
    /// Monic `Phi_m`, lowest degree first (length `deg + 1`).
    phi: Vec<i64>,
}

type Elem = Vec<i64>;

fn cyclotomic_poly(m: usize) -> Vec<i64> {
    // (x^m - 1) / prod_{e | m, e < m} Phi_e
    let mut num = vec![0i64; m + 1];
    num[0] = -1;
    num[m] = 1;
    for e in 1..m {
        if m.is_multiple_of(e) {
            num = poly_div_exact(&num, &cyclotomic_poly(e));
        }
    }
    num
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = num.len() - 1 - dd;
    let mut q = vec![0i64; qd + 1];
    for i in (0..=qd).rev() {
        let c = rem[i + dd];
        q[i] = c;
        for (j, &dj) in den.iter().enumerate() {
            rem[i + j] -= c * dj;
        }
    }
    debug_assert!(rem.iter().all(|&x| x == 0));
    q
}

impl Cyclo {
    fn new(m: usize) -> Self {
        Cyclo {
            m,
            phi: cyclotomic_poly(m),
        }
    }

    fn deg(&self) -> usize {
        self.phi.len() - 1
    }

    fn reduce(&self, mut p: Vec<i64>) -> Elem {
        let deg = self.deg();
        for i in (deg..p.len()).rev() {
            let c = p[i];
            if c != 0 {
                for (j, &f) in self.phi.iter().enumerate() {
                    p[i - deg + j] -= c * f;
                }
            }
        }
        p.truncate(deg);
        p.resize(deg, 0);
        p
    }

    /// `zeta_m^k`.
    fn zeta(&self, k: i64) -> Elem {
        let k = k.rem_euclid(self.m as i64) as usize;
        let mut p = vec![0; k + 1];
        p[k] = 1;
        self.reduce(p)
    }

    fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let mut p = vec![0i64; 2 * self.deg()];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                p[i + j] += x * y;
            }
        }
        self.reduce(p)
    }

    fn add_assign(&self, a: &mut Elem, b: &Elem) {
        a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
    }

    /// Complex conjugate: `zeta -> zeta^{-1}`.
    fn conj(&self, a: &Elem) -> Elem {
        let mut p = vec![0i64; self.m];
        for (i, &x) in a.iter().enumerate() {
            p[(self.m - i) % self.m] += x;
        }
        self.reduce(p)
    }
}

fn is_zero(a: &Elem) -> bool {
    a.iter().all(|&x| x == 0)
}

/// Sparse square matrix over `Z[zeta_m]`, rows of `(column, entry)` sorted by column.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Sparse {
    rows: Vec<Vec<(usize, Elem)>>,
}

impl Sparse {
    fn dim(&self) -> usize {
        self.rows.len()
    }

    fn mul(&self, other: &Sparse, f: &Cyclo) -> Sparse {
        let n = self.dim();
        let mut rows = Vec::with_capacity(n);
        let mut acc: Vec<Option<Elem>> = vec![None; n];
        for row in &self.rows {
            for (k, a) in row {
                for (j, b) in &other.rows[*k] {
                    let prod = f.mul(a, b);
                    match &mut acc[*j] {
                        Some(e) => f.add_assign(e, &prod),
                        slot => *slot = Some(prod),
                    }
                }
            }
            let mut out = Vec::new();
            for (j, slot) in acc.iter_mut().enumerate() {
                if let Some(e) = slot.take() {
                    if !is_zero(&e) {
                        out.push((j, e));
                    }
                }
            }
            rows.push(out);
        }
        Sparse { rows }
    }

    fn adjoint(&self, f: &Cyclo) -> Sparse {
        let n = self.dim();
        let mut rows: Vec<Vec<(usize, Elem)>> = vec![Vec::new(); n];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, e) in row {
                rows[*j].push((i, f.conj(e)));
            }
        }
        rows.iter_mut().for_each(|r| r.sort_by_key(|(j, _)| *j));
        Sparse { rows }
    }

    fn div_exact(&self, c: i64) -> Option<Sparse> {
        let mut out = self.clone();
        for row in &mut out.rows {
            for (_, e) in row {
                for x in e.iter_mut() {
                    if *x % c != 0 {
                        return None;
                    }
                    *x /= c;
                }
            }
        }
        Some(out)
    }

    fn diagonal(entries: Vec<Elem>) -> Sparse {
        Sparse {
            rows: entries
                .into_iter()
                .enumerate()
                .map(|(i, e)| vec![(i, e)])
                .collect(),
        }
    }
}

/// A unitary (up to the scalar `norm`: `u u^dag = norm * I`) given explicitly.
#[derive(Debug, Clone)]
pub struct DenseFactor {
    u: Sparse,
    u_adj: Sparse,
    norm: i64,
}

struct Space {
    ps: PhaseSpec,
    n: usize,
    dim: usize,
    field: Cyclo,
}

impl Space {
    fn new(d: u64, n: usize) -> Result<Space, PauliError> {
        let dim = (d as u128).pow(n as u32);
        if dim > MAX_DENSE_DIM as u128 {
            return Err(PauliError::DimensionTooLarge {
                dim: dim.min(u64::MAX as u128) as u64,
            });
        }
        let ps = PhaseSpec::new(d);
        Ok(Space {
            ps,
            n,
            dim: dim as usize,
            field: Cyclo::new(ps.m() as usize),
        })
    }

    fn d(&self) -> usize {
        self.ps.d() as usize
    }

    /// Digit of qudit `q` in basis index `j`; qudit 0 is the most significant.
    fn digit(&self, j: usize, q: usize) -> usize {
        (j / self.d().pow((self.n - 1 - q) as u32)) % self.d()
    }

    fn with_digit(&self, j: usize, q: usize, v: usize) -> usize {
        let w = self.d().pow((self.n - 1 - q) as u32);
        j - self.digit(j, q) * w + v * w
    }

    /// `xi_d^t` as a power of `zeta_m`.
    fn xi(&self, t: i64) -> Elem {
        let unit = (self.ps.m() / self.ps.d()) as i64;
        self.field.zeta(t * unit)
    }

    fn pauli(&self, p: &PauliOp) -> Sparse {
        let d = self.d();
        let mut rows: Vec<Vec<(usize, Elem)>> = vec![Vec::new(); self.dim];
        for j in 0..self.dim {
            let mut target = j;
            let mut t = 0i64;
            for q in 0..self.n {
                let (a, b) = (p.vec[2 * q] as usize, p.vec[2 * q + 1] as i64);
                let jq = self.digit(j, q);
                t += b * jq as i64;
                target = self.with_digit(target, q, (jq + a) % d);
            }
            let unit = (self.ps.m() / self.ps.d()) as i64;
            rows[target].push((j, self.field.zeta(p.phase as i64 + unit * t)));
        }
        Sparse { rows }
    }

    fn from_u(&self, u: Sparse, norm: i64) -> DenseFactor {
        let u_adj = u.adjoint(&self.field);
        DenseFactor { u, u_adj, norm }
    }

    fn gate(&self, g: &QuditGate) -> DenseFactor {
        let d = self.d() as i64;
        match g {
            QuditGate::H(q) => {
                // U = F^dag on qudit q, entries xi^{-xy}
                let mut rows = vec![Vec::new(); self.dim];
                for (r, row) in rows.iter_mut().enumerate() {
                    let x = self.digit(r, *q) as i64;
                    for y in 0..d {
                        let c = self.with_digit(r, *q, y as usize);
                        row.push((c, self.xi(-x * y)));
                    }
                    row.sort_by_key(|(c, _)| *c);
                }
                self.from_u(Sparse { rows }, d)
            }
            QuditGate::P(q, p) => {
                let p = *p as i64;
                let entries = (0..self.dim)
                    .map(|j| {
                        let k = self.digit(j, *q) as i64;
                        if d % 2 == 0 {
                            self.field.zeta(-p * k * k)
                        } else {
                            self.xi(-p * (k * (k - 1) / 2))
                        }
                    })
                    .collect();
                self.from_u(Sparse::diagonal(entries), 1)
            }
            QuditGate::CZ(a, b, c) => {
                let c = *c as i64;
                let entries = (0..self.dim)
                    .map(|j| {
                        let (x, y) = (self.digit(j, *a) as i64, self.digit(j, *b) as i64);
                        self.xi(-c * x * y)
                    })
                    .collect();
                self.from_u(Sparse::diagonal(entries), 1)
            }
            QuditGate::Perm(target) => {
                // W moves the content of qudit q to target[q]; U = W^{-1}
                let mut rows = vec![Vec::new(); self.dim];
                for j in 0..self.dim {
                    let mut moved = 0;
                    for (q, &t) in target.iter().enumerate() {
                        moved = self.with_digit(moved, t, self.digit(j, q));
                    }
                    // W|j> = |moved>, so U|moved> = |j>
                    rows[j].push((moved, self.field.zeta(0)));
                }
                self.from_u(Sparse { rows }, 1)
            }
            QuditGate::Pauli(op) => self.from_u(self.pauli(&op.clone().reduced(&self.ps)), 1),
        }
    }

    fn conjugate(&self, m: &Sparse, f: &DenseFactor) -> Option<Sparse> {
        let prod = f.u_adj.mul(m, &self.field).mul(&f.u, &self.field);
        prod.div_exact(f.norm)
    }
}

impl DenseFactor {
    /// Dense matrix of a gate on `n` qudits of dimension `d`.
    pub fn gate(d: u64, n: usize, g: &QuditGate) -> Result<Self, PauliError> {
        Ok(Space::new(d, n)?.gate(g))
    }
}

/// Ground-truth check of a gate table.
///
/// With `unitary = [U_1, ..., U_L]` (the word `U_1 U_2 ... U_L`), confirms that
/// `U^dag P U` equals the tabled image of every generator `P`, phases included.
/// Without a unitary, confirms densely that the images satisfy the defining relations
/// of the Pauli group (orders and commutation phases).
pub fn dense_oracle_check(
    g: &GateTable,
    unitary: Option<&[DenseFactor]>,
) -> Result<bool, PauliError> {
    let space = Space::new(g.d(), g.n())?;
    let n = g.n();
    let images: Vec<Sparse> = g.images().iter().map(|p| space.pauli(p)).collect();
    match unitary {
        Some(factors) => {
            for (i, expected) in images.iter().enumerate() {
                let mut m = space.pauli(&PauliOp::generator(n, i));
                for f in factors {
                    if f.u.dim() != space.dim {
                        return Err(PauliError::RegisterMismatch { left: n, right: 0 });
                    }
                    match space.conjugate(&m, f) {
                        Some(next) => m = next,
                        None => return Ok(false),
                    }
                }
                if &m != expected {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        None => {
            let ps = g.phase_spec();
            let identity = space.pauli(&PauliOp::identity(n));
            for img in &images {
                let mut pow = identity.clone();
                for _ in 0..g.d() {
                    pow = pow.mul(img, &space.field);
                }
                if pow != identity {
                    return Ok(false);
                }
            }
            for a in 0..2 * n {
                for b in 0..2 * n {
                    let w = omega_raw(
                        &ps.ring(),
                        &PauliOp::generator(n, a).vec,
                        &PauliOp::generator(n, b).vec,
                    );
                    let phase = space.pauli(&PauliOp::identity(n).with_phase(ps.twist(w)));
                    let lhs = phase
                        .mul(&images[a], &space.field)
                        .mul(&images[b], &space.field);
                    let rhs = images[b].mul(&images[a], &space.field);
                    if lhs != rhs {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
    }
}

/// Check the engine's product against dense matrices for a pair of operators.
pub fn dense_product_matches(d: u64, p: &PauliOp, q: &PauliOp) -> Result<bool, PauliError> {
    let space = Space::new(d, p.n())?;
    let ps = PhaseSpec::new(d);
    let engine = pauli_mul(&ps, p, q)?;
    let dense = space.pauli(p).mul(&space.pauli(q), &space.field);
    Ok(dense == space.pauli(&engine))
}

/// Dense check of `p^e`.
pub fn dense_power_matches(d: u64, p: &PauliOp, e: u64) -> Result<bool, PauliError> {
    let space = Space::new(d, p.n())?;
    let ps = PhaseSpec::new(d);
    let mut dense = space.pauli(&PauliOp::identity(p.n()));
    for _ in 0..e {
        dense = dense.mul(&space.pauli(p), &space.field);
    }
    Ok(dense == space.pauli(&pauli_pow(&ps, p, e)))
}
