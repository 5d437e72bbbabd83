use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::{PrimePower, RingError, RingSpec};

/// Dense row-major matrix over `Z_d`. Entries are always reduced into `[0, d)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModMatrix {
    ring: RingSpec,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl ModMatrix {
    pub fn zeros(ring: &RingSpec, rows: usize, cols: usize) -> Self {
        ModMatrix {
            ring: ring.clone(),
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(ring: &RingSpec, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Build from signed entries, reducing each one.
    pub fn from_rows(ring: &RingSpec, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().map(|&x| ring.reduce(x)));
        }
        ModMatrix {
            ring: ring.clone(),
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_entries(
        ring: &RingSpec,
        rows: usize,
        cols: usize,
        entries: Vec<u64>,
    ) -> Result<Self, RingError> {
        if entries.len() != rows * cols {
            return Err(RingError::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let d = ring.modulus();
        if let Some(&bad) = entries.iter().find(|&&x| x >= d) {
            return Err(RingError::UnreducedEntry {
                value: bad,
                modulus: d,
            });
        }
        Ok(ModMatrix {
            ring: ring.clone(),
            rows,
            cols,
            data: entries,
        })
    }

    pub fn diagonal(ring: &RingSpec, diag: &[i64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(ring, n, n);
        for (i, &x) in diag.iter().enumerate() {
            m.data[i * n + i] = ring.reduce(x);
        }
        m
    }

    pub fn column_vector(ring: &RingSpec, v: &[u64]) -> Self {
        let d = ring.modulus();
        ModMatrix {
            ring: ring.clone(),
            rows: v.len(),
            cols: 1,
            data: v.iter().map(|x| x % d).collect(),
        }
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn modulus(&self) -> u64 {
        self.ring.modulus()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[u64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.ring.modulus();
    }

    pub fn set_signed(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = self.ring.reduce(v);
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [u64] {
        let c = self.cols;
        &mut self.data[i * c..(i + 1) * c]
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == u64::from(i == j)))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn scale(&self, c: u64) -> Self {
        let r = &self.ring;
        let c = c % r.modulus();
        let mut out = self.clone();
        out.data.iter_mut().for_each(|x| *x = r.mul(*x, c));
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols, "vector length");
        let d = self.modulus();
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, &b)| (acc + a * (b % d)) % d)
            })
            .collect()
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let idx_r: Vec<usize> = rows.collect();
        let idx_c: Vec<usize> = cols.collect();
        self.select(&idx_r, &idx_c)
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zeros(&self.ring, rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.data[a * cols.len() + b] = self.get(i, j);
            }
        }
        out
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "hstack row count");
        self.assert_same_ring(other);
        let c = self.cols + other.cols;
        let mut out = Self::zeros(&self.ring, self.rows, c);
        for i in 0..self.rows {
            out.data[i * c..i * c + self.cols].copy_from_slice(self.row(i));
            out.data[i * c + self.cols..(i + 1) * c].copy_from_slice(other.row(i));
        }
        out
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack column count");
        self.assert_same_ring(other);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        ModMatrix {
            ring: self.ring.clone(),
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn block_diag(&self, other: &Self) -> Self {
        self.assert_same_ring(other);
        let mut out = Self::zeros(&self.ring, self.rows + other.rows, self.cols + other.cols);
        out.paste(0, 0, self);
        out.paste(self.rows, self.cols, other);
        out
    }

    /// Overwrite the block starting at `(r0, c0)` with `block`.
    pub fn paste(&mut self, r0: usize, c0: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.data[(r0 + i) * self.cols + c0 + j] = block.get(i, j);
            }
        }
    }

    /// Same matrix with entries reduced modulo a prime-power factor of `d`.
    pub fn reduce_to(&self, f: PrimePower) -> Self {
        let q = f.value();
        assert_eq!(
            self.modulus() % q,
            0,
            "{q} does not divide {}",
            self.modulus()
        );
        ModMatrix {
            ring: f.ring(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x % q).collect(),
        }
    }

    /// Reinterpret over a different modulus, reducing entries (the ring must divide ours).
    pub fn reduce_mod(&self, ring: &RingSpec) -> Self {
        let q = ring.modulus();
        assert_eq!(
            self.modulus() % q,
            0,
            "{q} does not divide {}",
            self.modulus()
        );
        ModMatrix {
            ring: ring.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x % q).collect(),
        }
    }

    /// Reassemble a matrix over `ring` from its reductions modulo each factor.
    pub fn crt_join(ring: &RingSpec, parts: &[ModMatrix]) -> Self {
        assert_eq!(parts.len(), ring.factors().len());
        let (r, c) = (parts[0].rows, parts[0].cols);
        let mut out = Self::zeros(ring, r, c);
        let mut buf = vec![0u64; parts.len()];
        for idx in 0..r * c {
            for (slot, p) in buf.iter_mut().zip(parts) {
                assert_eq!((p.rows, p.cols), (r, c), "CRT parts must share a shape");
                *slot = p.data[idx];
            }
            out.data[idx] = ring.crt_join(&buf);
        }
        out
    }

    /// Inverse over `Z_d`, computed per prime-power factor and joined by CRT.
    pub fn inverse(&self) -> Result<Self, RingError> {
        if !self.is_square() {
            return Err(RingError::ShapeMismatch(format!(
                "inverse of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        if self.ring.is_local() {
            return super::local::local_inverse(self, self.ring.factors()[0]);
        }
        let parts = self
            .ring
            .factors()
            .iter()
            .map(|&f| super::local::local_inverse(&self.reduce_to(f), f))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::crt_join(&self.ring, &parts))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square()
            && self
                .ring
                .factors()
                .iter()
                .all(|&f| super::local::residue_rank(&self.reduce_to(f), f) == self.rows)
    }

    fn assert_same_ring(&self, other: &Self) {
        assert_eq!(
            self.modulus(),
            other.modulus(),
            "matrices over different moduli"
        );
    }

    fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        self.assert_same_ring(other);
        let d = self.modulus();
        let n = other.cols;
        let mut out = Self::zeros(&self.ring, self.rows, n);
        // accumulate unreduced in u64; flush before overflow
        let flush_every = (u64::MAX / ((d - 1).max(1) * (d - 1).max(1))).max(1) as usize - 1;
        let mut acc = vec![0u64; n];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|x| *x = 0);
            let mut pending = 0usize;
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (slot, &b) in acc.iter_mut().zip(other.row(k)) {
                    *slot += a * b;
                }
                pending += 1;
                if pending >= flush_every {
                    acc.iter_mut().for_each(|x| *x %= d);
                    pending = 0;
                }
            }
            let dst = &mut out.data[i * n..(i + 1) * n];
            for (o, &x) in dst.iter_mut().zip(&acc) {
                *o = x % d;
            }
        }
        out
    }
}

impl Mul for &ModMatrix {
    type Output = ModMatrix;
    fn mul(self, rhs: &ModMatrix) -> ModMatrix {
        self.matmul(rhs)
    }
}

impl Add for &ModMatrix {
    type Output = ModMatrix;
    fn add(self, rhs: &ModMatrix) -> ModMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add shape");
        self.assert_same_ring(rhs);
        let r = &self.ring;
        let mut out = self.clone();
        for (o, &b) in out.data.iter_mut().zip(&rhs.data) {
            *o = r.add(*o, b);
        }
        out
    }
}

impl Sub for &ModMatrix {
    type Output = ModMatrix;
    fn sub(self, rhs: &ModMatrix) -> ModMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub shape");
        self.assert_same_ring(rhs);
        let r = &self.ring;
        let mut out = self.clone();
        for (o, &b) in out.data.iter_mut().zip(&rhs.data) {
            *o = r.sub(*o, b);
        }
        out
    }
}

impl Neg for &ModMatrix {
    type Output = ModMatrix;
    fn neg(self) -> ModMatrix {
        let r = &self.ring;
        let mut out = self.clone();
        out.data.iter_mut().for_each(|x| *x = r.neg(*x));
        out
    }
}

impl fmt::Debug for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "ModMatrix {}x{} over Z_{} [",
            self.rows,
            self.cols,
            self.modulus()
        )?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct ModMatrixJson {
    d: u64,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl Serialize for ModMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ModMatrixJson {
            d: self.modulus(),
            rows: self.rows,
            cols: self.cols,
            entries: self.data.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ModMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = ModMatrixJson::deserialize(de)?;
        let ring = RingSpec::new(raw.d).map_err(serde::de::Error::custom)?;
        ModMatrix::from_entries(&ring, raw.rows, raw.cols, raw.entries)
            .map_err(serde::de::Error::custom)
    }
}
