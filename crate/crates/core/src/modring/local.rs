//! Linear algebra over a local ring `Z_{p^k}`.

use super::{ModMatrix, PrimePower, RingError};

fn local_factor(m: &ModMatrix) -> PrimePower {
    let ring = m.ring();
    assert!(
        ring.is_local(),
        "expected a prime-power modulus, got {}",
        ring.modulus()
    );
    ring.factors()[0]
}

/// Valuations of the nonzero Smith invariants of `m` over `Z_{p^k}`, in nondecreasing order.
pub fn smith_valuations(m: &ModMatrix) -> Vec<u32> {
    let f = local_factor(m);
    let q = f.value();
    let mut w = m.clone();
    let (rows, cols) = (w.rows(), w.cols());
    let mut out = Vec::new();
    for t in 0..rows.min(cols) {
        let mut best: Option<(u32, usize, usize)> = None;
        'search: for i in t..rows {
            for j in t..cols {
                let v = f.valuation(w.get(i, j));
                if v < f.k && best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                    if v == 0 {
                        break 'search;
                    }
                }
            }
        }
        let Some((v, pi, pj)) = best else { break };
        swap_rows(&mut w, t, pi);
        swap_cols(&mut w, t, pj);
        let pv = f.p.pow(v);
        let unit = w.get(t, t) / pv;
        let uinv = super::mod_inverse(unit, q).expect("unit part");
        for c in 0..cols {
            let x = w.get(t, c);
            w.set(t, c, x * uinv % q);
        }
        for i in t + 1..rows {
            let x = w.get(i, t);
            if x == 0 {
                continue;
            }
            let c = x / pv;
            for jj in t..cols {
                let y = (w.get(i, jj) + (q - c) * w.get(t, jj) % q) % q;
                w.set(i, jj, y);
            }
        }
        for j in t + 1..cols {
            let x = w.get(t, j);
            if x == 0 {
                continue;
            }
            let c = x / pv;
            for ii in t..rows {
                let y = (w.get(ii, j) + (q - c) * w.get(ii, t) % q) % q;
                w.set(ii, j, y);
            }
        }
        out.push(v);
    }
    out
}

/// Smith valuations of the column span of `m` computed modulo each factor of `d`.
pub fn span_valuations(m: &ModMatrix) -> Vec<(PrimePower, Vec<u32>)> {
    m.ring()
        .factors()
        .iter()
        .map(|&f| (f, smith_valuations(&m.reduce_to(f))))
        .collect()
}

/// Rank of `m` modulo the maximal ideal.
pub fn residue_rank(m: &ModMatrix, f: PrimePower) -> usize {
    let reduced = m.reduce_mod(&super::RingSpec::new(f.p).expect("prime modulus"));
    smith_valuations(&reduced).len()
}

/// Free rank of the image of an idempotent over the factor `Z_{p^k}`.
pub fn idempotent_rank(p: &ModMatrix, factor: PrimePower) -> Result<usize, RingError> {
    if !p.is_square() {
        return Err(RingError::ShapeMismatch(format!(
            "idempotent must be square, got {}x{}",
            p.rows(),
            p.cols()
        )));
    }
    let local = if p.modulus() == factor.value() {
        p.clone()
    } else {
        p.reduce_to(factor)
    };
    if &local * &local != local {
        return Err(RingError::NotIdempotent);
    }
    Ok(smith_valuations(&local).iter().filter(|&&v| v == 0).count())
}

/// Whether the column span of `m` is a free direct summand of the same rank at every factor.
pub fn is_free_summand(m: &ModMatrix) -> bool {
    let mut rank = None;
    for (_, vals) in span_valuations(m) {
        if vals.iter().any(|&v| v != 0) {
            return false;
        }
        match rank {
            None => rank = Some(vals.len()),
            Some(r) if r != vals.len() => return false,
            _ => {}
        }
    }
    true
}

/// Canonical basis (as columns) of the column span of `m`, when that span is a free
/// direct summand of constant rank. Each factor uses unit-pivot reduced echelon form.
pub fn free_summand_basis(m: &ModMatrix) -> Option<ModMatrix> {
    let ring = m.ring().clone();
    let mut parts = Vec::new();
    for &f in ring.factors() {
        parts.push(local_free_basis(&m.reduce_to(f).transpose(), f)?);
    }
    let r = parts[0].rows();
    if parts.iter().any(|p| p.rows() != r) {
        return None;
    }
    Some(ModMatrix::crt_join(&ring, &parts).transpose())
}

/// Unit-pivot Gauss-Jordan on the rows of `g`; `None` if the row span is not a free summand.
fn local_free_basis(g: &ModMatrix, f: PrimePower) -> Option<ModMatrix> {
    let q = f.value();
    let mut w = g.clone();
    let (rows, cols) = (w.rows(), w.cols());
    let mut next = 0usize;
    for j in 0..cols {
        let Some(pi) = (next..rows).find(|&i| f.is_unit(w.get(i, j))) else {
            continue;
        };
        swap_rows(&mut w, next, pi);
        let inv = super::mod_inverse(w.get(next, j), q).expect("unit pivot");
        for c in 0..cols {
            let x = w.get(next, c);
            w.set(next, c, x * inv % q);
        }
        for i in 0..rows {
            if i == next {
                continue;
            }
            let x = w.get(i, j);
            if x == 0 {
                continue;
            }
            for c in 0..cols {
                let y = (w.get(i, c) + (q - x) * w.get(next, c) % q) % q;
                w.set(i, c, y);
            }
        }
        next += 1;
    }
    if (next..rows).any(|i| w.row(i).iter().any(|&x| x != 0)) {
        return None;
    }
    Some(w.submatrix(0..next, 0..cols))
}

pub(crate) fn local_inverse(m: &ModMatrix, f: PrimePower) -> Result<ModMatrix, RingError> {
    let n = m.rows();
    let q = f.value();
    let ring = f.ring();
    let local = if m.modulus() == q {
        m.clone()
    } else {
        m.reduce_to(f)
    };
    let mut w = local.hstack(&ModMatrix::identity(&ring, n));
    for j in 0..n {
        let Some(pi) = (j..n).find(|&i| f.is_unit(w.get(i, j))) else {
            return Err(RingError::Singular);
        };
        swap_rows(&mut w, j, pi);
        let inv = super::mod_inverse(w.get(j, j), q).expect("unit pivot");
        for c in 0..2 * n {
            let x = w.get(j, c);
            w.set(j, c, x * inv % q);
        }
        for i in 0..n {
            if i == j {
                continue;
            }
            let x = w.get(i, j);
            if x == 0 {
                continue;
            }
            for c in 0..2 * n {
                let y = (w.get(i, c) + (q - x) * w.get(j, c) % q) % q;
                w.set(i, c, y);
            }
        }
    }
    Ok(w.submatrix(0..n, n..2 * n))
}

fn swap_rows(m: &mut ModMatrix, i: usize, j: usize) {
    if i == j {
        return;
    }
    for c in 0..m.cols() {
        let (a, b) = (m.get(i, c), m.get(j, c));
        m.set(i, c, b);
        m.set(j, c, a);
    }
}

fn swap_cols(m: &mut ModMatrix, i: usize, j: usize) {
    if i == j {
        return;
    }
    for r in 0..m.rows() {
        let (a, b) = (m.get(r, i), m.get(r, j));
        m.set(r, i, b);
        m.set(r, j, a);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modring::RingSpec;
    use rand::{Rng, SeedableRng};

    #[test]
    fn idempotent_rank_examples() {
        let r9 = RingSpec::new(9).unwrap();
        let f = r9.factors()[0];
        assert_eq!(idempotent_rank(&ModMatrix::zeros(&r9, 3, 3), f).unwrap(), 0);
        assert_eq!(idempotent_rank(&ModMatrix::identity(&r9, 3), f).unwrap(), 3);
        assert_eq!(
            idempotent_rank(&ModMatrix::diagonal(&r9, &[1, 0]), f).unwrap(),
            1
        );
        assert_eq!(
            idempotent_rank(&ModMatrix::diagonal(&r9, &[3, 0]), f),
            Err(RingError::NotIdempotent)
        );
    }

    #[test]
    fn complementary_idempotents_add_up() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for d in [4u64, 8, 9, 12, 25] {
            let ring = RingSpec::new(d).unwrap();
            for _ in 0..30 {
                let n = rng.gen_range(1..6);
                // conjugate a 0/1 diagonal by a random invertible matrix
                let diag: Vec<i64> = (0..n).map(|_| rng.gen_range(0..2)).collect();
                let e = ModMatrix::diagonal(&ring, &diag);
                let g = loop {
                    let mut g = ModMatrix::zeros(&ring, n, n);
                    for i in 0..n {
                        for j in 0..n {
                            g.set(i, j, rng.gen_range(0..d));
                        }
                    }
                    if let Ok(inv) = g.inverse() {
                        break (g, inv);
                    }
                };
                let p = &(&g.0 * &e) * &g.1;
                let one_minus = &ModMatrix::identity(&ring, n) - &p;
                for &f in ring.factors() {
                    let a = idempotent_rank(&p, f).unwrap();
                    let b = idempotent_rank(&one_minus, f).unwrap();
                    assert_eq!(a + b, n);
                    assert_eq!(a as i64, diag.iter().sum::<i64>());
                }
            }
        }
    }

    #[test]
    fn free_summand_detection() {
        let r4 = RingSpec::new(4).unwrap();
        let two_e1 = ModMatrix::from_rows(&r4, &[vec![2], vec![0]]);
        assert!(!is_free_summand(&two_e1));
        assert!(free_summand_basis(&two_e1).is_none());
        let gen = ModMatrix::from_rows(&r4, &[vec![3, 2], vec![1, 2]]);
        // columns (3,1) and (2,2) = 2*(3,1) + (0,0): span is free of rank 1
        let b = free_summand_basis(&gen).unwrap();
        assert_eq!(b, ModMatrix::from_rows(&r4, &[vec![1], vec![3]]));
        let r6 = RingSpec::new(6).unwrap();
        // rank 1 mod 2, rank 0 mod 3
        let mixed = ModMatrix::from_rows(&r6, &[vec![3], vec![0]]);
        assert!(!is_free_summand(&mixed));
    }

    #[test]
    fn smith_of_diagonal() {
        let r8 = RingSpec::new(8).unwrap();
        let m = ModMatrix::from_rows(&r8, &[vec![4, 0], vec![0, 2]]);
        assert_eq!(smith_valuations(&m), vec![1, 2]);
    }
}
