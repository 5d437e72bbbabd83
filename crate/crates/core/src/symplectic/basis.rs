use super::SymplecticError;
use crate::modring::{ModMatrix, PrimePower};

/// `P` with `P^T g P = J` over `Z_{p^k}`, for `g` alternating and nonsingular modulo the factor.
pub fn symplectic_basis(g: &ModMatrix, factor: PrimePower) -> Result<ModMatrix, SymplecticError> {
    let local = if g.modulus() == factor.value() {
        g.clone()
    } else {
        g.reduce_to(factor)
    };
    symplectic_basis_local(&local)
}

/// Symplectic Gram-Schmidt over a local ring.
pub fn symplectic_basis_local(g: &ModMatrix) -> Result<ModMatrix, SymplecticError> {
    let ring = g.ring().clone();
    assert!(
        ring.is_local(),
        "symplectic_basis_local needs a prime-power modulus"
    );
    let f = ring.factors()[0];
    let n = g.rows();
    if !g.is_square() {
        return Err(SymplecticError::ShapeMismatch(format!(
            "{}x{} form",
            g.rows(),
            g.cols()
        )));
    }
    if (0..n).any(|i| g.get(i, i) != 0) || g.transpose() != -g {
        return Err(SymplecticError::NotAlternating);
    }
    if !n.is_multiple_of(2) {
        return Err(SymplecticError::Singular);
    }
    let pair = |x: &[u64], y: &[u64]| -> u64 {
        let gy = g.apply(y);
        x.iter()
            .zip(&gy)
            .fold(0, |acc, (&a, &b)| ring.add(acc, ring.mul(a, b)))
    };
    let mut pool: Vec<Vec<u64>> = (0..n)
        .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
        .collect();
    let mut out: Vec<Vec<u64>> = Vec::with_capacity(n);
    while !pool.is_empty() {
        let mut found = None;
        'outer: for i in 0..pool.len() {
            for j in 0..pool.len() {
                if i != j && f.is_unit(pair(&pool[i], &pool[j])) {
                    found = Some((i, j));
                    break 'outer;
                }
            }
        }
        let (i, j) = found.ok_or(SymplecticError::Singular)?;
        let e = pool[i].clone();
        let s = ring.inverse(pair(&e, &pool[j]))?;
        let fv: Vec<u64> = pool[j].iter().map(|&x| ring.mul(x, s)).collect();
        let (hi, lo) = if i > j { (i, j) } else { (j, i) };
        pool.remove(hi);
        pool.remove(lo);
        for v in pool.iter_mut() {
            let bvf = pair(v, &fv);
            let bve = pair(v, &e);
            for t in 0..n {
                let x = ring.sub(v[t], ring.mul(bvf, e[t]));
                v[t] = ring.add(x, ring.mul(bve, fv[t]));
            }
        }
        out.push(e);
        out.push(fv);
    }
    let mut p = ModMatrix::zeros(&ring, n, n);
    for (c, v) in out.iter().enumerate() {
        for (r, &x) in v.iter().enumerate() {
            p.set(r, c, x);
        }
    }
    Ok(p)
}
