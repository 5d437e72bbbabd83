use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ClassifyError;
use crate::modring::{idempotent_rank, ModMatrix};
use crate::qca::{CliffordQCA, Topology};

/// One integer per prime-power factor of `d`, keyed by the factor's value.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeloopingIndex {
    pub factors: BTreeMap<u64, i64>,
}

impl DeloopingIndex {
    pub fn is_zero(&self) -> bool {
        self.factors.values().all(|&v| v == 0)
    }

    pub fn add(&self, other: &DeloopingIndex) -> DeloopingIndex {
        let mut factors = self.factors.clone();
        for (&f, &v) in &other.factors {
            *factors.entry(f).or_insert(0) += v;
        }
        DeloopingIndex { factors }
    }

    pub fn neg(&self) -> DeloopingIndex {
        DeloopingIndex {
            factors: self.factors.iter().map(|(&f, &v)| (f, -v)).collect(),
        }
    }
}

fn effective_radius(alpha: &CliffordQCA) -> u64 {
    alpha.tight_radius().max(alpha.inverse().tight_radius())
}

/// Index with band half-width `2r`, `r` the larger tight radius of `alpha` and its inverse.
pub fn delooping_index(alpha: &CliffordQCA, cut: usize) -> Result<DeloopingIndex, ClassifyError> {
    let w = 2 * effective_radius(alpha).max(1);
    delooping_index_with_band(alpha, cut, w)
}

/// `rank(q_BB) - rank(p_BB)` per factor, where `p` projects onto the cells left of the cut,
/// `q = alpha p alpha^{-1}` and `B` is the band of `2w` cells centred on the cut.
///
/// On a line the left region is everything before the cut; on a ring it is the half-ring
/// ending at the cut, whose far boundary must stay out of reach of the band.
pub fn delooping_index_with_band(
    alpha: &CliffordQCA,
    cut: usize,
    w: u64,
) -> Result<DeloopingIndex, ClassifyError> {
    let space = alpha.space();
    let len = space.len();
    let r = effective_radius(alpha);
    let w = w as usize;
    let r_us = r as usize;
    let too_close = |reason: String| ClassifyError::CutTooClose { cut, reason };
    if w < r_us {
        return Err(too_close(format!(
            "band half-width {w} is below the radius {r}"
        )));
    }
    let (band, left): (Vec<usize>, Vec<usize>) = match space.topology() {
        Topology::Line => {
            if cut < w || cut + w > len {
                return Err(too_close(format!(
                    "band of half-width {w} leaves a line of {len} cells"
                )));
            }
            let margin = 2 * r_us;
            let reg = alpha.register();
            let m = alpha.matrix();
            for cell in (0..margin.min(len)).chain(len.saturating_sub(margin)..len) {
                for q in reg.cell_qudits(cell) {
                    for idx in [2 * q, 2 * q + 1] {
                        let col_ok = (0..m.rows()).all(|i| m.get(i, idx) == u64::from(i == idx));
                        let row_ok = (0..m.cols()).all(|j| m.get(idx, j) == u64::from(j == idx));
                        if !col_ok || !row_ok {
                            return Err(ClassifyError::SupportTouchesBoundary { cell });
                        }
                    }
                }
            }
            ((cut - w..cut + w).collect(), (0..cut).collect())
        }
        Topology::Ring => {
            let h = len / 2;
            if cut >= len || w + r_us > h || w + r_us > len - h {
                return Err(too_close(format!(
                    "band of half-width {w} plus radius {r} does not fit in half of a ring of {len}"
                )));
            }
            let at = |off: isize| (cut as isize + off).rem_euclid(len as isize) as usize;
            (
                (-(w as isize)..w as isize).map(at).collect(),
                (-(h as isize)..0).map(at).collect(),
            )
        }
        _ => return Err(ClassifyError::NotOneDimensional),
    };

    let reg = alpha.register();
    let indices = |cells: &[usize]| -> Vec<usize> {
        cells
            .iter()
            .flat_map(|&c| reg.cell_qudits(c))
            .flat_map(|q| [2 * q, 2 * q + 1])
            .collect()
    };
    let b_idx = indices(&band);
    let l_idx = indices(&left);
    let inv = alpha.inverse();
    let q_bb = &alpha.matrix().select(&b_idx, &l_idx) * &inv.matrix().select(&l_idx, &b_idx);
    let in_left: Vec<bool> = {
        let mut v = vec![false; len];
        for &c in &left {
            v[c] = true;
        }
        v
    };
    let diag: Vec<i64> = band
        .iter()
        .flat_map(|&c| {
            let k = reg.k()[c];
            std::iter::repeat_n(i64::from(in_left[c]), 2 * k)
        })
        .collect();
    let p_bb = ModMatrix::diagonal(alpha.ring(), &diag);

    let mut factors = BTreeMap::new();
    for &f in alpha.ring().factors() {
        let rq = idempotent_rank(&q_bb, f)? as i64;
        let rp = idempotent_rank(&p_bb, f)? as i64;
        factors.insert(f.value(), rq - rp);
    }
    Ok(DeloopingIndex { factors })
}

/// Whether no nonzero block joins cells on opposite sides of the boundary before cell `m`.
///
/// On a ring a block crosses the boundary when the shorter arc between its cells does.
pub fn split_at(alpha: &CliffordQCA, m: usize) -> bool {
    let space = alpha.space();
    let len = space.len();
    let crosses = |i: usize, j: usize| -> bool {
        if i == j {
            return false;
        }
        if space.topology() == Topology::Ring {
            let delta = (j + len - i) % len;
            let (from, arc) = if delta <= len / 2 {
                (i, delta)
            } else {
                (j, len - delta)
            };
            let offset = (m + len - from) % len;
            (1..=arc).contains(&offset)
        } else {
            (i < m) != (j < m)
        }
    };
    !alpha
        .support_pairs()
        .into_iter()
        .any(|(i, j)| crosses(i, j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modring::RingSpec;
    use crate::qca::{register_on, Gate, GateScript, Site, Space};

    fn shift(d: u64, len: usize, k: usize, s: i64) -> CliffordQCA {
        let ring = RingSpec::new(d).unwrap();
        let space = Space::ring(len);
        let reg = register_on(&space, &ring, vec![k; len]).unwrap();
        let script = GateScript::new(vec![vec![Gate::translation(&space, s)]]);
        CliffordQCA::from_gates(&script, &space, &reg).unwrap()
    }

    #[test]
    fn identity_and_shift() {
        let id = CliffordQCA::identity_uniform(&Space::ring(16), &RingSpec::new(3).unwrap(), 1);
        assert!(delooping_index(&id, 5).unwrap().is_zero());
        let s = shift(3, 16, 1, 1);
        assert_eq!(
            delooping_index(&s, 8).unwrap().factors,
            BTreeMap::from([(3, 2)])
        );
        let back = shift(3, 16, 1, -1);
        assert_eq!(
            delooping_index(&back, 8).unwrap().factors,
            BTreeMap::from([(3, -2)])
        );
        let wide = shift(4, 24, 2, 2);
        assert_eq!(
            delooping_index(&wide, 0).unwrap().factors,
            BTreeMap::from([(4, 8)])
        );
        let mixed = shift(12, 16, 1, 1);
        assert_eq!(
            delooping_index(&mixed, 3).unwrap().factors,
            BTreeMap::from([(3, 2), (4, 2)])
        );
    }

    #[test]
    fn line_constraints() {
        let ring = RingSpec::new(5).unwrap();
        let space = Space::line(20);
        let reg = register_on(&space, &ring, vec![1; 20]).unwrap();
        let script = GateScript::new(vec![vec![Gate::cz(
            Site::new("9", 0),
            Site::new("10", 0),
            1,
        )]]);
        let q = CliffordQCA::from_gates(&script, &space, &reg).unwrap();
        assert!(delooping_index(&q, 10).unwrap().is_zero());
        assert!(matches!(
            delooping_index(&q, 1),
            Err(ClassifyError::CutTooClose { .. })
        ));
        let edge = GateScript::new(vec![vec![Gate::cz(
            Site::new("0", 0),
            Site::new("1", 0),
            1,
        )]]);
        let e = CliffordQCA::from_gates(&edge, &space, &reg).unwrap();
        assert!(matches!(
            delooping_index(&e, 10),
            Err(ClassifyError::SupportTouchesBoundary { .. })
        ));
    }

    #[test]
    fn splits() {
        let s = shift(3, 10, 1, 1);
        assert!((0..10).all(|m| !split_at(&s, m)));
        let id = CliffordQCA::identity_uniform(&Space::line(6), &RingSpec::new(2).unwrap(), 1);
        assert!((0..=6).all(|m| split_at(&id, m)));
        let ring = RingSpec::new(3).unwrap();
        let space = Space::line(6);
        let reg = register_on(&space, &ring, vec![1; 6]).unwrap();
        let script = GateScript::new(vec![vec![
            Gate::cz(Site::new("0", 0), Site::new("2", 0), 1),
            Gate::cz(Site::new("3", 0), Site::new("5", 0), 1),
        ]]);
        let q = CliffordQCA::from_gates(&script, &space, &reg).unwrap();
        assert!(split_at(&q, 3));
        assert!(!split_at(&q, 2));
    }
}
