use super::{unit_normalizer, xgcd, ModMatrix, RingError};

/// Howell normal form `h` of a matrix `m` together with matrices relating them:
/// `transform * m == h` and `back * h == m`.
///
/// `h` has `max(rows, cols)` rows; nonzero rows come first, sorted by pivot column.
#[derive(Debug, Clone)]
pub struct HowellForm {
    pub h: ModMatrix,
    pub transform: ModMatrix,
    pub back: ModMatrix,
}

impl HowellForm {
    /// Number of nonzero rows.
    pub fn rank(&self) -> usize {
        nonzero_rows(&self.h)
    }
}

struct Work {
    d: u64,
    w: ModMatrix,
    u: Option<(ModMatrix, ModMatrix)>,
}

impl Work {
    /// Rows `(i, j) <- (s r_i + t r_j, x r_i + y r_j)` for a determinant-one matrix.
    fn combine(&mut self, i: usize, j: usize, g: [[u64; 2]; 2]) {
        let d = self.d;
        combine_rows(&mut self.w, i, j, g, d);
        if let Some((u, uinv)) = &mut self.u {
            combine_rows(u, i, j, g, d);
            let [[s, t], [x, y]] = g;
            for r in 0..uinv.rows() {
                let (ci, cj) = (uinv.get(r, i), uinv.get(r, j));
                uinv.set(r, i, (y * ci + (d - x) * cj) % d);
                uinv.set(r, j, ((d - t) * ci + s * cj) % d);
            }
        }
    }

    fn scale(&mut self, i: usize, a: u64, a_inv: u64) {
        let d = self.d;
        scale_row(&mut self.w, i, a, d);
        if let Some((u, uinv)) = &mut self.u {
            scale_row(u, i, a, d);
            for r in 0..uinv.rows() {
                let v = uinv.get(r, i);
                uinv.set(r, i, v * a_inv % d);
            }
        }
    }

    /// Row `j += c * row i`.
    fn add_multiple(&mut self, j: usize, i: usize, c: u64) {
        let d = self.d;
        let c = c % d;
        if c == 0 {
            return;
        }
        axpy_row(&mut self.w, j, i, c, d);
        if let Some((u, uinv)) = &mut self.u {
            axpy_row(u, j, i, c, d);
            for r in 0..uinv.rows() {
                let v = (uinv.get(r, i) + (d - c) * uinv.get(r, j)) % d;
                uinv.set(r, i, v);
            }
        }
    }
}

fn combine_rows(m: &mut ModMatrix, i: usize, j: usize, g: [[u64; 2]; 2], d: u64) {
    let [[s, t], [x, y]] = g;
    for c in 0..m.cols() {
        let (a, b) = (m.get(i, c), m.get(j, c));
        if a == 0 && b == 0 {
            continue;
        }
        m.set(i, c, (s * a % d + t * b % d) % d);
        m.set(j, c, (x * a % d + y * b % d) % d);
    }
}

fn scale_row(m: &mut ModMatrix, i: usize, a: u64, d: u64) {
    m.row_mut(i).iter_mut().for_each(|v| *v = *v * a % d);
}

fn axpy_row(m: &mut ModMatrix, j: usize, i: usize, c: u64, d: u64) {
    let src: Vec<u64> = m.row(i).to_vec();
    for (dst, s) in m.row_mut(j).iter_mut().zip(src) {
        if s != 0 {
            *dst = (*dst + c * s) % d;
        }
    }
}

fn nonzero_rows(h: &ModMatrix) -> usize {
    (0..h.rows())
        .take_while(|&i| h.row(i).iter().any(|&x| x != 0))
        .count()
}

fn pivot_col(row: &[u64]) -> Option<usize> {
    row.iter().position(|&x| x != 0)
}

fn eliminate(m: &ModMatrix, track: bool) -> Work {
    let ring = m.ring().clone();
    let d = ring.modulus();
    let (rows, cols) = (m.rows(), m.cols());
    let n = rows + cols;
    let mut w = ModMatrix::zeros(&ring, n, cols);
    w.paste(0, 0, m);
    let u = track.then(|| (ModMatrix::identity(&ring, n), ModMatrix::identity(&ring, n)));
    let mut work = Work { d, w, u };

    let mut k = 0usize;
    for j in 0..cols {
        for i in k + 1..n {
            let b = work.w.get(i, j);
            if b == 0 {
                continue;
            }
            let a = work.w.get(k, j);
            let (g, s, t) = xgcd(a as i64, b as i64);
            let gm = [
                [ring.reduce(s), ring.reduce(t)],
                [ring.reduce(-(b as i64 / g)), ring.reduce(a as i64 / g)],
            ];
            work.combine(k, i, gm);
        }
        let a = work.w.get(k, j);
        if a == 0 {
            continue;
        }
        let unit = unit_normalizer(a, d);
        if unit != 1 {
            let inv = ring.inverse(unit).expect("normalizer is a unit");
            work.scale(k, unit, inv);
        }
        let pivot = work.w.get(k, j);
        for i in 0..k {
            let q = work.w.get(i, j) / pivot;
            if q != 0 {
                work.add_multiple(i, k, d - q % d);
            }
        }
        if pivot != 1 {
            let ann = d / pivot;
            let has_tail = work.w.row(k)[j + 1..]
                .iter()
                .any(|&x| !(x * ann).is_multiple_of(d));
            if has_tail {
                let z = (k + 1..n)
                    .find(|&z| work.w.row(z).iter().all(|&x| x == 0))
                    .expect("a free row always remains");
                work.add_multiple(z, k, ann);
            }
        }
        k += 1;
        if k == n {
            break;
        }
    }
    work
}

/// Howell normal form with transformation matrices.
pub fn howell_form(m: &ModMatrix) -> HowellForm {
    let work = eliminate(m, true);
    let (rows, cols) = (m.rows(), m.cols());
    let r = rows.max(cols);
    let (u, uinv) = work.u.expect("tracked");
    HowellForm {
        h: work.w.submatrix(0..r, 0..cols),
        transform: u.submatrix(0..r, 0..rows),
        back: uinv.submatrix(0..rows, 0..r),
    }
}

/// The nonzero rows of the Howell form: a canonical generating set of the row span.
pub fn howell_basis(m: &ModMatrix) -> ModMatrix {
    let work = eliminate(m, false);
    let k = nonzero_rows(&work.w);
    work.w.submatrix(0..k, 0..m.cols())
}

/// Coefficients expressing `v` in terms of the rows of a Howell basis, if it lies in the span.
pub fn in_row_span(basis: &ModMatrix, v: &[u64]) -> Option<Vec<u64>> {
    assert_eq!(basis.cols(), v.len(), "vector length");
    let d = basis.modulus();
    let mut rest: Vec<u64> = v.iter().map(|x| x % d).collect();
    let mut coeffs = vec![0u64; basis.rows()];
    for (i, c) in coeffs.iter_mut().enumerate() {
        let row = basis.row(i);
        let Some(pc) = pivot_col(row) else { break };
        if rest[..pc].iter().any(|&x| x != 0) {
            return None;
        }
        let a = row[pc];
        if !rest[pc].is_multiple_of(a) {
            return None;
        }
        let q = rest[pc] / a;
        *c = q;
        for (r, &b) in rest.iter_mut().zip(row) {
            *r = (*r + (d - q) * b % d) % d;
        }
    }
    rest.iter().all(|&x| x == 0).then_some(coeffs)
}

/// Whether `v` lies in the row span of `m`.
pub fn row_span_contains(m: &ModMatrix, v: &[u64]) -> bool {
    in_row_span(&howell_basis(m), v).is_some()
}

/// Whether two matrices with the same number of columns have the same row span.
pub fn same_row_span(a: &ModMatrix, b: &ModMatrix) -> bool {
    a.cols() == b.cols() && howell_basis(a) == howell_basis(b)
}

/// Generators (as columns) of the right kernel `{x : m x = 0}`.
pub fn kernel(m: &ModMatrix) -> ModMatrix {
    let ring = m.ring().clone();
    let (r, c) = (m.rows(), m.cols());
    let aug = m.transpose().hstack(&ModMatrix::identity(&ring, c));
    let hb = howell_basis(&aug);
    let gens: Vec<usize> = (0..hb.rows())
        .filter(|&i| hb.row(i)[..r].iter().all(|&x| x == 0))
        .collect();
    hb.select(&gens, &(r..r + c).collect::<Vec<_>>())
        .transpose()
}

/// Some `x` with `m x = b`, or a certificate `y` with `y^T m = 0` and `y^T b != 0`.
pub fn solve_linear(m: &ModMatrix, b: &[u64]) -> Result<Vec<u64>, RingError> {
    if b.len() != m.rows() {
        return Err(RingError::ShapeMismatch(format!(
            "right-hand side of length {} for {} rows",
            b.len(),
            m.rows()
        )));
    }
    let ring = m.ring().clone();
    let mut parts = Vec::with_capacity(ring.factors().len());
    for &f in ring.factors() {
        let mf = m.reduce_to(f);
        let q = f.value();
        let bf: Vec<u64> = b.iter().map(|x| x % q).collect();
        let hf = howell_form(&mf.transpose());
        match in_row_span(&hf.h, &bf) {
            Some(coeffs) => parts.push(hf.transform.transpose().apply(&coeffs)),
            None => {
                let col = ModMatrix::column_vector(&f.ring(), &bf);
                let aug = howell_form(&mf.hstack(&col));
                let c = m.cols();
                let row = (0..aug.h.rows())
                    .find(|&i| aug.h.row(i)[..c].iter().all(|&x| x == 0) && aug.h.get(i, c) != 0)
                    .expect("an inconsistent system has a witness row");
                let y: Vec<u64> = aug
                    .transform
                    .row(row)
                    .iter()
                    .map(|&v| ring.lift_from_factor(f, v))
                    .collect();
                return Err(RingError::NoSolution { certificate: y });
            }
        }
    }
    let n = m.cols();
    Ok((0..n)
        .map(|i| {
            let comps: Vec<u64> = parts.iter().map(|p| p[i]).collect();
            ring.crt_join(&comps)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modring::RingSpec;
    use rand::{Rng, SeedableRng};
    use std::collections::BTreeSet;

    fn random_matrix(rng: &mut impl Rng, ring: &RingSpec, r: usize, c: usize) -> ModMatrix {
        let d = ring.modulus();
        let mut m = ModMatrix::zeros(ring, r, c);
        for i in 0..r {
            for j in 0..c {
                // bias toward zero divisors and zeros
                let v = match rng.gen_range(0..4) {
                    0 => 0,
                    1 => ring.factors()[0].p * rng.gen_range(0..d) % d,
                    _ => rng.gen_range(0..d),
                };
                m.set(i, j, v);
            }
        }
        m
    }

    fn brute_span(m: &ModMatrix) -> BTreeSet<Vec<u64>> {
        let d = m.modulus();
        let mut span = BTreeSet::new();
        span.insert(vec![0; m.cols()]);
        for i in 0..m.rows() {
            let mut next = BTreeSet::new();
            for v in &span {
                for c in 0..d {
                    let w: Vec<u64> = v
                        .iter()
                        .zip(m.row(i))
                        .map(|(&a, &b)| (a + c * b) % d)
                        .collect();
                    next.insert(w);
                }
            }
            span = next;
        }
        span
    }

    #[test]
    fn zero_divisor_pivot_example() {
        let r = RingSpec::new(4).unwrap();
        let m = ModMatrix::from_rows(&r, &[vec![2, 1]]);
        let hb = howell_basis(&m);
        assert_eq!(hb, ModMatrix::from_rows(&r, &[vec![2, 1], vec![0, 2]]));
    }

    #[test]
    fn transform_and_back_relations() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for d in [2u64, 4, 6, 8, 9, 12, 36] {
            let ring = RingSpec::new(d).unwrap();
            for _ in 0..40 {
                let (r, c) = (rng.gen_range(1..5), rng.gen_range(1..5));
                let m = random_matrix(&mut rng, &ring, r, c);
                let hf = howell_form(&m);
                assert_eq!(&hf.transform * &m, hf.h);
                assert_eq!(&hf.back * &hf.h, m);
            }
        }
    }

    #[test]
    fn canonical_iff_same_span_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for d in [4u64, 6, 8, 9] {
            let ring = RingSpec::new(d).unwrap();
            for _ in 0..60 {
                let ra = rng.gen_range(1..4);
                let a = random_matrix(&mut rng, &ring, ra, 3);
                let b = if rng.gen_bool(0.5) {
                    // same span, different generators
                    let mix = random_matrix(&mut rng, &ring, a.rows(), a.rows());
                    (&mix * &a).vstack(&a)
                } else {
                    let rb = rng.gen_range(1..4);
                    random_matrix(&mut rng, &ring, rb, 3)
                };
                let same = brute_span(&a) == brute_span(&b);
                assert_eq!(same_row_span(&a, &b), same, "d={d}\n{a:?}\n{b:?}");
                let ha = howell_basis(&a);
                for v in brute_span(&a) {
                    assert!(in_row_span(&ha, &v).is_some());
                }
            }
        }
    }

    #[test]
    fn kernel_is_exact() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for d in [4u64, 6, 9] {
            let ring = RingSpec::new(d).unwrap();
            for _ in 0..20 {
                let r = rng.gen_range(1..3);
                let m = random_matrix(&mut rng, &ring, r, 3);
                let k = kernel(&m);
                assert!((&m * &k).is_zero());
                let kt = k.transpose();
                let kspan = brute_span(&kt);
                // every kernel vector is generated
                let all = brute_span(&ModMatrix::identity(&ring, 3));
                for x in all {
                    if m.apply(&x).iter().all(|&v| v == 0) {
                        assert!(kspan.contains(&x));
                    }
                }
            }
        }
    }

    #[test]
    fn solve_or_certify() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for d in [2u64, 6, 8, 12, 36, 7] {
            let ring = RingSpec::new(d).unwrap();
            for _ in 0..60 {
                let (r, c) = (rng.gen_range(1..5), rng.gen_range(1..5));
                let m = random_matrix(&mut rng, &ring, r, c);
                let b: Vec<u64> = (0..m.rows()).map(|_| rng.gen_range(0..d)).collect();
                match solve_linear(&m, &b) {
                    Ok(x) => assert_eq!(m.apply(&x), b),
                    Err(RingError::NoSolution { certificate: y }) => {
                        let ym = m.transpose().apply(&y);
                        assert!(ym.iter().all(|&v| v == 0));
                        let yb = y.iter().zip(&b).fold(0, |acc, (a, c)| (acc + a * c) % d);
                        assert_ne!(yb, 0);
                    }
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }
}
