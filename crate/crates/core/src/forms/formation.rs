use rand::Rng;
use serde::{Deserialize, Serialize};

use super::lagrangian::{are_complementary, is_lagrangian, lagrangian_to_hyperbolic, Lagrangian};
use super::{hyperbolic, is_nonsingular, EpsForm, FormError, Kind};
use crate::modring::{is_free_summand, ModMatrix};
use crate::random::rng_from_seed;

/// A nonsingular form with an ordered pair of Lagrangians.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formation {
    form: EpsForm,
    f: Lagrangian,
    g: Lagrangian,
}

impl Formation {
    pub fn new(form: EpsForm, f: Lagrangian, g: Lagrangian) -> Result<Self, FormError> {
        if !is_nonsingular(&form) {
            return Err(FormError::BadForm("formation form is singular".into()));
        }
        if !is_lagrangian(&f, &form) {
            return Err(FormError::NotLagrangian("F".into()));
        }
        if !is_lagrangian(&g, &form) {
            return Err(FormError::NotLagrangian("G".into()));
        }
        Ok(Formation { form, f, g })
    }

    pub fn form(&self) -> &EpsForm {
        &self.form
    }

    pub fn f(&self) -> &Lagrangian {
        &self.f
    }

    pub fn g(&self) -> &Lagrangian {
        &self.g
    }

    pub fn is_trivial(&self) -> bool {
        are_complementary(&self.f, &self.g, &self.form)
    }
}

#[derive(Serialize, Deserialize)]
struct FormationJson {
    form: EpsForm,
    #[serde(rename = "F")]
    f: Lagrangian,
    #[serde(rename = "G")]
    g: Lagrangian,
}

impl Serialize for Formation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FormationJson {
            form: self.form.clone(),
            f: self.f.clone(),
            g: self.g.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Formation {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = FormationJson::deserialize(de)?;
        Formation::new(raw.form, raw.f, raw.g).map_err(serde::de::Error::custom)
    }
}

/// Bound on the number of candidate Lagrangians tried by [`find_common_complement`].
///
/// Without a seed, candidates are visited in lexicographic order; with a seed, a
/// search that cannot be exhaustive samples candidates at random instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_candidates: u64,
    pub seed: Option<u64>,
}

impl Budget {
    pub fn new(max_candidates: u64) -> Self {
        Budget {
            max_candidates,
            seed: None,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Budget {
            seed: Some(seed),
            ..self
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(100_000)
    }
}

/// An isomorphism of formations `(M, psi; F, G) -> (H_eps(F); F, F*)`.
///
/// With `h = [F | G]` and `e = F^T b G`, the map is `diag(I, e) h^{-1}`.
pub fn trivial_formation_iso(fm: &Formation) -> Result<ModMatrix, FormError> {
    if !fm.is_trivial() {
        return Err(FormError::NotComplementary);
    }
    let form = &fm.form;
    let ring = form.ring().clone();
    let r = fm.f.rank();
    let (bf, bg) = (fm.f.basis(), fm.g.basis());
    let h = bf.hstack(bg);
    let h_inv = h.inverse().map_err(|_| FormError::NotComplementary)?;
    let e = &(&bf.transpose() * &form.bilinear()) * bg;
    let u = ModMatrix::identity(&ring, r).block_diag(&e);
    let phi = &u * &h_inv;

    let (hyp, l) = hyperbolic(&ring, r, form.epsilon(), form.kind());
    let dual = Lagrangian::standard_dual(&ring, r);
    let phi_inv = phi
        .inverse()
        .map_err(|_| FormError::InvariantViolated("formation map is singular".into()))?;
    if !hyp.pullback(&phi).same_class(form)
        || fm.f.image(&phi)? != l
        || fm.g.image(&phi)? != dual
        || l.image(&phi_inv)? != fm.f
    {
        return Err(FormError::InvariantViolated(
            "trivial formation map fails checks".into(),
        ));
    }
    Ok(phi)
}

/// The admissible values of one entry of `S` in a complement `[S; I]` of the standard
/// Lagrangian of the hyperbolic form.
fn entry_values(d: u64, eps: i64, kind: Kind, diagonal: bool) -> Vec<u64> {
    if !diagonal {
        return (0..d).collect();
    }
    match (eps, kind) {
        (-1, Kind::Symmetric) => (0..d).collect(),
        (-1, Kind::Quadratic) => (0..d).filter(|x| d % 2 == 1 || x % 2 == 0).collect(),
        (_, Kind::Symmetric) => (0..d).filter(|x| 2 * x % d == 0).collect(),
        _ => vec![0],
    }
}

struct Candidates {
    d: u64,
    eps: i64,
    r: usize,
    slots: Vec<(usize, usize)>,
    values: Vec<Vec<u64>>,
}

impl Candidates {
    fn new(d: u64, eps: i64, kind: Kind, r: usize) -> Self {
        let mut slots = Vec::new();
        let mut values = Vec::new();
        for i in 0..r {
            for j in 0..=i {
                slots.push((i, j));
                values.push(entry_values(d, eps, kind, i == j));
            }
        }
        Candidates {
            d,
            eps,
            r,
            slots,
            values,
        }
    }

    fn total(&self) -> Option<u64> {
        self.values
            .iter()
            .try_fold(1u64, |acc, v| acc.checked_mul(v.len() as u64))
    }

    fn matrix(&self, ring: &crate::modring::RingSpec, choice: &[usize]) -> ModMatrix {
        let mut s = ModMatrix::zeros(ring, self.r, self.r);
        for (t, &(i, j)) in self.slots.iter().enumerate() {
            let v = self.values[t][choice[t]];
            s.set(i, j, v);
            if i != j {
                let mirror = if self.eps == -1 {
                    v
                } else {
                    (self.d - v) % self.d
                };
                s.set(j, i, mirror);
            }
        }
        s
    }
}

/// Searches for a Lagrangian complementary to both `F` and `G`.
///
/// Every complement of `F` is `phi [S; I]` for the hyperbolic basis `phi` of `F`, so
/// the candidates are parameterized by the admissible `S`.
pub fn find_common_complement(fm: &Formation, budget: Budget) -> Result<Lagrangian, FormError> {
    let form = &fm.form;
    let ring = form.ring().clone();
    let r = fm.f.rank();
    let phi = lagrangian_to_hyperbolic(form, &fm.f)?;
    let cands = Candidates::new(ring.modulus(), form.epsilon(), form.kind(), r);
    let total = cands.total();
    let exhaustive = total.is_some_and(|t| t <= budget.max_candidates);

    let lower = ModMatrix::identity(&ring, r);
    let try_choice = |choice: &[usize]| -> Result<Option<Lagrangian>, FormError> {
        let s = cands.matrix(&ring, choice);
        let l = Lagrangian::new(&(&phi * &s.vstack(&lower)))?;
        if are_complementary(&l, &fm.g, form) {
            if !is_lagrangian(&l, form) || !are_complementary(&l, &fm.f, form) {
                return Err(FormError::InvariantViolated(
                    "candidate is not a complement".into(),
                ));
            }
            return Ok(Some(l));
        }
        Ok(None)
    };

    let mut searched = 0u64;
    match budget.seed {
        Some(seed) if !exhaustive => {
            let mut rng = rng_from_seed(seed);
            while searched < budget.max_candidates {
                let choice: Vec<usize> = cands
                    .values
                    .iter()
                    .map(|v| rng.gen_range(0..v.len()))
                    .collect();
                searched += 1;
                if let Some(l) = try_choice(&choice)? {
                    return Ok(l);
                }
            }
        }
        _ => {
            let mut choice = vec![0usize; cands.slots.len()];
            loop {
                if searched >= budget.max_candidates {
                    break;
                }
                searched += 1;
                if let Some(l) = try_choice(&choice)? {
                    return Ok(l);
                }
                // odometer, last slot fastest
                let mut t = choice.len();
                loop {
                    if t == 0 {
                        return Err(FormError::NotFound { searched });
                    }
                    t -= 1;
                    choice[t] += 1;
                    if choice[t] < cands.values[t].len() {
                        break;
                    }
                    choice[t] = 0;
                }
            }
        }
    }
    if exhaustive {
        Err(FormError::NotFound { searched })
    } else {
        Err(FormError::BudgetExceeded { searched })
    }
}

/// Whether the projection of `G` onto `F` along `F̂` is a free direct summand of `F`.
pub fn elementary_criterion(fm: &Formation, fhat: &Lagrangian) -> Result<bool, FormError> {
    if !is_lagrangian(fhat, &fm.form) || !are_complementary(&fm.f, fhat, &fm.form) {
        return Err(FormError::NotAComplement);
    }
    let r = fm.f.rank();
    let coords =
        fm.f.basis()
            .hstack(fhat.basis())
            .inverse()
            .map_err(|_| FormError::NotAComplement)?;
    let projected = (&coords * fm.g.basis()).submatrix(0..r, 0..fm.g.rank());
    Ok(is_free_summand(&projected))
}
