//! Property suites for the nine acceptance criteria, shared by the CLI and the tests.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classify::{
    certify_trivial, delooping_index, delooping_index_with_band, same_formation_equivalence,
    symmetric_to_gates, verify_certificate, Prelayer,
};
use crate::forms::{
    are_complementary, hyperbolic, is_lagrangian, lagrangian_to_hyperbolic, trivial_formation_iso,
    Formation, Kind, Lagrangian,
};
use crate::modring::{idempotent_rank, kernel, ModMatrix, RingSpec};
use crate::pauli::{
    commutation_exponent, dense_oracle_check, pauli_mul, times_phase, DenseFactor, GateTable,
    PauliOp, PhaseSpec, QuditGate,
};
use crate::qca::{register_on, CliffordQCA, Gate, GateScript, Space};
use crate::random::{
    random_invertible, random_local_script, random_separated, random_symplectic, rng_from_seed,
};
use crate::symplectic::{
    decompose_transvections, decompose_transvections_lifted, recompose, Register, Transvection,
};

pub const CRITERIA: [(u8, &str); 9] = [
    (1, "Pauli engine agrees with the dense oracle"),
    (2, "commutation law"),
    (3, "transvection decomposition recomposes"),
    (4, "symmetric matrices to phase and CZ gates"),
    (5, "factorization certificates"),
    (6, "delooping index"),
    (7, "Lagrangian machinery"),
    (8, "formation well-definedness"),
    (9, "CRT coherence"),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
}

type Suite = fn(&mut ChaCha8Rng) -> Result<String, String>;

fn suite(id: u8) -> Option<Suite> {
    Some(match id {
        1 => pauli_oracle,
        2 => commutation,
        3 => transvections,
        4 => symmetric_gates,
        5 => certificates,
        6 => index,
        7 => lagrangians,
        8 => formations,
        9 => crt,
        _ => return None,
    })
}

/// Run one criterion with a generator seeded from `seed` and the criterion number.
pub fn run_criterion(id: u8, seed: u64) -> Option<CriterionOutcome> {
    let name = CRITERIA.iter().find(|(i, _)| *i == id)?.1.to_string();
    let run = suite(id)?;
    let mut rng = rng_from_seed(seed ^ (u64::from(id) << 32));
    let start = Instant::now();
    let result = run(&mut rng);
    let elapsed_ms = start.elapsed().as_millis();
    let (passed, detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Some(CriterionOutcome {
        id,
        name,
        passed,
        detail,
        elapsed_ms,
    })
}

pub fn run_all(seed: u64) -> Vec<CriterionOutcome> {
    CRITERIA
        .iter()
        .filter_map(|&(id, _)| run_criterion(id, seed))
        .collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took <= limit, || {
        format!("{what} took {took:?}, limit {limit:?}")
    })
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn line_register(space: &Space, d: u64, k: usize) -> Register {
    let ring = RingSpec::new(d).expect("valid modulus");
    register_on(space, &ring, vec![k; space.len()]).expect("matching lengths")
}

fn pauli_oracle(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let start = Instant::now();
    let mut tables = 0;
    let mut words = 0;
    for d in [2u64, 3, 4, 5] {
        for n in 1..=3usize {
            if d.pow(n as u32) > 128 {
                continue;
            }
            let mut gates = Vec::new();
            for q in 0..n {
                gates.push(QuditGate::H(q));
                for p in 1..d {
                    gates.push(QuditGate::P(q, p));
                }
                for b in 0..n {
                    if b != q {
                        for c in 1..d {
                            gates.push(QuditGate::CZ(q, b, c));
                        }
                    }
                }
            }
            for g in &gates {
                let f = DenseFactor::gate(d, n, g).map_err(err)?;
                let ok = dense_oracle_check(&g.table(d, n), Some(&[f])).map_err(err)?;
                ensure(ok, || format!("d={d} n={n}: table of {g:?} disagrees"))?;
                tables += 1;
            }
            for _ in 0..200 {
                let len = rng.gen_range(1..=6);
                let word: Vec<QuditGate> = (0..len)
                    .map(|_| gates[rng.gen_range(0..gates.len())].clone())
                    .collect();
                let mut table = GateTable::identity(d, n);
                let mut factors = Vec::new();
                for g in &word {
                    table = g.table(d, n).after(&table).map_err(err)?;
                    factors.push(DenseFactor::gate(d, n, g).map_err(err)?);
                }
                let ok = dense_oracle_check(&table, Some(&factors)).map_err(err)?;
                ensure(ok, || format!("d={d} n={n}: word {word:?} disagrees"))?;
                words += 1;
            }
        }
    }
    within(start, Duration::from_secs(10), "oracle suite")?;
    Ok(format!("{tables} gate tables and {words} words match"))
}

fn commutation(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut pairs = 0;
    for d in [2u64, 3, 4, 6, 8, 9] {
        let ps = PhaseSpec::new(d);
        for _ in 0..10_000 {
            let n = rng.gen_range(1..=6);
            let mut random = || PauliOp {
                phase: rng.gen_range(0..ps.m()),
                vec: (0..2 * n).map(|_| rng.gen_range(0..d)).collect(),
            };
            let (p, q) = (random(), random());
            let w = commutation_exponent(&ps, &p, &q).map_err(err)?;
            let lhs = times_phase(&ps, &pauli_mul(&ps, &p, &q).map_err(err)?, ps.twist(w));
            let rhs = pauli_mul(&ps, &q, &p).map_err(err)?;
            ensure(lhs == rhs, || {
                format!("d={d}: {p:?} and {q:?} violate the law")
            })?;
            pairs += 1;
        }
    }
    Ok(format!(
        "{pairs} pairs satisfy xi^twist(Omega(p,q)) p q = q p"
    ))
}

fn transvections(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let start = Instant::now();
    let mut total = 0;
    let mut longest = 0;
    for d in [2u64, 3, 4, 5, 8, 9] {
        let ring = RingSpec::new(d).map_err(err)?;
        let factor = ring.factors()[0];
        for _ in 0..500 {
            let n = rng.gen_range(1..=4);
            let reg = Register::qudits(&ring, n);
            let gates = rng.gen_range(0..=12 * n);
            let s = random_symplectic(rng, &reg, gates);
            let list = decompose_transvections(&s, factor).map_err(err)?;
            ensure(list.len() <= 4 * n, || {
                format!("d={d}: {} transvections for N={n}", list.len())
            })?;
            ensure(recompose(&list, &reg) == s, || {
                format!("d={d}: recomposition differs")
            })?;
            longest = longest.max(list.len());
            total += 1;
        }
    }
    within(start, Duration::from_secs(60), "transvection suite")?;
    Ok(format!(
        "{total} matrices recompose exactly, longest list {longest}"
    ))
}

fn banded_symmetric(rng: &mut ChaCha8Rng, ring: &RingSpec, n: usize, band: usize) -> ModMatrix {
    let d = ring.modulus();
    let mut c = ModMatrix::zeros(ring, n, n);
    for i in 0..n {
        for j in i..n.min(i + band + 1) {
            let v = rng.gen_range(0..d);
            c.set(i, j, v);
            c.set(j, i, v);
        }
    }
    c
}

fn symmetric_gates(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let space = Space::line(32);
    let mut total = 0;
    for d in [2u64, 3, 5, 9] {
        let reg = line_register(&space, d, 1);
        for _ in 0..200 {
            let band = rng.gen_range(0..=3);
            let c = banded_symmetric(rng, reg.ring(), 32, band);
            let script = symmetric_to_gates(&c, &space, &reg).map_err(err)?;
            let q = CliffordQCA::from_gates(&script, &space, &reg).map_err(err)?;
            let b = q.blocks();
            let ok = b.a.is_identity() && b.b.is_zero() && b.c == c && b.d.is_identity();
            ensure(ok, || format!("d={d}: blocks differ from (I, 0; C, I)"))?;
            total += 1;
        }
    }
    Ok(format!(
        "{total} banded symmetric matrices realized exactly"
    ))
}

/// `separated` after a random local circuit with two CZ layers: radius at most 3.
fn random_trivial_qca(
    rng: &mut ChaCha8Rng,
    space: &Space,
    reg: &Register,
) -> Result<CliffordQCA, String> {
    let script = random_local_script(rng, space, reg.modulus(), 2);
    let circuit = CliffordQCA::from_gates(&script, space, reg).map_err(err)?;
    let sep = random_separated(rng, space, reg);
    circuit.compose(&sep).map_err(err)
}

fn certificates(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let space = Space::line(64);
    let moduli = [2u64, 3, 4, 5, 6, 8, 9, 12];
    let mut prelayers = 0;
    for i in 0..200 {
        let d = moduli[i % moduli.len()];
        let reg = line_register(&space, d, 1);
        let alpha = random_trivial_qca(rng, &space, &reg)?;
        ensure(alpha.radius() <= 3, || {
            format!("instance {i} has radius {}", alpha.radius())
        })?;
        let start = Instant::now();
        let cert = certify_trivial(&alpha, Prelayer::Auto)
            .map_err(|e| format!("instance {i} (d={d}): {e}"))?;
        let report = verify_certificate(&cert).map_err(err)?;
        ensure(report.passed(), || {
            format!("instance {i}: {:?}", report.first_failure())
        })?;
        within(start, Duration::from_secs(1), "one certificate")?;
        if !cert.prelayer.is_empty() {
            prelayers += 1;
        }
    }
    Ok(format!(
        "200 certificates recompose exactly, each within 1 s, {prelayers} with a pre-layer"
    ))
}

fn shift_qca(space: &Space, reg: &Register, s: i64) -> Result<CliffordQCA, String> {
    let script = GateScript::new(vec![vec![Gate::translation(space, s)]]);
    CliffordQCA::from_gates(&script, space, reg).map_err(err)
}

fn expect_index(
    alpha: &CliffordQCA,
    cut: usize,
    expected: &BTreeMap<u64, i64>,
    what: &str,
) -> Result<(), String> {
    let got = delooping_index(alpha, cut).map_err(|e| format!("{what}: {e}"))?;
    ensure(&got.factors == expected, || {
        format!("{what}: index {:?}, expected {expected:?}", got.factors)
    })
}

fn per_factor(ring: &RingSpec, v: i64) -> BTreeMap<u64, i64> {
    ring.factors().iter().map(|f| (f.value(), v)).collect()
}

fn index(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut checks = 0;
    for d in [2u64, 3, 6, 9] {
        let space = Space::ring(16);
        let reg = line_register(&space, d, 1);
        let id = CliffordQCA::identity(&space, &reg).map_err(err)?;
        for cut in 0..16 {
            expect_index(&id, cut, &per_factor(reg.ring(), 0), "identity")?;
            checks += 1;
        }
    }
    for d in [2u64, 3, 4, 5, 8, 9, 25, 27] {
        for s in 1..=3i64 {
            for k in 1..=2usize {
                let space = Space::ring(24);
                let reg = line_register(&space, d, k);
                let alpha = shift_qca(&space, &reg, s)?;
                let expected = per_factor(reg.ring(), 2 * s * k as i64);
                expect_index(&alpha, rng.gen_range(0..24), &expected, "shift")?;
                checks += 1;
            }
        }
    }
    let space = Space::ring(48);
    let moduli = [2u64, 3, 4, 5, 6, 9, 12];
    for i in 0..50 {
        let d = moduli[i % moduli.len()];
        let reg = line_register(&space, d, 1);
        let layers = rng.gen_range(1..=3);
        let script = random_local_script(rng, &space, d, layers);
        let c = CliffordQCA::from_gates(&script, &space, &reg).map_err(err)?;
        expect_index(
            &c,
            rng.gen_range(0..48),
            &per_factor(reg.ring(), 0),
            "circuit",
        )?;
        checks += 1;
    }
    let random_flow =
        |rng: &mut ChaCha8Rng, reg: &Register| -> Result<(CliffordQCA, i64), String> {
            let s = rng.gen_range(-2..=2i64);
            let script = random_local_script(rng, &space, reg.modulus(), 2);
            let c = CliffordQCA::from_gates(&script, &space, reg).map_err(err)?;
            Ok((c.compose(&shift_qca(&space, reg, s)?).map_err(err)?, 2 * s))
        };
    for i in 0..200 {
        let d = moduli[i % moduli.len()];
        let reg = line_register(&space, d, 1);
        let (alpha, fa) = random_flow(rng, &reg)?;
        let (beta, _) = random_flow(rng, &reg)?;
        let cut = rng.gen_range(0..48);
        let ia = delooping_index(&alpha, cut).map_err(err)?;
        let ib = delooping_index(&beta, cut).map_err(err)?;
        ensure(ia.factors == per_factor(reg.ring(), fa), || {
            format!("pair {i}: alpha index {ia:?}")
        })?;
        let ab = alpha.compose(&beta).map_err(err)?;
        let iab = delooping_index(&ab, cut).map_err(err)?;
        ensure(iab == ia.add(&ib), || format!("pair {i}: not additive"))?;
        ensure(
            delooping_index(&alpha.inverse(), cut).map_err(err)? == ia.neg(),
            || format!("pair {i}: inverse does not negate"),
        )?;
        checks += 3;
        if i < 20 {
            for other in 0..48 {
                ensure(delooping_index(&alpha, other).map_err(err)? == ia, || {
                    format!("pair {i}: cut {other} differs from cut {cut}")
                })?;
            }
            let r = alpha
                .tight_radius()
                .max(alpha.inverse().tight_radius())
                .max(1);
            for w in [2 * r, 3 * r, 4 * r] {
                let iw = delooping_index_with_band(&alpha, cut, w).map_err(err)?;
                ensure(iw == ia, || format!("pair {i}: band {w} differs"))?;
            }
            checks += 51;
        }
    }
    Ok(format!("{checks} exact index checks"))
}

/// Elements of a submodule, sorted, with two generators.
type Submodule = (Vec<(u64, u64)>, [(u64, u64); 2]);

/// All submodules of `Z_d^2`.
fn submodules(d: u64) -> Vec<Submodule> {
    let mut out: Vec<Submodule> = Vec::new();
    let vectors: Vec<(u64, u64)> = (0..d).flat_map(|a| (0..d).map(move |b| (a, b))).collect();
    for &u in &vectors {
        for &v in &vectors {
            let mut elems: Vec<(u64, u64)> = (0..d)
                .flat_map(|x| {
                    (0..d).map(move |y| ((x * u.0 + y * v.0) % d, (x * u.1 + y * v.1) % d))
                })
                .collect();
            elems.sort();
            elems.dedup();
            if !out.iter().any(|(e, _)| *e == elems) {
                out.push((elems, [u, v]));
            }
        }
    }
    out
}

fn lagrangians(_rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut verified_pairs = 0;
    for d in [2u64, 3] {
        let ring = RingSpec::new(d).map_err(err)?;
        let (h, _) = hyperbolic(&ring, 1, -1, Kind::Symmetric);
        let omega = |x: (u64, u64), y: (u64, u64)| (x.0 * y.1 + (d - x.1) * y.0) % d;
        let all = submodules(d);
        let mut found = Vec::new();
        for (elems, gens) in &all {
            let perp: Vec<(u64, u64)> = (0..d)
                .flat_map(|a| (0..d).map(move |b| (a, b)))
                .filter(|&x| elems.iter().all(|&v| omega(x, v) == 0))
                .collect();
            let brute = perp == *elems;
            let g = ModMatrix::from_rows(
                &ring,
                &[
                    vec![gens[0].0 as i64, gens[1].0 as i64],
                    vec![gens[0].1 as i64, gens[1].1 as i64],
                ],
            );
            let engine = match Lagrangian::new(&g) {
                Ok(l) => is_lagrangian(&l, &h),
                Err(_) => false,
            };
            ensure(brute == engine, || {
                format!("d={d}: submodule {elems:?} misclassified")
            })?;
            if brute {
                found.push(Lagrangian::new(&g).map_err(err)?);
            }
        }
        ensure(found.len() as u64 == d + 1, || {
            format!("d={d}: {} Lagrangians", found.len())
        })?;
        for f in &found {
            for g in &found {
                if are_complementary(f, g, &h) {
                    lagrangian_to_hyperbolic(&h, f).map_err(err)?;
                    lagrangian_to_hyperbolic(&h, g).map_err(err)?;
                    let fm = Formation::new(h.clone(), f.clone(), g.clone()).map_err(err)?;
                    trivial_formation_iso(&fm).map_err(err)?;
                    verified_pairs += 1;
                }
            }
        }
    }
    Ok(format!(
        "3 and 4 Lagrangians found; {verified_pairs} complementary pairs verified"
    ))
}

/// Product of a separated part and `H_Q L(S) H_Q`, which fixes the X summand.
fn random_upper(
    rng: &mut ChaCha8Rng,
    space: &Space,
    reg: &Register,
) -> Result<CliffordQCA, String> {
    let n = space.len();
    let d = reg.modulus();
    let touched: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
    let hs: Vec<Gate> = touched.iter().map(|&q| Gate::h(q.to_string(), 0)).collect();
    let mut middle = Vec::new();
    let mut i = 0;
    while i < touched.len() {
        let q = touched[i];
        if i + 1 < touched.len() && touched[i + 1] == q + 1 && rng.gen_bool(0.5) {
            let c = rng.gen_range(1..d) as i64;
            middle.push(Gate::cz(
                crate::qca::Site::new(q.to_string(), 0),
                crate::qca::Site::new((q + 1).to_string(), 0),
                c,
            ));
            i += 2;
        } else {
            middle.push(Gate::p(q.to_string(), 0, rng.gen_range(0..d) as i64));
            i += 1;
        }
    }
    let script = GateScript::new(vec![hs.clone(), middle, hs]);
    let upper = CliffordQCA::from_gates(&script, space, reg).map_err(err)?;
    ensure(upper.blocks().c.is_zero(), || "upper factor moves L".into())?;
    random_separated(rng, space, reg)
        .compose(&upper)
        .map_err(err)
}

fn formations(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let space = Space::line(16);
    let moduli = [2u64, 3, 4, 5, 6, 9];
    for i in 0..100 {
        let d = moduli[i % moduli.len()];
        let reg = line_register(&space, d, 1);
        let script = random_local_script(rng, &space, d, 2);
        let alpha = CliffordQCA::from_gates(&script, &space, &reg).map_err(err)?;
        let u = random_upper(rng, &space, &reg)?;
        let beta = u.compose(&alpha).map_err(err)?;
        let cert =
            same_formation_equivalence(&alpha, &beta).map_err(|e| format!("pair {i}: {e}"))?;
        let gamma = alpha.compose(&beta.inverse()).map_err(err)?;
        ensure(cert.target.matrix() == gamma.matrix(), || {
            format!("pair {i}: wrong target")
        })?;
        let report = verify_certificate(&cert).map_err(err)?;
        ensure(report.passed(), || {
            format!("pair {i}: {:?}", report.first_failure())
        })?;
    }
    Ok("100 certificates for beta^-1 alpha recompose exactly".into())
}

fn nontrivial(t: &Transvection, ring: &RingSpec) -> bool {
    ring.reduce(t.c as i64) != 0 && t.u.iter().any(|&x| x % ring.modulus() != 0)
}

fn crt(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut checks = 0;
    for d in [6u64, 12, 36] {
        let ring = RingSpec::new(d).map_err(err)?;
        let space = Space::ring(32);
        let reg = line_register(&space, d, 1);
        for i in 0..100 {
            // delooping index
            let s = rng.gen_range(-2..=2i64);
            let script = random_local_script(rng, &space, d, 2);
            let alpha = CliffordQCA::from_gates(&script, &space, &reg)
                .map_err(err)?
                .compose(&shift_qca(&space, &reg, s)?)
                .map_err(err)?;
            let cut = rng.gen_range(0..32);
            let joined = delooping_index(&alpha, cut).map_err(err)?;
            for &f in ring.factors() {
                let local = delooping_index(&alpha.reduce_mod(&f.ring()), cut).map_err(err)?;
                ensure(
                    local.factors.get(&f.value()) == joined.factors.get(&f.value()),
                    || format!("d={d} instance {i}: index at {f} differs"),
                )?;
            }

            // idempotent ranks of a CRT-joined idempotent
            let size = rng.gen_range(1..=6);
            let mut parts = Vec::new();
            let mut ranks = Vec::new();
            for &f in ring.factors() {
                let fr = f.ring();
                let r = rng.gen_range(0..=size);
                let diag: Vec<i64> = (0..size).map(|j| i64::from(j < r)).collect();
                let sm = random_invertible(rng, &fr, size);
                let p = &(&sm * &ModMatrix::diagonal(&fr, &diag)) * &sm.inverse().map_err(err)?;
                parts.push(p);
                ranks.push(r);
            }
            let p = ModMatrix::crt_join(&ring, &parts);
            for (&f, &r) in ring.factors().iter().zip(&ranks) {
                let got = idempotent_rank(&p, f).map_err(err)?;
                ensure(got == r, || {
                    format!("d={d} instance {i}: rank {got} at {f}, expected {r}")
                })?;
            }

            // kernels
            let (rows, cols) = (rng.gen_range(1..=4), rng.gen_range(1..=5));
            let m = crate::random::random_matrix(rng, &ring, rows, cols);
            let k = kernel(&m);
            for &f in ring.factors() {
                let local = kernel(&m.reduce_to(f));
                let lifted = k.reduce_to(f);
                let same = crate::modring::same_row_span(&local.transpose(), &lifted.transpose());
                ensure(same, || {
                    format!("d={d} instance {i}: kernel differs at {f}")
                })?;
            }

            // transvection decompositions
            let n = rng.gen_range(1..=4);
            let sreg = Register::qudits(&ring, n);
            let sym = random_symplectic(rng, &sreg, 10 * n);
            let lifted = decompose_transvections_lifted(&sym).map_err(err)?;
            ensure(recompose(&lifted, &sreg) == sym, || {
                format!("d={d} instance {i}: lifted list")
            })?;
            for &f in ring.factors() {
                let fr = f.ring();
                let local = decompose_transvections(&sym, f).map_err(err)?;
                let reduced: Vec<Transvection> = lifted
                    .iter()
                    .map(|t| Transvection {
                        u: t.u.iter().map(|&x| x % fr.modulus()).collect(),
                        c: t.c % fr.modulus(),
                    })
                    .filter(|t| nontrivial(t, &fr))
                    .collect();
                ensure(reduced == local, || {
                    format!("d={d} instance {i}: transvections at {f}")
                })?;
            }
            checks += 4;
        }
    }
    Ok(format!(
        "{checks} instance families agree with their per-factor parts"
    ))
}
