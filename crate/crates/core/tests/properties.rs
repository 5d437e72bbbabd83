use proptest::prelude::*;
use rand::Rng;

use qca_witt::classify::{
    certify_trivial, delooping_index, formation_of, symmetric_to_gates, verify_certificate,
    Prelayer,
};
use qca_witt::forms::{
    are_complementary, hyperbolic, is_lagrangian, lagrangian_to_hyperbolic, trivial_formation_iso,
    Formation, Kind, Lagrangian,
};
use qca_witt::modring::{
    howell_form, idempotent_rank, kernel, same_row_span, solve_linear, ModMatrix, RingSpec,
};
use qca_witt::pauli::{commutation_exponent, pauli_mul, times_phase, PauliOp, PhaseSpec};
use qca_witt::qca::{register_on, CliffordQCA, Gate, GateScript, Space};
use qca_witt::random::{
    random_invertible, random_local_script, random_matrix, random_separated, random_symmetric,
    random_symplectic, rng_from_seed,
};
use qca_witt::symplectic::{
    decompose_transvections, decompose_transvections_lifted, recompose, Register,
};

const MODULI: [u64; 10] = [2, 3, 4, 5, 6, 8, 9, 12, 25, 36];

fn modulus() -> impl Strategy<Value = u64> {
    prop::sample::select(MODULI.to_vec())
}

fn ring(d: u64) -> RingSpec {
    RingSpec::new(d).unwrap()
}

fn line_register(space: &Space, d: u64) -> Register {
    register_on(space, &ring(d), vec![1; space.len()]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn howell_transforms_are_consistent(d in modulus(), seed: u64, rows in 1usize..5, cols in 1usize..5) {
        let mut rng = rng_from_seed(seed);
        let m = random_matrix(&mut rng, &ring(d), rows, cols);
        let hf = howell_form(&m);
        prop_assert_eq!(&(&hf.transform * &m), &hf.h);
        prop_assert_eq!(&(&hf.back * &hf.h), &m);
        prop_assert!(same_row_span(&m, &hf.h));
    }

    #[test]
    fn solvable_systems_are_solved(d in modulus(), seed: u64, rows in 1usize..5, cols in 1usize..5) {
        let mut rng = rng_from_seed(seed);
        let r = ring(d);
        let m = random_matrix(&mut rng, &r, rows, cols);
        let x: Vec<u64> = (0..cols).map(|_| rng.gen_range(0..d)).collect();
        let b = m.apply(&x);
        let y = solve_linear(&m, &b).unwrap();
        prop_assert_eq!(m.apply(&y), b);
        let k = kernel(&m);
        prop_assert!((&m * &k).is_zero());
    }

    #[test]
    fn crt_split_and_join_are_inverse(d in modulus(), x: u64) {
        let r = ring(d);
        let x = x % d;
        prop_assert_eq!(r.crt_join(&r.crt_split(x)), x);
    }

    #[test]
    fn conjugated_projections_keep_their_rank(d in modulus(), seed: u64, n in 1usize..6) {
        let mut rng = rng_from_seed(seed);
        let r = ring(d);
        let k = rng.gen_range(0..=n);
        let diag: Vec<i64> = (0..n).map(|i| i64::from(i < k)).collect();
        let s = random_invertible(&mut rng, &r, n);
        let p = &(&s * &ModMatrix::diagonal(&r, &diag)) * &s.inverse().unwrap();
        prop_assert_eq!(&(&p * &p), &p);
        for &f in r.factors() {
            prop_assert_eq!(idempotent_rank(&p, f).unwrap(), k);
        }
    }

    #[test]
    fn commutation_law_holds(d in modulus(), seed: u64, n in 1usize..7) {
        let mut rng = rng_from_seed(seed);
        let ps = PhaseSpec::new(d);
        let mut random = || PauliOp {
            phase: rng.gen_range(0..ps.m()),
            vec: (0..2 * n).map(|_| rng.gen_range(0..d)).collect(),
        };
        let (p, q) = (random(), random());
        let w = commutation_exponent(&ps, &p, &q).unwrap();
        let lhs = times_phase(&ps, &pauli_mul(&ps, &p, &q).unwrap(), ps.twist(w));
        prop_assert_eq!(lhs, pauli_mul(&ps, &q, &p).unwrap());
    }

    #[test]
    fn transvections_recompose(d in modulus(), seed: u64, n in 1usize..5) {
        let mut rng = rng_from_seed(seed);
        let reg = Register::qudits(&ring(d), n);
        let s = random_symplectic(&mut rng, &reg, 8 * n);
        let lifted = decompose_transvections_lifted(&s).unwrap();
        prop_assert_eq!(&recompose(&lifted, &reg), &s);
        if reg.ring().is_local() {
            let list = decompose_transvections(&s, reg.ring().factors()[0]).unwrap();
            prop_assert!(list.len() <= 4 * n);
            prop_assert_eq!(&recompose(&list, &reg), &s);
        }
    }

    #[test]
    fn images_of_lagrangians_split(d in modulus(), seed: u64, r in 1usize..4) {
        let mut rng = rng_from_seed(seed);
        let rs = ring(d);
        let (form, l) = hyperbolic(&rs, r, -1, Kind::Symmetric);
        let reg = Register::qudits(&rs, r);
        let s = random_symplectic(&mut rng, &reg, 6 * r);
        let xz = qca_witt::symplectic::XZBlocks::from_site_major(s.matrix()).joined();
        let g = l.image(&xz).unwrap();
        prop_assert!(is_lagrangian(&g, &form));
        let phi = lagrangian_to_hyperbolic(&form, &g).unwrap();
        prop_assert!(form.pullback(&phi).same_class(&form));
        let dual = Lagrangian::standard_dual(&rs, r).image(&xz).unwrap();
        prop_assert!(are_complementary(&g, &dual, &form));
        let fm = Formation::new(form.clone(), g, dual).unwrap();
        prop_assert!(trivial_formation_iso(&fm).is_ok());
    }

    #[test]
    fn qca_inverse_and_json(d in modulus(), seed: u64, len in 4usize..12) {
        let mut rng = rng_from_seed(seed);
        let space = Space::ring(len);
        let reg = line_register(&space, d);
        let script = random_local_script(&mut rng, &space, d, 2);
        let q = CliffordQCA::from_gates(&script, &space, &reg).unwrap();
        prop_assert!(q.tight_radius() <= q.radius());
        prop_assert!(q.compose(&q.inverse()).unwrap().map().is_identity());
        let text = serde_json::to_string(&q).unwrap();
        let back: CliffordQCA = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, q);
    }

    #[test]
    fn symmetric_matrices_become_lower_blocks(d in modulus(), seed: u64, len in 1usize..8) {
        let mut rng = rng_from_seed(seed);
        let space = Space::line(len);
        let reg = line_register(&space, d);
        let c = random_symmetric(&mut rng, reg.ring(), len);
        let q = CliffordQCA::from_gates(&symmetric_to_gates(&c, &space, &reg).unwrap(), &space, &reg)
            .unwrap();
        let b = q.blocks();
        prop_assert!(b.a.is_identity() && b.b.is_zero() && b.d.is_identity());
        prop_assert_eq!(b.c, c);
    }

    #[test]
    fn trivial_qcas_are_certified(d in modulus(), seed: u64, len in 4usize..20) {
        let mut rng = rng_from_seed(seed);
        let space = Space::line(len);
        let reg = line_register(&space, d);
        let script = random_local_script(&mut rng, &space, d, 2);
        let alpha = CliffordQCA::from_gates(&script, &space, &reg)
            .unwrap()
            .compose(&random_separated(&mut rng, &space, &reg))
            .unwrap();
        let cert = certify_trivial(&alpha, Prelayer::Auto).unwrap();
        prop_assert!(verify_certificate(&cert).unwrap().passed());
        let text = serde_json::to_string(&cert).unwrap();
        let back: qca_witt::classify::TrivialityCertificate = serde_json::from_str(&text).unwrap();
        prop_assert!(verify_certificate(&back).unwrap().passed());
    }

    #[test]
    fn formation_of_a_circuit_is_well_formed(d in modulus(), seed: u64, len in 2usize..10) {
        let mut rng = rng_from_seed(seed);
        let space = Space::line(len);
        let reg = line_register(&space, d);
        let script = random_local_script(&mut rng, &space, d, 1);
        let q = CliffordQCA::from_gates(&script, &space, &reg).unwrap();
        let fm = formation_of(&q).unwrap();
        prop_assert!(is_lagrangian(fm.g(), fm.form()));
    }

    #[test]
    fn index_counts_the_shift(d in modulus(), seed: u64, s in -2i64..=2, cut in 0usize..24) {
        let mut rng = rng_from_seed(seed);
        let space = Space::ring(24);
        let reg = line_register(&space, d);
        let script = random_local_script(&mut rng, &space, d, 1)
            .then(GateScript::new(vec![vec![Gate::translation(&space, s)]]));
        let q = CliffordQCA::from_gates(&script, &space, &reg).unwrap();
        let index = delooping_index(&q, cut).unwrap();
        prop_assert!(index.factors.values().all(|&v| v == 2 * s));
        prop_assert_eq!(delooping_index(&q.inverse(), cut).unwrap(), index.neg());
    }
}
