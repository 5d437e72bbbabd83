use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{formation_of, hadamard_layer, site_of, symmetric_to_gates, ClassifyError};
use crate::modring::{mod_inverse, ModMatrix, PrimePower};
use crate::qca::{CliffordQCA, Gate, GateScript, Space};
use crate::symplectic::Register;
use crate::symplectic::{SymplecticMap, XZBlocks};

/// How to choose the qudits that get a Hadamard before factorizing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Prelayer {
    None,
    All,
    /// Qudits whose column of `A` vanishes.
    GreedyLocal,
    /// Complement of the first column basis of `A` over each residue field.
    Pivot,
    /// Every strategy above, in order.
    Auto,
}

impl fmt::Display for Prelayer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Prelayer::None => "none",
            Prelayer::All => "all",
            Prelayer::GreedyLocal => "greedy-local",
            Prelayer::Pivot => "pivot",
            Prelayer::Auto => "auto",
        })
    }
}

impl FromStr for Prelayer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "none" => Prelayer::None,
            "all" => Prelayer::All,
            "greedy-local" => Prelayer::GreedyLocal,
            "pivot" => Prelayer::Pivot,
            "auto" => Prelayer::Auto,
            other => return Err(format!("unknown pre-layer strategy {other:?}")),
        })
    }
}

/// `target` after the one-qudit gates of `prelayer` equals `separated` followed by `circuit`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrivialityCertificate {
    pub target: CliffordQCA,
    pub strategy: Prelayer,
    pub prelayer: GateScript,
    pub separated: CliffordQCA,
    pub circuit: GateScript,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub checks: Vec<(String, bool)>,
    pub max_gate_diameter: u64,
    pub target_radius: u64,
}

impl CertificateReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    pub fn first_failure(&self) -> Option<&str> {
        self.checks
            .iter()
            .find(|(_, ok)| !ok)
            .map(|(n, _)| n.as_str())
    }
}

/// Column indices of a basis of the column span of `a` over `F_p`, chosen left to right.
fn pivot_columns(a: &ModMatrix, p: u64) -> Vec<usize> {
    let n = a.rows();
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut chosen = Vec::new();
    for j in 0..a.cols() {
        let mut v: Vec<u64> = (0..n).map(|i| a.get(i, j) % p).collect();
        for (piv, b) in &basis {
            let x = v[*piv];
            if x != 0 {
                for i in 0..n {
                    v[i] = (v[i] + (p - x) * b[i]) % p;
                }
            }
        }
        if let Some(piv) = v.iter().position(|&x| x != 0) {
            let inv = mod_inverse(v[piv], p).expect("nonzero in a field");
            for x in v.iter_mut() {
                *x = *x * inv % p;
            }
            basis.push((piv, v));
            chosen.push(j);
        }
    }
    chosen
}

/// Candidate pre-layers, each given as one qudit set per prime-power factor.
fn candidate_sets(
    strategy: Prelayer,
    blocks: &XZBlocks,
    factors: &[PrimePower],
) -> Vec<Vec<Vec<usize>>> {
    let n = blocks.n();
    let a = &blocks.a;
    let uniform = |s: Vec<usize>| vec![s; factors.len()];
    let mut out = Vec::new();
    let push = |s: Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>| {
        if !out.contains(&s) {
            out.push(s);
        }
    };
    if matches!(strategy, Prelayer::None | Prelayer::Auto) {
        push(uniform(vec![]), &mut out);
    }
    if matches!(strategy, Prelayer::All | Prelayer::Auto) {
        push(uniform((0..n).collect()), &mut out);
    }
    if matches!(strategy, Prelayer::GreedyLocal | Prelayer::Auto) {
        push(
            uniform(
                (0..n)
                    .filter(|&q| (0..n).all(|i| a.get(i, q) == 0))
                    .collect(),
            ),
            &mut out,
        );
    }
    if matches!(strategy, Prelayer::Pivot | Prelayer::Auto) {
        let per_factor = factors
            .iter()
            .map(|f| {
                let keep = pivot_columns(a, f.p);
                (0..n).filter(|q| !keep.contains(q)).collect()
            })
            .collect();
        push(per_factor, &mut out);
    }
    out
}

/// One-qudit gates acting as a Hadamard on the qudits of `sets[i]` modulo the `i`-th
/// factor and trivially modulo the others.
///
/// A qudit that needs a Hadamard modulo only some factors gets
/// `P(e) H P(e) H^3 P(e)` with `e` the CRT idempotent of those factors.
pub fn prelayer_script(space: &Space, reg: &Register, sets: &[Vec<usize>]) -> GateScript {
    let ring = reg.ring();
    let n = reg.n_qudits();
    let mut layers: Vec<Vec<Gate>> = Vec::new();
    let mut put = |t: usize, g: Gate| {
        while layers.len() <= t {
            layers.push(Vec::new());
        }
        layers[t].push(g);
    };
    for q in 0..n {
        let mask: Vec<bool> = sets.iter().map(|s| s.contains(&q)).collect();
        if !mask.iter().any(|&b| b) {
            continue;
        }
        let site = site_of(space, reg, q);
        let h = || Gate::h(site.cell.clone(), site.qudit);
        if mask.iter().all(|&b| b) {
            put(0, h());
            continue;
        }
        let parts: Vec<u64> = mask.iter().map(|&b| u64::from(b)).collect();
        let e = ring.crt_join(&parts) as i64;
        let p = || Gate::p(site.cell.clone(), site.qudit, e);
        for (t, g) in [p(), h(), p(), h(), h(), h(), p()].into_iter().enumerate() {
            put(t, g);
        }
    }
    GateScript {
        d: Some(reg.modulus()),
        layers,
    }
}

/// Factor `alpha H_S = L(K) U(T) Sep(A)`, where `H_S` is the pre-layer, with `K = C A^{-1}` and `T = B A^T`, and realize
/// `U(T) = H_Q L(-T) H_Q (-1_Q)` on the qudits `Q` touched by `T`.
pub fn certify_trivial(
    alpha: &CliffordQCA,
    strategy: Prelayer,
) -> Result<TrivialityCertificate, ClassifyError> {
    let ring = alpha.ring().clone();
    let space = alpha.space();
    let reg = alpha.register();
    let n = reg.n_qudits();
    let blocks = alpha.blocks();
    let mut found = None;
    for sets in candidate_sets(strategy, &blocks, ring.factors()) {
        let script = prelayer_script(space, reg, &sets);
        let pre = CliffordQCA::from_gates(&script, space, reg)?;
        let m = alpha.matrix() * pre.matrix();
        let b = XZBlocks::from_site_major(&m);
        if b.a.is_invertible() {
            found = Some((script, b));
            break;
        }
    }
    let Some((prelayer, b)) = found else {
        return Err(ClassifyError::ABlockSingular(strategy.to_string()));
    };
    let a_inv = b.a.inverse()?;
    let k = &b.c * &a_inv;
    let t = &b.b * &b.a.transpose();
    if !k.is_symmetric() || !t.is_symmetric() {
        return Err(ClassifyError::CheckFailed(
            "factor blocks are not symmetric".into(),
        ));
    }
    let touched: Vec<usize> = (0..n)
        .filter(|&i| (0..n).any(|j| t.get(i, j) != 0))
        .collect();
    let mut signs = ModMatrix::identity(&ring, n);
    for &q in &touched {
        signs.set_signed(q, q, -1);
    }
    let sep = XZBlocks {
        a: &signs * &b.a,
        b: ModMatrix::zeros(&ring, n, n),
        c: ModMatrix::zeros(&ring, n, n),
        d: &signs * &a_inv.transpose(),
    };
    let separated = CliffordQCA::tight(
        space.clone(),
        SymplecticMap::new(reg.clone(), sep.to_site_major())?,
    )?;
    let mut circuit = GateScript {
        d: Some(ring.modulus()),
        layers: vec![],
    };
    if !touched.is_empty() {
        circuit = circuit
            .then(hadamard_layer(space, reg, &touched))
            .then(symmetric_to_gates(&-&t, space, reg)?)
            .then(hadamard_layer(space, reg, &touched));
    }
    circuit = circuit.then(symmetric_to_gates(&k, space, reg)?);
    let cert = TrivialityCertificate {
        target: alpha.clone(),
        strategy,
        prelayer,
        separated,
        circuit,
    };
    let report = verify_certificate(&cert)?;
    if let Some(name) = report.first_failure() {
        return Err(ClassifyError::CheckFailed(name.to_string()));
    }
    Ok(cert)
}

/// Certificate for `beta^{-1} alpha` when `alpha` and `beta` have the same formation.
pub fn same_formation_equivalence(
    alpha: &CliffordQCA,
    beta: &CliffordQCA,
) -> Result<TrivialityCertificate, ClassifyError> {
    if formation_of(alpha)?.g() != formation_of(beta)?.g() {
        return Err(ClassifyError::FormationsDiffer);
    }
    let gamma = alpha.compose(&beta.inverse())?;
    if !gamma.blocks().c.is_zero() {
        return Err(ClassifyError::CheckFailed(
            "beta^-1 alpha does not preserve L".into(),
        ));
    }
    certify_trivial(&gamma, Prelayer::None)
}

/// Re-check a certificate from its parts: rebuild the circuit from its gates and compare
/// the products.
pub fn verify_certificate(
    cert: &TrivialityCertificate,
) -> Result<CertificateReport, ClassifyError> {
    let target = &cert.target;
    let space = target.space();
    let reg = target.register();
    let mut checks = Vec::new();

    let same_space = cert.separated.space() == space && cert.separated.register() == reg;
    checks.push((
        "separated part lives on the target register".to_string(),
        same_space,
    ));
    checks.push((
        "separated part has B = C = 0".to_string(),
        cert.separated.is_separated(),
    ));

    let one_qudit = cert
        .prelayer
        .layers
        .iter()
        .flatten()
        .all(|g| matches!(g, Gate::H { .. } | Gate::P { .. }));
    checks.push(("pre-layer has only one-qudit gates".to_string(), one_qudit));
    let pre = CliffordQCA::from_gates(&cert.prelayer, space, reg);
    checks.push((
        "pre-layer builds on the target register".to_string(),
        pre.is_ok(),
    ));

    let built = CliffordQCA::from_gates(&cert.circuit, space, reg);
    checks.push((
        "circuit builds on the target register".to_string(),
        built.is_ok(),
    ));
    let mut max_gate_diameter = 0;
    let recomposes = match (&built, &pre, same_space) {
        (Ok(c), Ok(pre), true) => {
            max_gate_diameter = cert
                .circuit
                .layer_diameters(space, reg)?
                .into_iter()
                .max()
                .unwrap_or(0);
            let lhs = c.matrix() * cert.separated.matrix();
            let rhs = target.matrix() * pre.matrix();
            lhs == rhs
        }
        _ => false,
    };
    checks.push((
        "circuit after separated equals target after pre-layer".to_string(),
        recomposes,
    ));
    Ok(CertificateReport {
        checks,
        max_gate_diameter,
        target_radius: target.tight_radius(),
    })
}
