use std::fs;
use std::path::{Path, PathBuf};

use qca_witt::classify::{
    certify_trivial, delooping_index, delooping_index_with_band, formation_of,
    same_formation_equivalence, verify_certificate, ClassifyError, TrivialityCertificate,
};
use qca_witt::modring::RingSpec;
use qca_witt::qca::{register_on, CliffordQCA, GateScript, QcaError, RawQca, Space};
use qca_witt::selftest::{run_criterion, CriterionOutcome, CRITERIA};
use qca_witt::symplectic::{
    decompose_transvections_lifted, recompose, SymplecticError, SymplecticMap,
};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::{Check, Command, CommandResult, Status};

#[derive(Debug)]
enum Failure {
    Usage(String),
    Schema(String),
    Invariant { check: String, message: String },
}

impl Failure {
    fn invariant(check: &str, message: impl ToString) -> Self {
        Failure::Invariant {
            check: check.to_string(),
            message: message.to_string(),
        }
    }
}

struct Outcome {
    payload: Value,
    checks: Vec<Check>,
}

impl Outcome {
    fn new(payload: Value) -> Self {
        Outcome {
            payload,
            checks: vec![],
        }
    }

    fn check(mut self, name: &str, passed: bool) -> Self {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
        });
        self
    }
}

pub fn run(command: Command) -> CommandResult {
    match dispatch(command) {
        Ok(out) => {
            let failed = out
                .checks
                .iter()
                .find(|c| !c.passed)
                .map(|c| c.name.clone());
            CommandResult {
                status: if failed.is_some() {
                    Status::Error(4)
                } else {
                    Status::Ok
                },
                payload: match failed {
                    Some(name) => json!({ "failed_check": name, "result": out.payload }),
                    None => out.payload,
                },
                checks: out.checks,
            }
        }
        Err(f) => {
            let (code, payload, checks) = match f {
                Failure::Usage(message) => (2, json!({ "message": message }), vec![]),
                Failure::Schema(message) => (3, json!({ "message": message }), vec![]),
                Failure::Invariant { check, message } => (
                    4,
                    json!({ "failed_check": check, "message": message }),
                    vec![Check {
                        name: check,
                        passed: false,
                    }],
                ),
            };
            CommandResult {
                status: Status::Error(code),
                payload,
                checks,
            }
        }
    }
}

fn dispatch(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Verify { file } => verify(&file),
        Command::VerifyCert { file } => verify_cert(&file),
        Command::Gen {
            script,
            space,
            d,
            k,
            output,
        } => gen(&script, &space, d, k, output),
        Command::Compose {
            first,
            then,
            output,
        } => {
            let a = load_qca(&first)?;
            let b = load_qca(&then)?;
            let c = a.compose(&b).map_err(qca_failure)?;
            let roundtrip = c.compose(&b.inverse()).map_err(qca_failure)?;
            write_or_inline(&c, output).map(|o| {
                o.check(
                    "undoing the second map recovers the first",
                    roundtrip.map() == a.map(),
                )
            })
        }
        Command::Inverse { file, output } => {
            let a = load_qca(&file)?;
            let inv = a.inverse();
            let ok = a.compose(&inv).map_err(qca_failure)?.map().is_identity();
            write_or_inline(&inv, output).map(|o| o.check("map then inverse is the identity", ok))
        }
        Command::Formation { file } => {
            let a = load_qca(&file)?;
            let fm = formation_of(&a).map_err(classify_failure)?;
            Ok(Outcome::new(to_value(&fm)).check("F and G are Lagrangian", true))
        }
        Command::Index { file, cut, band } => {
            let a = load_qca(&file)?;
            let index = match band {
                Some(w) => delooping_index_with_band(&a, cut, w),
                None => delooping_index(&a, cut),
            }
            .map_err(classify_failure)?;
            Ok(Outcome::new(to_value(&index)))
        }
        Command::Certify {
            file,
            prelayer,
            output,
        } => {
            let a = load_qca(&file)?;
            let cert = certify_trivial(&a, prelayer).map_err(classify_failure)?;
            certificate_outcome(&cert, output)
        }
        Command::Equiv {
            alpha,
            beta,
            output,
        } => {
            let a = load_qca(&alpha)?;
            let b = load_qca(&beta)?;
            let cert = same_formation_equivalence(&a, &b).map_err(classify_failure)?;
            certificate_outcome(&cert, output)
        }
        Command::Decompose { file } => {
            let a = load_qca(&file)?;
            let list = decompose_transvections_lifted(a.map())
                .map_err(|e| Failure::invariant("matrix decomposes into transvections", e))?;
            let ok = &recompose(&list, a.register()) == a.map();
            Ok(
                Outcome::new(json!({ "count": list.len(), "transvections": list }))
                    .check("transvections recompose to the matrix", ok),
            )
        }
        Command::Selftest {
            seed,
            jobs,
            criteria,
        } => selftest(seed, jobs, criteria),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("core types serialize")
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Schema(format!("{}: {e}", path.display())))
}

fn write_or_inline<T: Serialize>(v: &T, output: Option<PathBuf>) -> Result<Outcome, Failure> {
    match output {
        None => Ok(Outcome::new(to_value(v))),
        Some(path) => {
            let mut text = serde_json::to_string_pretty(v).expect("core types serialize");
            text.push('\n');
            fs::write(&path, text)
                .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
            Ok(Outcome::new(
                json!({ "written": path.display().to_string() }),
            ))
        }
    }
}

fn qca_failure(e: QcaError) -> Failure {
    match e {
        QcaError::Symplectic(SymplecticError::NotSymplectic) => {
            Failure::invariant("matrix is symplectic", e)
        }
        QcaError::RadiusExceeded { .. } => {
            Failure::invariant("declared radius covers the support", e)
        }
        other => Failure::Schema(other.to_string()),
    }
}

fn classify_failure(e: ClassifyError) -> Failure {
    match e {
        ClassifyError::CutTooClose { .. } => Failure::Usage(e.to_string()),
        ClassifyError::Qca(q) => qca_failure(q),
        ClassifyError::ABlockSingular(_) => {
            Failure::invariant("A block is invertible after the pre-layer", e)
        }
        ClassifyError::FormationsDiffer => Failure::invariant("formations agree", e),
        ClassifyError::SupportTouchesBoundary { .. } => {
            Failure::invariant("support stays away from the line ends", e)
        }
        ClassifyError::NotOneDimensional => Failure::invariant("space is a line or a ring", e),
        other => Failure::invariant("certificate recomposes", other),
    }
}

fn load_qca(path: &Path) -> Result<CliffordQCA, Failure> {
    let raw: RawQca = read_json(path)?;
    raw.build().map_err(qca_failure)
}

fn verify(path: &Path) -> Result<Outcome, Failure> {
    let raw: RawQca = read_json(path)?;
    let reg = raw.register().map_err(qca_failure)?;
    let matrix = raw.site_major_matrix().map_err(qca_failure)?;
    let map = SymplecticMap::new(reg, matrix).map_err(|e| qca_failure(e.into()))?;
    let qca = CliffordQCA::new(raw.space.clone(), map, raw.radius).map_err(qca_failure)?;
    Ok(Outcome::new(json!({
        "d": qca.register().modulus(),
        "cells": qca.space().len(),
        "qudits": qca.register().n_qudits(),
        "radius": qca.radius(),
        "tight_radius": qca.tight_radius(),
    }))
    .check("register matches the space", true)
    .check("matrix is symplectic", true)
    .check("declared radius covers the support", true))
}

fn verify_cert(path: &Path) -> Result<Outcome, Failure> {
    let cert: TrivialityCertificate = read_json(path)?;
    let report = verify_certificate(&cert).map_err(classify_failure)?;
    let mut out = Outcome::new(json!({
        "strategy": cert.strategy,
        "max_gate_diameter": report.max_gate_diameter,
        "target_radius": report.target_radius,
    }));
    for (name, ok) in &report.checks {
        out = out.check(name, *ok);
    }
    Ok(out)
}

fn certificate_outcome(
    cert: &TrivialityCertificate,
    output: Option<PathBuf>,
) -> Result<Outcome, Failure> {
    let report = verify_certificate(cert).map_err(classify_failure)?;
    let mut out = write_or_inline(cert, output)?;
    for (name, ok) in report.checks {
        out = out.check(&name, ok);
    }
    Ok(out)
}

fn parse_space(arg: &str) -> Result<Space, Failure> {
    if let Ok(space) = Space::parse_sugar(arg) {
        return Ok(space);
    }
    let path = Path::new(arg);
    if path.exists() {
        read_json(path)
    } else {
        Err(Failure::Usage(format!(
            "--space {arg:?} is neither line:N, ring:N, grid:WxH nor a file"
        )))
    }
}

fn gen(
    script_path: &Path,
    space: &str,
    d: Option<u64>,
    k: usize,
    output: Option<PathBuf>,
) -> Result<Outcome, Failure> {
    let script: GateScript = read_json(script_path)?;
    let space = parse_space(space)?;
    let d = match (d, script.d) {
        (Some(a), Some(b)) if a != b => {
            return Err(Failure::Usage(format!(
                "--d {a} differs from the script's d {b}"
            )))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(Failure::Usage("no modulus: pass --d or set \"d\"".into())),
    };
    let ring = RingSpec::new(d).map_err(|e| Failure::Usage(e.to_string()))?;
    let reg = register_on(&space, &ring, vec![k; space.len()]).map_err(qca_failure)?;
    let qca = CliffordQCA::from_gates(&script, &space, &reg).map_err(qca_failure)?;
    let reparsed: RawQca = serde_json::from_value(to_value(&qca)).expect("own output parses");
    let valid = reparsed.build().is_ok_and(|q| q == qca);
    write_or_inline(&qca, output).map(|o| o.check("output passes verify", valid))
}

fn selftest(seed: Option<u64>, jobs: usize, criteria: Vec<u8>) -> Result<Outcome, Failure> {
    let seed = match seed {
        Some(s) => s,
        None => match std::env::var("QCA_WITT_SEED") {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("QCA_WITT_SEED={v:?} is not a u64")))?,
            Err(_) => 0,
        },
    };
    let ids: Vec<u8> = if criteria.is_empty() {
        CRITERIA.iter().map(|&(id, _)| id).collect()
    } else {
        criteria
    };
    if let Some(bad) = ids
        .iter()
        .find(|&&id| !CRITERIA.iter().any(|&(c, _)| c == id))
    {
        return Err(Failure::Usage(format!("no criterion {bad}")));
    }
    let outcomes = run_parallel(&ids, seed, jobs.max(1));
    let payload = json!({
        "seed": seed,
        "criteria": outcomes
            .iter()
            .map(|o| json!({ "id": o.id, "name": o.name, "passed": o.passed, "detail": o.detail }))
            .collect::<Vec<_>>(),
    });
    let mut out = Outcome::new(payload);
    for o in &outcomes {
        log::info!("criterion {} took {} ms", o.id, o.elapsed_ms);
        out = out.check(&format!("criterion {}: {}", o.id, o.name), o.passed);
    }
    Ok(out)
}

fn run_parallel(ids: &[u8], seed: u64, jobs: usize) -> Vec<CriterionOutcome> {
    let mut slots: Vec<Option<CriterionOutcome>> = vec![None; ids.len()];
    std::thread::scope(|scope| {
        let chunk = ids.len().div_ceil(jobs).max(1);
        for (ids, slots) in ids.chunks(chunk).zip(slots.chunks_mut(chunk)) {
            scope.spawn(move || {
                for (id, slot) in ids.iter().zip(slots) {
                    *slot = run_criterion(*id, seed);
                }
            });
        }
    });
    slots.into_iter().flatten().collect()
}
