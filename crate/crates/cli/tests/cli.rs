use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn qca(args: &[&str], dir: &Path) -> (i32, Value, Vec<u8>) {
    let Output { status, stdout, .. } = Command::new(env!("CARGO_BIN_EXE_qca"))
        .args(args)
        .current_dir(dir)
        .env_remove("QCA_WITT_SEED")
        .output()
        .expect("binary runs");
    let value = serde_json::from_slice(&stdout).expect("stdout is JSON");
    (status.code().unwrap(), value, stdout)
}

fn write(dir: &Path, name: &str, v: &Value) {
    fs::write(dir.join(name), serde_json::to_string(v).unwrap()).unwrap();
}

fn cz_layer() -> Value {
    json!({"d": 3, "layers": [[
        {"gate": "CZ", "a": {"cell": "0"}, "b": {"cell": "1"}},
        {"gate": "CZ", "a": {"cell": "2"}, "b": {"cell": "3"}, "power": 2}
    ], [{"gate": "H", "cell": "5"}]]})
}

fn shift_script(len: usize, d: u64) -> Value {
    let map: serde_json::Map<String, Value> = (0..len)
        .map(|i| (i.to_string(), Value::String(((i + 1) % len).to_string())))
        .collect();
    json!({"d": d, "layers": [[{"gate": "PERM", "map": map}]]})
}

#[test]
fn gen_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir(dir.path().join("scripts")).unwrap();
    write(dir.path(), "scripts/cz_layer.json", &cz_layer());
    let (code, out, _) = qca(
        &[
            "gen",
            "scripts/cz_layer.json",
            "--space",
            "line:8",
            "-o",
            "out.json",
        ],
        dir.path(),
    );
    assert_eq!(code, 0, "{out}");
    assert_eq!(out["status"], "ok");
    let (code, out, _) = qca(&["verify", "out.json"], dir.path());
    assert_eq!(code, 0, "{out}");
    assert_eq!(out["payload"]["cells"], 8);
    assert!(out["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));
}

#[test]
fn index_of_a_shift() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "s.json", &shift_script(32, 3));
    let (code, _, _) = qca(
        &["gen", "s.json", "--space", "ring:32", "-o", "shift.json"],
        dir.path(),
    );
    assert_eq!(code, 0);
    let (code, out, _) = qca(&["index", "shift.json", "--cut", "16"], dir.path());
    assert_eq!(code, 0, "{out}");
    assert_eq!(out["payload"], json!({"factors": {"3": 2}}));
    let (code, _, _) = qca(
        &["index", "shift.json", "--cut", "16", "--band", "20"],
        dir.path(),
    );
    assert_eq!(code, 2);
}

#[test]
fn certificates_pass_verify_cert() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.json", &cz_layer());
    qca(
        &["gen", "c.json", "--space", "line:8", "-o", "q.json"],
        dir.path(),
    );
    for prelayer in ["none", "all"] {
        let (code, out, _) = qca(&["certify", "q.json", "--prelayer", prelayer], dir.path());
        assert_eq!(code, 4);
        assert_eq!(
            out["payload"]["failed_check"],
            "A block is invertible after the pre-layer"
        );
    }
    for prelayer in ["auto", "greedy-local", "pivot"] {
        let (code, out, _) = qca(
            &[
                "certify",
                "q.json",
                "--prelayer",
                prelayer,
                "-o",
                "cert.json",
            ],
            dir.path(),
        );
        assert_eq!(code, 0, "{prelayer}: {out}");
        let (code, out, _) = qca(&["verify-cert", "cert.json"], dir.path());
        assert_eq!(code, 0, "{prelayer}: {out}");
    }
    let (code, _, _) = qca(&["equiv", "q.json", "q.json", "-o", "eq.json"], dir.path());
    assert_eq!(code, 0);
    let (code, _, _) = qca(&["verify-cert", "eq.json"], dir.path());
    assert_eq!(code, 0);
}

#[test]
fn tampered_certificate_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.json", &cz_layer());
    qca(
        &["gen", "c.json", "--space", "line:8", "-o", "q.json"],
        dir.path(),
    );
    qca(&["certify", "q.json", "-o", "cert.json"], dir.path());
    let mut cert: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("cert.json")).unwrap()).unwrap();
    cert["circuit"]["layers"][0][0]["power"] = json!(2);
    write(dir.path(), "bad.json", &cert);
    let (code, out, _) = qca(&["verify-cert", "bad.json"], dir.path());
    assert_eq!(code, 4, "{out}");
    assert!(out["payload"]["failed_check"].is_string());
}

#[test]
fn error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = qca(&["frobnicate"], dir.path());
    assert_eq!(code, 2);
    assert_eq!(out["status"], json!({"error": 2}));
    let (code, _, _) = qca(&["verify", "missing.json"], dir.path());
    assert_eq!(code, 2);
    write(
        dir.path(),
        "bad.json",
        &json!({"space": {"line": {"length": 2}}}),
    );
    let (code, _, _) = qca(&["verify", "bad.json"], dir.path());
    assert_eq!(code, 3);
    let not_symplectic = json!({
        "space": {"line": {"length": 1}},
        "register": {"k": [1]},
        "radius": 0,
        "matrix": {"d": 3, "rows": 2, "cols": 2, "entries": [1, 1, 1, 1]}
    });
    write(dir.path(), "ns.json", &not_symplectic);
    let (code, out, _) = qca(&["verify", "ns.json"], dir.path());
    assert_eq!(code, 4);
    assert_eq!(out["payload"]["failed_check"], "matrix is symplectic");
    write(
        dir.path(),
        "c.json",
        &json!({"layers": [[{"gate": "H", "cell": "0"}]]}),
    );
    let (code, _, _) = qca(&["gen", "c.json", "--space", "line:2"], dir.path());
    assert_eq!(code, 2);
    let (code, _, _) = qca(
        &["gen", "c.json", "--space", "line:2", "--d", "5"],
        dir.path(),
    );
    assert_eq!(code, 0);
}

#[test]
fn compose_inverse_decompose() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.json", &cz_layer());
    qca(
        &["gen", "c.json", "--space", "line:8", "-o", "q.json"],
        dir.path(),
    );
    let (code, _, _) = qca(&["inverse", "q.json", "-o", "inv.json"], dir.path());
    assert_eq!(code, 0);
    let (code, out, _) = qca(&["compose", "q.json", "inv.json"], dir.path());
    assert_eq!(code, 0);
    let entries = out["payload"]["matrix"]["entries"].as_array().unwrap();
    let n = out["payload"]["matrix"]["rows"].as_u64().unwrap() as usize;
    assert!(entries
        .iter()
        .enumerate()
        .all(|(i, v)| v.as_u64().unwrap() == u64::from(i / n == i % n)));
    let (code, out, _) = qca(&["decompose", "q.json"], dir.path());
    assert_eq!(code, 0, "{out}");
    assert!(out["payload"]["count"].as_u64().unwrap() > 0);
    let (code, out, _) = qca(&["formation", "q.json"], dir.path());
    assert_eq!(code, 0);
    assert!(out["payload"]["G"].is_object());
}

#[test]
fn selftest_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "selftest",
        "--seed",
        "7",
        "--criterion",
        "4",
        "--criterion",
        "7",
        "--jobs",
        "2",
    ];
    let (code, out, first) = qca(&args, dir.path());
    assert_eq!(code, 0, "{out}");
    assert_eq!(out["payload"]["criteria"].as_array().unwrap().len(), 2);
    let (_, _, second) = qca(&args, dir.path());
    assert_eq!(first, second);
    let (code, _, _) = qca(&["selftest", "--criterion", "12"], dir.path());
    assert_eq!(code, 2);
}
