use std::process::ExitCode;

use qca_witt::selftest::{run_criterion, CRITERIA};

const SEED: u64 = 0x5eed_2026;

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for &(id, _) in CRITERIA.iter() {
        let out = run_criterion(id, SEED).expect("known criterion");
        let mark = if out.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {}: {} - {} ({} ms): {}",
            out.id, mark, out.name, out.elapsed_ms, out.detail
        );
        if !out.passed {
            failed.push(out.id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
