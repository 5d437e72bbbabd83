mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qca_witt::classify::Prelayer;
use serde::Serialize;
use serde_json::Value;

/// Exact tools for Clifford quantum cellular automata over Z_d.
#[derive(Debug, Parser)]
#[command(name = "qca", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a QCA file: register, symplecticity and declared radius.
    Verify { file: PathBuf },
    /// Re-derive a triviality certificate from its parts.
    VerifyCert { file: PathBuf },
    /// Build a QCA from a gate script.
    Gen {
        script: PathBuf,
        /// `line:N`, `ring:N`, `grid:WxH` or a path to a space JSON file.
        #[arg(long)]
        space: String,
        /// Modulus, when the script does not name one.
        #[arg(long)]
        d: Option<u64>,
        /// Qudits per cell.
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// `first` followed by `then`.
    Compose {
        first: PathBuf,
        then: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    Inverse {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// The formation (H(L), L, alpha L) of a QCA.
    Formation { file: PathBuf },
    /// Delooping index at a cut, one integer per prime-power factor of d.
    Index {
        file: PathBuf,
        #[arg(long)]
        cut: usize,
        /// Band half-width; defaults to twice the radius.
        #[arg(long)]
        band: Option<u64>,
    },
    /// Factor a QCA into a separated part and a circuit.
    Certify {
        file: PathBuf,
        #[arg(long, default_value = "auto")]
        prelayer: Prelayer,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Certificate that two QCAs with the same formation differ by a circuit.
    Equiv {
        alpha: PathBuf,
        beta: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write the symplectic matrix of a QCA as a product of transvections.
    Decompose { file: PathBuf },
    /// Run the property suite.
    Selftest {
        /// Falls back to QCA_WITT_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Run only these criteria.
        #[arg(long = "criterion")]
        criteria: Vec<u8>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error(u8),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommandResult {
    pub status: Status,
    pub payload: Value,
    pub checks: Vec<Check>,
}

impl CommandResult {
    fn code(&self) -> u8 {
        match self.status {
            Status::Ok => 0,
            Status::Error(c) => c,
        }
    }
}

fn emit(result: &CommandResult) -> ExitCode {
    let text = serde_json::to_string_pretty(result).expect("results serialize");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    ExitCode::from(result.code())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            eprint!("{e}");
            return emit(&CommandResult {
                status: Status::Error(2),
                payload: serde_json::json!({ "message": e.kind().to_string() }),
                checks: vec![],
            });
        }
    };
    emit(&commands::run(cli.command))
}
