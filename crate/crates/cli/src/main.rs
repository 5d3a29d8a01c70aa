mod commands;
mod manifest;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use torpedo::classical_search::SearchConfig;

use commands::{CliError, MethodArg, Outcome, SearchArgs, StrategyArg, TaskArg};
use manifest::{Envelope, RunManifest};

/// Torpedo game toolkit: classical values, quantum strategies,
/// contextuality and Wigner functions.
#[derive(Parser)]
#[command(name = "torpedo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact optimal classical value by exhaustive search (d <= 3).
    ClassicalValue {
        #[arg(long, value_enum, default_value = "torpedo")]
        task: TaskArg,
        #[arg(long)]
        d: u32,
        /// Number of dits, for `--task qrac`.
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Check the perfect quantum strategy (or the qubit strategy at d = 2).
    QuantumVerify {
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 0)]
        ell: u32,
        #[arg(long)]
        modified: bool,
    },
    /// Randomised search for a perfect classical encoding.
    Search {
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        restarts: u64,
        #[arg(long, default_value_t = 10_000)]
        steps: u64,
        /// Seconds.
        #[arg(long, default_value_t = 600.0)]
        time_limit: f64,
        #[arg(long, default_value_t = 100)]
        sideways_cap: u32,
        #[arg(long)]
        modified: bool,
    },
    /// Noncontextual fraction of a behaviour file.
    Ncf {
        #[arg(long)]
        behaviour: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
    },
    /// Discrete Wigner function of a state.
    ///
    /// States: psi:x,z[,l]  mixed:x,z  phase:x,z  basis:q,k  identity
    Wigner {
        #[arg(long, allow_hyphen_values = true)]
        state: String,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Write the behaviour of a named strategy.
    ExportBehaviour {
        #[arg(long, value_enum)]
        strategy: StrategyArg,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 0)]
        ell: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run the acceptance criteria.
    Report {
        #[arg(long, conflicts_with = "criterion")]
        all: bool,
        #[arg(long)]
        criterion: Option<u8>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::ClassicalValue { .. } => "classical-value",
            Command::QuantumVerify { .. } => "quantum-verify",
            Command::Search { .. } => "search",
            Command::Ncf { .. } => "ncf",
            Command::Wigner { .. } => "wigner",
            Command::ExportBehaviour { .. } => "export-behaviour",
            Command::Report { .. } => "report",
        }
    }

    fn parameters(&self) -> Value {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        match self {
            Command::ClassicalValue { task, d, n } => {
                json!({"task": format!("{task:?}").to_lowercase(), "d": d, "n": n})
            }
            Command::QuantumVerify { d, ell, modified } => json!({"d": d, "ell": ell, "modified": modified}),
            Command::Search { d, seed, restarts, steps, time_limit, sideways_cap, modified } => json!({
                "d": d, "seed": seed, "restarts": restarts, "steps": steps,
                "time_limit_secs": time_limit, "sideways_cap": sideways_cap, "modified": modified,
            }),
            Command::Ncf { behaviour, method } => {
                json!({"behaviour": behaviour.display().to_string(), "method": format!("{method:?}").to_lowercase()})
            }
            Command::Wigner { state, d, csv } => json!({"state": state, "d": d, "csv": path(csv)}),
            Command::ExportBehaviour { strategy, d, ell, out, csv } => json!({
                "strategy": format!("{strategy:?}").to_lowercase(), "d": d, "ell": ell,
                "out": path(out), "csv": path(csv),
            }),
            Command::Report { all, criterion } => json!({"all": all, "criterion": criterion}),
        }
    }

    fn run(&self) -> Result<Outcome, CliError> {
        match self {
            Command::ClassicalValue { task, d, n } => commands::classical_value(*task, *d, *n),
            Command::QuantumVerify { d, ell, modified } => commands::quantum_verify(*d, *ell, *modified),
            Command::Search { d, seed, restarts, steps, time_limit, sideways_cap, modified } => {
                let config = SearchConfig {
                    seed: *seed,
                    restarts: *restarts,
                    steps: *steps,
                    time_limit_secs: *time_limit,
                    sideways_cap: *sideways_cap,
                };
                commands::search(SearchArgs { d: *d, modified: *modified, config })
            }
            Command::Ncf { behaviour, method } => commands::ncf(behaviour, *method),
            Command::Wigner { state, d, csv } => commands::wigner(state, *d, csv.as_ref()),
            Command::ExportBehaviour { strategy, d, ell, out, csv } => {
                commands::export_behaviour(*strategy, *d, *ell, out.as_ref(), csv.as_ref())
            }
            Command::Report { all, criterion } => {
                if !all && criterion.is_none() {
                    return Err(CliError::Input("report needs --all or --criterion N".into()));
                }
                commands::report(*criterion)
            }
        }
    }
}

/// `TORPEDO_THREADS` sizes the worker pool; results do not depend on it.
fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("TORPEDO_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Input(format!("TORPEDO_THREADS must be a positive integer, got {raw:?}")))?;
    if n == 0 {
        return Err(CliError::Input("TORPEDO_THREADS must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Internal(format!("thread pool: {e}")))
}

fn print_table(command: &str, rows: &[(String, String)]) {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    eprintln!("{command}");
    for (k, v) in rows {
        eprintln!("  {k:<width$}  {v}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code() as u8);
    }
    let start = Instant::now();
    let outcome = match cli.command.run() {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let manifest =
        RunManifest::new(cli.command.name(), cli.command.parameters(), outcome.seed, &outcome.result);
    let envelope = Envelope { manifest, result: &outcome.result };
    let text = serde_json::to_string_pretty(&envelope).expect("envelopes serialise");
    // A closed pipe (e.g. `| head`) is not an error worth a panic.
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = writeln!(stdout, "{text}").and_then(|()| stdout.flush()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: writing output: {e}");
            return ExitCode::from(2);
        }
    }
    print_table(cli.command.name(), &outcome.table);
    eprintln!("  wall time {:.3} s", start.elapsed().as_secs_f64());
    if outcome.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
