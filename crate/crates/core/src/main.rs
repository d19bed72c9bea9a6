use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dqs_core::cli::{
    run_equivalence_grid, run_scenario, run_sweep, write_csv, CliError, CliResult, ScenarioFile, EXIT_ABORTED,
    EXIT_OK, EXIT_VERIFY_FAILED,
};
use dqs_core::metrics::{bound_report, run_all_suites, AttackMode, BoundParams, SuiteOptions};
use dqs_core::protocol::Variant;

#[derive(Parser)]
#[command(name = "dqs", version, about = "Distributed quantum sensing simulator and bound calculator")]
struct Cli {
    /// Override the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Exit with status 3 when a check aborts.
    #[arg(long, global = true)]
    strict_abort: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one protocol run and print its JSON summary.
    Run {
        scenario: PathBuf,
        /// Write the transcript here (overrides the scenario).
        #[arg(long)]
        transcript: Option<PathBuf>,
        /// Write the summary here instead of stdout.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Twin-run sweep emitting one CSV row per grid point.
    Sweep {
        scenario: PathBuf,
        /// CSV destination (overrides the scenario; stdout if neither is set).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the faithfulness bounds.
    Bounds(BoundsArgs),
    /// Run the inequality property suites.
    Verify {
        /// Negate one inequality so the suites fail.
        #[arg(long, hide = true)]
        inject_violation: bool,
    },
    /// Compare the entanglement and MUB checks on the same attack.
    Equivalence { scenario: PathBuf },
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    mode: AttackMode,
    #[arg(long, default_value = "entanglement")]
    variant: Variant,
    /// ε for the entanglement variant, ε̄ for the MUB variant.
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Phase, or the start of the grid when `--steps` > 1.
    #[arg(long)]
    phi: f64,
    #[arg(long)]
    phi_stop: Option<f64>,
    #[arg(long, default_value_t = 1)]
    steps: usize,
    #[arg(long, default_value_t = 10_000)]
    rounds: u64,
    #[arg(long, default_value_t = 0)]
    discarded: u64,
    /// Defaults to `rounds − discarded`.
    #[arg(long)]
    estimation_rounds: Option<u64>,
}

fn load(path: &Path, seed: Option<u64>) -> CliResult<ScenarioFile> {
    let mut s = ScenarioFile::load(path)?;
    if let Some(seed) = seed {
        s.protocol.seed = seed;
    }
    Ok(s)
}

fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn cmd_bounds(a: &BoundsArgs) -> CliResult<String> {
    if a.steps == 0 {
        return Err(CliError::Schema("--steps must be positive".into()));
    }
    let stop = a.phi_stop.unwrap_or(a.phi);
    let reports = (0..a.steps)
        .map(|i| {
            let phi = if a.steps == 1 { a.phi } else { a.phi + (stop - a.phi) * i as f64 / (a.steps - 1) as f64 };
            let params = BoundParams {
                mode: a.mode,
                variant: a.variant,
                threshold: a.epsilon,
                rounds: a.rounds,
                discarded: a.discarded,
                estimation_rounds: a.estimation_rounds.unwrap_or(a.rounds.saturating_sub(a.discarded)),
                n: a.n,
                phi,
            };
            bound_report(&params).map_err(CliError::from)
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(serde_json::to_string_pretty(&reports)? + "\n")
}

fn execute(cli: &Cli) -> CliResult<i32> {
    match &cli.command {
        Command::Run { scenario, transcript, summary } => {
            let mut s = load(scenario, cli.seed)?;
            if transcript.is_some() {
                s.output.transcript = transcript.clone();
            }
            let r = run_scenario(&s)?;
            emit(summary.as_deref().or(s.output.summary.as_deref()), &(serde_json::to_string_pretty(&r)? + "\n"))?;
            Ok(if cli.strict_abort && r.aborted { EXIT_ABORTED } else { EXIT_OK })
        }
        Command::Sweep { scenario, out } => {
            let s = load(scenario, cli.seed)?;
            let rows = run_sweep(&s)?;
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf)?;
            emit(out.as_deref().or(s.output.csv.as_deref()), &String::from_utf8_lossy(&buf))?;
            Ok(if cli.strict_abort && rows.iter().any(|r| !r.passed) { EXIT_ABORTED } else { EXIT_OK })
        }
        Command::Bounds(a) => {
            emit(None, &cmd_bounds(a)?)?;
            Ok(EXIT_OK)
        }
        Command::Verify { inject_violation } => {
            let opts = SuiteOptions { seed: cli.seed.unwrap_or(0), inject_violation: *inject_violation };
            let reports = run_all_suites(&opts)?;
            let mut text = String::new();
            for r in &reports {
                let status = if r.passed() { "ok" } else { "FAILED" };
                text += &format!("{:<22} cases {:>4}  violations {:>4}  min slack {:.3e}  {status}\n", r.name, r.cases, r.violations, r.min_slack);
            }
            emit(None, &text)?;
            Ok(if reports.iter().all(|r| r.passed()) { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
        Command::Equivalence { scenario } => {
            let s = load(scenario, cli.seed)?;
            let reports = run_equivalence_grid(&s)?;
            let entries: Vec<serde_json::Value> = reports
                .iter()
                .map(|(v, r)| serde_json::json!({ "value": v, "report": r }))
                .collect();
            emit(s.output.summary.as_deref(), &(serde_json::to_string_pretty(&entries)? + "\n"))?;
            let aborted = reports.iter().any(|(_, r)| !r.entanglement_passed || !r.mub_passed);
            Ok(if cli.strict_abort && aborted { EXIT_ABORTED } else { EXIT_OK })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("dqs: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("dqs: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
