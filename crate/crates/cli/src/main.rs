//! `logicgrid`: solve, batch-run, grade and encode logic-grid puzzles, and
//! summarise auto/human grade agreement.
//!
//! Exit codes: 0 solved (or command succeeded), 1 puzzle not fully solved,
//! 2 usage or configuration error, 3 solver executable missing.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use logicgrid_core::agent::RunResult;
use logicgrid_core::grader::{grade, score_run};
use logicgrid_core::runner::{find_puzzle, RunError};
use logicgrid_core::smt::Provenance;
use logicgrid_core::stats::read_pairs;
use logicgrid_core::{
    bundled_dataset, compute_stats, encode, load_dataset, parse_outcome, render_stats, run_batch, solve_puzzle,
    AppConfig, Puzzle, SmtScript,
};

#[derive(Parser)]
#[command(name = "logicgrid", version, about = "Logic-grid puzzles solved by an agent against an SMT solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DatasetArg {
    /// Puzzle dataset (JSON); defaults to the config's dataset or the bundled fixtures.
    #[arg(long)]
    dataset: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the agent loop on one puzzle, writing its transcript and grade.
    Solve {
        #[arg(long)]
        puzzle: String,
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        dataset: DatasetArg,
    },
    /// Run every puzzle of a dataset and write the results tables.
    Batch {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        config: PathBuf,
    },
    /// Grade a stored run record, or raw solver output, against the answer key.
    Grade {
        #[arg(long)]
        puzzle: String,
        /// Run record written by `solve` (runs/<id>.json).
        #[arg(long, conflicts_with_all = ["output", "script"], required_unless_present = "output")]
        run: Option<PathBuf>,
        /// Raw solver output.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Script that produced `--output`, for its lookup comments.
        #[arg(long, requires = "output")]
        script: Option<PathBuf>,
        #[command(flatten)]
        dataset: DatasetArg,
    },
    /// Print agreement statistics for a CSV of `id,auto,human` grade pairs.
    Stats {
        #[arg(long)]
        pairs: PathBuf,
    },
    /// Print the reference SMT-LIB encoding of a puzzle.
    Encode {
        #[arg(long)]
        puzzle: String,
        #[command(flatten)]
        dataset: DatasetArg,
    },
}

enum Failure {
    Usage(String),
    SolverMissing(String),
    Other(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::SolverMissing(_) => 3,
            Failure::Other(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::SolverMissing(m) | Failure::Other(m) => m,
        }
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        if e.is_solver_missing() {
            Failure::SolverMissing(e.to_string())
        } else if e.is_usage() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Other(e.to_string())
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn dataset(explicit: Option<&Path>, config: Option<&AppConfig>) -> Result<Vec<Puzzle>, Failure> {
    match explicit.or_else(|| config.and_then(|c| c.dataset.as_deref())) {
        Some(path) => load_dataset(path).map_err(usage),
        None => Ok(bundled_dataset()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn verdict(solved: bool) -> Result<u8, Failure> {
    Ok(if solved { 0 } else { 1 })
}

fn run(cmd: Command) -> Result<u8, Failure> {
    match cmd {
        Command::Solve { puzzle, config, dataset: d } => {
            let cfg = AppConfig::load(&config).map_err(usage)?;
            let data = dataset(d.dataset.as_deref(), Some(&cfg))?;
            let p = find_puzzle(&data, &puzzle)?;
            let run = solve_puzzle(p, &cfg)?;
            let r = &run.score.report;
            println!(
                "{}: {} after {} action(s); {}/{} cells correct, partial score {:.3}",
                p.id,
                if run.result.converged { "converged" } else { "not converged" },
                run.result.total_actions(),
                r.correct_matches,
                r.total_matches,
                r.partial_score
            );
            verdict(r.solved_fully)
        }
        Command::Batch { dataset: path, config } => {
            let cfg = AppConfig::load(&config).map_err(usage)?;
            let data = load_dataset(&path).map_err(usage)?;
            let out = run_batch(&data, &cfg)?;
            let s = &out.summary;
            println!(
                "{} puzzles, average partial score {:.3}, {} solved ({:.1}%)",
                s.puzzles,
                s.avg_partial_score,
                s.solved,
                s.solved_pct()
            );
            println!("wrote {} and {}", out.summary_path.display(), out.detail_path.display());
            Ok(0)
        }
        Command::Grade { puzzle, run, output, script, dataset: d } => {
            let data = dataset(d.dataset.as_deref(), None)?;
            let p = find_puzzle(&data, &puzzle)?;
            let report = match (run, output) {
                (Some(path), _) => {
                    let result: RunResult =
                        serde_json::from_str(&read(&path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
                    score_run(p, &result).report
                }
                (None, Some(path)) => {
                    let outcome = parse_outcome(&read(&path)?);
                    let script = match script {
                        Some(s) => Some(SmtScript::new(read(&s)?, Provenance::Agent, 0)),
                        None => None,
                    };
                    grade(&outcome, script.as_ref(), p)
                }
                (None, None) => unreachable!("clap requires --run or --output"),
            };
            println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
            verdict(report.solved_fully)
        }
        Command::Stats { pairs } => {
            let pairs = read_pairs(&pairs).map_err(usage)?;
            let report = compute_stats(&pairs).map_err(usage)?;
            print!("{}", render_stats(&report));
            Ok(0)
        }
        Command::Encode { puzzle, dataset: d } => {
            let data = dataset(d.dataset.as_deref(), None)?;
            let p = find_puzzle(&data, &puzzle)?;
            let script = encode(p).map_err(usage)?;
            print!("{}", script.text);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_env("LOGICGRID_LOG"))
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn argument_definitions_are_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn grade_needs_a_source() {
        assert!(Cli::try_parse_from(["logicgrid", "grade", "--puzzle", "houses"]).is_err());
        assert!(Cli::try_parse_from(["logicgrid", "grade", "--puzzle", "h", "--run", "r", "--output", "o"]).is_err());
        assert!(Cli::try_parse_from(["logicgrid", "grade", "--puzzle", "h", "--output", "o", "--script", "s"]).is_ok());
    }

    #[test]
    fn run_errors_map_to_exit_codes() {
        let unknown: Failure = RunError::UnknownPuzzle("zebra".into()).into();
        assert_eq!(unknown.code(), 2);
        let missing: Failure =
            RunError::Agent(logicgrid_core::agent::AgentError::SolverMissing("/no/z3".into())).into();
        assert_eq!(missing.code(), 3);
        assert_eq!(verdict(false).ok(), Some(1));
    }
}
