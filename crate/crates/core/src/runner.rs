//! Single-puzzle and batch runs: build the client, drive the feedback loop,
//! grade, and persist transcripts and result tables.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;
use thiserror::Error;

use crate::agent::{
    run_feedback_loop_with, AgentError, ClientError, LiveClient, LlmClient, ReferenceClient, RunResult, ScriptSpec,
    ScriptedClient,
};
use crate::config::{AppConfig, ClientConfig, ConfigError};
use crate::encoder::EncodeError;
use crate::grader::{grade_batch, score_run, PuzzleScore, SummaryRow};
use crate::puzzle::Puzzle;
use crate::transcript::{EventKind, EventSink, TranscriptWriter};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("unknown puzzle id {0:?}")]
    UnknownPuzzle(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Client(#[from] ClientError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("results table: {0}")]
    Csv(#[from] csv::Error),
}

impl RunError {
    /// Whether the failure is a configuration or input problem rather than a
    /// problem with the run itself.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            RunError::Config(_)
                | RunError::UnknownPuzzle(_)
                | RunError::EmptyDataset
                | RunError::Encode(_)
                | RunError::Client(ClientError::Config(_))
                | RunError::Agent(AgentError::InvalidConfig(_) | AgentError::EmptyClues(_))
        )
    }

    pub fn is_solver_missing(&self) -> bool {
        matches!(self, RunError::Agent(AgentError::SolverMissing(_)))
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io { path: path.to_path_buf(), source }
}

/// Builds the configured client for one puzzle.
pub fn make_client(cfg: &AppConfig, puzzle: &Puzzle) -> Result<Box<dyn LlmClient>, RunError> {
    Ok(match &cfg.client {
        ClientConfig::Scripted { path } => {
            let file = if path.is_dir() { path.join(format!("{}.json", puzzle.id)) } else { path.clone() };
            Box::new(ScriptedClient::new(ScriptSpec::load(&file)?))
        }
        ClientConfig::Live { base_url, model, credential_env, timeout_ms } => {
            let key = match credential_env {
                Some(var) => Some(
                    std::env::var(var)
                        .map_err(|_| ClientError::Config(format!("environment variable {var} is not set")))?,
                ),
                None => None,
            };
            let timeout = std::time::Duration::from_millis(*timeout_ms);
            Box::new(LiveClient::new(base_url, model, key, timeout)?)
        }
        ClientConfig::Reference => Box::new(ReferenceClient::new(puzzle)?),
    })
}

pub fn find_puzzle<'a>(dataset: &'a [Puzzle], id: &str) -> Result<&'a Puzzle, RunError> {
    dataset.iter().find(|p| p.id == id).ok_or_else(|| RunError::UnknownPuzzle(id.to_string()))
}

#[derive(Debug, Clone, Serialize)]
pub struct PuzzleRun {
    pub result: RunResult,
    pub score: PuzzleScore,
}

pub fn transcript_path(out: &Path, id: &str) -> PathBuf {
    out.join("transcripts").join(format!("{id}.jsonl"))
}

pub fn grade_path(out: &Path, id: &str) -> PathBuf {
    out.join("grades").join(format!("{id}.json"))
}

pub fn run_path(out: &Path, id: &str) -> PathBuf {
    out.join("runs").join(format!("{id}.json"))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), RunError> {
    let mut text = serde_json::to_string_pretty(value).expect("results serialize");
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

/// Solves one puzzle and writes its transcript, run record and grade under
/// the configured output directory.
pub fn solve_puzzle(puzzle: &Puzzle, cfg: &AppConfig) -> Result<PuzzleRun, RunError> {
    let out = &cfg.output_dir;
    for sub in ["transcripts", "grades", "runs"] {
        let dir = out.join(sub);
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    }
    let client = make_client(cfg, puzzle)?;
    let tpath = transcript_path(out, &puzzle.id);
    let mut sink = TranscriptWriter::create(&tpath).map_err(io_err(&tpath))?;
    let result = run_feedback_loop_with(puzzle, client.as_ref(), &cfg.run, &mut sink)?;
    let score = score_run(puzzle, &result);
    sink.record(&puzzle.id, 0, 0, EventKind::Grade, serde_json::to_value(&score).expect("scores serialize"));
    sink.finish().map_err(io_err(&tpath))?;
    write_json(&run_path(out, &puzzle.id), &result)?;
    write_json(&grade_path(out, &puzzle.id), &score)?;
    tracing::info!(
        puzzle = %puzzle.id,
        converged = result.converged,
        score = score.report.partial_score,
        "puzzle finished"
    );
    Ok(PuzzleRun { result, score })
}

#[derive(Debug, Clone)]
pub struct BatchOutput {
    pub summary: SummaryRow,
    pub runs: Vec<PuzzleRun>,
    pub summary_path: PathBuf,
    pub detail_path: PathBuf,
}

pub const SUMMARY_HEADER: [&str; 5] = ["Model", "T", "D", "Avg. PS", "#Solved"];
pub const DETAIL_HEADER: [&str; 10] =
    ["Puzzle", "Difficulty", "Converged", "Rule", "Attempts", "Actions", "Correct", "Total", "PS", "Solved"];

fn solved_cell(row: &SummaryRow) -> String {
    format!("{} ({:.1}%)", row.solved, row.solved_pct())
}

fn enum_label<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

/// Writes the one-row summary and the per-puzzle detail table.
pub fn write_tables(out: &Path, summary: &SummaryRow, runs: &[PuzzleRun]) -> Result<(PathBuf, PathBuf), RunError> {
    let summary_path = out.join("results.csv");
    let mut w = csv::Writer::from_path(&summary_path)?;
    w.write_record(SUMMARY_HEADER)?;
    w.write_record([
        summary.model.clone(),
        summary.t_label(),
        if summary.decomposition { "yes" } else { "no" }.to_string(),
        format!("{:.3}", summary.avg_partial_score),
        solved_cell(summary),
    ])?;
    w.flush().map_err(io_err(&summary_path))?;

    let detail_path = out.join("results_detail.csv");
    let mut w = csv::Writer::from_path(&detail_path)?;
    w.write_record(DETAIL_HEADER)?;
    for run in runs {
        let s = &run.score;
        w.write_record([
            s.puzzle_id.clone(),
            enum_label(&s.difficulty),
            s.converged.to_string(),
            enum_label(&s.rule),
            s.attempts.to_string(),
            s.actions.to_string(),
            s.report.correct_matches.to_string(),
            s.report.total_matches.to_string(),
            s.report.partial_score.to_string(),
            s.report.solved_fully.to_string(),
        ])?;
    }
    w.flush().map_err(io_err(&detail_path))?;
    Ok((summary_path, detail_path))
}

/// Solves every puzzle (up to `cfg.concurrency` at once), then writes the
/// results tables. Per-puzzle results keep dataset order.
pub fn run_batch(dataset: &[Puzzle], cfg: &AppConfig) -> Result<BatchOutput, RunError> {
    if dataset.is_empty() {
        return Err(RunError::EmptyDataset);
    }
    fs::create_dir_all(&cfg.output_dir).map_err(io_err(&cfg.output_dir))?;
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<PuzzleRun, RunError>>>> = Mutex::new((0..dataset.len()).map(|_| None).collect());
    let workers = cfg.concurrency.min(dataset.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= dataset.len() {
                    break;
                }
                let r = solve_puzzle(&dataset[i], cfg);
                let abort = matches!(&r, Err(e) if e.is_solver_missing());
                slots.lock().expect("no poisoned workers")[i] = Some(r);
                if abort {
                    next.store(dataset.len(), Ordering::SeqCst);
                }
            });
        }
    });
    let mut runs = Vec::with_capacity(dataset.len());
    for slot in slots.into_inner().expect("no poisoned workers") {
        match slot {
            Some(Ok(run)) => runs.push(run),
            Some(Err(e)) => return Err(e),
            None => {}
        }
    }
    let scores: Vec<PuzzleScore> = runs.iter().map(|r| r.score.clone()).collect();
    let summary = grade_batch(&cfg.run.model_name, &cfg.run.temperature_schedule, cfg.run.decomposition, &scores);
    let (summary_path, detail_path) = write_tables(&cfg.output_dir, &summary, &runs)?;
    Ok(BatchOutput { summary, runs, summary_path, detail_path })
}
