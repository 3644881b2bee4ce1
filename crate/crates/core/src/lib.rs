//! Solve logic-grid puzzles by iterating a language-model agent against an
//! external SMT solver, then grade the result against an answer key.

pub mod agent;
pub mod assignment;
pub mod config;
pub mod encoder;
pub mod grader;
pub mod names;
pub mod puzzle;
pub mod runner;
pub mod smt;
pub mod stats;
pub mod transcript;

pub use agent::{run_feedback_loop, LlmClient, RunConfig, RunResult};
pub use assignment::{AssignedValue, Assignment};
pub use config::AppConfig;
pub use encoder::{check_uniqueness, decode_model, encode, DecodedModel, EncodeError, Uniqueness};
pub use grader::{grade, GradeReport};
pub use puzzle::{
    bundled_dataset, load_dataset, validate_key, Category, CategoryKind, Difficulty, Puzzle, PuzzleError, SolutionKey,
    StructuredClue,
};
pub use runner::{run_batch, solve_puzzle};
pub use smt::{
    extract_smt, parse_lookup_table, parse_outcome, run_solver, SatStatus, SmtScript, SolverConfig, SolverOutcome,
};
pub use stats::{compute_stats, render_stats, GradePair, StatsReport};
