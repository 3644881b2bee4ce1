//! The solving agent's state machine and the translate/solve/refine loop.
//!
//! A run walks the temperature schedule. Each attempt starts cold (optional
//! decomposition, then a fresh prompt) and allows up to `max_actions` agent
//! replies. Every reply is mined for a script, solved, and evaluated; the
//! evaluation is fed back until the solver returns a clean model.

mod client;
mod similarity;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use client::{ClientError, LiveClient, LlmClient, Message, ReferenceClient, Role, ScriptSpec, ScriptedClient};
pub use similarity::{similarity, statements, LineDelta};

use crate::puzzle::Puzzle;
use crate::smt::{
    extract_smt, run_solver, ExtractError, SatStatus, SmtScript, SolverConfig, SolverFailure, SolverOutcome,
};
use crate::transcript::{EventKind, EventSink, NullSink};

pub const SOLVER_PROMPT: &str = "You are a solving agent. Translate the logic grid puzzle below into an \
SMT-LIB script: declare one constant per entity and attribute, assert every clue, and finish with \
(check-sat) and (get-model). When attribute values are encoded as integers, explain the codes in \
comments such as `; 1 is Red, 2 is Green`. Reply with the complete script in a single ```smt2 fenced block.";

pub const DECOMPOSER_PROMPT: &str = "You are a decomposition agent. Identify the entities, attributes and \
relationships in the logic grid puzzle below and restate every clue as one or more atomic constraints. \
Reply with the constraints only, one per line.";

pub const CONFIRM_PROMPT: &str = "Check that every assignment in this model satisfies all clues of the \
puzzle. If it does, reply CONFIRMED. Otherwise reply with a corrected script in a ```smt2 fenced block.";

/// Bytes of raw solver output echoed back to the agent.
pub const FEEDBACK_RAW_LIMIT: usize = 8 * 1024;

/// Similarity below which a new script counts as a rewrite.
pub const RADICAL_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("role prompt is empty")]
    EmptyRole,
    #[error("puzzle {0} has no clues")]
    EmptyClues(String),
    #[error("invalid run configuration: {0}")]
    InvalidConfig(String),
    #[error("solver executable {0:?} not found")]
    SolverMissing(PathBuf),
    #[error(transparent)]
    Solver(SolverFailure),
    #[error(transparent)]
    Client(#[from] ClientError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentKind {
    Decomposer,
    Solver,
    Grader,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RolePrompt {
    pub kind: AgentKind,
    pub text: String,
}

impl RolePrompt {
    pub fn new(kind: AgentKind, text: impl Into<String>) -> Result<Self, AgentError> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(AgentError::EmptyRole);
        }
        Ok(RolePrompt { kind, text })
    }

    pub fn solver() -> Self {
        RolePrompt { kind: AgentKind::Solver, text: SOLVER_PROMPT.into() }
    }

    pub fn decomposer() -> Self {
        RolePrompt { kind: AgentKind::Decomposer, text: DECOMPOSER_PROMPT.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Evaluation {
    ErrorsPresent,
    SatNoErrors,
    Unsat,
    NoScript,
    /// unknown verdict, no verdict, timeout, or sat without a model.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feedback {
    pub outcome: Option<SolverOutcome>,
    pub evaluation: Evaluation,
    pub rendered: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    /// Agent actions taken so far.
    pub t: u32,
    pub messages: Vec<Message>,
    pub current_script: Option<SmtScript>,
    pub last_feedback: Option<Feedback>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecisionKind {
    IterativeRefinement,
    RadicalRefinement,
    Submit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionBasis {
    /// Statement similarity to the previous script, absent on a first script.
    pub similarity: Option<f64>,
    /// Distinct error messages of the feedback being answered.
    pub error_classes: Vec<String>,
    pub cold_restart: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub kind: DecisionKind,
    pub basis: DecisionBasis,
}

fn default_schedule() -> Vec<f64> {
    vec![0.0, 0.0001, 0.01]
}

fn default_max_actions() -> u32 {
    4
}

fn default_model_name() -> String {
    "scripted".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_schedule")]
    pub temperature_schedule: Vec<f64>,
    #[serde(default = "default_max_actions")]
    pub max_actions: u32,
    /// Cold-start retries after the first attempt; defaults to schedule length - 1.
    #[serde(default)]
    pub max_retries: Option<u32>,
    #[serde(default, alias = "decomposition_enabled")]
    pub decomposition: bool,
    /// Ask the agent to confirm a clean model; the turn counts as an action.
    #[serde(default)]
    pub confirm_solution: bool,
    #[serde(default = "default_model_name")]
    pub model_name: String,
    #[serde(skip)]
    pub solver: SolverConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            temperature_schedule: default_schedule(),
            max_actions: default_max_actions(),
            max_retries: None,
            decomposition: false,
            confirm_solution: false,
            model_name: default_model_name(),
            solver: SolverConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        let bad = |m: &str| Err(AgentError::InvalidConfig(m.to_string()));
        if self.temperature_schedule.is_empty() {
            return bad("temperature schedule is empty");
        }
        if self.temperature_schedule.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return bad("temperatures must be finite and non-negative");
        }
        if self.temperature_schedule.windows(2).any(|w| w[1] < w[0]) {
            return bad("temperature schedule must be non-decreasing");
        }
        if self.max_actions == 0 {
            return bad("max_actions must be at least 1");
        }
        Ok(())
    }

    /// Number of attempts the schedule and retry limit allow.
    pub fn attempts(&self) -> usize {
        let retries = self.max_retries.map_or(usize::MAX, |r| r as usize);
        self.temperature_schedule.len().min(retries.saturating_add(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// 1-based agent action within the attempt.
    pub action: u32,
    pub reply: String,
    pub script: Option<SmtScript>,
    pub extract_error: Option<String>,
    pub outcome: Option<SolverOutcome>,
    pub evaluation: Evaluation,
    pub decision: Option<Decision>,
    /// Line-level change against the previous script of this attempt.
    pub delta: Option<LineDelta>,
    /// Reply to a confirmation request that accepted the model.
    #[serde(default)]
    pub confirmation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub index: u32,
    pub temperature: f64,
    pub decomposition: Option<Vec<String>>,
    pub actions: u32,
    pub iterations: Vec<IterationRecord>,
    pub failure: Option<String>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub puzzle_id: String,
    pub model_name: String,
    pub converged: bool,
    pub attempts: Vec<AttemptRecord>,
    pub final_outcome: Option<SolverOutcome>,
    pub final_script: Option<SmtScript>,
    pub client_calls: u32,
}

impl RunResult {
    pub fn total_actions(&self) -> u32 {
        self.attempts.iter().map(|a| a.actions).sum()
    }

    /// Every iteration across attempts, in order.
    pub fn iterations(&self) -> impl Iterator<Item = &IterationRecord> {
        self.attempts.iter().flat_map(|a| a.iterations.iter())
    }
}

fn puzzle_prompt(puzzle: &Puzzle, role: &RolePrompt) -> String {
    format!("{}\n\n{}", role.text, puzzle.render_text())
}

/// Builds S0: one message holding the role prompt, the puzzle, and the
/// decomposed constraints when given.
pub fn perceive_initial(
    puzzle: &Puzzle,
    role: &RolePrompt,
    decomposition: Option<&[String]>,
) -> Result<AgentState, AgentError> {
    if puzzle.clues.is_empty() {
        return Err(AgentError::EmptyClues(puzzle.id.clone()));
    }
    if role.text.trim().is_empty() {
        return Err(AgentError::EmptyRole);
    }
    let mut prompt = puzzle_prompt(puzzle, role);
    if let Some(lines) = decomposition {
        prompt.push_str("\nDecomposed constraints:\n");
        for l in lines {
            prompt.push_str(l);
            prompt.push('\n');
        }
    }
    Ok(AgentState { t: 0, messages: vec![Message::user(prompt)], current_script: None, last_feedback: None })
}

fn decomposition_request(puzzle: &Puzzle, role: &RolePrompt) -> Message {
    Message::user(puzzle_prompt(puzzle, role))
}

fn split_lines(reply: &str) -> Vec<String> {
    reply.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::to_string).collect()
}

/// Asks the decomposition agent for atomic constraints, one per line.
pub fn decompose(
    puzzle: &Puzzle,
    client: &dyn LlmClient,
    role: &RolePrompt,
    temperature: f64,
) -> Result<Vec<String>, ClientError> {
    let reply = client.complete(&[decomposition_request(puzzle, role)], temperature)?;
    Ok(split_lines(&reply))
}

/// Appends the feedback to the conversation. `t` is unchanged.
pub fn refine_state(state: &mut AgentState, feedback: Feedback) {
    state.messages.push(Message::user(feedback.rendered.clone()));
    state.last_feedback = Some(feedback);
}

fn truncate(text: &str, limit: usize) -> &str {
    if text.len() <= limit {
        return text;
    }
    let mut end = limit;
    while !text.is_char_boundary(end) {
        end -= 1;
    }
    &text[..end]
}

fn raw_block(outcome: &SolverOutcome) -> String {
    let raw = truncate(&outcome.raw, FEEDBACK_RAW_LIMIT);
    let mut s = format!("Solver output:\n{raw}");
    if raw.len() < outcome.raw.len() {
        s.push_str("\n[output truncated]");
    }
    s
}

/// Classifies a solver outcome and renders the message sent back to the agent.
pub fn evaluate(outcome: SolverOutcome) -> Feedback {
    let script_errors: Vec<String> = outcome.script_errors().map(|e| e.render()).collect();
    let (evaluation, rendered) = if !script_errors.is_empty() {
        let text = format!(
            "The solver reported {} error(s). Correct the syntax errors while preserving the logical \
             relations, then send the complete corrected script.\n\nErrors:\n{}\n\n{}",
            script_errors.len(),
            script_errors.join("\n"),
            raw_block(&outcome)
        );
        (Evaluation::ErrorsPresent, text)
    } else if outcome.is_clean_solution() {
        let text = format!(
            "The solver found a model without errors.\n\n{}\n{}",
            outcome.status.as_str(),
            outcome.render_model()
        );
        (Evaluation::SatNoErrors, text)
    } else if outcome.status == SatStatus::Unsat {
        let text = format!(
            "The solver answered unsat: the constraints contradict each other. Revisit each constraint \
             against its clue and update the logical relationships between variables.\n\n{}",
            raw_block(&outcome)
        );
        (Evaluation::Unsat, text)
    } else {
        let text = format!(
            "The solver gave no usable model (verdict: {}). Make sure the script asserts every clue and \
             ends with (check-sat) and (get-model).\n\n{}",
            outcome.status.as_str(),
            raw_block(&outcome)
        );
        (Evaluation::Inconclusive, text)
    };
    Feedback { outcome: Some(outcome), evaluation, rendered }
}

pub fn no_script_feedback(err: &ExtractError) -> Feedback {
    Feedback {
        outcome: None,
        evaluation: Evaluation::NoScript,
        rendered: format!("{err}. Reply with the complete SMT-LIB script in a single ```smt2 fenced block."),
    }
}

fn timeout_feedback(ms: u64) -> Feedback {
    Feedback {
        outcome: None,
        evaluation: Evaluation::Inconclusive,
        rendered: format!("The solver did not finish within {ms} ms. Simplify the encoding and resend the script."),
    }
}

fn error_classes(feedback: Option<&Feedback>) -> Vec<String> {
    let mut classes: Vec<String> = feedback
        .and_then(|f| f.outcome.as_ref())
        .map(|o| o.script_errors().map(|e| e.message.clone()).collect())
        .unwrap_or_default();
    classes.sort();
    classes.dedup();
    classes
}

/// Labels the step from `prev` to `next` as an iterative or radical
/// refinement. Used for analysis only; control flow depends on [`evaluate`].
/// `cold_restart` marks the first script of an attempt after a failed one.
pub fn classify_decision(
    prev: Option<&SmtScript>,
    next: &SmtScript,
    feedback: Option<&Feedback>,
    cold_restart: bool,
) -> Decision {
    let sim = prev.map(|p| similarity(&p.text, &next.text));
    let kind = match sim {
        Some(s) if s < RADICAL_THRESHOLD => DecisionKind::RadicalRefinement,
        None if cold_restart => DecisionKind::RadicalRefinement,
        _ => DecisionKind::IterativeRefinement,
    };
    Decision { kind, basis: DecisionBasis { similarity: sim, error_classes: error_classes(feedback), cold_restart } }
}

struct Loop<'a> {
    puzzle: &'a Puzzle,
    client: &'a dyn LlmClient,
    cfg: &'a RunConfig,
    sink: &'a mut dyn EventSink,
    calls: u32,
}

impl Loop<'_> {
    fn emit<T: Serialize>(&mut self, attempt: u32, action: u32, kind: EventKind, payload: &T) {
        let value = serde_json::to_value(payload).unwrap_or(serde_json::Value::Null);
        self.sink.record(&self.puzzle.id, attempt, action, kind, value);
    }

    /// One client call with a single immediate retry.
    fn call(&mut self, messages: &[Message], tau: f64, attempt: u32, action: u32) -> Result<String, ClientError> {
        let mut last = None;
        for _ in 0..2 {
            self.calls += 1;
            let call = self.calls;
            let latest = messages.last().map(|m| m.content.as_str()).unwrap_or("");
            self.emit(
                attempt,
                action,
                EventKind::Prompt,
                &serde_json::json!({"call": call, "temperature": tau, "messages": messages.len(), "content": latest}),
            );
            match self.client.complete(messages, tau) {
                Ok(text) => {
                    self.emit(attempt, action, EventKind::Completion, &serde_json::json!({"call": call, "text": text}));
                    return Ok(text);
                }
                Err(e) => {
                    tracing::warn!(puzzle = %self.puzzle.id, call, error = %e, "client call failed");
                    self.emit(
                        attempt,
                        action,
                        EventKind::ClientFailure,
                        &serde_json::json!({"call": call, "error": e.to_string()}),
                    );
                    last = Some(e);
                }
            }
        }
        Err(last.expect("two failed tries"))
    }

    fn attempt(&mut self, index: u32, tau: f64, result: &mut RunResult) -> Result<AttemptRecord, AgentError> {
        let mut rec = AttemptRecord {
            index,
            temperature: tau,
            decomposition: None,
            actions: 0,
            iterations: Vec::new(),
            failure: None,
            converged: false,
        };
        if self.cfg.decomposition {
            let request = [decomposition_request(self.puzzle, &RolePrompt::decomposer())];
            match self.call(&request, tau, index, 0) {
                Ok(reply) => rec.decomposition = Some(split_lines(&reply)),
                Err(e) => {
                    rec.failure = Some(format!("decomposition: {e}"));
                    return Ok(rec);
                }
            }
        }
        let mut state = perceive_initial(self.puzzle, &RolePrompt::solver(), rec.decomposition.as_deref())?;
        let mut pending = false;

        while state.t < self.cfg.max_actions {
            let action = state.t + 1;
            let reply = match self.call(&state.messages, tau, index, action) {
                Ok(r) => r,
                Err(e) => {
                    rec.failure = Some(e.to_string());
                    break;
                }
            };
            state.messages.push(Message::assistant(reply.clone()));
            state.t = action;
            rec.actions = action;

            let mut script = match extract_smt(&reply) {
                Ok(s) => s,
                Err(e) if pending => {
                    let _ = e;
                    let decision = Decision {
                        kind: DecisionKind::Submit,
                        basis: DecisionBasis { similarity: None, error_classes: vec![], cold_restart: false },
                    };
                    self.emit(index, action, EventKind::Decision, &decision);
                    rec.iterations.push(IterationRecord {
                        action,
                        reply,
                        script: None,
                        extract_error: None,
                        outcome: None,
                        evaluation: Evaluation::SatNoErrors,
                        decision: Some(decision),
                        delta: None,
                        confirmation: true,
                    });
                    rec.converged = true;
                    break;
                }
                Err(e) => {
                    let fb = no_script_feedback(&e);
                    rec.iterations.push(IterationRecord {
                        action,
                        reply,
                        script: None,
                        extract_error: Some(e.to_string()),
                        outcome: None,
                        evaluation: fb.evaluation,
                        decision: None,
                        delta: None,
                        confirmation: false,
                    });
                    refine_state(&mut state, fb);
                    continue;
                }
            };
            script.iteration = action;
            pending = false;

            let fb = match run_solver(&script, &self.cfg.solver) {
                Ok(outcome) => evaluate(outcome),
                Err(SolverFailure::NotFound(p)) => return Err(AgentError::SolverMissing(p)),
                Err(SolverFailure::Timeout(ms)) => timeout_feedback(ms),
                Err(other) => return Err(AgentError::Solver(other)),
            };
            if let Some(o) = &fb.outcome {
                self.emit(index, action, EventKind::SolverOutcome, o);
            }
            let prev = state.current_script.as_ref();
            let mut decision = classify_decision(prev, &script, state.last_feedback.as_ref(), index > 1);
            if fb.evaluation == Evaluation::SatNoErrors {
                decision.kind = DecisionKind::Submit;
            }
            self.emit(index, action, EventKind::Decision, &decision);
            let delta = LineDelta::between(prev.map_or("", |p| p.text.as_str()), &script.text);

            result.final_script = Some(script.clone());
            result.final_outcome = fb.outcome.clone();
            rec.iterations.push(IterationRecord {
                action,
                reply,
                script: Some(script.clone()),
                extract_error: None,
                outcome: fb.outcome.clone(),
                evaluation: fb.evaluation,
                decision: Some(decision),
                delta: Some(delta),
                confirmation: false,
            });
            state.current_script = Some(script);

            if fb.evaluation == Evaluation::SatNoErrors {
                if self.cfg.confirm_solution && state.t < self.cfg.max_actions {
                    let confirm = Feedback { rendered: format!("{}\n\n{CONFIRM_PROMPT}", fb.rendered), ..fb };
                    refine_state(&mut state, confirm);
                    pending = true;
                    continue;
                }
                rec.converged = true;
                break;
            }
            refine_state(&mut state, fb);
        }
        Ok(rec)
    }
}

/// Runs the full feedback loop without recording events.
pub fn run_feedback_loop(puzzle: &Puzzle, client: &dyn LlmClient, cfg: &RunConfig) -> Result<RunResult, AgentError> {
    run_feedback_loop_with(puzzle, client, cfg, &mut NullSink)
}

/// Runs the full feedback loop, reporting every prompt, completion, solver
/// outcome and decision to `sink` as it happens.
pub fn run_feedback_loop_with(
    puzzle: &Puzzle,
    client: &dyn LlmClient,
    cfg: &RunConfig,
    sink: &mut dyn EventSink,
) -> Result<RunResult, AgentError> {
    cfg.validate()?;
    if puzzle.clues.is_empty() {
        return Err(AgentError::EmptyClues(puzzle.id.clone()));
    }
    let mut result = RunResult {
        puzzle_id: puzzle.id.clone(),
        model_name: cfg.model_name.clone(),
        converged: false,
        attempts: Vec::new(),
        final_outcome: None,
        final_script: None,
        client_calls: 0,
    };
    let mut lp = Loop { puzzle, client, cfg, sink, calls: 0 };
    for (i, &tau) in cfg.temperature_schedule.iter().take(cfg.attempts()).enumerate() {
        let attempt = lp.attempt(i as u32 + 1, tau, &mut result)?;
        let converged = attempt.converged;
        result.attempts.push(attempt);
        if converged {
            result.converged = true;
            break;
        }
    }
    result.client_calls = lp.calls;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puzzle::bundled_dataset;
    use crate::smt::parse_outcome;

    fn houses() -> Puzzle {
        bundled_dataset().into_iter().find(|p| p.id == "houses").unwrap()
    }

    const FIRST_OUT: &str = include_str!("../../fixtures/ostrich_session/first_output.txt");
    const SECOND_OUT: &str = include_str!("../../fixtures/ostrich_session/second_output.txt");
    const FIRST: &str = include_str!("../../fixtures/ostrich_session/first_script.smt2");
    const SECOND: &str = include_str!("../../fixtures/ostrich_session/second_script.smt2");
    const PRINTED_FIRST: &str = include_str!("../../fixtures/ostrich_session/printed_first_script.smt2");

    #[test]
    fn initial_state_is_one_message() {
        let s = perceive_initial(&houses(), &RolePrompt::solver(), None).unwrap();
        assert_eq!(s.t, 0);
        assert_eq!(s.messages.len(), 1);
        assert!(s.messages[0].content.contains("The American lives in the Green house."));
    }

    #[test]
    fn decomposition_lines_are_included_verbatim() {
        let lines: Vec<String> = (1..=5).map(|i| format!("constraint {i}")).collect();
        let s = perceive_initial(&houses(), &RolePrompt::solver(), Some(&lines)).unwrap();
        for l in &lines {
            assert!(s.messages[0].content.contains(&format!("{l}\n")));
        }
    }

    #[test]
    fn empty_clues_are_rejected() {
        let mut p = houses();
        p.clues.clear();
        assert!(matches!(perceive_initial(&p, &RolePrompt::solver(), None), Err(AgentError::EmptyClues(_))));
        assert!(matches!(RolePrompt::new(AgentKind::Solver, "  "), Err(AgentError::EmptyRole)));
    }

    #[test]
    fn decompose_drops_blank_lines() {
        let c = ScriptedClient::constant("a\n\n  b  \n\nc\nd\ne\n");
        let lines = decompose(&houses(), &c, &RolePrompt::decomposer(), 0.0).unwrap();
        assert_eq!(lines, vec!["a", "b", "c", "d", "e"]);
        let failing = ScriptedClient::new(ScriptSpec::default());
        assert!(decompose(&houses(), &failing, &RolePrompt::decomposer(), 0.0).is_err());
    }

    #[test]
    fn evaluation_classes() {
        let fb = evaluate(parse_outcome(FIRST_OUT));
        assert_eq!(fb.evaluation, Evaluation::ErrorsPresent);
        for e in &fb.outcome.as_ref().unwrap().errors {
            assert!(fb.rendered.contains(&e.render()));
        }
        assert!(fb.rendered.contains("(error \"line 15 column 0: invalid command, '(' expected\")"));

        let fb = evaluate(parse_outcome(SECOND_OUT));
        assert_eq!(fb.evaluation, Evaluation::SatNoErrors);
        for d in &fb.outcome.as_ref().unwrap().model {
            assert!(fb.rendered.contains(&d.name));
        }

        let fb = evaluate(parse_outcome("unsat\n(error \"line 9 column 10: model is not available\")"));
        assert_eq!(fb.evaluation, Evaluation::Unsat);
        assert!(fb.rendered.contains("Revisit"));

        assert_eq!(evaluate(parse_outcome("unknown")).evaluation, Evaluation::Inconclusive);
        assert_eq!(evaluate(parse_outcome("sat\n()")).evaluation, Evaluation::Inconclusive);
    }

    #[test]
    fn raw_output_is_truncated() {
        let mut o = parse_outcome("unsat");
        o.raw = "x".repeat(FEEDBACK_RAW_LIMIT * 2);
        let fb = evaluate(o);
        assert!(fb.rendered.len() < FEEDBACK_RAW_LIMIT + 500);
        assert!(fb.rendered.contains("[output truncated]"));
    }

    #[test]
    fn refine_keeps_t() {
        let mut s = perceive_initial(&houses(), &RolePrompt::solver(), None).unwrap();
        s.messages.push(Message::assistant("x"));
        s.t = 1;
        refine_state(&mut s, evaluate(parse_outcome(FIRST_OUT)));
        assert_eq!((s.t, s.messages.len()), (1, 3));
    }

    #[test]
    fn decision_classification() {
        let a = SmtScript::new(SECOND, crate::smt::Provenance::Agent, 1);
        let fb = evaluate(parse_outcome(FIRST_OUT));
        let d = classify_decision(Some(&a), &a, Some(&fb), false);
        assert_eq!(d.kind, DecisionKind::IterativeRefinement);
        assert_eq!(d.basis.similarity, Some(1.0));
        assert!(d.basis.error_classes.contains(&"invalid command, '(' expected".to_string()));

        let d = classify_decision(None, &a, None, false);
        assert_eq!(d.kind, DecisionKind::IterativeRefinement);
        let d = classify_decision(None, &a, None, true);
        assert_eq!(d.kind, DecisionKind::RadicalRefinement);

        // the printed pair differs only by re-wrapping and the closing commands
        let printed = SmtScript::new(PRINTED_FIRST, crate::smt::Provenance::Agent, 1);
        let d = classify_decision(Some(&printed), &a, Some(&fb), false);
        assert_eq!(d.kind, DecisionKind::IterativeRefinement);
        assert!((d.basis.similarity.unwrap() - 36.0 / 38.0).abs() < 1e-6, "{:?}", d.basis.similarity);

        // the replayed first script also carries four stray prose lines
        let first = SmtScript::new(FIRST, crate::smt::Provenance::Agent, 1);
        let d = classify_decision(Some(&first), &a, Some(&fb), false);
        assert_eq!(d.kind, DecisionKind::IterativeRefinement);
        assert!(d.basis.similarity.unwrap() > 0.8, "{:?}", d.basis.similarity);

        let other = SmtScript::new("(declare-const q Int)\n(assert (> q 3))\n", crate::smt::Provenance::Agent, 2);
        assert_eq!(classify_decision(Some(&a), &other, None, false).kind, DecisionKind::RadicalRefinement);
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig::default().validate().is_ok());
        assert_eq!(RunConfig::default().attempts(), 3);
        let c = RunConfig { max_retries: Some(0), ..RunConfig::default() };
        assert_eq!(c.attempts(), 1);
        for bad in [
            RunConfig { temperature_schedule: vec![], ..RunConfig::default() },
            RunConfig { temperature_schedule: vec![0.5, 0.1], ..RunConfig::default() },
            RunConfig { max_actions: 0, ..RunConfig::default() },
        ] {
            assert!(matches!(bad.validate(), Err(AgentError::InvalidConfig(_))));
        }
    }
}
