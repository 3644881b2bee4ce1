//! Deterministic autograder: compares a decoded solver model with the answer
//! key, one verdict per key cell.

use serde::{Deserialize, Serialize};

use crate::agent::{Evaluation, RunResult};
use crate::assignment::{AssignedValue, Assignment};
use crate::encoder::{decode_with_table, DecodeIssue, Naming};
use crate::puzzle::{Category, Puzzle};
use crate::smt::{LookupTable, SmtScript, SolverOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Correct,
    Incorrect,
    /// The model binds the cell to a code no lookup table explains.
    Unmapped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellVerdict {
    pub entity: String,
    pub category: String,
    pub expected: String,
    /// What the model said, absent when it said nothing decodable.
    pub actual: Option<AssignedValue>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradeReport {
    pub puzzle_id: String,
    pub verdicts: Vec<CellVerdict>,
    pub correct_matches: usize,
    pub total_matches: usize,
    pub partial_score: f64,
    pub solved_fully: bool,
    pub no_model: bool,
    /// Model entries that named no cell or carried an unknown code.
    pub decode_issues: Vec<DecodeIssue>,
}

impl GradeReport {
    fn build(puzzle: &Puzzle, verdicts: Vec<CellVerdict>, no_model: bool, decode_issues: Vec<DecodeIssue>) -> Self {
        let total = puzzle.assignment_count();
        let correct = verdicts.iter().filter(|v| v.verdict == Verdict::Correct).count();
        GradeReport {
            puzzle_id: puzzle.id.clone(),
            verdicts,
            correct_matches: correct,
            total_matches: total,
            partial_score: if total == 0 { 0.0 } else { correct as f64 / total as f64 },
            solved_fully: total > 0 && correct == total,
            no_model,
            decode_issues,
        }
    }

    /// Report for a run that produced no model at all.
    pub fn no_model(puzzle: &Puzzle) -> Self {
        let verdicts = key_cells(puzzle)
            .map(|(entity, category, expected)| CellVerdict {
                entity,
                category,
                expected,
                actual: None,
                verdict: Verdict::Incorrect,
            })
            .collect();
        GradeReport::build(puzzle, verdicts, true, Vec::new())
    }
}

fn key_cells(puzzle: &Puzzle) -> impl Iterator<Item = (String, String, String)> + '_ {
    let anchor = puzzle.anchor();
    let attrs: Vec<&Category> = puzzle.attribute_categories().map(|(_, c)| c).collect();
    anchor.values.iter().flat_map(move |entity| {
        let row =
            puzzle.solution.rows.iter().find(|(k, _)| anchor.index_of(k) == anchor.index_of(entity)).map(|(_, r)| r);
        attrs.clone().into_iter().map(move |cat| {
            let expected = row
                .and_then(|r| r.iter().find(|(k, _)| crate::names::same_label(k, &cat.name)))
                .map(|(_, v)| v.clone())
                .unwrap_or_default();
            (entity.clone(), cat.name.clone(), expected)
        })
    })
}

/// Index within `cat` denoted by an assigned value.
fn value_index(cat: &Category, value: &AssignedValue) -> Option<usize> {
    match value {
        AssignedValue::Label(l) => cat.index_of_loose(l),
        AssignedValue::Position(p) if cat.is_ordinal() && *p >= 1 && (*p as usize) <= cat.len() => {
            Some(*p as usize - 1)
        }
        AssignedValue::Position(p) => cat.index_of_loose(&p.to_string()),
    }
}

/// Grades the assignments of one model against the puzzle's key.
pub fn grade_assignments(puzzle: &Puzzle, assignments: &[Assignment], issues: Vec<DecodeIssue>) -> GradeReport {
    let anchor = puzzle.anchor();
    let naming = Naming::new(puzzle);
    let verdicts = key_cells(puzzle)
        .map(|(entity, category, expected)| {
            let cat = puzzle.category(&category).expect("key cell category");
            // a later binding of the same cell overrides an earlier one
            let actual = assignments
                .iter()
                .rev()
                .find(|a| {
                    anchor.index_of(&a.entity) == anchor.index_of(&entity)
                        && crate::names::same_label(&a.category, &category)
                })
                .map(|a| a.value.clone());
            let verdict = match &actual {
                Some(v) => {
                    let want = cat.index_of_loose(&expected);
                    if want.is_some() && value_index(cat, v) == want {
                        Verdict::Correct
                    } else {
                        Verdict::Incorrect
                    }
                }
                None => {
                    let unmapped = issues.iter().any(|i| match i {
                        DecodeIssue::UnmappedCode { name, .. } => {
                            crate::encoder::resolve_constant(puzzle, &naming, name).is_some_and(|(e, c)| {
                                anchor.values[e] == entity && puzzle.categories[c].name == category
                            })
                        }
                        DecodeIssue::UnknownName { .. } => false,
                    });
                    if unmapped {
                        Verdict::Unmapped
                    } else {
                        Verdict::Incorrect
                    }
                }
            };
            CellVerdict { entity, category, expected, actual, verdict }
        })
        .collect();
    GradeReport::build(puzzle, verdicts, false, issues)
}

/// Decodes `outcome` (through its lookup comments and those of `script`) and
/// grades it. An outcome without a model scores 0 and is flagged.
pub fn grade(outcome: &SolverOutcome, script: Option<&SmtScript>, puzzle: &Puzzle) -> GradeReport {
    if !outcome.has_model() {
        return GradeReport::no_model(puzzle);
    }
    let mut table = LookupTable::default();
    table.extend(outcome.lookup_comments.iter().map(String::as_str));
    if let Some(s) = script {
        table.extend(s.text.lines());
    }
    let decoded = decode_with_table(outcome, puzzle, &table);
    grade_assignments(puzzle, &decoded.assignments, decoded.issues)
}

/// Which outcome a run was graded on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoringRule {
    Converged,
    /// Not converged; graded on the last model with no script errors.
    LastErrorFreeModel,
    /// Not converged and no usable model; scored 0.
    NoModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PuzzleScore {
    pub puzzle_id: String,
    pub difficulty: crate::puzzle::Difficulty,
    pub converged: bool,
    pub rule: ScoringRule,
    pub actions: u32,
    pub attempts: usize,
    pub report: GradeReport,
}

/// Grades a finished run under the non-convergence rule.
pub fn score_run(puzzle: &Puzzle, run: &RunResult) -> PuzzleScore {
    let (rule, report) = if run.converged {
        let (outcome, script) = run
            .iterations()
            .filter(|it| it.evaluation == Evaluation::SatNoErrors && it.outcome.is_some())
            .last()
            .map(|it| (it.outcome.as_ref().unwrap(), it.script.as_ref()))
            .expect("converged runs carry a clean outcome");
        (ScoringRule::Converged, grade(outcome, script, puzzle))
    } else {
        let last_clean = run
            .iterations()
            .filter_map(|it| it.outcome.as_ref().map(|o| (o, it.script.as_ref())))
            .filter(|(o, _)| o.has_model() && o.script_errors().next().is_none())
            .last();
        match last_clean {
            Some((o, s)) => (ScoringRule::LastErrorFreeModel, grade(o, s, puzzle)),
            None => (ScoringRule::NoModel, GradeReport::no_model(puzzle)),
        }
    };
    PuzzleScore {
        puzzle_id: puzzle.id.clone(),
        difficulty: puzzle.difficulty,
        converged: run.converged,
        rule,
        actions: run.total_actions(),
        attempts: run.attempts.len(),
        report,
    }
}

/// One row of the results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub model: String,
    /// Single temperature or a schedule.
    pub variable_temperature: bool,
    pub temperature: f64,
    pub decomposition: bool,
    pub avg_partial_score: f64,
    pub solved: usize,
    pub puzzles: usize,
}

impl SummaryRow {
    pub fn solved_pct(&self) -> f64 {
        if self.puzzles == 0 {
            0.0
        } else {
            100.0 * self.solved as f64 / self.puzzles as f64
        }
    }

    pub fn t_label(&self) -> String {
        if self.variable_temperature {
            "Var.".into()
        } else {
            format!("{}", self.temperature)
        }
    }
}

/// Aggregates per-puzzle scores into one configuration row.
pub fn grade_batch(model: &str, schedule: &[f64], decomposition: bool, scores: &[PuzzleScore]) -> SummaryRow {
    let n = scores.len();
    let sum: f64 = scores.iter().map(|s| s.report.partial_score).sum();
    SummaryRow {
        model: model.to_string(),
        variable_temperature: schedule.len() > 1,
        temperature: schedule.first().copied().unwrap_or(0.0),
        decomposition,
        avg_partial_score: if n == 0 { 0.0 } else { sum / n as f64 },
        solved: scores.iter().filter(|s| s.report.solved_fully).count(),
        puzzles: n,
    }
}
