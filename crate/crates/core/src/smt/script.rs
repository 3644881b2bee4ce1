use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Agent,
    ReferenceEncoder,
}

/// SMT-LIB source handed to the solver.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmtScript {
    pub text: String,
    pub provenance: Provenance,
    /// Agent action number within an attempt (0 for encoder output).
    pub iteration: u32,
}

impl SmtScript {
    pub fn new(text: impl Into<String>, provenance: Provenance, iteration: u32) -> Self {
        SmtScript { text: text.into(), provenance, iteration }
    }

    /// Lines starting with `;`, trimmed.
    pub fn comment_lines(&self) -> Vec<String> {
        comment_lines(&self.text)
    }
}

pub(crate) fn comment_lines(text: &str) -> Vec<String> {
    text.lines().map(str::trim).filter(|l| l.starts_with(';')).map(str::to_string).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("agent reply is empty")]
    Empty,
    #[error("no SMT-LIB script found in agent reply")]
    NoScriptFound,
}

/// Pulls the SMT-LIB script out of an agent reply: the last non-empty fenced
/// code block, else the whole reply when it starts with an S-expression.
pub fn extract_smt(agent_text: &str) -> Result<SmtScript, ExtractError> {
    if agent_text.trim().is_empty() {
        return Err(ExtractError::Empty);
    }
    if let Some(block) = fenced_blocks(agent_text).into_iter().rev().find(|b| !b.trim().is_empty()) {
        return Ok(SmtScript::new(block, Provenance::Agent, 0));
    }
    let first_code_line = agent_text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with(';'));
    match first_code_line {
        Some(line) if line.starts_with('(') => Ok(SmtScript::new(agent_text, Provenance::Agent, 0)),
        _ => Err(ExtractError::NoScriptFound),
    }
}

fn fenced_blocks(text: &str) -> Vec<String> {
    let mut blocks = Vec::new();
    let mut current: Option<Vec<&str>> = None;
    for line in text.lines() {
        let is_fence = line.trim_start().starts_with("```");
        match (&mut current, is_fence) {
            (None, true) => current = Some(Vec::new()),
            (Some(lines), true) => {
                blocks.push(join_block(lines));
                current = None;
            }
            (Some(lines), false) => lines.push(line),
            (None, false) => {}
        }
    }
    // an unterminated fence runs to the end of the reply
    if let Some(lines) = current {
        blocks.push(join_block(&lines));
    }
    blocks
}

fn join_block(lines: &[&str]) -> String {
    let mut s = lines.join("\n");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_fenced_block() {
        let text = "Here you go:\n```smt2\n(set-logic QF_LIA)\n(check-sat)\n```\nDone.";
        let s = extract_smt(text).unwrap();
        assert_eq!(s.text, "(set-logic QF_LIA)\n(check-sat)\n");
        assert_eq!(s.provenance, Provenance::Agent);
    }

    #[test]
    fn last_block_wins() {
        let text = "```\n(assert true)\n```\nrevised:\n```lisp\n(assert false)\n```";
        assert_eq!(extract_smt(text).unwrap().text, "(assert false)\n");
    }

    #[test]
    fn bare_sexpr_reply_with_comments() {
        let text = "; lookup: 1 is Red\n(declare-const x Int)\n(check-sat)";
        let s = extract_smt(text).unwrap();
        assert_eq!(s.text, text);
        assert_eq!(s.comment_lines(), vec!["; lookup: 1 is Red"]);
    }

    #[test]
    fn prose_has_no_script() {
        assert_eq!(extract_smt("I think Kermit won the race.").unwrap_err(), ExtractError::NoScriptFound);
        assert_eq!(extract_smt("   ").unwrap_err(), ExtractError::Empty);
    }

    #[test]
    fn unterminated_fence() {
        let s = extract_smt("```\n(check-sat)").unwrap();
        assert_eq!(s.text, "(check-sat)\n");
    }

    #[test]
    fn fenced_comment_lines_preserved() {
        let s = extract_smt("```\n; 1 is Brazilian\n(check-sat)\n```").unwrap();
        assert!(s.text.starts_with("; 1 is Brazilian"));
    }
}
