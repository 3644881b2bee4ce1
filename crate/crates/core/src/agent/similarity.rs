//! Script comparison for refinement classification and constraint deltas.
//!
//! Similarity is measured over top-level statements rather than physical
//! lines: agents often re-wrap an otherwise unchanged assertion, which a
//! line diff would count as a rewrite.

use serde::{Deserialize, Serialize};
use similar::{capture_diff_slices, diff_ratio, Algorithm, ChangeTag, TextDiff};

/// Splits SMT-LIB text into whitespace-normalized top-level statements.
/// Comments are dropped; stray text outside any S-expression forms one
/// statement per physical line.
pub fn statements(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut depth = 0usize;
    let mut in_string = false;
    let mut in_comment = false;
    let mut pending_space = false;

    let flush = |current: &mut String, out: &mut Vec<String>| {
        let s = current.trim();
        if !s.is_empty() {
            out.push(s.to_string());
        }
        current.clear();
    };

    for c in text.chars() {
        if in_comment {
            if c == '\n' {
                in_comment = false;
                if depth == 0 {
                    flush(&mut current, &mut out);
                } else {
                    pending_space = true;
                }
            }
            continue;
        }
        if in_string {
            current.push(c);
            if c == '"' {
                in_string = false;
            }
            continue;
        }
        match c {
            ';' => in_comment = true,
            '"' => {
                push_pending(&mut current, &mut pending_space);
                current.push(c);
                in_string = true;
            }
            '(' => {
                if depth == 0 {
                    flush(&mut current, &mut out);
                    pending_space = false;
                }
                push_pending(&mut current, &mut pending_space);
                current.push(c);
                depth += 1;
            }
            ')' => {
                pending_space = false;
                current.push(c);
                if depth > 0 {
                    depth -= 1;
                    if depth == 0 {
                        flush(&mut current, &mut out);
                    }
                }
            }
            '\n' if depth == 0 => {
                flush(&mut current, &mut out);
                pending_space = false;
            }
            c if c.is_whitespace() => pending_space = !current.is_empty(),
            c => {
                push_pending(&mut current, &mut pending_space);
                current.push(c);
            }
        }
    }
    flush(&mut current, &mut out);
    out
}

fn push_pending(current: &mut String, pending: &mut bool) {
    if *pending && !current.is_empty() && !current.ends_with('(') {
        current.push(' ');
    }
    *pending = false;
}

/// Ratio in [0, 1] of matching statements between two scripts.
pub fn similarity(prev: &str, next: &str) -> f64 {
    let a = statements(prev);
    let b = statements(next);
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let ops = capture_diff_slices(Algorithm::Myers, &a, &b);
    f64::from(diff_ratio(&ops, a.len(), b.len()))
}

/// Physical lines removed from and added to a script between two actions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineDelta {
    pub removed: Vec<String>,
    pub added: Vec<String>,
}

impl LineDelta {
    pub fn between(prev: &str, next: &str) -> LineDelta {
        let mut delta = LineDelta::default();
        for change in TextDiff::from_lines(prev, next).iter_all_changes() {
            let line = change.value().trim_end_matches('\n').to_string();
            match change.tag() {
                ChangeTag::Delete => delta.removed.push(line),
                ChangeTag::Insert => delta.added.push(line),
                ChangeTag::Equal => {}
            }
        }
        delta
    }

    pub fn is_empty(&self) -> bool {
        self.removed.is_empty() && self.added.is_empty()
    }
}
