//! Run transcripts: one JSON record per event, appended as the run proceeds.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::agent::ScriptSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Prompt,
    Completion,
    ClientFailure,
    SolverOutcome,
    Decision,
    Grade,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub seq: u64,
    pub puzzle_id: String,
    /// 1-based attempt; 0 for run-level events such as the grade.
    pub attempt: u32,
    /// 1-based agent action; 0 for decomposition and run-level events.
    pub action: u32,
    pub kind: EventKind,
    pub payload: Value,
}

pub trait EventSink {
    fn record(&mut self, puzzle_id: &str, attempt: u32, action: u32, kind: EventKind, payload: Value);
}

pub struct NullSink;

impl EventSink for NullSink {
    fn record(&mut self, _: &str, _: u32, _: u32, _: EventKind, _: Value) {}
}

/// Keeps records in memory.
#[derive(Debug, Default)]
pub struct MemorySink {
    pub records: Vec<TranscriptRecord>,
}

impl EventSink for MemorySink {
    fn record(&mut self, puzzle_id: &str, attempt: u32, action: u32, kind: EventKind, payload: Value) {
        let seq = self.records.len() as u64 + 1;
        self.records.push(TranscriptRecord { seq, puzzle_id: puzzle_id.into(), attempt, action, kind, payload });
    }
}

/// Appends JSON lines to a file, flushing after each record.
pub struct TranscriptWriter {
    file: File,
    seq: u64,
    error: Option<std::io::Error>,
}

impl TranscriptWriter {
    /// Creates (truncating) the transcript file.
    pub fn create(path: impl AsRef<Path>) -> std::io::Result<Self> {
        let file = OpenOptions::new().create(true).write(true).truncate(true).open(path)?;
        Ok(TranscriptWriter { file, seq: 0, error: None })
    }

    /// First write error, if any occurred.
    pub fn finish(self) -> std::io::Result<()> {
        match self.error {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

impl EventSink for TranscriptWriter {
    fn record(&mut self, puzzle_id: &str, attempt: u32, action: u32, kind: EventKind, payload: Value) {
        self.seq += 1;
        let rec = TranscriptRecord { seq: self.seq, puzzle_id: puzzle_id.into(), attempt, action, kind, payload };
        let mut line = serde_json::to_string(&rec).expect("records serialize");
        line.push('\n');
        if let Err(e) = self.file.write_all(line.as_bytes()).and_then(|_| self.file.flush()) {
            self.error.get_or_insert(e);
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TranscriptError {
    #[error("transcript i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("transcript line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub fn read_transcript(path: impl AsRef<Path>) -> Result<Vec<TranscriptRecord>, TranscriptError> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec =
            serde_json::from_str(&line).map_err(|e| TranscriptError::Parse { line: i + 1, message: e.to_string() })?;
        out.push(rec);
    }
    Ok(out)
}

/// Rebuilds the client side of a recorded run: completions keyed by call
/// ordinal, and the ordinals that failed.
pub fn replay_spec(records: &[TranscriptRecord]) -> ScriptSpec {
    let mut spec = ScriptSpec::default();
    for r in records {
        let call = r.payload.get("call").and_then(Value::as_u64).map(|c| c as u32);
        match (r.kind, call) {
            (EventKind::Completion, Some(call)) => {
                let text = r.payload.get("text").and_then(Value::as_str).unwrap_or_default();
                spec.responses.insert(call, text.to_string());
            }
            (EventKind::ClientFailure, Some(call)) => {
                spec.fail.insert(call);
            }
            _ => {}
        }
    }
    spec
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn writer_appends_numbered_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.jsonl");
        let mut w = TranscriptWriter::create(&path).unwrap();
        w.record("p", 1, 1, EventKind::Completion, json!({"call": 1, "text": "hello"}));
        w.record("p", 1, 1, EventKind::ClientFailure, json!({"call": 2, "error": "boom"}));
        w.finish().unwrap();
        let recs = read_transcript(&path).unwrap();
        assert_eq!(recs.iter().map(|r| r.seq).collect::<Vec<_>>(), vec![1, 2]);
        let spec = replay_spec(&recs);
        assert_eq!(spec.responses[&1], "hello");
        assert!(spec.fail.contains(&2));
    }

    #[test]
    fn bad_line_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.jsonl");
        std::fs::write(&path, "{not json}\n").unwrap();
        assert!(matches!(read_transcript(&path), Err(TranscriptError::Parse { line: 1, .. })));
    }
}
