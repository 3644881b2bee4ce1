use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::sync::OnceLock;
use std::thread;
use std::time::Duration;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use wait_timeout::ChildExt;

use super::outcome::{parse_outcome, SolverOutcome};
use super::script::SmtScript;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub executable: PathBuf,
    pub args: Vec<String>,
    pub timeout_ms: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { executable: PathBuf::from("z3"), args: vec!["-in".into(), "-smt2".into()], timeout_ms: 10_000 }
    }
}

#[derive(Debug, Error)]
pub enum SolverFailure {
    #[error("solver executable {0:?} not found")]
    NotFound(PathBuf),
    #[error("solver timed out after {0} ms")]
    Timeout(u64),
    #[error("solver timeout must be positive")]
    InvalidTimeout,
    #[error("solver i/o: {0}")]
    Io(#[from] std::io::Error),
}

fn command_re(cmd: &str) -> Regex {
    Regex::new(&format!(r"\(\s*{}\s*\)", regex::escape(cmd))).unwrap()
}

fn check_sat_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| command_re("check-sat"))
}

fn get_model_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| command_re("get-model"))
}

fn strip_comments(text: &str) -> String {
    text.lines().map(|l| l.split_once(';').map_or(l, |(code, _)| code)).collect::<Vec<_>>().join("\n")
}

/// The exact text sent to the solver: the script, plus `(check-sat)` and
/// `(get-model)` when the script does not already issue them.
pub fn prepare_input(script_text: &str) -> String {
    let code = strip_comments(script_text);
    let mut input = script_text.to_string();
    if !input.ends_with('\n') {
        input.push('\n');
    }
    if !check_sat_re().is_match(&code) {
        input.push_str("(check-sat)\n");
    }
    if !get_model_re().is_match(&code) {
        input.push_str("(get-model)\n");
    }
    input
}

/// Runs raw SMT-LIB text through the solver and returns its combined output.
pub fn run_raw(input: &str, cfg: &SolverConfig) -> Result<String, SolverFailure> {
    if cfg.timeout_ms == 0 {
        return Err(SolverFailure::InvalidTimeout);
    }
    let mut child = Command::new(&cfg.executable)
        .args(&cfg.args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound | std::io::ErrorKind::PermissionDenied => {
                SolverFailure::NotFound(cfg.executable.clone())
            }
            _ => SolverFailure::Io(e),
        })?;

    let mut stdin = child.stdin.take().expect("piped stdin");
    let input = input.to_string();
    let writer = thread::spawn(move || {
        // the solver may exit early on fatal input; a broken pipe is not our error
        let _ = stdin.write_all(input.as_bytes());
    });
    let mut stdout = child.stdout.take().expect("piped stdout");
    let mut stderr = child.stderr.take().expect("piped stderr");
    let out_reader = thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stdout.read_to_end(&mut buf);
        buf
    });
    let err_reader = thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stderr.read_to_end(&mut buf);
        buf
    });

    let status = child.wait_timeout(Duration::from_millis(cfg.timeout_ms))?;
    if status.is_none() {
        let _ = child.kill();
        let _ = child.wait();
        return Err(SolverFailure::Timeout(cfg.timeout_ms));
    }
    let _ = writer.join();
    let mut raw = collect(out_reader);
    let err = collect(err_reader);
    if !err.is_empty() {
        if !raw.is_empty() && !raw.ends_with('\n') {
            raw.push('\n');
        }
        raw.push_str(&err);
    }
    Ok(raw)
}

fn collect(handle: thread::JoinHandle<Vec<u8>>) -> String {
    String::from_utf8_lossy(&handle.join().unwrap_or_default()).into_owned()
}

/// Solves `script` with the configured external solver. The outcome's
/// `lookup_comments` carry the script's own comment lines after any found in
/// the solver output.
pub fn run_solver(script: &SmtScript, cfg: &SolverConfig) -> Result<SolverOutcome, SolverFailure> {
    let raw = run_raw(&prepare_input(&script.text), cfg)?;
    let mut outcome = parse_outcome(&raw);
    outcome.lookup_comments.extend(script.comment_lines());
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn appends_missing_commands() {
        let input = prepare_input("(declare-const x Int)");
        assert_eq!(input, "(declare-const x Int)\n(check-sat)\n(get-model)\n");
    }

    #[test]
    fn keeps_existing_commands() {
        let text = "(declare-const x Int)\n( check-sat )\n(get-model)\n";
        assert_eq!(prepare_input(text), text);
    }

    #[test]
    fn commented_out_commands_do_not_count() {
        let input = prepare_input("; (check-sat)\n(check-sat)");
        assert!(input.ends_with("(check-sat)\n(get-model)\n"));
        let input = prepare_input("; (check-sat) (get-model)");
        assert!(input.ends_with("(check-sat)\n(get-model)\n"));
    }

    #[test]
    fn missing_executable() {
        let cfg = SolverConfig { executable: PathBuf::from("/nonexistent/solver-binary"), ..SolverConfig::default() };
        let script = SmtScript::new("(check-sat)", super::super::Provenance::Agent, 1);
        assert!(matches!(run_solver(&script, &cfg), Err(SolverFailure::NotFound(_))));
    }

    #[test]
    fn zero_timeout_rejected() {
        let cfg = SolverConfig { timeout_ms: 0, ..SolverConfig::default() };
        assert!(matches!(run_raw("(check-sat)", &cfg), Err(SolverFailure::InvalidTimeout)));
    }

    #[test]
    fn hanging_process_times_out() {
        let cfg = SolverConfig { executable: PathBuf::from("sleep"), args: vec!["5".into()], timeout_ms: 200 };
        assert!(matches!(run_raw("", &cfg), Err(SolverFailure::Timeout(200))));
    }
}
