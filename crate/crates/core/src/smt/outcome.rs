use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::sexp::{self, Sexp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SatStatus {
    Sat,
    Unsat,
    Unknown,
    NoVerdict,
}

impl SatStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SatStatus::Sat => "sat",
            SatStatus::Unsat => "unsat",
            SatStatus::Unknown => "unknown",
            SatStatus::NoVerdict => "no-verdict",
        }
    }
}

/// One `(error "...")` line. Position is present when the message carries a
/// `line <L> column <C>:` prefix; lines are 1-based, columns as reported.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverError {
    pub line: Option<u32>,
    pub column: Option<u32>,
    pub message: String,
}

impl SolverError {
    /// The error as the solver prints it.
    pub fn render(&self) -> String {
        let body = match (self.line, self.column) {
            (Some(l), Some(c)) => format!("line {l} column {c}: {}", self.message),
            _ => self.message.clone(),
        };
        format!("(error {})", sexp::quote(&body))
    }

    /// Raised by `(get-model)` after an unsat/unknown verdict; not a script defect.
    pub fn is_model_unavailable(&self) -> bool {
        self.message.contains("model is not available")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sort {
    Int,
    String,
    Other(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelValue {
    Int(i64),
    Str(String),
    Other(String),
}

impl ModelValue {
    pub fn render(&self) -> String {
        match self {
            ModelValue::Int(v) if *v < 0 => format!("(- {})", v.unsigned_abs()),
            ModelValue::Int(v) => v.to_string(),
            ModelValue::Str(s) => sexp::quote(s),
            ModelValue::Other(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefineFun {
    pub name: String,
    pub sort: Sort,
    pub value: ModelValue,
}

impl DefineFun {
    pub fn render(&self) -> String {
        let sort = match &self.sort {
            Sort::Int => "Int",
            Sort::String => "String",
            Sort::Other(s) => s,
        };
        format!("(define-fun {} () {sort}\n    {})", self.name, self.value.render())
    }
}

/// Structured reading of a solver reply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverOutcome {
    pub status: SatStatus,
    pub errors: Vec<SolverError>,
    pub model: Vec<DefineFun>,
    /// Comment lines that may bind integer codes to labels.
    pub lookup_comments: Vec<String>,
    pub raw: String,
}

impl SolverOutcome {
    pub fn has_model(&self) -> bool {
        !self.model.is_empty()
    }

    /// Errors caused by the script itself.
    pub fn script_errors(&self) -> impl Iterator<Item = &SolverError> {
        self.errors.iter().filter(|e| !e.is_model_unavailable())
    }

    /// sat, a non-empty model and no errors at all.
    pub fn is_clean_solution(&self) -> bool {
        self.status == SatStatus::Sat && self.errors.is_empty() && self.has_model()
    }

    /// Renders the structured fields back into solver-style text.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        for c in &self.lookup_comments {
            out.push_str(c);
            out.push('\n');
        }
        for e in &self.errors {
            out.push_str(&e.render());
            out.push('\n');
        }
        if self.status != SatStatus::NoVerdict {
            out.push_str(self.status.as_str());
            out.push('\n');
        }
        if self.has_model() {
            out.push_str(&self.render_model());
            out.push('\n');
        }
        out
    }

    pub fn render_model(&self) -> String {
        let mut out = String::from("(\n");
        for d in &self.model {
            out.push_str("  ");
            out.push_str(&d.render());
            out.push('\n');
        }
        out.push(')');
        out
    }
}

fn position_prefix() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?s)^\s*line\s+(\d+)\s+column\s+(\d+)\s*:\s*(.*?)\s*$").unwrap())
}

fn parse_error(message: &str) -> SolverError {
    match position_prefix().captures(message) {
        Some(caps) => SolverError {
            line: caps[1].parse().ok(),
            column: caps[2].parse().ok(),
            message: caps[3].split_whitespace().collect::<Vec<_>>().join(" "),
        },
        None => SolverError { line: None, column: None, message: message.trim().to_string() },
    }
}

fn parse_value(v: &Sexp) -> ModelValue {
    match v {
        Sexp::Atom(a) => a.parse().map(ModelValue::Int).unwrap_or_else(|_| ModelValue::Other(a.clone())),
        Sexp::Str(s) => ModelValue::Str(s.clone()),
        Sexp::List(items) => match items.as_slice() {
            [Sexp::Atom(op), Sexp::Atom(n)] if op == "-" => {
                n.parse::<i64>().map(|n| ModelValue::Int(-n)).unwrap_or_else(|_| ModelValue::Other(v.render()))
            }
            _ => ModelValue::Other(v.render()),
        },
    }
}

fn parse_define_fun(items: &[Sexp]) -> Option<DefineFun> {
    let [_, Sexp::Atom(name), Sexp::List(args), sort, value] = items else {
        return None;
    };
    if name.is_empty() || !args.is_empty() {
        return None;
    }
    let sort = match sort {
        Sexp::Atom(s) if s == "Int" => Sort::Int,
        Sexp::Atom(s) if s == "String" => Sort::String,
        other => Sort::Other(other.render()),
    };
    Some(DefineFun { name: name.clone(), sort, value: parse_value(value) })
}

fn walk(item: &Sexp, outcome: &mut SolverOutcome) {
    match item {
        Sexp::Atom(a) => match a.as_str() {
            "sat" => outcome.status = SatStatus::Sat,
            "unsat" => outcome.status = SatStatus::Unsat,
            "unknown" => outcome.status = SatStatus::Unknown,
            _ => {}
        },
        Sexp::Str(_) => {}
        Sexp::List(items) => match item.head() {
            Some("error") => {
                let msg = match items.get(1) {
                    Some(Sexp::Str(s)) => s.clone(),
                    Some(other) => other.render(),
                    None => String::new(),
                };
                outcome.errors.push(parse_error(&msg));
            }
            Some("define-fun") => {
                if let Some(d) = parse_define_fun(items) {
                    outcome.model.push(d);
                }
            }
            Some("model") => items[1..].iter().for_each(|i| walk(i, outcome)),
            None => items.iter().filter(|i| matches!(i, Sexp::List(_))).for_each(|i| walk(i, outcome)),
            Some(_) => {}
        },
    }
}

/// Parses complete solver output (stdout and stderr). Never fails: text it
/// cannot interpret stays in `raw`, and a reply without a verdict token is
/// `no-verdict`.
pub fn parse_outcome(raw: &str) -> SolverOutcome {
    let reading = sexp::read_all(raw);
    let mut outcome = SolverOutcome {
        status: SatStatus::NoVerdict,
        errors: Vec::new(),
        model: Vec::new(),
        lookup_comments: reading.comments,
        raw: raw.to_string(),
    };
    for item in &reading.items {
        walk(item, &mut outcome);
    }
    outcome
}
