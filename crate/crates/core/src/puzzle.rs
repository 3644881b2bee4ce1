//! Puzzles, categories, structured clues and answer keys.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::names;

#[derive(Debug, Error)]
pub enum PuzzleError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {location}: {message}")]
    Parse { location: String, message: String },
    #[error("puzzle {puzzle}: invalid {field}: {message}")]
    Invalid { puzzle: String, field: String, message: String },
}

impl PuzzleError {
    fn invalid(puzzle: &str, field: impl Into<String>, message: impl Into<String>) -> Self {
        PuzzleError::Invalid { puzzle: puzzle.to_string(), field: field.into(), message: message.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CategoryKind {
    Nominal,
    Ordinal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Category {
    pub name: String,
    pub kind: CategoryKind,
    pub values: Vec<String>,
}

impl Category {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_ordinal(&self) -> bool {
        self.kind == CategoryKind::Ordinal
    }

    /// All labels are integers (`#105`, `2001`, ...).
    pub fn is_numeric(&self) -> bool {
        !self.values.is_empty() && self.values.iter().all(|v| names::parse_numeral(v).is_some())
    }

    /// Index of the value whose label matches `label` after normalization.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        let norm = names::normalize(label);
        self.values.iter().position(|v| names::normalize(v) == norm)
    }

    /// Like [`Category::index_of`] but also accepts ordinal words and bare
    /// positions for ordinal categories, and numerals for numeric ones.
    pub fn index_of_loose(&self, label: &str) -> Option<usize> {
        if let Some(i) = self.index_of(label) {
            return Some(i);
        }
        if let Some(n) = names::parse_numeral(label) {
            if let Some(i) = self.values.iter().position(|v| names::parse_numeral(v) == Some(n)) {
                return Some(i);
            }
        }
        if self.is_ordinal() {
            let pos = names::ordinal_position(label).or_else(|| {
                // bare numbers are positions unless the labels are themselves numerals
                if self.is_numeric() {
                    None
                } else {
                    names::parse_numeral(label)
                }
            })?;
            if pos >= 1 && pos as usize <= self.len() {
                return Some(pos as usize - 1);
            }
        }
        None
    }
}

/// One clue in machine-readable form. Values are referenced by label; a label
/// shared by two categories must be qualified as `Category:Label`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StructuredClue {
    /// `a` and `b` belong to the same entity.
    Is {
        a: String,
        b: String,
    },
    IsNot {
        a: String,
        b: String,
    },
    /// position(a) = position(b) + k in `category`.
    Offset {
        a: String,
        b: String,
        category: String,
        k: i64,
    },
    /// |position(a) - position(b)| = 1 in `category`.
    Neighbor {
        a: String,
        b: String,
        category: String,
    },
    /// `c` belongs to the same entity as exactly one of `a`, `b`.
    EitherOr {
        a: String,
        b: String,
        c: String,
    },
    /// position(a) < position(b) in `category`.
    Before {
        a: String,
        b: String,
        category: String,
    },
}

impl StructuredClue {
    pub fn values(&self) -> Vec<&str> {
        match self {
            StructuredClue::Is { a, b } | StructuredClue::IsNot { a, b } => vec![a, b],
            StructuredClue::Offset { a, b, .. }
            | StructuredClue::Neighbor { a, b, .. }
            | StructuredClue::Before { a, b, .. } => vec![a, b],
            StructuredClue::EitherOr { a, b, c } => vec![a, b, c],
        }
    }

    pub fn ordinal_category(&self) -> Option<&str> {
        match self {
            StructuredClue::Offset { category, .. }
            | StructuredClue::Neighbor { category, .. }
            | StructuredClue::Before { category, .. } => Some(category),
            _ => None,
        }
    }
}

impl fmt::Display for StructuredClue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructuredClue::Is { a, b } => write!(f, "{a} is {b}"),
            StructuredClue::IsNot { a, b } => write!(f, "{a} is not {b}"),
            StructuredClue::Offset { a, b, category, k } => {
                write!(f, "{category} of {a} = {category} of {b} {:+}", k)
            }
            StructuredClue::Neighbor { a, b, category } => {
                write!(f, "{a} and {b} are adjacent in {category}")
            }
            StructuredClue::EitherOr { a, b, c } => write!(f, "{c} is either {a} or {b}"),
            StructuredClue::Before { a, b, category } => write!(f, "{a} comes before {b} in {category}"),
        }
    }
}

/// Answer key: anchor value -> (category -> value label).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionKey {
    pub anchor: String,
    pub rows: IndexMap<String, IndexMap<String, String>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Difficulty {
    Easy,
    Medium,
    #[default]
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Puzzle {
    pub id: String,
    #[serde(default)]
    pub source: String,
    #[serde(default)]
    pub difficulty: Difficulty,
    pub categories: Vec<Category>,
    #[serde(default)]
    pub clues: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structured_clues: Option<Vec<StructuredClue>>,
    pub solution: SolutionKey,
}

/// A resolved value reference: category index and value index within it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ValueRef {
    pub category: usize,
    pub index: usize,
}

impl Puzzle {
    /// Number of entities (shared cardinality of every category).
    pub fn size(&self) -> usize {
        self.categories.first().map_or(0, Category::len)
    }

    pub fn category(&self, name: &str) -> Option<&Category> {
        self.category_index(name).map(|i| &self.categories[i])
    }

    pub fn category_index(&self, name: &str) -> Option<usize> {
        let norm = names::normalize(name);
        self.categories.iter().position(|c| names::normalize(&c.name) == norm)
    }

    pub fn anchor_index(&self) -> Option<usize> {
        self.category_index(&self.solution.anchor)
    }

    /// The anchor category. Only call on validated puzzles.
    pub fn anchor(&self) -> &Category {
        &self.categories[self.anchor_index().expect("validated puzzle has an anchor")]
    }

    /// Non-anchor categories in declaration order, with their indices.
    pub fn attribute_categories(&self) -> impl Iterator<Item = (usize, &Category)> {
        let anchor = self.anchor_index();
        self.categories.iter().enumerate().filter(move |(i, _)| Some(*i) != anchor)
    }

    /// Total number of gradable assignments: N x (#categories - 1).
    pub fn assignment_count(&self) -> usize {
        self.size() * self.categories.len().saturating_sub(1)
    }

    /// Resolves a clue value reference (`Label` or `Category:Label`).
    pub fn resolve_value(&self, reference: &str) -> Result<ValueRef, String> {
        if let Some((cat, label)) = reference.split_once(':') {
            if let Some(ci) = self.category_index(cat) {
                return self.categories[ci]
                    .index_of(label)
                    .map(|index| ValueRef { category: ci, index })
                    .ok_or_else(|| format!("{label:?} is not a value of {cat}"));
            }
        }
        let hits: Vec<ValueRef> = self
            .categories
            .iter()
            .enumerate()
            .filter_map(|(ci, c)| c.index_of(reference).map(|index| ValueRef { category: ci, index }))
            .collect();
        match hits.as_slice() {
            [one] => Ok(*one),
            [] => Err(format!("unknown value {reference:?}")),
            _ => Err(format!("value {reference:?} is ambiguous; qualify it as Category:Label")),
        }
    }

    pub fn label(&self, value: ValueRef) -> &str {
        &self.categories[value.category].values[value.index]
    }

    /// Human-readable statement of the puzzle used in agent prompts.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.categories {
            out.push_str(&format!("{}: {}\n", c.name, c.values.join(", ")));
        }
        out.push('\n');
        for clue in &self.clues {
            out.push_str(clue);
            out.push('\n');
        }
        out
    }

    /// Checks every structural invariant. Key checks are reported by
    /// [`validate_key`]; this returns the first violation as an error.
    pub fn validate(&self) -> Result<(), PuzzleError> {
        let id = self.id.as_str();
        if id.trim().is_empty() {
            return Err(PuzzleError::invalid("<unnamed>", "id", "empty id"));
        }
        if self.categories.len() < 2 {
            return Err(PuzzleError::invalid(id, "categories", "need at least 2 categories"));
        }
        let n = self.size();
        if n < 2 {
            return Err(PuzzleError::invalid(id, "categories", "need at least 2 entities"));
        }
        for (i, c) in self.categories.iter().enumerate() {
            let field = format!("categories.{}", c.name);
            if c.name.trim().is_empty() {
                return Err(PuzzleError::invalid(id, format!("categories[{i}].name"), "empty name"));
            }
            if self.category_index(&c.name) != Some(i) {
                return Err(PuzzleError::invalid(id, field, "duplicate category name"));
            }
            if c.len() != n {
                return Err(PuzzleError::invalid(
                    id,
                    field,
                    format!("has {} values, expected {n} like every other category", c.len()),
                ));
            }
            for (j, v) in c.values.iter().enumerate() {
                if names::normalize(v).is_empty() {
                    return Err(PuzzleError::invalid(id, field, "empty value label"));
                }
                if c.index_of(v) != Some(j) {
                    return Err(PuzzleError::invalid(id, field, format!("duplicate value {v:?}")));
                }
            }
        }
        if self.anchor_index().is_none() {
            return Err(PuzzleError::invalid(
                id,
                "solution.anchor",
                format!("{:?} is not a declared category", self.solution.anchor),
            ));
        }
        if let Some(clues) = &self.structured_clues {
            for (i, clue) in clues.iter().enumerate() {
                self.validate_clue(clue).map_err(|m| PuzzleError::invalid(id, format!("structured_clues[{i}]"), m))?;
            }
        }
        let report = validate_key(self);
        if let Some(failed) = report.checks.iter().find(|c| !c.passed) {
            return Err(PuzzleError::invalid(id, failed.field.clone(), failed.detail.clone()));
        }
        Ok(())
    }

    fn validate_clue(&self, clue: &StructuredClue) -> Result<(), String> {
        let refs = clue.values().into_iter().map(|v| self.resolve_value(v)).collect::<Result<Vec<_>, _>>()?;
        if refs[0] == refs[1] {
            return Err("a clue cannot relate a value to itself".into());
        }
        if let StructuredClue::Offset { k: 0, .. } = clue {
            return Err("offset k must be non-zero".into());
        }
        if let Some(cat) = clue.ordinal_category() {
            let c = self.category(cat).ok_or_else(|| format!("unknown category {cat:?}"))?;
            if !c.is_ordinal() {
                return Err(format!("category {cat:?} is not ordinal"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KeyCheck {
    pub name: &'static str,
    pub field: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KeyReport {
    pub checks: Vec<KeyCheck>,
    /// Number of (entity, category) cells the key assigns.
    pub assignments: usize,
}

impl KeyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Checks that the answer key is a complete bijection per category.
pub fn validate_key(puzzle: &Puzzle) -> KeyReport {
    let mut checks = Vec::new();
    let key = &puzzle.solution;
    let Some(anchor_idx) = puzzle.anchor_index() else {
        checks.push(KeyCheck {
            name: "anchor-declared",
            field: "solution.anchor".into(),
            passed: false,
            detail: format!("{:?} is not a declared category", key.anchor),
        });
        return KeyReport { checks, assignments: 0 };
    };
    checks.push(KeyCheck {
        name: "anchor-declared",
        field: "solution.anchor".into(),
        passed: true,
        detail: String::new(),
    });
    let anchor = &puzzle.categories[anchor_idx];

    // rows must cover exactly the anchor values
    let mut missing_rows: Vec<&str> = anchor
        .values
        .iter()
        .filter(|v| !key.rows.keys().any(|r| names::same_label(r, v)))
        .map(String::as_str)
        .collect();
    let unknown_rows: Vec<&str> =
        key.rows.keys().filter(|r| anchor.index_of(r).is_none()).map(String::as_str).collect();
    let mut row_problems = Vec::new();
    if !missing_rows.is_empty() {
        row_problems.push(format!("missing rows for {}", missing_rows.join(", ")));
    }
    if !unknown_rows.is_empty() {
        row_problems.push(format!("rows for unknown entities {}", unknown_rows.join(", ")));
    }
    if key.rows.len() != anchor.len() && missing_rows.is_empty() && unknown_rows.is_empty() {
        row_problems.push("duplicate rows".into());
    }
    missing_rows.clear();

    let mut assignments = 0;
    let mut cell_problems = Vec::new();
    let mut bijection: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (ci, cat) in puzzle.attribute_categories() {
        let mut used = vec![0usize; cat.len()];
        for (entity, row) in &key.rows {
            match row.iter().find(|(name, _)| names::same_label(name, &cat.name)) {
                None => cell_problems.push(format!("{entity} has no {} value", cat.name)),
                Some((_, label)) => match cat.index_of(label) {
                    Some(i) => {
                        used[i] += 1;
                        assignments += 1;
                    }
                    None => bijection.entry(ci).or_default().push(format!("{label:?} is not a value of {}", cat.name)),
                },
            }
        }
        for (i, count) in used.iter().enumerate() {
            if *count > 1 {
                bijection.entry(ci).or_default().push(format!("value {:?} used {count} times", cat.values[i]));
            }
        }
    }
    for (entity, row) in &key.rows {
        for name in row.keys() {
            let ci = puzzle.category_index(name);
            if ci.is_none() || ci == Some(anchor_idx) {
                cell_problems.push(format!("{entity} assigns unknown category {name:?}"));
            }
        }
    }

    let complete = row_problems.is_empty() && cell_problems.is_empty();
    checks.push(KeyCheck {
        name: "rows-complete",
        field: "solution.rows".into(),
        passed: complete,
        detail: if complete {
            String::new()
        } else {
            format!(
                "incomplete bijection: {}",
                row_problems.into_iter().chain(cell_problems).collect::<Vec<_>>().join("; ")
            )
        },
    });
    for (ci, cat) in puzzle.attribute_categories() {
        let problems = bijection.remove(&ci).unwrap_or_default();
        checks.push(KeyCheck {
            name: "bijection",
            field: format!("solution.{}", cat.name),
            passed: problems.is_empty(),
            detail: if problems.is_empty() {
                String::new()
            } else {
                format!("bijection violated in {}: {}", cat.name, problems.join("; "))
            },
        });
    }
    let expected = puzzle.assignment_count();
    checks.push(KeyCheck {
        name: "assignment-count",
        field: "solution.rows".into(),
        passed: assignments == expected,
        detail: if assignments == expected {
            String::new()
        } else {
            format!("{assignments} assignments, expected {expected}")
        },
    });
    KeyReport { checks, assignments }
}

/// Parses a dataset: either a JSON array of puzzles or a stream of JSON
/// documents, one per puzzle. Every puzzle is validated.
pub fn parse_dataset(text: &str, location: &str) -> Result<Vec<Puzzle>, PuzzleError> {
    let trimmed = text.trim_start();
    let puzzles: Vec<Puzzle> = if trimmed.starts_with('[') {
        serde_json::from_str(trimmed)
            .map_err(|e| PuzzleError::Parse { location: location.to_string(), message: e.to_string() })?
    } else {
        let mut out = Vec::new();
        for (i, doc) in serde_json::Deserializer::from_str(text).into_iter::<Puzzle>().enumerate() {
            out.push(doc.map_err(|e| PuzzleError::Parse {
                location: format!("{location} document {}", i + 1),
                message: e.to_string(),
            })?);
        }
        out
    };
    let mut seen = std::collections::BTreeSet::new();
    for p in &puzzles {
        p.validate()?;
        if !seen.insert(p.id.clone()) {
            return Err(PuzzleError::invalid(&p.id, "id", "duplicate puzzle id"));
        }
    }
    Ok(puzzles)
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Vec<Puzzle>, PuzzleError> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|source| PuzzleError::Io { path: path.display().to_string(), source })?;
    parse_dataset(&text, &path.display().to_string())
}

/// Serializes puzzles as a stream of pretty JSON documents.
pub fn emit_dataset(puzzles: &[Puzzle]) -> String {
    let mut out = String::new();
    for p in puzzles {
        out.push_str(&serde_json::to_string_pretty(p).expect("puzzle serializes"));
        out.push('\n');
    }
    out
}

/// The three bundled fixture puzzles (houses, ostriches, pets).
pub fn bundled_dataset() -> Vec<Puzzle> {
    parse_dataset(include_str!("../fixtures/puzzles.json"), "bundled fixtures").expect("bundled fixtures are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two() -> Puzzle {
        serde_json::from_str(
            r#"{
            "id": "tiny", "source": "test",
            "categories": [
                {"name": "Person", "kind": "nominal", "values": ["Ann", "Bob"]},
                {"name": "Color", "kind": "nominal", "values": ["Red", "Blue"]}
            ],
            "clues": ["Ann likes red."],
            "structured_clues": [{"kind": "is", "a": "Ann", "b": "Red"}],
            "solution": {"anchor": "Person", "rows": {"Ann": {"Color": "Red"}, "Bob": {"Color": "Blue"}}}
        }"#,
        )
        .unwrap()
    }

    #[test]
    fn single_valid_puzzle_loads() {
        let text = emit_dataset(&[two_by_two()]);
        let loaded = parse_dataset(&text, "mem").unwrap();
        assert_eq!(loaded.len(), 1);
        assert_eq!(loaded[0].difficulty, Difficulty::Unknown);
    }

    #[test]
    fn repeated_key_value_names_category() {
        let mut p = two_by_two();
        p.solution.rows["Bob"]["Color"] = "Red".into();
        let err = p.validate().unwrap_err().to_string();
        assert!(err.contains("Color"), "{err}");
        assert!(err.contains("tiny"), "{err}");
    }

    #[test]
    fn missing_row_is_incomplete() {
        let mut p = two_by_two();
        p.solution.rows.shift_remove("Bob");
        let report = validate_key(&p);
        assert!(!report.passed());
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).collect();
        assert!(failed.iter().any(|c| c.detail.contains("incomplete bijection")));
    }

    #[test]
    fn duplicate_value_violates_bijection() {
        let mut p = two_by_two();
        p.solution.rows["Bob"]["Color"] = "Red".into();
        let report = validate_key(&p);
        let failed = report.checks.iter().find(|c| c.name == "bijection").unwrap();
        assert!(!failed.passed);
        assert!(failed.detail.contains("bijection violated"));
    }

    #[test]
    fn unequal_cardinality_rejected() {
        let mut p = two_by_two();
        p.categories[1].values.push("Green".into());
        assert!(p.validate().is_err());
    }

    #[test]
    fn clue_validation() {
        let mut p = two_by_two();
        p.structured_clues = Some(vec![StructuredClue::Is { a: "Ann".into(), b: "Purple".into() }]);
        assert!(p.validate().is_err());
        p.structured_clues =
            Some(vec![StructuredClue::Before { a: "Ann".into(), b: "Bob".into(), category: "Color".into() }]);
        let err = p.validate().unwrap_err().to_string();
        assert!(err.contains("not ordinal"), "{err}");
        p.structured_clues = Some(vec![StructuredClue::IsNot { a: "Red".into(), b: "red".into() }]);
        assert!(p.validate().is_err());
    }

    #[test]
    fn qualified_references() {
        let mut p = two_by_two();
        p.categories[0].values[1] = "Red".into();
        p.solution.rows.shift_remove("Bob");
        p.solution.rows.insert("Red".into(), [("Color".to_string(), "Blue".to_string())].into());
        assert!(p.resolve_value("Red").unwrap_err().contains("ambiguous"));
        assert_eq!(p.resolve_value("Color:Red").unwrap(), ValueRef { category: 1, index: 0 });
    }

    #[test]
    fn loose_index_for_ordinals() {
        let c = Category {
            name: "Place".into(),
            kind: CategoryKind::Ordinal,
            values: vec!["first".into(), "second".into(), "third".into()],
        };
        assert_eq!(c.index_of_loose("Second"), Some(1));
        assert_eq!(c.index_of_loose("3"), Some(2));
        assert_eq!(c.index_of_loose("3rd"), Some(2));
        assert_eq!(c.index_of_loose("4"), None);
        let n =
            Category { name: "Number".into(), kind: CategoryKind::Nominal, values: vec!["#105".into(), "#118".into()] };
        assert_eq!(n.index_of_loose("118"), Some(1));
        assert_eq!(n.index_of_loose("1"), None);
    }

    #[test]
    fn bundled_fixture_sizes() {
        let ds = bundled_dataset();
        let sizes: Vec<usize> = ds.iter().map(Puzzle::size).collect();
        assert_eq!(sizes, vec![3, 4, 3]);
        let houses = &ds[0];
        let report = validate_key(houses);
        assert!(report.passed());
        assert_eq!(report.assignments, 12);
    }
}
