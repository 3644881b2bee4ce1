//! Deterministic compiler from structured clues to SMT-LIB, and the decoder
//! that maps solver models back to puzzle assignments.
//!
//! Every (entity, attribute category) cell becomes one `Int` constant named
//! `<Entity>_<Category>`. Ordinal categories hold positions `1..N`, nominal
//! categories with numeral labels hold the numerals themselves, and the
//! remaining nominal categories hold codes `1..N` published in a lookup comment
//! (`; Color: 1 is Blue, 2 is Green, ...`).

mod formula;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use formula::{Formula, Term};

use crate::assignment::{AssignedValue, Assignment};
use crate::names;
use crate::puzzle::{CategoryKind, Puzzle, StructuredClue, ValueRef};
use crate::smt::{
    parse_outcome, run_raw, LookupTable, ModelValue, Provenance, SatStatus, SmtScript, SolverConfig, SolverFailure,
    SolverOutcome,
};

#[derive(Debug, Error)]
pub enum EncodeError {
    #[error("puzzle {0} has no structured clues")]
    NoStructuredClues(String),
    #[error("structured clue {index} is not supported: {message}")]
    UnsupportedClue { index: usize, message: String },
    #[error("outcome has no model to check")]
    NoModel,
    #[error("uniqueness check was inconclusive: solver said {0}")]
    Inconclusive(String),
    #[error(transparent)]
    Solver(#[from] SolverFailure),
}

/// Constant names for every (entity, attribute category) cell.
#[derive(Debug, Clone)]
pub struct Naming {
    /// `[entity][category]`, `None` for the anchor column.
    cells: Vec<Vec<Option<String>>>,
    by_name: BTreeMap<String, (usize, usize)>,
}

impl Naming {
    pub fn new(puzzle: &Puzzle) -> Naming {
        let anchor_idx = puzzle.anchor_index().expect("validated puzzle");
        let anchor = &puzzle.categories[anchor_idx];
        let anchor_prefix = names::sanitize_symbol(&anchor.name);
        let mut used = BTreeSet::new();
        let mut by_name = BTreeMap::new();
        let mut cells = Vec::with_capacity(anchor.len());
        for (e, entity) in anchor.values.iter().enumerate() {
            let mut row = vec![None; puzzle.categories.len()];
            for (c, cat) in puzzle.attribute_categories() {
                let mut base = format!("{}_{}", names::sanitize_symbol(entity), names::sanitize_symbol(&cat.name));
                if base.starts_with(|ch: char| ch.is_ascii_digit()) {
                    base = format!("{anchor_prefix}_{base}");
                }
                let mut name = base.clone();
                let mut suffix = 2;
                while !used.insert(name.clone()) {
                    name = format!("{base}_{suffix}");
                    suffix += 1;
                }
                by_name.insert(name.clone(), (e, c));
                row[c] = Some(name);
            }
            cells.push(row);
        }
        Naming { cells, by_name }
    }

    pub fn constant(&self, entity: usize, category: usize) -> &str {
        self.cells[entity][category].as_deref().expect("attribute category")
    }

    pub fn lookup(&self, name: &str) -> Option<(usize, usize)> {
        self.by_name.get(name).copied()
    }
}

/// Integer the encoder stores for `value`.
pub fn value_code(puzzle: &Puzzle, value: ValueRef) -> i64 {
    let cat = &puzzle.categories[value.category];
    if cat.kind == CategoryKind::Nominal && cat.is_numeric() {
        names::parse_numeral(&cat.values[value.index]).expect("numeric category")
    } else {
        value.index as i64 + 1
    }
}

struct Encoder<'p> {
    puzzle: &'p Puzzle,
    naming: Naming,
    anchor: usize,
}

impl<'p> Encoder<'p> {
    fn entities(&self) -> std::ops::Range<usize> {
        0..self.puzzle.size()
    }

    fn cell(&self, entity: usize, category: usize) -> Term {
        Term::konst(self.naming.constant(entity, category))
    }

    /// Entity `e` carries value `v`.
    fn holds(&self, e: usize, v: ValueRef) -> Formula {
        if v.category == self.anchor {
            Formula::bool(v.index == e)
        } else {
            Formula::eq(self.cell(e, v.category), Term::Lit(value_code(self.puzzle, v)))
        }
    }

    /// Position in ordinal category `o` of entity `e`, given that `e` carries `v`.
    fn position(&self, e: usize, v: ValueRef, o: usize) -> Term {
        if o == self.anchor {
            Term::Lit(e as i64 + 1)
        } else if v.category == o {
            Term::Lit(v.index as i64 + 1)
        } else {
            self.cell(e, o)
        }
    }

    /// Disjunction over ordered pairs of distinct entities carrying `a` and `b`.
    fn over_pairs(&self, a: ValueRef, b: ValueRef, o: usize, rel: impl Fn(Term, Term) -> Formula) -> Formula {
        let mut cases = Vec::new();
        for ea in self.entities() {
            for eb in self.entities() {
                if ea == eb {
                    continue;
                }
                cases.push(Formula::and([
                    self.holds(ea, a),
                    self.holds(eb, b),
                    rel(self.position(ea, a, o), self.position(eb, b, o)),
                ]));
            }
        }
        Formula::or(cases)
    }

    fn co_located(&self, a: ValueRef, b: ValueRef) -> Formula {
        Formula::or(self.entities().map(|e| Formula::and([self.holds(e, a), self.holds(e, b)])))
    }

    fn clue(&self, index: usize, clue: &StructuredClue) -> Result<Formula, EncodeError> {
        let unsupported = |message: String| EncodeError::UnsupportedClue { index, message };
        let refs: Vec<ValueRef> = clue
            .values()
            .into_iter()
            .map(|v| self.puzzle.resolve_value(v))
            .collect::<Result<_, _>>()
            .map_err(unsupported)?;
        let ordinal = match clue.ordinal_category() {
            Some(name) => {
                let o = self
                    .puzzle
                    .category_index(name)
                    .ok_or_else(|| unsupported(format!("unknown category {name:?}")))?;
                if !self.puzzle.categories[o].is_ordinal() {
                    return Err(unsupported(format!("category {name:?} is not ordinal")));
                }
                Some(o)
            }
            None => None,
        };
        let (a, b) = (refs[0], refs[1]);
        Ok(match clue {
            StructuredClue::Is { .. } => self.co_located(a, b),
            StructuredClue::IsNot { .. } => Formula::negate(self.co_located(a, b)),
            StructuredClue::Offset { k, .. } => {
                let k = *k;
                self.over_pairs(a, b, ordinal.unwrap(), |pa, pb| Formula::eq(pa, pb.plus(k)))
            }
            StructuredClue::Neighbor { .. } => self.over_pairs(a, b, ordinal.unwrap(), |pa, pb| {
                Formula::or([Formula::eq(pa.clone(), pb.clone().plus(1)), Formula::eq(pa, pb.plus(-1))])
            }),
            StructuredClue::Before { .. } => self.over_pairs(a, b, ordinal.unwrap(), Formula::lt),
            StructuredClue::EitherOr { .. } => {
                let c = refs[2];
                Formula::or(
                    self.entities()
                        .map(|e| Formula::and([self.holds(e, c), Formula::xor(self.holds(e, a), self.holds(e, b))])),
                )
            }
        })
    }
}

/// Compiles a puzzle's structured clues into a complete SMT-LIB script.
pub fn encode(puzzle: &Puzzle) -> Result<SmtScript, EncodeError> {
    let clues = match &puzzle.structured_clues {
        Some(c) => c,
        None => return Err(EncodeError::NoStructuredClues(puzzle.id.clone())),
    };
    let anchor = puzzle.anchor_index().expect("validated puzzle");
    let enc = Encoder { puzzle, naming: Naming::new(puzzle), anchor };
    let anchor_cat = &puzzle.categories[anchor];

    let mut out = String::from("(set-logic QF_LIA)\n");
    for (c, cat) in puzzle.attribute_categories() {
        let _ = writeln!(out, "\n; {} of each {}", cat.name, anchor_cat.name);
        for e in enc.entities() {
            let _ = writeln!(out, "(declare-const {} Int)", enc.naming.constant(e, c));
        }
    }

    out.push('\n');
    for (c, cat) in puzzle.attribute_categories() {
        let bindings: Vec<String> = (0..cat.len())
            .map(|i| {
                let code = value_code(puzzle, ValueRef { category: c, index: i });
                format!("{code} is {}", cat.values[i])
            })
            .collect();
        match cat.kind {
            CategoryKind::Nominal => {
                let _ = writeln!(out, "; {}: {}", cat.name, bindings.join(", "));
            }
            CategoryKind::Ordinal => {
                let _ = writeln!(out, "; {} positions: {}", cat.name, bindings.join(", "));
            }
        }
    }

    for (c, cat) in puzzle.attribute_categories() {
        let _ = writeln!(out, "\n; {} domain", cat.name);
        for e in enc.entities() {
            let domain = Formula::or((0..cat.len()).map(|i| enc.holds(e, ValueRef { category: c, index: i })));
            let _ = writeln!(out, "(assert {domain})");
        }
        let cells: Vec<Term> = enc.entities().map(|e| enc.cell(e, c)).collect();
        let _ = writeln!(out, "(assert {})", Formula::Distinct(cells));
    }

    for (i, clue) in clues.iter().enumerate() {
        let f = enc.clue(i, clue)?;
        let _ = writeln!(out, "\n; {clue}\n(assert {f})");
    }
    out.push_str("\n(check-sat)\n(get-model)\n");
    Ok(SmtScript::new(out, Provenance::ReferenceEncoder, 0))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DecodeIssue {
    /// Integer value with no label in the lookup table or category.
    UnmappedCode { name: String, code: i64 },
    /// Constant that does not name an (entity, category) cell.
    UnknownName { name: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodedModel {
    pub assignments: Vec<Assignment>,
    pub issues: Vec<DecodeIssue>,
}

/// Resolves a model constant to an (entity, category) cell: the encoder's own
/// names first, then any `<Entity>_<Category>` split whose parts match a
/// unique anchor value and attribute category (abbreviations allowed).
pub fn resolve_constant(puzzle: &Puzzle, naming: &Naming, name: &str) -> Option<(usize, usize)> {
    if let Some(cell) = naming.lookup(name) {
        return Some(cell);
    }
    let anchor = puzzle.anchor_index()?;
    let entities = &puzzle.categories[anchor].values;
    let cats: Vec<(usize, &str)> = puzzle.attribute_categories().map(|(i, c)| (i, c.name.as_str())).collect();
    let mut found = BTreeSet::new();
    for (pos, _) in name.match_indices('_') {
        let (ent, cat) = (&name[..pos], &name[pos + 1..]);
        if ent.is_empty() || cat.is_empty() {
            continue;
        }
        let e = names::resolve(ent, entities.iter().map(String::as_str));
        let c = names::resolve(cat, cats.iter().map(|(_, n)| *n));
        if let (Some(e), Some(c)) = (e, c) {
            found.insert((e, cats[c].0));
        }
    }
    match found.len() {
        1 => found.into_iter().next(),
        _ => None,
    }
}

fn decode_int(puzzle: &Puzzle, category: usize, code: i64, table: &LookupTable) -> Option<AssignedValue> {
    let cat = &puzzle.categories[category];
    if let Some(label) = table.scoped(&cat.name, code) {
        return Some(AssignedValue::Label(label.to_string()));
    }
    match cat.kind {
        CategoryKind::Ordinal if code >= 1 && code as usize <= cat.len() => {
            return Some(AssignedValue::Position(code));
        }
        CategoryKind::Nominal if cat.is_numeric() => {
            if let Some(label) = cat.values.iter().find(|v| names::parse_numeral(v) == Some(code)) {
                return Some(AssignedValue::Label(label.clone()));
            }
        }
        _ => {}
    }
    table.lookup(code).map(|l| AssignedValue::Label(l.to_string()))
}

/// Decodes with an explicit lookup table.
pub fn decode_with_table(outcome: &SolverOutcome, puzzle: &Puzzle, table: &LookupTable) -> DecodedModel {
    let naming = Naming::new(puzzle);
    let anchor = puzzle.anchor();
    let mut decoded = DecodedModel::default();
    for d in &outcome.model {
        let Some((e, c)) = resolve_constant(puzzle, &naming, &d.name) else {
            decoded.issues.push(DecodeIssue::UnknownName { name: d.name.clone() });
            continue;
        };
        let value = match &d.value {
            ModelValue::Int(code) => match decode_int(puzzle, c, *code, table) {
                Some(v) => v,
                None => {
                    decoded.issues.push(DecodeIssue::UnmappedCode { name: d.name.clone(), code: *code });
                    continue;
                }
            },
            ModelValue::Str(s) | ModelValue::Other(s) => AssignedValue::Label(s.clone()),
        };
        decoded.assignments.push(Assignment {
            entity: anchor.values[e].clone(),
            category: puzzle.categories[c].name.clone(),
            value,
        });
    }
    decoded
}

/// Maps a solver model to assignments, translating integer codes through the
/// lookup comments carried by the outcome. Problems are reported per entry and
/// decoding continues past them.
pub fn decode_model(outcome: &SolverOutcome, puzzle: &Puzzle) -> DecodedModel {
    let mut table = LookupTable::default();
    table.extend(outcome.lookup_comments.iter().map(String::as_str));
    decode_with_table(outcome, puzzle, &table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Uniqueness {
    Unique,
    NotUnique,
}

/// Re-solves the encoded puzzle with the model's cell assignments blocked.
pub fn check_uniqueness(
    puzzle: &Puzzle,
    outcome: &SolverOutcome,
    cfg: &SolverConfig,
) -> Result<Uniqueness, EncodeError> {
    let script = encode(puzzle)?;
    let naming = Naming::new(puzzle);
    let pins: Vec<Formula> = outcome
        .model
        .iter()
        .filter(|d| naming.lookup(&d.name).is_some())
        .filter_map(|d| match d.value {
            ModelValue::Int(v) => Some(Formula::eq(Term::konst(&d.name), Term::Lit(v))),
            _ => None,
        })
        .collect();
    if pins.is_empty() {
        return Err(EncodeError::NoModel);
    }
    let body = script.text.replace("(check-sat)\n", "").replace("(get-model)\n", "");
    let input = format!("{body}\n; block the model\n(assert (not {}))\n(check-sat)\n", Formula::and(pins));
    let reply = parse_outcome(&run_raw(&input, cfg)?);
    match reply.status {
        SatStatus::Unsat => Ok(Uniqueness::Unique),
        SatStatus::Sat => Ok(Uniqueness::NotUnique),
        other => Err(EncodeError::Inconclusive(other.as_str().to_string())),
    }
}
