use std::fmt;

use serde::{Deserialize, Serialize};

/// A value read back from a solver model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AssignedValue {
    Label(String),
    /// 1-based position in an ordinal category.
    Position(i64),
}

impl fmt::Display for AssignedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssignedValue::Label(l) => write!(f, "{l}"),
            AssignedValue::Position(p) => write!(f, "{p}"),
        }
    }
}

/// One (entity, category, value) triple; the category is never the anchor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub entity: String,
    pub category: String,
    pub value: AssignedValue,
}
