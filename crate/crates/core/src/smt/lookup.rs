use std::collections::BTreeMap;
use std::sync::OnceLock;

use regex::Regex;

use crate::names;

fn binding() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?:^|[^\w#-])(-?\d+)\s+is\s+([^,;]+)").unwrap())
}

fn scope_prefix() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\s*([A-Za-z][\w ]*?)\s*:").unwrap())
}

fn comment_body(line: &str) -> Option<&str> {
    let t = line.trim_start();
    t.starts_with(';').then(|| t.trim_start_matches(';'))
}

fn bindings(body: &str) -> impl Iterator<Item = (i64, String)> + '_ {
    binding().captures_iter(body).filter_map(|c| {
        let code = c[1].parse().ok()?;
        let label = c[2].trim().trim_end_matches('.').trim().to_string();
        (!label.is_empty()).then_some((code, label))
    })
}

/// Integer-code bindings written as `<int> is <Label>` in comment lines,
/// several per line separated by commas or semicolons. Later bindings win.
pub fn parse_lookup_table(script_text: &str) -> BTreeMap<i64, String> {
    LookupTable::parse(script_text).global
}

/// Lookup table with optional per-category scopes. A comment of the form
/// `; Color: 1 is Blue, 2 is Green` binds codes for `Color` in addition to the
/// global table, so several nominal categories can share codes 1..N.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LookupTable {
    pub global: BTreeMap<i64, String>,
    scoped: BTreeMap<String, BTreeMap<i64, String>>,
}

impl LookupTable {
    pub fn parse(text: &str) -> Self {
        let mut table = LookupTable::default();
        table.extend(text.lines());
        table
    }

    pub fn extend<'a>(&mut self, lines: impl IntoIterator<Item = &'a str>) {
        for line in lines {
            let Some(body) = comment_body(line) else { continue };
            let scope = scope_prefix()
                .captures(body)
                .map(|c| names::normalize(&c[1]))
                .filter(|s| !s.chars().all(|c| c.is_ascii_digit()));
            for (code, label) in bindings(body) {
                if let Some(scope) = &scope {
                    self.scoped.entry(scope.clone()).or_default().insert(code, label.clone());
                }
                self.global.insert(code, label);
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.global.is_empty()
    }

    pub fn scoped(&self, category: &str, code: i64) -> Option<&str> {
        self.scoped.get(&names::normalize(category))?.get(&code).map(String::as_str)
    }

    pub fn lookup(&self, code: i64) -> Option<&str> {
        self.global.get(&code).map(String::as_str)
    }
}
