//! Label normalization and fuzzy name resolution.
//!
//! Solver models and answer keys spell the same thing in different ways
//! (`Kermit_Place` vs. `Kermit`, `H1` vs. `House 1`, `First` vs. `1`). Everything
//! that compares labels goes through this module so the rules stay in one place.

/// Case-folds and strips whitespace, underscores and hyphens.
pub fn normalize(label: &str) -> String {
    label.chars().filter(|c| !c.is_whitespace() && *c != '_' && *c != '-').flat_map(char::to_lowercase).collect()
}

pub fn same_label(a: &str, b: &str) -> bool {
    normalize(a) == normalize(b)
}

const ORDINAL_WORDS: [&str; 10] =
    ["first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth", "tenth"];

/// `first`..`tenth` and `1st`/`2nd`/`3rd`/`4th`.. style ordinals, 1-based.
pub fn ordinal_position(label: &str) -> Option<i64> {
    let norm = normalize(label);
    if let Some(i) = ORDINAL_WORDS.iter().position(|w| *w == norm) {
        return Some(i as i64 + 1);
    }
    let digits: String = norm.chars().take_while(char::is_ascii_digit).collect();
    if digits.is_empty() {
        return None;
    }
    match &norm[digits.len()..] {
        "st" | "nd" | "rd" | "th" => digits.parse().ok(),
        _ => None,
    }
}

/// Parses a label that is an integer, optionally written with a leading `#`.
pub fn parse_numeral(label: &str) -> Option<i64> {
    let trimmed = label.trim();
    let trimmed = trimmed.strip_prefix('#').unwrap_or(trimmed).trim();
    trimmed.parse().ok()
}

/// Replaces every non-alphanumeric character with `_`.
pub fn sanitize_symbol(label: &str) -> String {
    label.trim().chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect()
}

/// True when `short` reads as an abbreviation of `full`: same first character
/// and the remaining characters appear in order (`Anml` for `Animal`, `H1` for
/// `House 1`).
pub fn abbreviates(short: &str, full: &str) -> bool {
    let short = normalize(short);
    let full = normalize(full);
    if short.is_empty() || full.is_empty() || short.chars().next() != full.chars().next() {
        return false;
    }
    let mut rest = full.chars();
    short.chars().all(|c| rest.any(|f| f == c))
}

/// Resolves `token` against `candidates`: exact normalized match first, then a
/// unique abbreviation match. Ambiguous abbreviations resolve to nothing.
pub fn resolve<'a, I>(token: &str, candidates: I) -> Option<usize>
where
    I: IntoIterator<Item = &'a str>,
    I::IntoIter: Clone,
{
    let candidates = candidates.into_iter();
    let norm = normalize(token);
    if let Some(i) = candidates.clone().position(|c| normalize(c) == norm) {
        return Some(i);
    }
    let mut hits = candidates.enumerate().filter(|(_, c)| abbreviates(token, c)).map(|(i, _)| i);
    match (hits.next(), hits.next()) {
        (Some(i), None) => Some(i),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_ignores_case_space_and_underscore() {
        assert!(same_label("Kermit_Place", "kermit place"));
        assert!(same_label("New York", "new_york"));
        assert!(!same_label("Red", "Read"));
    }

    #[test]
    fn ordinals() {
        assert_eq!(ordinal_position("First"), Some(1));
        assert_eq!(ordinal_position("fourth"), Some(4));
        assert_eq!(ordinal_position("2nd"), Some(2));
        assert_eq!(ordinal_position("10th"), Some(10));
        assert_eq!(ordinal_position("Kermit"), None);
        assert_eq!(ordinal_position("2"), None);
    }

    #[test]
    fn numerals() {
        assert_eq!(parse_numeral("#128"), Some(128));
        assert_eq!(parse_numeral(" 105 "), Some(105));
        assert_eq!(parse_numeral("-3"), Some(-3));
        assert_eq!(parse_numeral("first"), None);
    }

    #[test]
    fn abbreviations() {
        assert!(abbreviates("H1", "House 1"));
        assert!(!abbreviates("H1", "House 2"));
        assert!(abbreviates("Anml", "Animal"));
        assert!(abbreviates("Sp", "Sport"));
        assert!(abbreviates("N", "Nationality"));
        assert!(!abbreviates("Colr", "Cola"));
        assert!(!abbreviates("x", "Animal"));
    }

    #[test]
    fn resolve_prefers_exact_and_rejects_ambiguity() {
        let cats = ["Color", "Nationality", "Animal", "Sport"];
        assert_eq!(resolve("color", cats), Some(0));
        assert_eq!(resolve("N", cats), Some(1));
        assert_eq!(resolve("Sp", cats), Some(3));
        assert_eq!(resolve("Zebra", cats), None);
        let twins = ["Sport", "Spice"];
        assert_eq!(resolve("S", twins), None);
    }

    #[test]
    fn sanitize() {
        assert_eq!(sanitize_symbol("House 1"), "House_1");
        assert_eq!(sanitize_symbol("#128"), "_128");
        assert_eq!(sanitize_symbol("New-York"), "New_York");
    }
}
