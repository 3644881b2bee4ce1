//! Tolerant S-expression reader for solver output.
//!
//! Solver replies mix well-formed S-expressions with bare verdict atoms and,
//! occasionally, garbage. The reader never fails: stray `)` are dropped and an
//! unterminated list is closed at end of input.

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    Str(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn head(&self) -> Option<&str> {
        match self {
            Sexp::List(items) => items.first().and_then(Sexp::as_atom),
            _ => None,
        }
    }

    pub fn render(&self) -> String {
        match self {
            Sexp::Atom(a) => a.clone(),
            Sexp::Str(s) => quote(s),
            Sexp::List(items) => {
                let inner: Vec<String> = items.iter().map(Sexp::render).collect();
                format!("({})", inner.join(" "))
            }
        }
    }
}

/// SMT-LIB string literal: `"` is escaped by doubling.
pub fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

#[derive(Debug, Default)]
pub struct Reading {
    pub items: Vec<Sexp>,
    /// Comment lines (`;` to end of line), trimmed.
    pub comments: Vec<String>,
}

pub fn read_all(text: &str) -> Reading {
    let mut reading = Reading::default();
    let mut stack: Vec<Vec<Sexp>> = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;

    let push = |stack: &mut Vec<Vec<Sexp>>, items: &mut Vec<Sexp>, item: Sexp| match stack.last_mut() {
        Some(top) => top.push(item),
        None => items.push(item),
    };

    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            ';' => {
                let start = i;
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                let line: String = chars[start..i].iter().collect();
                reading.comments.push(line.trim_end().to_string());
            }
            '(' => {
                stack.push(Vec::new());
                i += 1;
            }
            ')' => {
                if let Some(done) = stack.pop() {
                    push(&mut stack, &mut reading.items, Sexp::List(done));
                }
                i += 1;
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                while i < chars.len() {
                    if chars[i] == '"' {
                        if chars.get(i + 1) == Some(&'"') {
                            s.push('"');
                            i += 2;
                            continue;
                        }
                        break;
                    }
                    s.push(chars[i]);
                    i += 1;
                }
                i += 1;
                push(&mut stack, &mut reading.items, Sexp::Str(s));
            }
            '|' => {
                let start = i + 1;
                i = start;
                while i < chars.len() && chars[i] != '|' {
                    i += 1;
                }
                let sym: String = chars[start..i.min(chars.len())].iter().collect();
                i += 1;
                push(&mut stack, &mut reading.items, Sexp::Atom(sym));
            }
            _ => {
                let start = i;
                while i < chars.len() && !chars[i].is_whitespace() && !matches!(chars[i], '(' | ')' | '"' | ';' | '|') {
                    i += 1;
                }
                let atom: String = chars[start..i].iter().collect();
                push(&mut stack, &mut reading.items, Sexp::Atom(atom));
            }
        }
    }
    while let Some(done) = stack.pop() {
        push(&mut stack, &mut reading.items, Sexp::List(done));
    }
    reading
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_and_strings() {
        let r = read_all("sat\n(error \"line 1 column 2: '(' expected\")\n; note\n((define-fun x () Int (- 3)))");
        assert_eq!(r.items.len(), 3);
        assert_eq!(r.items[0], Sexp::Atom("sat".into()));
        assert_eq!(r.items[1].head(), Some("error"));
        assert_eq!(r.comments, vec!["; note"]);
        assert_eq!(r.items[2].render(), "((define-fun x () Int (- 3)))");
    }

    #[test]
    fn doubled_quote_escape() {
        let r = read_all("\"say \"\"hi\"\"\"");
        assert_eq!(r.items, vec![Sexp::Str("say \"hi\"".into())]);
        assert_eq!(quote("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn tolerates_unbalanced_input() {
        let r = read_all(") (a (b");
        assert_eq!(r.items.len(), 1);
        assert_eq!(r.items[0].render(), "(a (b))");
    }
}
