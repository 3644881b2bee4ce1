//! Minimal QF_LIA formula tree with constant folding, just enough for the
//! clue encodings. Constructors simplify eagerly so trivially true/false
//! branches never reach the printed script.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Const(String),
    Lit(i64),
    /// `term + k`, printed as `(+ t k)` or `(- t |k|)`.
    Add(Box<Term>, i64),
}

impl Term {
    pub fn konst(name: &str) -> Term {
        Term::Const(name.to_string())
    }

    pub fn plus(self, k: i64) -> Term {
        match self {
            _ if k == 0 => self,
            Term::Lit(v) => Term::Lit(v + k),
            Term::Add(t, j) => Term::Add(t, j + k).normalized(),
            t => Term::Add(Box::new(t), k),
        }
    }

    fn normalized(self) -> Term {
        match self {
            Term::Add(t, 0) => *t,
            t => t,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => write!(f, "{c}"),
            Term::Lit(v) if *v < 0 => write!(f, "(- {})", v.unsigned_abs()),
            Term::Lit(v) => write!(f, "{v}"),
            Term::Add(t, k) if *k < 0 => write!(f, "(- {t} {})", k.unsigned_abs()),
            Term::Add(t, k) => write!(f, "(+ {t} {k})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    Eq(Term, Term),
    Lt(Term, Term),
    Distinct(Vec<Term>),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Xor(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn bool(b: bool) -> Formula {
        if b {
            Formula::True
        } else {
            Formula::False
        }
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        match (&a, &b) {
            (Term::Lit(x), Term::Lit(y)) => Formula::bool(x == y),
            _ if a == b => Formula::True,
            _ => Formula::Eq(a, b),
        }
    }

    pub fn lt(a: Term, b: Term) -> Formula {
        match (&a, &b) {
            (Term::Lit(x), Term::Lit(y)) => Formula::bool(x < y),
            _ if a == b => Formula::False,
            _ => Formula::Lt(a, b),
        }
    }

    pub fn negate(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(inner) => *inner,
            f => Formula::Not(Box::new(f)),
        }
    }

    pub fn and(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    pub fn or(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    pub fn xor(a: Formula, b: Formula) -> Formula {
        match (a, b) {
            (Formula::True, x) | (x, Formula::True) => Formula::negate(x),
            (Formula::False, x) | (x, Formula::False) => x,
            (a, b) => Formula::Xor(Box::new(a), Box::new(b)),
        }
    }
}

fn join<T: fmt::Display>(f: &mut fmt::Formatter<'_>, op: &str, items: &[T]) -> fmt::Result {
    write!(f, "({op}")?;
    for i in items {
        write!(f, " {i}")?;
    }
    write!(f, ")")
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Eq(a, b) => write!(f, "(= {a} {b})"),
            Formula::Lt(a, b) => write!(f, "(< {a} {b})"),
            Formula::Distinct(ts) => join(f, "distinct", ts),
            Formula::Not(x) => write!(f, "(not {x})"),
            Formula::And(xs) => join(f, "and", xs),
            Formula::Or(xs) => join(f, "or", xs),
            Formula::Xor(a, b) => write!(f, "(xor {a} {b})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folding() {
        assert_eq!(Formula::eq(Term::Lit(2), Term::Lit(1).plus(1)), Formula::True);
        assert_eq!(Formula::lt(Term::Lit(3), Term::Lit(1)), Formula::False);
        assert_eq!(Formula::and([Formula::True, Formula::False]), Formula::False);
        assert_eq!(Formula::or([Formula::False, Formula::False]), Formula::False);
        let x = Formula::eq(Term::konst("x"), Term::Lit(1));
        assert_eq!(Formula::and([Formula::True, x.clone()]), x);
        assert_eq!(Formula::xor(Formula::True, x.clone()), Formula::negate(x.clone()));
        assert_eq!(Formula::xor(Formula::False, x.clone()), x);
    }

    #[test]
    fn printing() {
        let t = Term::konst("Kermit_Place").plus(2);
        assert_eq!(Formula::eq(Term::konst("Stretch_Place"), t).to_string(), "(= Stretch_Place (+ Kermit_Place 2))");
        assert_eq!(Term::konst("b").plus(-1).to_string(), "(- b 1)");
        assert_eq!(Term::Lit(-4).to_string(), "(- 4)");
        let f = Formula::or([
            Formula::eq(Term::konst("a"), Term::konst("b").plus(1)),
            Formula::eq(Term::konst("a"), Term::konst("b").plus(-1)),
        ]);
        assert_eq!(f.to_string(), "(or (= a (+ b 1)) (= a (- b 1)))");
    }
}
