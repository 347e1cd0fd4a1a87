//! Parser for the clausal language.
//!
//! ```text
//! program := def+
//! def     := "def" ident ["measure" ident] "{" clause+ "}"
//! clause  := [lit ("&" lit)* "->"] ident "(" term ")" "=" term ";"
//! lit     := "!" lit | "!" "(" lit ")" | term ("=" | "<") term | term "in" "X"
//! term    := sum of products of atoms; atoms are numerals, variables,
//!            S(t), g(t), (t, t) and (t)
//! ```
//!
//! Literals of the shapes `g(t) = v`, `v = 0`, `v = S(w)` and `v = (w1, w2)`
//! with `w`, `w1`, `w2` not yet bound become refinement literals; any other
//! comparison is a relation between terms.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use super::syntax::{ClausalDef, Clause, Literal, Rel, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: undeclared function `{name}`")]
    Undeclared { line: usize, col: usize, name: String },
    #[error("{line}:{col}: unbound variable `{name}`")]
    Unbound { line: usize, col: usize, name: String },
    #[error("{line}:{col}: function `{name}` is defined twice")]
    Duplicate { line: usize, col: usize, name: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    Sym(&'static str),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOLS: [&str; 12] = ["->", "(", ")", "{", "}", ",", ";", "=", "<", "+", "*", "&"];

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (ln, line) in src.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let chars: Vec<(usize, char)> = line.char_indices().collect();
        let mut i = 0;
        while i < chars.len() {
            let (off, c) = chars[i];
            let col = line[..off].chars().count() + 1;
            let at = |tok| Token { tok, line: ln + 1, col };
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = off;
                while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_' || chars[i].1 == '\'') {
                    i += 1;
                }
                let end = chars.get(i).map_or(line.len(), |p| p.0);
                out.push(at(Tok::Ident(line[start..end].to_string())));
            } else if c.is_ascii_digit() {
                let start = off;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let end = chars.get(i).map_or(line.len(), |p| p.0);
                let n = line[start..end].parse().map_err(|_| ParseError::Syntax {
                    line: ln + 1,
                    col,
                    msg: "numeral too large".into(),
                })?;
                out.push(at(Tok::Num(n)));
            } else if c == '!' {
                out.push(at(Tok::Sym("!")));
                i += 1;
            } else if let Some(s) = SYMBOLS.iter().find(|s| line[off..].starts_with(**s)) {
                out.push(at(Tok::Sym(s)));
                i += s.len();
            } else {
                return Err(ParseError::Syntax {
                    line: ln + 1,
                    col,
                    msg: format!("unexpected character `{c}`"),
                });
            }
        }
    }
    Ok(out)
}

/// A literal before classification.
struct RawLit {
    negated: bool,
    lhs: Term,
    /// `None` for `in X`.
    rel: Option<Rel>,
    rhs: Term,
    line: usize,
    col: usize,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    declared: HashSet<String>,
    current: String,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos).or(self.toks.last()) {
            Some(t) => (t.line, t.col),
            None => (1, 1),
        }
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError::Syntax {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(t)) if *t == s)
    }

    fn expect(&mut self, s: &str) -> Result<(), ParseError> {
        if self.is_sym(s) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(format!("expected `{s}`"))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.fail("expected identifier"),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn program(&mut self) -> Result<Vec<ClausalDef>, ParseError> {
        let mut defs = Vec::new();
        while self.peek().is_some() {
            defs.push(self.def()?);
        }
        if defs.is_empty() {
            return self.fail("expected at least one `def`");
        }
        Ok(defs)
    }

    fn def(&mut self) -> Result<ClausalDef, ParseError> {
        if !self.is_keyword("def") {
            return self.fail("expected `def`");
        }
        self.pos += 1;
        let (line, col) = self.here();
        let name = self.ident()?;
        if self.declared.contains(&name) || name == "X" || name == "S" {
            return Err(ParseError::Duplicate { line, col, name });
        }
        let measure = if self.is_keyword("measure") {
            self.pos += 1;
            Some(self.ident()?)
        } else {
            None
        };
        self.current = name.clone();
        self.expect("{")?;
        let mut clauses = Vec::new();
        while !self.is_sym("}") {
            if self.peek().is_none() {
                return self.fail("unexpected end of input: missing `}`");
            }
            clauses.push(self.clause()?);
        }
        self.pos += 1;
        if clauses.is_empty() {
            return self.fail("definition has no clauses");
        }
        self.declared.insert(name.clone());
        Ok(ClausalDef {
            name,
            measure,
            clauses,
        })
    }

    /// True if a `->` occurs before the next `;`.
    fn has_antecedent(&self) -> bool {
        self.toks[self.pos..]
            .iter()
            .take_while(|t| t.tok != Tok::Sym(";"))
            .any(|t| t.tok == Tok::Sym("->"))
    }

    fn clause(&mut self) -> Result<Clause, ParseError> {
        let mut raw = Vec::new();
        if self.has_antecedent() {
            loop {
                raw.push(self.literal()?);
                if self.is_sym("&") {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            self.expect("->")?;
        }
        let (hl, hc) = self.here();
        let head = self.ident()?;
        if head != self.current {
            return Err(ParseError::Syntax {
                line: hl,
                col: hc,
                msg: format!("clause head `{head}` does not match definition `{}`", self.current),
            });
        }
        self.expect("(")?;
        let pattern = self.term()?;
        self.expect(")")?;
        self.expect("=")?;
        let (rl, rc) = self.here();
        let result = self.term()?;
        self.expect(";")?;

        let mut bound = BTreeSet::new();
        pattern.vars(&mut bound);
        let mut ants = Vec::new();
        for r in raw {
            ants.push(classify(r, &mut bound)?);
        }
        check_bound(&result, &bound, rl, rc)?;
        Ok(Clause {
            ants,
            head,
            pattern,
            result,
        })
    }

    fn literal(&mut self) -> Result<RawLit, ParseError> {
        let (line, col) = self.here();
        if self.is_sym("!") {
            self.pos += 1;
            // `!(lit)`: try the parenthesized form, fall back to `!lit`.
            if self.is_sym("(") {
                let save = self.pos;
                self.pos += 1;
                if let Ok(inner) = self.literal() {
                    if self.is_sym(")") {
                        self.pos += 1;
                        return Ok(RawLit {
                            negated: !inner.negated,
                            ..inner
                        });
                    }
                }
                self.pos = save;
            }
            let inner = self.literal()?;
            return Ok(RawLit {
                negated: !inner.negated,
                line,
                col,
                ..inner
            });
        }
        let lhs = self.term()?;
        if self.is_keyword("in") {
            self.pos += 1;
            if !self.is_keyword("X") {
                return self.fail("expected `X` after `in`");
            }
            self.pos += 1;
            return Ok(RawLit {
                negated: false,
                lhs,
                rel: None,
                rhs: Term::Zero,
                line,
                col,
            });
        }
        let rel = if self.is_sym("=") {
            Rel::Eq
        } else if self.is_sym("<") {
            Rel::Lt
        } else {
            return self.fail("expected `=`, `<` or `in X`");
        };
        self.pos += 1;
        let rhs = self.term()?;
        Ok(RawLit {
            negated: false,
            lhs,
            rel: Some(rel),
            rhs,
            line,
            col,
        })
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.product()?;
        while self.is_sym("+") {
            self.pos += 1;
            acc = Term::Add(Box::new(acc), Box::new(self.product()?));
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.atom()?;
        while self.is_sym("*") {
            self.pos += 1;
            acc = Term::Mul(Box::new(acc), Box::new(self.atom()?));
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        let (line, col) = self.here();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Term::numeral(n))
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let a = self.term()?;
                if self.is_sym(",") {
                    self.pos += 1;
                    let b = self.term()?;
                    self.expect(")")?;
                    Ok(Term::pair(a, b))
                } else {
                    self.expect(")")?;
                    Ok(a)
                }
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if !self.is_sym("(") {
                    if name == "S" || name == "X" {
                        return self.fail(format!("`{name}` is reserved"));
                    }
                    return Ok(Term::Var(name));
                }
                self.pos += 1;
                let arg = self.term()?;
                self.expect(")")?;
                if name == "S" {
                    return Ok(Term::succ(arg));
                }
                if name != self.current && !self.declared.contains(&name) {
                    return Err(ParseError::Undeclared { line, col, name });
                }
                Ok(Term::app(&name, arg))
            }
            _ => self.fail("expected a term"),
        }
    }
}

fn check_bound(t: &Term, bound: &BTreeSet<String>, line: usize, col: usize) -> Result<(), ParseError> {
    let mut vs = BTreeSet::new();
    t.vars(&mut vs);
    match vs.into_iter().find(|v| !bound.contains(v)) {
        Some(name) => Err(ParseError::Unbound { line, col, name }),
        None => Ok(()),
    }
}

fn classify(r: RawLit, bound: &mut BTreeSet<String>) -> Result<Literal, ParseError> {
    let RawLit {
        negated,
        lhs,
        rel,
        rhs,
        line,
        col,
    } = r;
    let syntax = |msg: &str| ParseError::Syntax {
        line,
        col,
        msg: msg.to_string(),
    };
    let Some(rel) = rel else {
        check_bound(&lhs, bound, line, col)?;
        return Ok(Literal::OracleMem { term: lhs, negated });
    };
    let is_new = |v: &str, bound: &BTreeSet<String>| !bound.contains(v);
    if rel == Rel::Eq {
        match (&lhs, &rhs) {
            (Term::App(f, arg), Term::Var(v)) => {
                if negated {
                    return Err(syntax("an application binding cannot be negated"));
                }
                check_bound(arg, bound, line, col)?;
                // Freshness of `v` is the refinement checker's business.
                let lit = Literal::AppEq {
                    func: f.clone(),
                    arg: (**arg).clone(),
                    var: v.clone(),
                };
                bound.insert(v.clone());
                return Ok(lit);
            }
            (Term::Var(v), Term::Zero) if !negated => {
                check_bound(&lhs, bound, line, col)?;
                return Ok(Literal::VarZero(v.clone()));
            }
            (Term::Var(v), Term::Succ(w)) => {
                if let Term::Var(w) = &**w {
                    if is_new(w, bound) {
                        if negated {
                            return Err(syntax("a successor split cannot be negated"));
                        }
                        check_bound(&lhs, bound, line, col)?;
                        bound.insert(w.clone());
                        return Ok(Literal::VarSucc(v.clone(), w.clone()));
                    }
                }
            }
            (Term::Var(v), Term::Pair(a, b)) => {
                if let (Term::Var(a), Term::Var(b)) = (&**a, &**b) {
                    if a != b && is_new(a, bound) && is_new(b, bound) {
                        if negated {
                            return Err(syntax("a pair split cannot be negated"));
                        }
                        check_bound(&lhs, bound, line, col)?;
                        bound.insert(a.clone());
                        bound.insert(b.clone());
                        return Ok(Literal::VarPair(v.clone(), a.clone(), b.clone()));
                    }
                }
            }
            _ => {}
        }
    }
    check_bound(&lhs, bound, line, col)?;
    check_bound(&rhs, bound, line, col)?;
    Ok(Literal::Rel {
        lhs,
        rel,
        rhs,
        negated,
    })
}

/// Parses a program. Later definitions may apply earlier ones.
pub fn parse_cl(text: &str) -> Result<Vec<ClausalDef>, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        declared: HashSet::new(),
        current: String::new(),
    };
    p.program()
}

/// A single term; `funcs` names the functions it may apply.
pub fn parse_term(text: &str, funcs: &[&str]) -> Result<Term, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        declared: funcs.iter().map(|f| f.to_string()).collect(),
        current: String::new(),
    };
    let t = p.term()?;
    if p.peek().is_some() {
        return p.fail("trailing input after term");
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clausal::syntax::{print_program, DefKind};

    #[test]
    fn single_terms() {
        let t = parse_term("x * (y + 2) + g((x, S(z)))", &["g"]).unwrap();
        assert_eq!(t.to_string(), parse_term(&t.to_string(), &["g"]).unwrap().to_string());
        assert!(parse_term("g(x)", &[]).is_err());
        assert!(parse_term("x y", &[]).is_err());
    }

    #[test]
    fn list_length() {
        let defs = parse_cl("def L { L(0) = 0; L((v,w)) = S(L(w)); }").unwrap();
        assert_eq!(defs.len(), 1);
        assert_eq!(defs[0].kind(), DefKind::Recursive);
        assert!(!defs[0].is_strict());
    }

    #[test]
    fn explicit_and_undeclared() {
        let defs = parse_cl("def zero { zero(x) = 0; }").unwrap();
        assert_eq!(defs[0].kind(), DefKind::Explicit);
        assert!(defs[0].is_strict());
        let e = parse_cl("def f { f(x) = g(x); }").unwrap_err();
        assert!(matches!(e, ParseError::Undeclared { ref name, .. } if name == "g"), "{e}");
    }

    #[test]
    fn literal_classification() {
        let src = "def f {\n  x = 0 -> f(x) = 0;\n  x = (a, b) & a = S(c) & f(b) = r & !(r < c) & b in X -> f(x) = r;\n  x = (a, b) & a = 0 -> f(x) = b;\n}";
        let defs = parse_cl(src).unwrap();
        let c = &defs[0].clauses[1];
        assert!(matches!(c.ants[0], Literal::VarPair(..)));
        assert!(matches!(c.ants[1], Literal::VarSucc(..)));
        assert!(matches!(c.ants[2], Literal::AppEq { .. }));
        assert!(matches!(c.ants[3], Literal::Rel { negated: true, .. }));
        assert!(matches!(c.ants[4], Literal::OracleMem { negated: false, .. }));
        // A split whose parts are already bound is a plain relation.
        let d = parse_cl("def g { x = (a, b) & a = S(b) -> g(x) = 1; x = 0 -> g(x) = 0; }").unwrap();
        assert!(matches!(d[0].clauses[0].ants[1], Literal::Rel { .. }));
    }

    #[test]
    fn errors_have_positions() {
        match parse_cl("def f {\n  f(x) = y;\n}") {
            Err(ParseError::Unbound { line: 2, name, .. }) => assert_eq!(name, "y"),
            other => panic!("{other:?}"),
        }
        match parse_cl("def f {\n  f(x) = x\n}") {
            Err(ParseError::Syntax { line: 3, col: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(parse_cl("").is_err());
        assert!(parse_cl("def f { g(x) = x; }").is_err());
    }

    #[test]
    fn print_parse_fixpoint() {
        let src = "# comment\ndef add2 { add2(x) = x + 2 * (x + 1); }\ndef g { x = (a, b) & !a = 0 & add2(a) = c -> g(x) = (c, 3); x = 0 -> g(x) = 0; x = (a, b) & a = 0 -> g(x) = b; }";
        let once = print_program(&parse_cl(src).unwrap());
        let twice = print_program(&parse_cl(&once).unwrap());
        assert_eq!(once, twice);
        assert!(once.contains("x + 2 * (x + 1)"));
        assert!(once.contains("!(a = 0)"));
    }
}
