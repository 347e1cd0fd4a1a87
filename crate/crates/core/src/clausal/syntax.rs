//! Abstract syntax of the clausal language and its canonical printer.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::codec::Nat;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Zero,
    Var(String),
    Succ(Box<Term>),
    Pair(Box<Term>, Box<Term>),
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    App(String, Box<Term>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rel {
    Eq,
    Lt,
}

impl Rel {
    pub fn holds(self, a: &Nat, b: &Nat) -> bool {
        match self {
            Rel::Eq => a == b,
            Rel::Lt => a < b,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Rel::Eq => "=",
            Rel::Lt => "<",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Literal {
    /// `g(t) = v` with `v` new.
    AppEq { func: String, arg: Term, var: String },
    VarZero(String),
    /// `v = S(w)` with `w` new.
    VarSucc(String, String),
    /// `v = (w1, w2)` with `w1`, `w2` new.
    VarPair(String, String, String),
    Rel { lhs: Term, rel: Rel, rhs: Term, negated: bool },
    OracleMem { term: Term, negated: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub ants: Vec<Literal>,
    pub head: String,
    pub pattern: Term,
    pub result: Term,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClausalDef {
    pub name: String,
    /// Requested measure function; only the identity (`None`) is supported.
    pub measure: Option<String>,
    pub clauses: Vec<Clause>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DefKind {
    Explicit,
    Recursive,
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn succ(t: Term) -> Term {
        Term::Succ(Box::new(t))
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::Pair(Box::new(a), Box::new(b))
    }

    pub fn app(f: &str, t: Term) -> Term {
        Term::App(f.to_string(), Box::new(t))
    }

    pub fn numeral(n: u64) -> Term {
        (0..n).fold(Term::Zero, |t, _| Term::succ(t))
    }

    /// `Some(n)` when the term is `S^n(0)`.
    pub fn as_numeral(&self) -> Option<u64> {
        let mut t = self;
        let mut n = 0;
        loop {
            match t {
                Term::Zero => return Some(n),
                Term::Succ(u) => {
                    n += 1;
                    t = u;
                }
                _ => return None,
            }
        }
    }

    pub fn has_app(&self) -> bool {
        match self {
            Term::Zero | Term::Var(_) => false,
            Term::App(..) => true,
            Term::Succ(t) => t.has_app(),
            Term::Pair(a, b) | Term::Add(a, b) | Term::Mul(a, b) => a.has_app() || b.has_app(),
        }
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Zero => {}
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Succ(t) | Term::App(_, t) => t.vars(out),
            Term::Pair(a, b) | Term::Add(a, b) | Term::Mul(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }

    pub fn apps(&self, out: &mut Vec<(String, Term)>) {
        match self {
            Term::Zero | Term::Var(_) => {}
            Term::App(f, t) => {
                t.apps(out);
                out.push((f.clone(), (**t).clone()));
            }
            Term::Succ(t) => t.apps(out),
            Term::Pair(a, b) | Term::Add(a, b) | Term::Mul(a, b) => {
                a.apps(out);
                b.apps(out);
            }
        }
    }

    pub fn rename(&self, map: &HashMap<String, String>) -> Term {
        match self {
            Term::Zero => Term::Zero,
            Term::Var(v) => Term::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
            Term::Succ(t) => Term::succ(t.rename(map)),
            Term::Pair(a, b) => Term::pair(a.rename(map), b.rename(map)),
            Term::Add(a, b) => Term::Add(Box::new(a.rename(map)), Box::new(b.rename(map))),
            Term::Mul(a, b) => Term::Mul(Box::new(a.rename(map)), Box::new(b.rename(map))),
            Term::App(f, t) => Term::app(f, t.rename(map)),
        }
    }

    /// Value under `env`; `None` if a variable is unbound or an application occurs.
    pub fn eval(&self, env: &HashMap<String, Nat>) -> Option<Nat> {
        Some(match self {
            Term::Zero => Nat::default(),
            Term::Var(v) => env.get(v)?.clone(),
            Term::Succ(t) => t.eval(env)? + 1u32,
            Term::Pair(a, b) => crate::codec::pair(&a.eval(env)?, &b.eval(env)?),
            Term::Add(a, b) => a.eval(env)? + b.eval(env)?,
            Term::Mul(a, b) => a.eval(env)? * b.eval(env)?,
            Term::App(..) => return None,
        })
    }
}

impl Literal {
    /// Variables this literal introduces.
    pub fn new_vars(&self) -> Vec<&str> {
        match self {
            Literal::AppEq { var, .. } => vec![var.as_str()],
            Literal::VarSucc(_, w) => vec![w.as_str()],
            Literal::VarPair(_, a, b) => vec![a.as_str(), b.as_str()],
            _ => Vec::new(),
        }
    }

    /// Variables this literal reads.
    pub fn used_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        match self {
            Literal::AppEq { arg, .. } => arg.vars(&mut out),
            Literal::VarZero(v) | Literal::VarSucc(v, _) | Literal::VarPair(v, _, _) => {
                out.insert(v.clone());
            }
            Literal::Rel { lhs, rhs, .. } => {
                lhs.vars(&mut out);
                rhs.vars(&mut out);
            }
            Literal::OracleMem { term, .. } => term.vars(&mut out),
        }
        out
    }

    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Literal::AppEq { arg, .. } => vec![arg],
            Literal::Rel { lhs, rhs, .. } => vec![lhs, rhs],
            Literal::OracleMem { term, .. } => vec![term],
            _ => Vec::new(),
        }
    }

    pub fn rename(&self, map: &HashMap<String, String>) -> Literal {
        let r = |v: &String| map.get(v).cloned().unwrap_or_else(|| v.clone());
        match self {
            Literal::AppEq { func, arg, var } => Literal::AppEq {
                func: func.clone(),
                arg: arg.rename(map),
                var: r(var),
            },
            Literal::VarZero(v) => Literal::VarZero(r(v)),
            Literal::VarSucc(v, w) => Literal::VarSucc(r(v), r(w)),
            Literal::VarPair(v, a, b) => Literal::VarPair(r(v), r(a), r(b)),
            Literal::Rel { lhs, rel, rhs, negated } => Literal::Rel {
                lhs: lhs.rename(map),
                rel: *rel,
                rhs: rhs.rename(map),
                negated: *negated,
            },
            Literal::OracleMem { term, negated } => Literal::OracleMem {
                term: term.rename(map),
                negated: *negated,
            },
        }
    }
}

impl Clause {
    pub fn rename(&self, map: &HashMap<String, String>) -> Clause {
        Clause {
            ants: self.ants.iter().map(|l| l.rename(map)).collect(),
            head: self.head.clone(),
            pattern: self.pattern.rename(map),
            result: self.result.rename(map),
        }
    }

    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.pattern.vars(&mut out);
        self.result.vars(&mut out);
        for l in &self.ants {
            out.extend(l.used_vars());
            out.extend(l.new_vars().into_iter().map(str::to_string));
        }
        out
    }

    /// Every function application in the clause, innermost first.
    pub fn apps(&self) -> Vec<(String, Term)> {
        let mut out = Vec::new();
        for l in &self.ants {
            for t in l.terms() {
                t.apps(&mut out);
            }
            if let Literal::AppEq { func, arg, .. } = l {
                out.push((func.clone(), arg.clone()));
            }
        }
        self.result.apps(&mut out);
        out
    }
}

impl ClausalDef {
    pub fn kind(&self) -> DefKind {
        let recursive = self
            .clauses
            .iter()
            .any(|c| c.apps().iter().any(|(f, _)| *f == self.name));
        if recursive {
            DefKind::Recursive
        } else {
            DefKind::Explicit
        }
    }

    /// Strict form: variable heads, no nested applications.
    pub fn is_strict(&self) -> bool {
        self.clauses.iter().all(|c| {
            matches!(c.pattern, Term::Var(_))
                && !c.result.has_app()
                && c.ants.iter().all(|l| l.terms().iter().all(|t| !t.has_app()))
        })
    }

    /// Names of the other functions this definition applies.
    pub fn callees(&self) -> BTreeSet<String> {
        self.clauses
            .iter()
            .flat_map(|c| c.apps())
            .map(|(f, _)| f)
            .filter(|f| *f != self.name)
            .collect()
    }
}

// Printing. Precedence: 0 = sum, 1 = product, 2 = atom.
fn write_term(f: &mut fmt::Formatter<'_>, t: &Term, prec: u8) -> fmt::Result {
    if let Some(n) = t.as_numeral() {
        return write!(f, "{n}");
    }
    match t {
        Term::Zero => f.write_str("0"),
        Term::Var(v) => f.write_str(v),
        Term::Succ(u) => {
            f.write_str("S(")?;
            write_term(f, u, 0)?;
            f.write_str(")")
        }
        Term::App(g, u) => {
            write!(f, "{g}(")?;
            write_term(f, u, 0)?;
            f.write_str(")")
        }
        Term::Pair(a, b) => {
            f.write_str("(")?;
            write_term(f, a, 0)?;
            f.write_str(", ")?;
            write_term(f, b, 0)?;
            f.write_str(")")
        }
        Term::Add(a, b) | Term::Mul(a, b) => {
            let (my, op) = if matches!(t, Term::Add(..)) { (0, " + ") } else { (1, " * ") };
            if prec > my {
                f.write_str("(")?;
            }
            write_term(f, a, my)?;
            f.write_str(op)?;
            write_term(f, b, my + 1)?;
            if prec > my {
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, 0)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::AppEq { func, arg, var } => write!(f, "{func}({arg}) = {var}"),
            Literal::VarZero(v) => write!(f, "{v} = 0"),
            Literal::VarSucc(v, w) => write!(f, "{v} = S({w})"),
            Literal::VarPair(v, a, b) => write!(f, "{v} = ({a}, {b})"),
            Literal::Rel { lhs, rel, rhs, negated } => {
                if *negated {
                    write!(f, "!({lhs} {} {rhs})", rel.symbol())
                } else {
                    write!(f, "{lhs} {} {rhs}", rel.symbol())
                }
            }
            Literal::OracleMem { term, negated } => {
                if *negated {
                    write!(f, "!({term} in X)")
                } else {
                    write!(f, "{term} in X")
                }
            }
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.ants.iter().enumerate() {
            f.write_str(if i == 0 { "" } else { " & " })?;
            write!(f, "{l}")?;
        }
        if !self.ants.is_empty() {
            f.write_str(" -> ")?;
        }
        // A bare variable or numeral head needs no extra parentheses; a pair
        // pattern already prints its own.
        write!(f, "{}({}) = {};", self.head, self.pattern, self.result)
    }
}

impl fmt::Display for ClausalDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "def {}", self.name)?;
        if let Some(m) = &self.measure {
            write!(f, " measure {m}")?;
        }
        f.write_str(" {\n")?;
        for c in &self.clauses {
            writeln!(f, "  {c}")?;
        }
        f.write_str("}\n")
    }
}

/// Canonical text of a whole program.
pub fn print_program(defs: &[ClausalDef]) -> String {
    defs.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")
}
