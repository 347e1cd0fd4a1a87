//! Refinement checking and completion.
//!
//! A clause set is derivable by the refinement rules exactly when its clauses
//! can be merged into a decision tree whose inner nodes are bindings
//! (`g(t) = v`) and two-way tests, with one clause per leaf. Building that tree
//! is the check; reading its paths back gives the strict clause set.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use super::syntax::{ClausalDef, Clause, Literal, Rel, Term};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Test {
    /// `v = 0` versus `v = S(w)`.
    ZeroSucc { v: String, w: String },
    /// `v = 0` versus `v = (w1, w2)`.
    ZeroPair { v: String, w1: String, w2: String },
    Rel { lhs: Term, rel: Rel, rhs: Term },
    Oracle(Term),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tree {
    Leaf(Term),
    Apply {
        func: String,
        arg: Term,
        var: String,
        next: Box<Tree>,
    },
    /// `yes` is the `v = 0` / relation-holds / member side.
    Split {
        test: Test,
        yes: Box<Tree>,
        no: Box<Tree>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefineError {
    #[error("`{def}`: no clause covers the case {case}")]
    NonExhaustive { def: String, case: String },
    #[error("`{def}`: clauses {first} and {second} overlap")]
    Overlap { def: String, first: usize, second: usize },
    #[error("`{def}`: clauses {first} and {second} diverge at `{lit}`, which no refinement rule produces")]
    NotDerivable {
        def: String,
        first: usize,
        second: usize,
        lit: String,
    },
    #[error("`{def}`: clause {clause} reuses `{var}` where a new variable is required")]
    Stale { def: String, clause: usize, var: String },
    #[error("`{def}`: clause {clause} has pattern `{pattern}`; patterns are built from variables, numerals, S and pairs")]
    BadPattern { def: String, clause: usize, pattern: String },
    #[error("`{def}`: clause {clause} repeats pattern variable `{var}`")]
    NonLinear { def: String, clause: usize, var: String },
}

/// One refinement step: the rule number (1 binding, 2 zero/successor,
/// 3 zero/pair, 4 relation, 5 completion) and the literal it adds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub rule: u8,
    pub depth: usize,
    pub text: String,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}rule {}: {}", "  ".repeat(self.depth), self.rule, self.text)
    }
}

#[derive(Debug, Clone)]
pub struct Refined {
    pub name: String,
    /// Name of the argument variable.
    pub param: String,
    pub tree: Tree,
    /// Strict clause set; the input itself when it was already strict.
    pub strict: ClausalDef,
    pub trace: Vec<Step>,
    /// True when default clauses or unnesting were needed.
    pub completed: bool,
}

/// Fresh-name supply avoiding every name of a definition.
struct Fresh {
    used: BTreeSet<String>,
}

impl Fresh {
    fn new(def: &ClausalDef) -> Self {
        let used = def.clauses.iter().flat_map(|c| c.all_vars()).collect();
        Fresh { used }
    }

    fn name(&mut self, base: &str) -> String {
        let mut candidate = base.to_string();
        let mut k = 1;
        while self.used.contains(&candidate) {
            candidate = format!("{base}{k}");
            k += 1;
        }
        self.used.insert(candidate.clone());
        candidate
    }
}

struct Work {
    idx: usize,
    lits: VecDeque<Literal>,
    result: Term,
}

impl Work {
    /// Renames `from` to `to` in the remaining literals and result, first moving
    /// any clashing later binding of `to` out of the way.
    fn rename(&mut self, from: &str, to: &str, fresh: &mut Fresh) {
        if from == to {
            return;
        }
        let clash = self.lits.iter().any(|l| l.new_vars().contains(&to));
        if clash {
            let other = fresh.name(to);
            self.apply(&HashMap::from([(to.to_string(), other)]));
        }
        self.apply(&HashMap::from([(from.to_string(), to.to_string())]));
    }

    fn apply(&mut self, map: &HashMap<String, String>) {
        for l in self.lits.iter_mut() {
            *l = l.rename(map);
        }
        self.result = self.result.rename(map);
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Strict,
    Complete,
}

struct Builder<'a> {
    def: &'a str,
    mode: Mode,
    fresh: Fresh,
}

impl Builder<'_> {
    fn gap(&mut self, case: String) -> Result<Tree, RefineError> {
        match self.mode {
            Mode::Strict => Err(RefineError::NonExhaustive {
                def: self.def.to_string(),
                case,
            }),
            Mode::Complete => Ok(Tree::Leaf(Term::Zero)),
        }
    }

    fn fresh_check(&self, w: &Work, var: &str, bound: &BTreeSet<String>) -> Result<(), RefineError> {
        if bound.contains(var) {
            return Err(RefineError::Stale {
                def: self.def.to_string(),
                clause: w.idx + 1,
                var: var.to_string(),
            });
        }
        Ok(())
    }

    fn diverge(&self, a: &Work, b: &Work) -> RefineError {
        RefineError::NotDerivable {
            def: self.def.to_string(),
            first: a.idx + 1,
            second: b.idx + 1,
            lit: b.lits.front().map_or_else(|| "end of clause".to_string(), |l| l.to_string()),
        }
    }

    fn build(&mut self, mut group: Vec<Work>, bound: BTreeSet<String>, case: String) -> Result<Tree, RefineError> {
        if group.is_empty() {
            return self.gap(case);
        }
        if let Some(done) = group.iter().position(|w| w.lits.is_empty()) {
            if group.len() > 1 {
                let other = if done == 0 { 1 } else { 0 };
                let (a, b) = (group[done].idx.min(group[other].idx), group[done].idx.max(group[other].idx));
                return Err(RefineError::Overlap {
                    def: self.def.to_string(),
                    first: a + 1,
                    second: b + 1,
                });
            }
            return Ok(Tree::Leaf(group.pop().unwrap().result));
        }
        let first = group[0].lits[0].clone();
        match first {
            Literal::AppEq { func, arg, var } => {
                self.fresh_check(&group[0], &var, &bound)?;
                for i in 1..group.len() {
                    let ok = match &group[i].lits[0] {
                        Literal::AppEq { func: f2, arg: a2, var: v2 } if *f2 == func && *a2 == arg => {
                            self.fresh_check(&group[i], v2, &bound)?;
                            let v2 = v2.clone();
                            group[i].rename(&v2, &var, &mut self.fresh);
                            true
                        }
                        _ => false,
                    };
                    if !ok {
                        return Err(self.diverge(&group[0], &group[i]));
                    }
                }
                for w in group.iter_mut() {
                    w.lits.pop_front();
                }
                let mut bound = bound;
                bound.insert(var.clone());
                let next = self.build(group, bound, case)?;
                Ok(Tree::Apply {
                    func,
                    arg,
                    var,
                    next: Box::new(next),
                })
            }
            _ => self.split(group, bound, case),
        }
    }

    fn split(&mut self, mut group: Vec<Work>, bound: BTreeSet<String>, case: String) -> Result<Tree, RefineError> {
        // The test is fixed by the first literal that is not a bare `v = 0`.
        let decider = group
            .iter()
            .map(|w| &w.lits[0])
            .find(|l| !matches!(l, Literal::VarZero(_)))
            .cloned();
        let test = match decider {
            Some(Literal::VarSucc(v, w)) => Test::ZeroSucc { v, w },
            Some(Literal::VarPair(v, w1, w2)) => Test::ZeroPair { v, w1, w2 },
            Some(Literal::Rel { lhs, rel, rhs, .. }) => Test::Rel { lhs, rel, rhs },
            Some(Literal::OracleMem { term, .. }) => Test::Oracle(term),
            Some(Literal::VarZero(_)) | Some(Literal::AppEq { .. }) => {
                let other = group.iter().find(|w| matches!(w.lits[0], Literal::AppEq { .. }));
                return Err(self.diverge(&group[0], other.unwrap_or(&group[0])));
            }
            None => {
                let Literal::VarZero(v) = &group[0].lits[0] else { unreachable!() };
                if self.mode == Mode::Strict {
                    return self.gap(format!("{case}{v} = (_, _)"));
                }
                let w1 = self.fresh.name(&format!("{v}1"));
                let w2 = self.fresh.name(&format!("{v}2"));
                Test::ZeroPair { v: v.clone(), w1, w2 }
            }
        };
        let mut yes = Vec::new();
        let mut no = Vec::new();
        let first_idx = group[0].idx;
        for mut w in std::mem::take(&mut group) {
            let lit = w.lits[0].clone();
            let side = match (&test, &lit) {
                (Test::ZeroSucc { v, .. } | Test::ZeroPair { v, .. }, Literal::VarZero(u)) if u == v => Some(true),
                (Test::Rel { lhs: Term::Var(v), rel: Rel::Eq, rhs: Term::Zero }, Literal::VarZero(u)) if u == v => {
                    Some(true)
                }
                (Test::ZeroSucc { v, w: target }, Literal::VarSucc(u, w2)) if u == v => {
                    self.fresh_check(&w, w2, &bound)?;
                    let w2 = w2.clone();
                    w.rename(&w2, target, &mut self.fresh);
                    Some(false)
                }
                (Test::ZeroPair { v, w1, w2 }, Literal::VarPair(u, a, b)) if u == v => {
                    self.fresh_check(&w, a, &bound)?;
                    self.fresh_check(&w, b, &bound)?;
                    let (a, b) = (a.clone(), b.clone());
                    // Two-step rename through a temporary avoids swapping clashes.
                    let ta = self.fresh.name("t");
                    let tb = self.fresh.name("t");
                    w.rename(&a, &ta, &mut self.fresh);
                    w.rename(&b, &tb, &mut self.fresh);
                    w.rename(&ta, w1, &mut self.fresh);
                    w.rename(&tb, w2, &mut self.fresh);
                    Some(false)
                }
                (Test::Rel { lhs, rel, rhs }, Literal::Rel { lhs: l2, rel: r2, rhs: h2, negated })
                    if lhs == l2 && rel == r2 && rhs == h2 =>
                {
                    Some(!negated)
                }
                (Test::Oracle(t), Literal::OracleMem { term, negated }) if t == term => Some(!negated),
                _ => None,
            };
            match side {
                Some(s) => {
                    w.lits.pop_front();
                    if s {
                        yes.push(w);
                    } else {
                        no.push(w);
                    }
                }
                None => {
                    return Err(RefineError::NotDerivable {
                        def: self.def.to_string(),
                        first: first_idx + 1,
                        second: w.idx + 1,
                        lit: lit.to_string(),
                    });
                }
            }
        }
        let (yes_case, no_case, new_vars): (String, String, Vec<String>) = match &test {
            Test::ZeroSucc { v, w } => (format!("{v} = 0"), format!("{v} = S({w})"), vec![w.clone()]),
            Test::ZeroPair { v, w1, w2 } => (
                format!("{v} = 0"),
                format!("{v} = ({w1}, {w2})"),
                vec![w1.clone(), w2.clone()],
            ),
            Test::Rel { lhs, rel, rhs } => {
                let l = Literal::Rel {
                    lhs: lhs.clone(),
                    rel: *rel,
                    rhs: rhs.clone(),
                    negated: false,
                };
                (l.to_string(), format!("!({l})"), Vec::new())
            }
            Test::Oracle(t) => (format!("{t} in X"), format!("!({t} in X)"), Vec::new()),
        };
        for v in &new_vars {
            if bound.contains(v) {
                return Err(RefineError::Stale {
                    def: self.def.to_string(),
                    clause: no.first().map_or(0, |w| w.idx + 1),
                    var: v.clone(),
                });
            }
        }
        let sep = if case.is_empty() { "" } else { " & " };
        let yes_tree = self.build(yes, bound.clone(), format!("{case}{sep}{yes_case}"))?;
        let mut no_bound = bound;
        no_bound.extend(new_vars);
        let no_tree = self.build(no, no_bound, format!("{case}{sep}{no_case}"))?;
        Ok(Tree::Split {
            test,
            yes: Box::new(yes_tree),
            no: Box::new(no_tree),
        })
    }
}

/// Literals expressing that `target` matches `pattern`, plus renamings of
/// pattern variables.
fn pattern_lits(
    pattern: &Term,
    target: &str,
    fresh: &mut Fresh,
    out: &mut Vec<Literal>,
    names: &mut HashMap<String, String>,
) -> Result<(), Term> {
    match pattern {
        Term::Var(v) => {
            if names.insert(v.clone(), target.to_string()).is_some() {
                return Err(pattern.clone());
            }
            Ok(())
        }
        Term::Zero => {
            out.push(Literal::VarZero(target.to_string()));
            Ok(())
        }
        Term::Succ(p) => {
            let w = match &**p {
                Term::Var(v) if !names.contains_key(v) => v.clone(),
                _ => fresh.name("w"),
            };
            out.push(Literal::VarSucc(target.to_string(), w.clone()));
            pattern_lits(p, &w, fresh, out, names)
        }
        Term::Pair(a, b) => {
            let pick = |t: &Term, fresh: &mut Fresh, names: &HashMap<String, String>| match t {
                Term::Var(v) if !names.contains_key(v) => v.clone(),
                _ => fresh.name("w"),
            };
            let w1 = pick(a, fresh, names);
            let w2 = match &**b {
                Term::Var(v) if *v != w1 && !names.contains_key(v) => v.clone(),
                _ => fresh.name("w"),
            };
            out.push(Literal::VarPair(target.to_string(), w1.clone(), w2.clone()));
            pattern_lits(a, &w1, fresh, out, names)?;
            pattern_lits(b, &w2, fresh, out, names)
        }
        _ => Err(pattern.clone()),
    }
}

/// Replaces applications inside `t` by fresh variables bound by new
/// `AppEq` literals, innermost first.
fn unnest(t: &Term, fresh: &mut Fresh, out: &mut Vec<Literal>) -> Term {
    match t {
        Term::Zero | Term::Var(_) => t.clone(),
        Term::Succ(a) => Term::succ(unnest(a, fresh, out)),
        Term::Pair(a, b) => {
            let a = unnest(a, fresh, out);
            Term::pair(a, unnest(b, fresh, out))
        }
        Term::Add(a, b) => {
            let a = unnest(a, fresh, out);
            Term::Add(Box::new(a), Box::new(unnest(b, fresh, out)))
        }
        Term::Mul(a, b) => {
            let a = unnest(a, fresh, out);
            Term::Mul(Box::new(a), Box::new(unnest(b, fresh, out)))
        }
        Term::App(f, a) => {
            let arg = unnest(a, fresh, out);
            let var = fresh.name("z");
            out.push(Literal::AppEq {
                func: f.clone(),
                arg,
                var: var.clone(),
            });
            Term::Var(var)
        }
    }
}

fn to_work(def: &ClausalDef, fresh: &mut Fresh) -> Result<(String, Vec<Work>), RefineError> {
    let param = match &def.clauses[0].pattern {
        Term::Var(v) => v.clone(),
        _ => fresh.name("x"),
    };
    let mut works = Vec::new();
    for (idx, c) in def.clauses.iter().enumerate() {
        let mut lits = Vec::new();
        let mut names = HashMap::new();
        // Pattern variables become the matching split variables.
        let local = fresh.name("x");
        pattern_lits(&c.pattern, &local, fresh, &mut lits, &mut names).map_err(|p| match p {
            Term::Var(v) => RefineError::NonLinear {
                def: def.name.clone(),
                clause: idx + 1,
                var: v,
            },
            p => RefineError::BadPattern {
                def: def.name.clone(),
                clause: idx + 1,
                pattern: p.to_string(),
            },
        })?;
        let clause = c.rename(&names);
        for l in &clause.ants {
            let mut pre = Vec::new();
            let lit = match l {
                Literal::AppEq { func, arg, var } => Literal::AppEq {
                    func: func.clone(),
                    arg: unnest(arg, fresh, &mut pre),
                    var: var.clone(),
                },
                Literal::Rel { lhs, rel, rhs, negated } => {
                    let lhs = unnest(lhs, fresh, &mut pre);
                    Literal::Rel {
                        lhs,
                        rel: *rel,
                        rhs: unnest(rhs, fresh, &mut pre),
                        negated: *negated,
                    }
                }
                Literal::OracleMem { term, negated } => Literal::OracleMem {
                    term: unnest(term, fresh, &mut pre),
                    negated: *negated,
                },
                other => other.clone(),
            };
            lits.extend(pre);
            lits.push(lit);
        }
        let result = unnest(&clause.result, fresh, &mut lits);
        let mut w = Work {
            idx,
            lits: lits.into(),
            result,
        };
        w.rename(&local, &param, fresh);
        works.push(w);
    }
    Ok((param, works))
}

fn paths(tree: &Tree, prefix: &mut Vec<Literal>, name: &str, param: &str, out: &mut Vec<Clause>) {
    match tree {
        Tree::Leaf(t) => out.push(Clause {
            ants: prefix.clone(),
            head: name.to_string(),
            pattern: Term::var(param),
            result: t.clone(),
        }),
        Tree::Apply { func, arg, var, next } => {
            prefix.push(Literal::AppEq {
                func: func.clone(),
                arg: arg.clone(),
                var: var.clone(),
            });
            paths(next, prefix, name, param, out);
            prefix.pop();
        }
        Tree::Split { test, yes, no } => {
            let (y, n) = test_literals(test);
            prefix.push(y);
            paths(yes, prefix, name, param, out);
            prefix.pop();
            prefix.push(n);
            paths(no, prefix, name, param, out);
            prefix.pop();
        }
    }
}

/// The literals of the two branches of a test.
pub fn test_literals(test: &Test) -> (Literal, Literal) {
    match test {
        Test::ZeroSucc { v, w } => (Literal::VarZero(v.clone()), Literal::VarSucc(v.clone(), w.clone())),
        Test::ZeroPair { v, w1, w2 } => (
            Literal::VarZero(v.clone()),
            Literal::VarPair(v.clone(), w1.clone(), w2.clone()),
        ),
        Test::Rel { lhs, rel, rhs } => {
            let l = |negated| Literal::Rel {
                lhs: lhs.clone(),
                rel: *rel,
                rhs: rhs.clone(),
                negated,
            };
            (l(false), l(true))
        }
        Test::Oracle(t) => (
            Literal::OracleMem {
                term: t.clone(),
                negated: false,
            },
            Literal::OracleMem {
                term: t.clone(),
                negated: true,
            },
        ),
    }
}

fn trace(tree: &Tree, depth: usize, out: &mut Vec<Step>) {
    match tree {
        Tree::Leaf(t) => out.push(Step {
            rule: 5,
            depth,
            text: format!("{t} = y"),
        }),
        Tree::Apply { func, arg, var, next } => {
            out.push(Step {
                rule: 1,
                depth,
                text: format!("{func}({arg}) = {var}"),
            });
            trace(next, depth, out);
        }
        Tree::Split { test, yes, no } => {
            let rule = match test {
                Test::ZeroSucc { .. } => 2,
                Test::ZeroPair { .. } => 3,
                Test::Rel { .. } | Test::Oracle(_) => 4,
            };
            let (y, n) = test_literals(test);
            out.push(Step {
                rule,
                depth,
                text: format!("{y} | {n}"),
            });
            trace(yes, depth + 1, out);
            trace(no, depth + 1, out);
        }
    }
}

/// Checks that `def` is derivable by the refinement rules. Definitions in
/// relaxed notation (patterns, nested applications) are completed first:
/// missing cases get default clauses yielding 0. Strict definitions must be
/// exhaustive as written.
pub fn check_refinement(def: &ClausalDef) -> Result<Refined, RefineError> {
    let strict_input = def.is_strict();
    let mut fresh = Fresh::new(def);
    let (param, works) = to_work(def, &mut fresh)?;
    let mut b = Builder {
        def: &def.name,
        mode: if strict_input { Mode::Strict } else { Mode::Complete },
        fresh,
    };
    let tree = b.build(works, BTreeSet::from([param.clone()]), String::new())?;
    let mut steps = Vec::new();
    trace(&tree, 0, &mut steps);
    let strict = if strict_input {
        def.clone()
    } else {
        let mut clauses = Vec::new();
        paths(&tree, &mut Vec::new(), &def.name, &param, &mut clauses);
        ClausalDef {
            name: def.name.clone(),
            measure: def.measure.clone(),
            clauses,
        }
    };
    Ok(Refined {
        name: def.name.clone(),
        param,
        tree,
        strict,
        trace: steps,
        completed: !strict_input,
    })
}

/// The strict definition whose clauses are the paths of `tree`.
pub fn tree_to_def(name: &str, param: &str, tree: &Tree) -> ClausalDef {
    let mut clauses = Vec::new();
    paths(tree, &mut Vec::new(), name, param, &mut clauses);
    ClausalDef {
        name: name.to_string(),
        measure: None,
        clauses,
    }
}

/// The strict form of `def`; identity on strict definitions.
pub fn complete_to_strict(def: &ClausalDef) -> Result<ClausalDef, RefineError> {
    check_refinement(def).map(|r| r.strict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clausal::parse::parse_cl;

    fn one(src: &str) -> ClausalDef {
        parse_cl(src).unwrap().remove(0)
    }

    #[test]
    fn list_length_uses_pair_split() {
        let r = check_refinement(&one("def L { L(0) = 0; L((v,w)) = S(L(w)); }")).unwrap();
        assert_eq!(r.trace[0].rule, 3);
        assert_eq!(r.strict.clauses.len(), 2);
        assert!(r.strict.is_strict());
    }

    #[test]
    fn missing_case_in_strict_form() {
        let e = check_refinement(&one("def f { x = 0 -> f(x) = 0; }")).unwrap_err();
        assert!(matches!(e, RefineError::NonExhaustive { .. }), "{e}");
    }

    #[test]
    fn stale_variable() {
        let e = check_refinement(&one("def g { g(x) = x; }\n").clone());
        assert!(e.is_ok());
        let defs = parse_cl("def g { g(x) = x; }\ndef f { g(x) = v & g(v) = v -> f(x) = v; }").unwrap();
        let e = check_refinement(&defs[1]).unwrap_err();
        assert!(matches!(e, RefineError::Stale { ref var, .. } if var == "v"), "{e}");
    }

    #[test]
    fn overlapping_clauses() {
        let e = check_refinement(&one("def f { f(x) = 0; f(x) = 1; }")).unwrap_err();
        assert!(matches!(e, RefineError::Overlap { .. }), "{e}");
    }

    #[test]
    fn bounded_recursion_completes_to_five_clauses() {
        let src = "def g { g(x) = x; }\ndef h { h(x) = x; }\n\
                   def f { g(p) = z & z < S(p) -> f((0, p)) = z;\n\
                           h(((v, f((v, p))), p)) = z & z < S(p) -> f((S(v), p)) = z; }";
        let defs = parse_cl(src).unwrap();
        let r = check_refinement(&defs[2]).unwrap();
        assert_eq!(r.strict.clauses.len(), 5);
        let text = r.strict.to_string();
        assert!(text.contains(&format!("{} = 0 -> f({}) = 0;", r.param, r.param)), "{text}");
        // Completion is idempotent.
        let again = check_refinement(&r.strict).unwrap();
        assert_eq!(again.strict, r.strict);
    }

    #[test]
    fn primitive_recursion_relaxed_to_three_clauses() {
        let src = "def g { g(x) = x; }\ndef h { h(x) = x; }\n\
                   def f { f((0, p)) = g(p); f((S(w), p)) = h(((w, f((w, p))), p)); }";
        let defs = parse_cl(src).unwrap();
        let r = check_refinement(&defs[2]).unwrap();
        assert_eq!(r.strict.clauses.len(), 3);
        assert_eq!(r.strict.clauses[0].ants.len(), 1);
    }

    #[test]
    fn strict_input_is_unchanged() {
        let d = one("def f { x = 0 -> f(x) = 0; x = (a, b) -> f(x) = b; }");
        assert_eq!(complete_to_strict(&d).unwrap(), d);
    }
}
