//! Restrictions on recursive definitions: the identity measure and the
//! parameterized form `x = (v, p)`.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::syntax::Term;
use super::tree::{Refined, Test, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CallCheck {
    /// The argument is a sub-pattern of `x`, hence smaller.
    Static,
    /// Decrease must be checked while evaluating.
    Dynamic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecursionReport {
    /// Every recursive application with its justification.
    pub calls: Vec<(Term, CallCheck)>,
    /// The parameter variable when `x` is split as `(v, p)` before every application.
    pub parameter: Option<String>,
}

impl RecursionReport {
    pub fn needs_dynamic_check(&self) -> bool {
        self.calls.iter().any(|(_, c)| *c == CallCheck::Dynamic)
    }
}

impl fmt::Display for RecursionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, c) in &self.calls {
            let how = match c {
                CallCheck::Static => "decreases structurally",
                CallCheck::Dynamic => "checked while evaluating",
            };
            writeln!(f, "call on {t}: {how}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RestrictError {
    #[error("`{0}` is not recursive")]
    NotRecursive(String),
    #[error("`{def}` requests measure `{measure}`; only the identity measure is supported")]
    NonIdentityMeasure { def: String, measure: String },
    #[error("`{def}` changes its parameter `{param}` in the application `{call}`")]
    ParameterAltered { def: String, param: String, call: String },
    #[error("`{def}` applies `{call}` without splitting its argument as (v, p)")]
    NotParameterized { def: String, call: String },
}

#[derive(Clone)]
enum Shape {
    Pair(String, String),
    Succ(String),
}

struct Walker<'a> {
    r: &'a Refined,
    helpers: bool,
    calls: Vec<(Term, CallCheck)>,
    parameter: Option<String>,
}

/// `Some(strict)` when `t` is provably at most `target`.
fn smaller(t: &Term, target: &str, shapes: &HashMap<String, Shape>) -> Option<bool> {
    if *t == Term::var(target) {
        return Some(false);
    }
    match (t, shapes.get(target)) {
        (Term::Pair(a, b), Some(Shape::Pair(ta, tb))) => {
            let sa = smaller(a, ta, shapes)?;
            let sb = smaller(b, tb, shapes)?;
            Some(sa || sb)
        }
        (Term::Succ(a), Some(Shape::Succ(ta))) => smaller(a, ta, shapes),
        (_, Some(Shape::Pair(ta, tb))) => {
            // A strict part of a component is a strict part of the whole.
            if smaller(t, ta, shapes).is_some() || smaller(t, tb, shapes).is_some() {
                Some(true)
            } else {
                None
            }
        }
        (_, Some(Shape::Succ(ta))) => smaller(t, ta, shapes).map(|_| true),
        _ => None,
    }
}

impl Walker<'_> {
    fn walk(&mut self, tree: &Tree, shapes: &mut HashMap<String, Shape>) -> Result<(), RestrictError> {
        match tree {
            Tree::Leaf(_) => Ok(()),
            Tree::Apply { func, arg, next, .. } => {
                let call = format!("{func}({arg})");
                let param = match shapes.get(&self.r.param) {
                    Some(Shape::Pair(_, p)) => Some(p.clone()),
                    _ => None,
                };
                let recursive = *func == self.r.name;
                if let Some(p) = &param {
                    let shipped = match arg {
                        Term::Var(v) => v == p,
                        Term::Pair(_, b) => **b == Term::var(p),
                        _ => false,
                    };
                    let is_pair_arg = matches!(arg, Term::Pair(..));
                    if (self.helpers && !shipped) || (recursive && is_pair_arg && !shipped) {
                        return Err(RestrictError::ParameterAltered {
                            def: self.r.name.clone(),
                            param: p.clone(),
                            call,
                        });
                    }
                    self.parameter.get_or_insert_with(|| p.clone());
                } else if self.helpers {
                    return Err(RestrictError::NotParameterized {
                        def: self.r.name.clone(),
                        call,
                    });
                }
                if recursive {
                    let check = match smaller(arg, &self.r.param, shapes) {
                        Some(true) => CallCheck::Static,
                        _ => CallCheck::Dynamic,
                    };
                    self.calls.push((arg.clone(), check));
                }
                self.walk(next, shapes)
            }
            Tree::Split { test, yes, no } => {
                self.walk(yes, shapes)?;
                let added = match test {
                    Test::ZeroSucc { v, w } => Some((v.clone(), Shape::Succ(w.clone()))),
                    Test::ZeroPair { v, w1, w2 } => Some((v.clone(), Shape::Pair(w1.clone(), w2.clone()))),
                    _ => None,
                };
                if let Some((v, s)) = &added {
                    shapes.insert(v.clone(), s.clone());
                }
                self.walk(no, shapes)?;
                if let Some((v, _)) = added {
                    shapes.remove(&v);
                }
                Ok(())
            }
        }
    }
}

/// Checks the identity measure and, when other functions are applied, the
/// parameterized form. Recursive arguments that are sub-patterns of `x`
/// are accepted statically; all others are flagged for dynamic checking.
pub fn check_recursive_restrictions(r: &Refined) -> Result<RecursionReport, RestrictError> {
    if let Some(m) = &r.strict.measure {
        return Err(RestrictError::NonIdentityMeasure {
            def: r.name.clone(),
            measure: m.clone(),
        });
    }
    let helpers = !r.strict.callees().is_empty();
    let mut w = Walker {
        r,
        helpers,
        calls: Vec::new(),
        parameter: None,
    };
    w.walk(&r.tree, &mut HashMap::new())?;
    if w.calls.is_empty() {
        return Err(RestrictError::NotRecursive(r.name.clone()));
    }
    Ok(RecursionReport {
        calls: w.calls,
        parameter: w.parameter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clausal::Env;

    fn report(src: &str, name: &str) -> Result<RecursionReport, RestrictError> {
        let env = Env::parse(src).unwrap();
        check_recursive_restrictions(env.get(name).unwrap())
    }

    #[test]
    fn list_length_is_structural() {
        let r = report("def L { L(0) = 0; L((v,w)) = S(L(w)); }", "L").unwrap();
        assert_eq!(r.calls.len(), 1);
        assert!(!r.needs_dynamic_check());
    }

    #[test]
    fn nested_call_is_dynamic() {
        let r = report("def f { f(0) = 0; f(S(u)) = f(f(u)); }", "f").unwrap();
        assert_eq!(r.calls.len(), 2);
        assert_eq!(r.calls[0].1, CallCheck::Static);
        assert_eq!(r.calls[1].1, CallCheck::Dynamic);
    }

    #[test]
    fn self_call_on_x_is_dynamic() {
        let r = report("def f { f(x) = v -> f(x) = v; }", "f").unwrap();
        assert!(r.needs_dynamic_check());
    }

    #[test]
    fn parameter_must_be_shipped() {
        let e = report("def f { f((0, p)) = p; f((S(t), p)) = f((t, S(p))); }", "f").unwrap_err();
        assert!(matches!(e, RestrictError::ParameterAltered { .. }), "{e}");
        let ok = report("def f { f((0, p)) = p; f((S(t), p)) = S(f((t, p))); }", "f").unwrap();
        assert_eq!(ok.parameter.as_deref(), Some("p"));
        assert!(!ok.needs_dynamic_check());
    }

    #[test]
    fn helpers_need_parameterized_form() {
        let e = report("def g { g(x) = x; }\ndef f { f(0) = 0; f(S(u)) = g(f(u)); }", "f").unwrap_err();
        assert!(matches!(e, RestrictError::NotParameterized { .. }), "{e}");
        let ok = report(
            "def g { g(x) = x; }\ndef f { f((0, p)) = g(p); f((S(u), p)) = g((f((u, p)), p)); }",
            "f",
        );
        assert!(ok.is_ok(), "{ok:?}");
    }

    #[test]
    fn measure_must_be_identity() {
        let e = report("def m { m(x) = x; }\ndef f measure m { f(0) = 0; f(S(u)) = f(u); }", "f").unwrap_err();
        assert!(matches!(e, RestrictError::NonIdentityMeasure { .. }));
    }
}
