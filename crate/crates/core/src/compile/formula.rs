//! Quasi-terms and quasi-bounded formulas compiled over a variable context.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};

use super::prims::{bin, head, konst, not, proj, tail, zero};
use super::CompileError;
use crate::algebra::Derivation;
use crate::clausal::{Rel, Term};
use crate::codec::{pair, tuple, FinSet, Nat};

/// Compiled functions available to applications inside terms.
pub type Funcs = HashMap<String, Derivation>;

/// Variables `x0..xn`, packed as the right-associated tuple `(x0, (x1, .. xn))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarCtx {
    vars: Vec<String>,
}

impl VarCtx {
    pub fn new<S: AsRef<str>>(vars: &[S]) -> Result<VarCtx, CompileError> {
        let vars: Vec<String> = vars.iter().map(|s| s.as_ref().to_string()).collect();
        if vars.is_empty() {
            return Err(CompileError::EmptyContext);
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(CompileError::DuplicateVar(v.clone()));
            }
        }
        Ok(VarCtx { vars })
    }

    /// `name` followed by this context. An older variable of the same name
    /// is shadowed.
    pub fn bind(&self, name: &str) -> VarCtx {
        let mut vars = vec![name.to_string()];
        vars.extend(self.vars.iter().cloned());
        VarCtx { vars }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// The derivation selecting `name` from a packed context.
    pub fn project(&self, name: &str) -> Result<Derivation, CompileError> {
        let i = self.position(name).ok_or_else(|| CompileError::Unbound(name.to_string()))?;
        Ok(proj(i, self.vars.len() - 1))
    }

    /// Packs values given in context order.
    pub fn pack(&self, values: &[Nat]) -> Nat {
        assert_eq!(values.len(), self.vars.len(), "one value per variable");
        tuple(values).expect("nonempty context")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Rel(Term, Rel, Term),
    OracleMem(Term),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    /// `∃ var < bound. body`.
    BoundedEx { var: String, bound: Term, body: Box<Formula> },
    /// `∃ var = func(arg). body`.
    QuasiBoundedEx { var: String, func: String, arg: Term, body: Box<Formula> },
}

impl Formula {
    pub fn lt(a: Term, b: Term) -> Formula {
        Formula::Rel(a, Rel::Lt, b)
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Rel(a, Rel::Eq, b)
    }

    pub fn negate(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn or(self, other: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn and(self, other: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn exists_below(var: &str, bound: Term, body: Formula) -> Formula {
        Formula::BoundedEx {
            var: var.to_string(),
            bound,
            body: Box::new(body),
        }
    }

    pub fn exists_eq(var: &str, func: &str, arg: Term, body: Formula) -> Formula {
        Formula::QuasiBoundedEx {
            var: var.to_string(),
            func: func.to_string(),
            arg,
            body: Box::new(body),
        }
    }

    /// Truth by direct evaluation; `app` supplies function values.
    pub fn holds(&self, vals: &HashMap<String, Nat>, oracle: &FinSet, app: &mut dyn FnMut(&str, &Nat) -> Nat) -> bool {
        match self {
            Formula::Rel(a, r, b) => r.holds(&eval_term(a, vals, app), &eval_term(b, vals, app)),
            Formula::OracleMem(t) => oracle.contains(&eval_term(t, vals, app)),
            Formula::Not(p) => !p.holds(vals, oracle, app),
            Formula::Or(p, q) => p.holds(vals, oracle, app) || q.holds(vals, oracle, app),
            Formula::And(p, q) => p.holds(vals, oracle, app) && q.holds(vals, oracle, app),
            Formula::BoundedEx { var, bound, body } => {
                let b = eval_term(bound, vals, app);
                let mut inner = vals.clone();
                let mut y = Nat::zero();
                while y < b {
                    inner.insert(var.clone(), y.clone());
                    if body.holds(&inner, oracle, app) {
                        return true;
                    }
                    y += 1u32;
                }
                false
            }
            Formula::QuasiBoundedEx { var, func, arg, body } => {
                let a = eval_term(arg, vals, app);
                let w = app(func, &a);
                let mut inner = vals.clone();
                inner.insert(var.clone(), w);
                body.holds(&inner, oracle, app)
            }
        }
    }
}

/// Value of `t`; unbound variables read as 0.
pub fn eval_term(t: &Term, vals: &HashMap<String, Nat>, app: &mut dyn FnMut(&str, &Nat) -> Nat) -> Nat {
    match t {
        Term::Zero => Nat::zero(),
        Term::Var(v) => vals.get(v).cloned().unwrap_or_default(),
        Term::Succ(u) => eval_term(u, vals, app) + Nat::one(),
        Term::Pair(a, b) => pair(&eval_term(a, vals, app), &eval_term(b, vals, app)),
        Term::Add(a, b) => eval_term(a, vals, app) + eval_term(b, vals, app),
        Term::Mul(a, b) => eval_term(a, vals, app) * eval_term(b, vals, app),
        Term::App(f, u) => {
            let v = eval_term(u, vals, app);
            app(f, &v)
        }
    }
}

fn write_formula(f: &mut fmt::Formatter<'_>, p: &Formula, prec: u8) -> fmt::Result {
    // 0 = disjunction, 1 = conjunction, 2 = unary.
    let open = |f: &mut fmt::Formatter<'_>, my: u8| if prec > my { f.write_str("(") } else { Ok(()) };
    let close = |f: &mut fmt::Formatter<'_>, my: u8| if prec > my { f.write_str(")") } else { Ok(()) };
    match p {
        Formula::Rel(a, r, b) => {
            let sym = if *r == Rel::Eq { "=" } else { "<" };
            if prec > 1 {
                write!(f, "({a} {sym} {b})")
            } else {
                write!(f, "{a} {sym} {b}")
            }
        }
        Formula::OracleMem(t) => {
            if prec > 1 {
                write!(f, "({t} in X)")
            } else {
                write!(f, "{t} in X")
            }
        }
        Formula::Not(q) => {
            f.write_str("!")?;
            write_formula(f, q, 2)
        }
        Formula::Or(a, b) => {
            open(f, 0)?;
            write_formula(f, a, 0)?;
            f.write_str(" | ")?;
            write_formula(f, b, 1)?;
            close(f, 0)
        }
        Formula::And(a, b) => {
            open(f, 1)?;
            write_formula(f, a, 1)?;
            f.write_str(" & ")?;
            write_formula(f, b, 2)?;
            close(f, 1)
        }
        Formula::BoundedEx { var, bound, body } => {
            open(f, 1)?;
            write!(f, "exists {var} < {bound}. ")?;
            write_formula(f, body, 2)?;
            close(f, 1)
        }
        Formula::QuasiBoundedEx { var, func, arg, body } => {
            open(f, 1)?;
            write!(f, "exists {var} = {func}({arg}). ")?;
            write_formula(f, body, 2)?;
            close(f, 1)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, 0)
    }
}

/// Resolves a variable to a derivation of the current input.
pub type Scope<'a> = &'a dyn Fn(&str) -> Result<Derivation, CompileError>;

/// A derivation `d` with `d(packed context) = t`.
pub fn compile_term(t: &Term, ctx: &VarCtx, funcs: &Funcs) -> Result<Derivation, CompileError> {
    compile_term_in(t, &|v| ctx.project(v), funcs)
}

/// `compile_term` with variables resolved by `scope`.
pub fn compile_term_in(t: &Term, scope: Scope, funcs: &Funcs) -> Result<Derivation, CompileError> {
    Ok(match t {
        Term::Zero => zero(),
        Term::Var(v) => scope(v)?,
        Term::Succ(u) => Derivation::comp(Derivation::succ(), compile_term_in(u, scope, funcs)?),
        Term::Pair(a, b) => Derivation::pair(compile_term_in(a, scope, funcs)?, compile_term_in(b, scope, funcs)?),
        Term::Add(a, b) => bin(Derivation::add(), compile_term_in(a, scope, funcs)?, compile_term_in(b, scope, funcs)?),
        Term::Mul(a, b) => bin(Derivation::mul(), compile_term_in(a, scope, funcs)?, compile_term_in(b, scope, funcs)?),
        Term::App(f, u) => {
            let g = funcs.get(f).ok_or_else(|| CompileError::UnknownFunction(f.clone()))?;
            Derivation::comp(g.clone(), compile_term_in(u, scope, funcs)?)
        }
    })
}

/// A 0-1 valued derivation that is 1 exactly where `phi` holds.
pub fn compile_formula(phi: &Formula, ctx: &VarCtx, funcs: &Funcs) -> Result<Derivation, CompileError> {
    compile_formula_in(phi, &|v| ctx.project(v), funcs)
}

/// `compile_formula` with variables resolved by `scope`. A quantified
/// variable `y` is evaluated on `(y, input)`, so it reads as `H` and every
/// other variable is read through `T`.
pub fn compile_formula_in(phi: &Formula, scope: Scope, funcs: &Funcs) -> Result<Derivation, CompileError> {
    let case = Derivation::case;
    let inner = |var: &str, body: &Formula| {
        let shifted = |v: &str| {
            if v == var {
                Ok(head())
            } else {
                Ok(Derivation::comp(scope(v)?, tail()))
            }
        };
        compile_formula_in(body, &shifted, funcs)
    };
    Ok(match phi {
        Formula::Rel(a, Rel::Lt, b) => bin(
            Derivation::lt(),
            compile_term_in(a, scope, funcs)?,
            compile_term_in(b, scope, funcs)?,
        ),
        Formula::Rel(a, Rel::Eq, b) => {
            let (a, b) = (compile_term_in(a, scope, funcs)?, compile_term_in(b, scope, funcs)?);
            // a = b iff neither a < b nor b < a.
            let ab = bin(Derivation::lt(), a.clone(), b.clone());
            let ba = bin(Derivation::lt(), b, a);
            bin(case(), ab, Derivation::pair(not(ba), zero()))
        }
        Formula::OracleMem(t) => Derivation::comp(Derivation::oracle(), compile_term_in(t, scope, funcs)?),
        Formula::Not(p) => not(compile_formula_in(p, scope, funcs)?),
        Formula::Or(p, q) => bin(
            case(),
            compile_formula_in(p, scope, funcs)?,
            Derivation::pair(compile_formula_in(q, scope, funcs)?, konst(1)),
        ),
        Formula::And(p, q) => bin(
            case(),
            compile_formula_in(p, scope, funcs)?,
            Derivation::pair(zero(), compile_formula_in(q, scope, funcs)?),
        ),
        Formula::BoundedEx { var, bound, body } => {
            // The least witness is below the bound iff one exists.
            let psi = inner(var, body)?;
            let t = compile_term_in(bound, scope, funcs)?;
            let least = bin(Derivation::mu(psi), t.clone(), Derivation::id());
            bin(Derivation::lt(), least, t)
        }
        Formula::QuasiBoundedEx { var, func, arg, body } => {
            let psi = inner(var, body)?;
            let w = compile_term_in(&Term::app(func, arg.clone()), scope, funcs)?;
            Derivation::comp(psi, Derivation::pair(w, Derivation::id()))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{validate, AlgebraClass};
    use crate::codec::nat;
    use crate::eval::{eval, Budget};

    fn v(name: &str) -> Term {
        Term::var(name)
    }

    fn run(d: &Derivation, x: &Nat, o: &FinSet) -> Nat {
        eval(d, x, o, Budget::default()).unwrap().0
    }

    #[test]
    fn single_variable_terms() {
        let ctx = VarCtx::new(&["x"]).unwrap();
        let funcs = Funcs::new();
        let d = compile_term(&v("x"), &ctx, &funcs).unwrap();
        assert_eq!(d, Derivation::id());
        assert_eq!(run(&d, &nat(9), &FinSet::new()), nat(9));
        let z = compile_term(&Term::Zero, &ctx, &funcs).unwrap();
        assert_eq!(run(&z, &nat(7), &FinSet::new()), nat(0));
        let dbl = compile_term(&Term::Add(Box::new(v("x")), Box::new(v("x"))), &ctx, &funcs).unwrap();
        assert_eq!(dbl.to_string(), "(comp add (P I I))");
        assert_eq!(run(&dbl, &nat(3), &FinSet::new()), nat(6));
    }

    #[test]
    fn formulas_on_a_grid() {
        let ctx = VarCtx::new(&["x"]).unwrap();
        let funcs = Funcs::new();
        let two = Term::numeral(2);
        let small = compile_formula(&Formula::lt(v("x"), two), &ctx, &funcs).unwrap();
        assert_eq!(run(&small, &nat(1), &FinSet::new()), nat(1));
        assert_eq!(run(&small, &nat(2), &FinSet::new()), nat(0));
        let never = compile_formula(&Formula::eq(v("x"), v("x")).negate(), &ctx, &funcs).unwrap();
        let even = Formula::exists_below("y", v("x"), Formula::eq(Term::Add(Box::new(v("y")), Box::new(v("y"))), v("x")));
        let even = compile_formula(&even, &ctx, &funcs).unwrap();
        assert!(validate(&even, AlgebraClass::DA));
        for x in 0..=20u64 {
            assert_eq!(run(&never, &nat(x), &FinSet::new()), nat(0));
            let want = x > 0 && x % 2 == 0;
            assert_eq!(run(&even, &nat(x), &FinSet::new()), nat(want as u64), "x = {x}");
        }
    }

    #[test]
    fn quasi_bounded_uses_the_function() {
        let ctx = VarCtx::new(&["x", "y"]).unwrap();
        let mut funcs = Funcs::new();
        funcs.insert("dbl".into(), compile_term(&Term::Add(Box::new(v("x")), Box::new(v("x"))), &VarCtx::new(&["x"]).unwrap(), &Funcs::new()).unwrap());
        let phi = Formula::exists_eq("w", "dbl", v("x"), Formula::lt(v("y"), v("w")).or(Formula::OracleMem(v("w"))));
        let d = compile_formula(&phi, &ctx, &funcs).unwrap();
        let oracle: FinSet = [4u64, 10].into_iter().collect();
        for x in 0..6u64 {
            for y in 0..12u64 {
                let want = y < 2 * x || x == 2 || x == 5;
                assert_eq!(run(&d, &ctx.pack(&[nat(x), nat(y)]), &oracle), nat(want as u64));
            }
        }
    }

    #[test]
    fn context_errors() {
        assert!(matches!(VarCtx::new::<&str>(&[]), Err(CompileError::EmptyContext)));
        assert!(matches!(VarCtx::new(&["a", "a"]), Err(CompileError::DuplicateVar(_))));
        let ctx = VarCtx::new(&["x"]).unwrap();
        let e = compile_term(&v("q"), &ctx, &Funcs::new()).unwrap_err();
        assert!(matches!(e, CompileError::Unbound(ref n) if n == "q"));
        let e = compile_term(&Term::app("g", v("x")), &ctx, &Funcs::new()).unwrap_err();
        assert!(matches!(e, CompileError::UnknownFunction(_)));
    }
}
