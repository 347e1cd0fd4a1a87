//! Explicit clausal definitions folded into derivations.
//!
//! The decision tree of a checked definition is compiled bottom-up. Every
//! variable the tree binds (an application result, or the parts of a split
//! variable) stands for a derivation of the original argument and is
//! substituted wherever it occurs. Packing bound values into a growing
//! tuple instead would square the packed number with every binding.

use std::collections::HashMap;

use super::formula::{compile_formula_in, compile_term_in, Formula, Funcs};
use super::prims::{head, pred, tail};
use super::CompileError;
use crate::algebra::Derivation;
use crate::clausal::{Refined, Term, Test, Tree};

type Subst = HashMap<String, Derivation>;

/// `D(c, (zero_side, other))`: `zero_side` when `c` is 0.
fn dispatch(c: Derivation, zero_side: Derivation, other: Derivation) -> Derivation {
    Derivation::comp(Derivation::case(), Derivation::pair(c, Derivation::pair(zero_side, other)))
}

fn lookup(env: &Subst) -> impl Fn(&str) -> Result<Derivation, CompileError> + '_ {
    |v| env.get(v).cloned().ok_or_else(|| CompileError::Unbound(v.to_string()))
}

fn fold(tree: &Tree, env: &mut Subst, name: &str, funcs: &Funcs) -> Result<Derivation, CompileError> {
    match tree {
        Tree::Leaf(t) => compile_term_in(t, &lookup(env), funcs),
        Tree::Apply { func, arg, var, next } => {
            if func == name {
                return Err(CompileError::NotExplicit(name.to_string()));
            }
            let value = compile_term_in(&Term::app(func, arg.clone()), &lookup(env), funcs)?;
            with(env, &[(var, value)], |env| fold(next, env, name, funcs))
        }
        Tree::Split { test, yes, no } => {
            let yes = fold(yes, env, name, funcs)?;
            match test {
                Test::ZeroSucc { v, w } => {
                    let pv = lookup(env)(v)?;
                    let bound = [(w, Derivation::comp(pred(), pv.clone()))];
                    let no = with(env, &bound, |env| fold(no, env, name, funcs))?;
                    Ok(dispatch(pv, yes, no))
                }
                Test::ZeroPair { v, w1, w2 } => {
                    let pv = lookup(env)(v)?;
                    let bound = [
                        (w1, Derivation::comp(head(), pv.clone())),
                        (w2, Derivation::comp(tail(), pv.clone())),
                    ];
                    let no = with(env, &bound, |env| fold(no, env, name, funcs))?;
                    Ok(dispatch(pv, yes, no))
                }
                Test::Rel { lhs, rel, rhs } => {
                    let phi = Formula::Rel(lhs.clone(), *rel, rhs.clone());
                    let c = compile_formula_in(&phi, &lookup(env), funcs)?;
                    Ok(dispatch(c, fold(no, env, name, funcs)?, yes))
                }
                Test::Oracle(t) => {
                    let c = compile_formula_in(&Formula::OracleMem(t.clone()), &lookup(env), funcs)?;
                    Ok(dispatch(c, fold(no, env, name, funcs)?, yes))
                }
            }
        }
    }
}

/// Runs `k` with `bound` added to `env`, restoring shadowed entries after.
fn with<T>(
    env: &mut Subst,
    bound: &[(&String, Derivation)],
    k: impl FnOnce(&mut Subst) -> T,
) -> T {
    let saved: Vec<_> = bound
        .iter()
        .map(|(n, d)| ((*n).clone(), env.insert((*n).clone(), d.clone())))
        .collect();
    let out = k(env);
    for (n, old) in saved.into_iter().rev() {
        match old {
            Some(d) => env.insert(n, d),
            None => env.remove(&n),
        };
    }
    out
}

/// A derivation agreeing with the clausal interpreter on `def`, which must
/// not apply itself. Applied functions are looked up in `funcs`.
pub fn compile_explicit(def: &Refined, funcs: &Funcs) -> Result<Derivation, CompileError> {
    let mut env = Subst::from([(def.param.clone(), Derivation::id())]);
    fold(&def.tree, &mut env, &def.name, funcs)
}
