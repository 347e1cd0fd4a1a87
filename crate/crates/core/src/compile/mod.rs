//! Compilers from terms, formulas and clausal definitions to derivations,
//! and the two reductions of recursive definitions.

mod explicit;
mod formula;
pub mod prims;
mod reduce_pr;
mod reduce_snr;

use thiserror::Error;

use crate::algebra::AlgebraClass;
use crate::clausal::{DefKind, Env, InterpError, RefineError, RestrictError};
use crate::codec::Nat;

pub use explicit::compile_explicit;
pub use formula::{
    compile_formula, compile_formula_in, compile_term, compile_term_in, eval_term, Formula, Funcs, Scope, VarCtx,
};
pub use reduce_pr::{reduce_recursive_to_pr, ReductionArtifacts};
pub use reduce_snr::{reduce_bounded_nested_to_snr, SnrOptions, SnrReduction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("variable context is empty")]
    EmptyContext,
    #[error("variable `{0}` occurs twice in the context")]
    DuplicateVar(String),
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("function `{0}` is not compiled")]
    UnknownFunction(String),
    #[error("`{0}` applies itself; explicit compilation needs a definition without recursion")]
    NotExplicit(String),
    #[error("`{0}` is recursive; use --class PRA or TA, or reduce it")]
    NeedsRecursion(String),
    #[error("`{def}` has {calls} recursive applications on one path; the limit is {limit}")]
    TooManyCalls { def: String, calls: usize, limit: usize },
    #[error("`{def}` at {x} yields {value}, above the bound {bound}")]
    BoundViolated { def: String, x: Nat, value: Nat, bound: Nat },
    #[error("the derivation for `{def}` is not in {class}")]
    NotInClass { def: String, class: AlgebraClass },
    #[error(transparent)]
    Restrict(#[from] RestrictError),
    #[error(transparent)]
    Refine(#[from] RefineError),
    #[error(transparent)]
    Interp(#[from] InterpError),
}

/// Compiles every definition of `env` up to and including `target` in
/// `class`. Explicit definitions are folded; recursive ones are reduced to
/// primitive recursion in PRA and to special nested recursion (with the
/// bound `n`) in TA.
pub fn compile_program(env: &Env, target: &str, class: AlgebraClass) -> Result<Funcs, CompileError> {
    if env.get(target).is_none() {
        return Err(CompileError::UnknownFunction(target.to_string()));
    }
    let mut funcs = Funcs::new();
    for r in env.defs() {
        let d = match r.strict.kind() {
            DefKind::Explicit => compile_explicit(r, &funcs)?,
            DefKind::Recursive => match class {
                AlgebraClass::PRA => reduce_recursive_to_pr(env, &r.name, &funcs)?.result,
                AlgebraClass::TA => {
                    let bound = crate::algebra::PolyBound::N;
                    reduce_bounded_nested_to_snr(env, &r.name, &bound, &funcs, SnrOptions::default())?.result
                }
                _ => return Err(CompileError::NeedsRecursion(r.name.clone())),
            },
        };
        if !crate::algebra::validate(&d, class) {
            return Err(CompileError::NotInClass {
                def: r.name.clone(),
                class,
            });
        }
        let done = r.name == target;
        funcs.insert(r.name.clone(), d);
        if done {
            break;
        }
    }
    Ok(funcs)
}
