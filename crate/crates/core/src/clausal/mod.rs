//! The clausal language: parsing, refinement checking, completion to strict
//! form, recursion restrictions and direct interpretation.

mod interp;
mod parse;
mod restrict;
mod syntax;
mod tree;

pub use interp::{applicable_clauses, eval_clausal, run_clausal, ClausalError, Env, InterpError};
pub use parse::{parse_cl, parse_term, ParseError};
pub use restrict::{check_recursive_restrictions, CallCheck, RecursionReport, RestrictError};
pub use syntax::{print_program, ClausalDef, Clause, DefKind, Literal, Rel, Term};
pub use tree::{check_refinement, complete_to_strict, test_literals, tree_to_def, RefineError, Refined, Step, Test, Tree};
