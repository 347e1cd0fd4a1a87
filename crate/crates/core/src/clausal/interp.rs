//! Direct interpretation of checked clausal definitions.

use std::collections::HashMap;

use num_traits::{One, Zero};
use thiserror::Error;

use super::parse::{parse_cl, ParseError};
use super::syntax::{ClausalDef, Term};
use super::tree::{check_refinement, RefineError, Refined, Test, Tree};
use crate::codec::{bit_len, unpair, FinSet, Nat};
use crate::eval::{Budget, EvalError, Meter};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClausalError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Refine(#[from] RefineError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpError {
    #[error("`{def}` applied to {arg} from argument {x}: the argument does not decrease")]
    MeasureViolation { def: String, arg: Nat, x: Nat },
    #[error("unknown function `{0}`")]
    Unknown(String),
    #[error(transparent)]
    Budget(#[from] EvalError),
    #[error("internal error: {0}")]
    Internal(String),
}

/// A program whose definitions have all passed the refinement check.
#[derive(Debug, Clone, Default)]
pub struct Env {
    source: Vec<ClausalDef>,
    defs: Vec<Refined>,
    index: HashMap<String, usize>,
}

impl Env {
    pub fn new(defs: &[ClausalDef]) -> Result<Env, RefineError> {
        let mut env = Env::default();
        for d in defs {
            env.push(d.clone())?;
        }
        Ok(env)
    }

    pub fn parse(text: &str) -> Result<Env, ClausalError> {
        Ok(Env::new(&parse_cl(text)?)?)
    }

    pub fn push(&mut self, def: ClausalDef) -> Result<&Refined, RefineError> {
        let r = check_refinement(&def)?;
        self.index.insert(def.name.clone(), self.defs.len());
        self.source.push(def);
        self.defs.push(r);
        Ok(self.defs.last().unwrap())
    }

    pub fn get(&self, name: &str) -> Option<&Refined> {
        self.index.get(name).map(|&i| &self.defs[i])
    }

    pub fn source(&self, name: &str) -> Option<&ClausalDef> {
        self.index.get(name).map(|&i| &self.source[i])
    }

    /// Checked definitions in declaration order.
    pub fn defs(&self) -> &[Refined] {
        &self.defs
    }

    pub fn sources(&self) -> &[ClausalDef] {
        &self.source
    }
}

struct Frame<'a> {
    def: &'a Refined,
    node: &'a Tree,
    vars: HashMap<String, Nat>,
    x: Nat,
}

fn term_value(t: &Term, vars: &HashMap<String, Nat>) -> Result<Nat, InterpError> {
    t.eval(vars)
        .ok_or_else(|| InterpError::Internal(format!("cannot evaluate `{t}`")))
}

/// Evaluates `fname` at `x`. Each visited tree node costs one step; every
/// recursive application must receive an argument smaller than the current one.
pub fn eval_clausal(
    env: &Env,
    fname: &str,
    x: &Nat,
    oracle: &FinSet,
    budget: Budget,
) -> Result<(Nat, Meter), InterpError> {
    let root = env.get(fname).ok_or_else(|| InterpError::Unknown(fname.to_string()))?;
    let mut meter = Meter::default();
    let note = |meter: &mut Meter, v: &Nat| -> Result<(), EvalError> {
        let b = bit_len(v);
        meter.peak_bits = meter.peak_bits.max(b);
        if b > budget.max_bits {
            return Err(EvalError::BitBudget {
                limit: budget.max_bits,
                needed: b,
            });
        }
        Ok(())
    };
    note(&mut meter, x)?;
    let mut stack = vec![Frame {
        def: root,
        node: &root.tree,
        vars: HashMap::from([(root.param.clone(), x.clone())]),
        x: x.clone(),
    }];
    loop {
        meter.steps += 1;
        if meter.steps > budget.max_steps {
            return Err(EvalError::StepBudget(budget.max_steps).into());
        }
        meter.max_depth = meter.max_depth.max(stack.len() as u64);
        let frame = stack.last_mut().expect("nonempty stack");
        match frame.node {
            Tree::Leaf(t) => {
                let v = term_value(t, &frame.vars)?;
                note(&mut meter, &v)?;
                stack.pop();
                let Some(caller) = stack.last_mut() else {
                    return Ok((v, meter));
                };
                let Tree::Apply { var, next, .. } = caller.node else {
                    return Err(InterpError::Internal("return into a non-application".into()));
                };
                caller.vars.insert(var.clone(), v);
                caller.node = next;
            }
            Tree::Apply { func, arg, .. } => {
                let a = term_value(arg, &frame.vars)?;
                note(&mut meter, &a)?;
                if *func == frame.def.name && a >= frame.x {
                    return Err(InterpError::MeasureViolation {
                        def: func.clone(),
                        arg: a,
                        x: frame.x.clone(),
                    });
                }
                let callee = env.get(func).ok_or_else(|| InterpError::Unknown(func.clone()))?;
                stack.push(Frame {
                    def: callee,
                    node: &callee.tree,
                    vars: HashMap::from([(callee.param.clone(), a.clone())]),
                    x: a,
                });
            }
            Tree::Split { test, yes, no } => {
                let taken = match test {
                    Test::ZeroSucc { v, w } => {
                        let val = term_value(&Term::var(v), &frame.vars)?;
                        if val.is_zero() {
                            true
                        } else {
                            frame.vars.insert(w.clone(), val - 1u32);
                            false
                        }
                    }
                    Test::ZeroPair { v, w1, w2 } => {
                        let val = term_value(&Term::var(v), &frame.vars)?;
                        match unpair(&val) {
                            Err(_) => true,
                            Ok((a, b)) => {
                                frame.vars.insert(w1.clone(), a);
                                frame.vars.insert(w2.clone(), b);
                                false
                            }
                        }
                    }
                    Test::Rel { lhs, rel, rhs } => {
                        let a = term_value(lhs, &frame.vars)?;
                        let b = term_value(rhs, &frame.vars)?;
                        note(&mut meter, &a)?;
                        note(&mut meter, &b)?;
                        rel.holds(&a, &b)
                    }
                    Test::Oracle(t) => oracle.contains(&term_value(t, &frame.vars)?),
                };
                frame.node = if taken { yes } else { no };
            }
        }
    }
}

/// `eval_clausal` with no oracle and the default budget.
pub fn run_clausal(env: &Env, fname: &str, x: &Nat) -> Result<Nat, InterpError> {
    eval_clausal(env, fname, x, &FinSet::new(), Budget::default()).map(|(v, _)| v)
}

/// Number of clauses of the strict form of `fname` whose antecedent holds at
/// `x`, ignoring recursive results (which a unique clause fixes anyway).
pub fn applicable_clauses(env: &Env, fname: &str, x: &Nat, oracle: &FinSet) -> Result<usize, InterpError> {
    let r = env.get(fname).ok_or_else(|| InterpError::Unknown(fname.to_string()))?;
    let mut count = 0;
    for clause in &r.strict.clauses {
        let mut vars = HashMap::from([(r.param.clone(), x.clone())]);
        let mut holds = true;
        for lit in &clause.ants {
            use super::syntax::Literal::*;
            holds = match lit {
                AppEq { func, arg, var } => {
                    let a = term_value(arg, &vars)?;
                    let v = if *func == fname && a >= *x {
                        Nat::zero()
                    } else {
                        eval_clausal(env, func, &a, oracle, Budget::default())?.0
                    };
                    vars.insert(var.clone(), v);
                    true
                }
                VarZero(v) => term_value(&Term::var(v), &vars)?.is_zero(),
                VarSucc(v, w) => {
                    let val = term_value(&Term::var(v), &vars)?;
                    if val.is_zero() {
                        false
                    } else {
                        vars.insert(w.clone(), val - Nat::one());
                        true
                    }
                }
                VarPair(v, a, b) => match unpair(&term_value(&Term::var(v), &vars)?) {
                    Ok((p, q)) => {
                        vars.insert(a.clone(), p);
                        vars.insert(b.clone(), q);
                        true
                    }
                    Err(_) => false,
                },
                Rel { lhs, rel, rhs, negated } => {
                    rel.holds(&term_value(lhs, &vars)?, &term_value(rhs, &vars)?) != *negated
                }
                OracleMem { term, negated } => oracle.contains(&term_value(term, &vars)?) != *negated,
            };
            if !holds {
                break;
            }
        }
        if holds {
            count += 1;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{list_encode, list_len, nat, pair};

    const L: &str = "def L { L(0) = 0; L((v,w)) = S(L(w)); }";

    #[test]
    fn list_length() {
        let env = Env::parse(L).unwrap();
        assert_eq!(run_clausal(&env, "L", &pair(&nat(1), &pair(&nat(2), &nat(0)))).unwrap(), nat(2));
        assert_eq!(run_clausal(&env, "L", &nat(0)).unwrap(), nat(0));
        for xs in [vec![], vec![3u64], vec![20, 0, 7, 1, 5]] {
            let code = list_encode(&xs.iter().map(|&v| nat(v)).collect::<Vec<_>>());
            assert_eq!(run_clausal(&env, "L", &code).unwrap(), list_len(&code));
        }
    }

    #[test]
    fn self_application_violates_measure() {
        let env = Env::parse("def f { f(x) = v -> f(x) = v; }").unwrap();
        let e = run_clausal(&env, "f", &nat(3)).unwrap_err();
        assert!(matches!(e, InterpError::MeasureViolation { .. }), "{e}");
    }

    #[test]
    fn exactly_one_clause() {
        let env = Env::parse(L).unwrap();
        for x in 0..=500u64 {
            assert_eq!(applicable_clauses(&env, "L", &nat(x), &FinSet::new()).unwrap(), 1);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let env = Env::parse(L).unwrap();
        let code = list_encode(&[nat(1), nat(1), nat(1)]);
        let tight = Budget {
            max_steps: 3,
            max_bits: 1000,
        };
        assert!(matches!(
            eval_clausal(&env, "L", &code, &FinSet::new(), tight),
            Err(InterpError::Budget(EvalError::StepBudget(3)))
        ));
    }
}
