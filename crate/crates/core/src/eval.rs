//! Metered evaluation of derivations.
//!
//! Evaluation runs on an explicit task stack, so deeply nested recursions never
//! touch the host stack. The memoizing variant caches every argument of a
//! `pr`, `bpr` or `snr` node for the duration of one top-level call.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::algebra::{Derivation, OpSym};
use crate::codec::{bit_len, pair, unpair, FinSet, Nat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_steps: u64,
    pub max_bits: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_steps: 10_000_000,
            max_bits: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Meter {
    /// Operator-node evaluations.
    pub steps: u64,
    /// Largest bit length of any intermediate value.
    pub peak_bits: u64,
    pub memo_hits: u64,
    /// Largest number of pending tasks.
    pub max_depth: u64,
}

impl Meter {
    /// `value<TAB>steps<TAB>peak_bits<TAB>memo_hits<TAB>max_depth`
    pub fn report_line(&self, value: &Nat) -> String {
        format!(
            "{value}\t{}\t{}\t{}\t{}",
            self.steps, self.peak_bits, self.memo_hits, self.max_depth
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("step budget of {0} exceeded")]
    StepBudget(u64),
    #[error("bit budget of {limit} exceeded (a value needs {needed} bits)")]
    BitBudget { limit: u64, needed: u64 },
}

/// Expansion record of one `snr` node at one parameter value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnrTrace {
    pub param: Nat,
    /// Largest first component the node was asked for.
    pub top: Nat,
    /// Distinct first components actually expanded.
    pub expanded: usize,
}

impl SnrTrace {
    /// Course-of-values property: at most `top + 1` expansions.
    pub fn within_bound(&self) -> bool {
        Nat::from(self.expanded) <= &self.top + 1u32
    }
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    pub value: Nat,
    pub meter: Meter,
    pub snr: Vec<SnrTrace>,
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.meter.report_line(&self.value))
    }
}

enum Task {
    Eval(Derivation, Nat),
    /// Pops `h(x)` and `g(x)` and pushes their pair.
    Pair,
    ApplyTo(Derivation),
    MuCheck {
        g: Derivation,
        z: Nat,
        bnd: Nat,
        p: Nat,
    },
    /// Receives `f(k, p)`; `bounded` clamps values above `p` to 0.
    PrStep {
        node: Derivation,
        k: Nat,
        v: Nat,
        p: Nat,
        bounded: bool,
    },
    SnrAfterG {
        node: Derivation,
        x: Nat,
    },
    SnrAfterInner {
        node: Derivation,
        x: Nat,
    },
    SnrAfterH {
        node: Derivation,
        x: Nat,
    },
    /// Stores the value on top of the stack as `node(x)`.
    Memoize {
        node: usize,
        x: Nat,
    },
}

struct Machine<'a> {
    oracle: &'a FinSet,
    budget: Budget,
    memo: Option<HashMap<(usize, Nat), Nat>>,
    snr: HashMap<(usize, Nat), (Nat, HashSet<Nat>)>,
    pr_frontier: HashMap<(usize, Nat), Nat>,
    meter: Meter,
    tasks: Vec<Task>,
    values: Vec<Nat>,
}

impl Machine<'_> {
    fn note_bits(&mut self, x: &Nat) -> Result<(), EvalError> {
        let b = bit_len(x);
        if b > self.meter.peak_bits {
            self.meter.peak_bits = b;
            if b > self.budget.max_bits {
                return Err(EvalError::BitBudget {
                    limit: self.budget.max_bits,
                    needed: b,
                });
            }
        }
        Ok(())
    }

    fn push_value(&mut self, v: Nat) -> Result<(), EvalError> {
        self.note_bits(&v)?;
        self.values.push(v);
        Ok(())
    }

    fn pop(&mut self) -> Nat {
        self.values.pop().expect("value stack underflow")
    }

    fn eval_later(&mut self, d: &Derivation, x: Nat) {
        self.tasks.push(Task::Eval(d.clone(), x));
    }

    /// Finish `node(x) = v`, caching it when memoizing.
    fn finish(&mut self, node: &Derivation, x: Nat, v: Nat) -> Result<(), EvalError> {
        if let Some(m) = self.memo.as_mut() {
            m.insert((node.node_id(), x), v.clone());
        }
        self.push_value(v)
    }

    fn lookup(&mut self, node: &Derivation, x: &Nat) -> Option<Nat> {
        let hit = self.memo.as_ref()?.get(&(node.node_id(), x.clone())).cloned();
        if hit.is_some() {
            self.meter.memo_hits += 1;
        }
        hit
    }

    fn run(&mut self, d: &Derivation, x: Nat) -> Result<Nat, EvalError> {
        self.note_bits(&x)?;
        self.eval_later(d, x);
        while let Some(task) = self.tasks.pop() {
            let depth = self.tasks.len() as u64 + 1;
            self.meter.max_depth = self.meter.max_depth.max(depth);
            self.step(task)?;
        }
        Ok(self.pop())
    }

    fn step(&mut self, task: Task) -> Result<(), EvalError> {
        match task {
            Task::Eval(d, x) => {
                self.meter.steps += 1;
                if self.meter.steps > self.budget.max_steps {
                    return Err(EvalError::StepBudget(self.budget.max_steps));
                }
                self.note_bits(&x)?;
                self.eval_node(d, x)
            }
            Task::Pair => {
                let h = self.pop();
                let g = self.pop();
                self.push_value(pair(&g, &h))
            }
            Task::ApplyTo(g) => {
                let v = self.pop();
                self.eval_later(&g, v);
                Ok(())
            }
            Task::MuCheck { g, z, bnd, p } => {
                if self.pop().is_one() {
                    return self.push_value(z);
                }
                let z = z + 1u32;
                if z < bnd {
                    let arg = pair(&z, &p);
                    self.tasks.push(Task::MuCheck { g: g.clone(), z, bnd, p });
                    self.eval_later(&g, arg);
                    Ok(())
                } else {
                    self.push_value(bnd)
                }
            }
            Task::PrStep {
                node,
                k,
                v,
                p,
                bounded,
            } => {
                let mut val = self.pop();
                if bounded && val > p {
                    val = Nat::zero();
                }
                if let Some(m) = self.memo.as_mut() {
                    m.insert((node.node_id(), pair(&k, &p)), val.clone());
                    let f = self.pr_frontier.entry((node.node_id(), p.clone())).or_default();
                    if *f < k {
                        *f = k.clone();
                    }
                }
                if k == v {
                    return self.push_value(val);
                }
                let h = node.children()[1].clone();
                let arg = pair(&pair(&k, &val), &p);
                self.tasks.push(Task::PrStep {
                    node,
                    k: k + 1u32,
                    v,
                    p,
                    bounded,
                });
                self.eval_later(&h, arg);
                Ok(())
            }
            Task::SnrAfterG { node, x } => {
                let r = self.pop();
                let (v, p) = unpair(&x).expect("snr argument is a pair");
                match unpair(&r) {
                    Ok((tag, z)) if tag.is_zero() && z < v => {
                        self.tasks.push(Task::SnrAfterInner {
                            node: node.clone(),
                            x,
                        });
                        self.eval_later(&node, pair(&z, &p));
                        Ok(())
                    }
                    Ok((tag, z)) if tag.is_one() && z <= p => self.finish(&node, x, z),
                    _ => self.finish(&node, x, Nat::zero()),
                }
            }
            Task::SnrAfterInner { node, x } => {
                let u = self.pop();
                let (v, p) = unpair(&x).expect("snr argument is a pair");
                let h = node.children()[1].clone();
                self.tasks.push(Task::SnrAfterH { node, x });
                self.eval_later(&h, pair(&pair(&v, &u), &p));
                Ok(())
            }
            Task::SnrAfterH { node, x } => {
                let w = self.pop();
                let (v, p) = unpair(&x).expect("snr argument is a pair");
                if w < v {
                    self.tasks.push(Task::Memoize {
                        node: node.node_id(),
                        x,
                    });
                    self.eval_later(&node, pair(&w, &p));
                    Ok(())
                } else {
                    self.finish(&node, x, Nat::zero())
                }
            }
            Task::Memoize { node, x } => {
                if let Some(m) = self.memo.as_mut() {
                    let v = self.values.last().expect("value to memoize").clone();
                    m.insert((node, x), v);
                }
                Ok(())
            }
        }
    }

    fn eval_node(&mut self, d: Derivation, x: Nat) -> Result<(), EvalError> {
        use OpSym::*;
        match d.op() {
            S => self.push_value(x + 1u32),
            I => self.push_value(x),
            Add | Mul | Lt => {
                if x.is_zero() {
                    return self.push_value(Nat::zero());
                }
                let (a, b) = unpair(&x).expect("nonzero");
                let v = match d.op() {
                    Add => a + b,
                    Mul => a * b,
                    _ => Nat::from(u8::from(a < b)),
                };
                self.push_value(v)
            }
            D => {
                let Ok((v, t)) = unpair(&x) else {
                    return self.push_value(Nat::zero());
                };
                let Ok((y, z)) = unpair(&t) else {
                    return self.push_value(Nat::zero());
                };
                self.push_value(if v.is_zero() { y } else { z })
            }
            OracleChar => {
                let member = self.oracle.contains(&x);
                self.push_value(Nat::from(u8::from(member)))
            }
            E => {
                let bits = x.to_u64().map_or(u64::MAX, |e| e.saturating_add(1));
                self.check_bits(bits)?;
                self.push_value(Nat::one() << (bits - 1))
            }
            Smash => {
                let l = bit_len(&x);
                let bits = l.saturating_mul(l).saturating_add(1);
                self.check_bits(bits)?;
                self.push_value(Nat::one() << (bits - 1))
            }
            P => {
                let (g, h) = (d.children()[0].clone(), d.children()[1].clone());
                self.tasks.push(Task::Pair);
                self.eval_later(&h, x.clone());
                self.eval_later(&g, x);
                Ok(())
            }
            Comp => {
                let (g, h) = (d.children()[0].clone(), d.children()[1].clone());
                self.tasks.push(Task::ApplyTo(g));
                self.eval_later(&h, x);
                Ok(())
            }
            Mu => {
                if x.is_zero() {
                    return self.push_value(Nat::zero());
                }
                let (bnd, p) = unpair(&x).expect("nonzero");
                if bnd.is_zero() {
                    return self.push_value(bnd);
                }
                let g = d.children()[0].clone();
                let arg = pair(&Nat::zero(), &p);
                self.tasks.push(Task::MuCheck {
                    g: g.clone(),
                    z: Nat::zero(),
                    bnd,
                    p,
                });
                self.eval_later(&g, arg);
                Ok(())
            }
            PR | BPR => {
                if x.is_zero() {
                    return self.push_value(Nat::zero());
                }
                if let Some(v) = self.lookup(&d, &x) {
                    return self.push_value(v);
                }
                let (v, p) = unpair(&x).expect("nonzero");
                let start = self.resume_point(&d, &v, &p);
                let bounded = d.op() == BPR;
                match start {
                    Some((k, val)) => {
                        self.values.push(val);
                        self.tasks.push(Task::PrStep {
                            node: d,
                            k,
                            v,
                            p,
                            bounded,
                        });
                    }
                    None => {
                        let g = d.children()[0].clone();
                        self.tasks.push(Task::PrStep {
                            node: d,
                            k: Nat::zero(),
                            v,
                            p: p.clone(),
                            bounded,
                        });
                        self.eval_later(&g, p);
                    }
                }
                Ok(())
            }
            SNR => {
                if x.is_zero() {
                    return self.push_value(Nat::zero());
                }
                let (v, p) = unpair(&x).expect("nonzero");
                let entry = self
                    .snr
                    .entry((d.node_id(), p.clone()))
                    .or_insert_with(|| (Nat::zero(), HashSet::new()));
                if v > entry.0 {
                    entry.0 = v.clone();
                }
                if let Some(val) = self.lookup(&d, &x) {
                    return self.push_value(val);
                }
                if let Some(e) = self.snr.get_mut(&(d.node_id(), p.clone())) {
                    e.1.insert(v.clone());
                }
                let g = d.children()[0].clone();
                self.tasks.push(Task::SnrAfterG {
                    node: d,
                    x: x.clone(),
                });
                self.eval_later(&g, x);
                Ok(())
            }
        }
    }

    fn check_bits(&mut self, bits: u64) -> Result<(), EvalError> {
        if bits > self.budget.max_bits {
            self.meter.peak_bits = self.meter.peak_bits.max(bits);
            return Err(EvalError::BitBudget {
                limit: self.budget.max_bits,
                needed: bits,
            });
        }
        Ok(())
    }

    /// Highest memoized `f(k, p)` with `k < v`. Recursion values are filled
    /// in from 0 upwards, so resuming there expands nothing twice.
    fn resume_point(&mut self, d: &Derivation, v: &Nat, p: &Nat) -> Option<(Nat, Nat)> {
        let memo = self.memo.as_ref()?;
        let k = self.pr_frontier.get(&(d.node_id(), p.clone()))?;
        let k = if k < v { k.clone() } else { v - 1u32 };
        let val = memo.get(&(d.node_id(), pair(&k, p)))?.clone();
        self.meter.memo_hits += 1;
        Some((k, val))
    }
}

fn run(
    d: &Derivation,
    x: &Nat,
    oracle: &FinSet,
    budget: Budget,
    memoize: bool,
) -> Result<EvalReport, EvalError> {
    let mut m = Machine {
        oracle,
        budget,
        memo: memoize.then(HashMap::new),
        snr: HashMap::new(),
        pr_frontier: HashMap::new(),
        meter: Meter::default(),
        tasks: Vec::new(),
        values: Vec::new(),
    };
    let value = m.run(d, x.clone())?;
    let mut snr: Vec<SnrTrace> = m
        .snr
        .into_iter()
        .map(|((_, param), (top, seen))| SnrTrace {
            param,
            top,
            expanded: seen.len(),
        })
        .collect();
    snr.sort_by(|a, b| a.top.cmp(&b.top).then(a.expanded.cmp(&b.expanded)));
    Ok(EvalReport {
        value,
        meter: m.meter,
        snr,
    })
}

pub fn eval(d: &Derivation, x: &Nat, oracle: &FinSet, budget: Budget) -> Result<(Nat, Meter), EvalError> {
    run(d, x, oracle, budget, false).map(|r| (r.value, r.meter))
}

pub fn eval_memo(d: &Derivation, x: &Nat, oracle: &FinSet, budget: Budget) -> Result<(Nat, Meter), EvalError> {
    run(d, x, oracle, budget, true).map(|r| (r.value, r.meter))
}

/// Memoizing evaluation that also reports `snr` expansion traces.
pub fn eval_report(d: &Derivation, x: &Nat, oracle: &FinSet, budget: Budget) -> Result<EvalReport, EvalError> {
    run(d, x, oracle, budget, true)
}

/// Value of `d` at `x` with no oracle and the default budget.
pub fn apply(d: &Derivation, x: &Nat) -> Result<Nat, EvalError> {
    eval_memo(d, x, &FinSet::new(), Budget::default()).map(|(v, _)| v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::d_parse;
    use crate::codec::{nat, tuple};

    const Z: &str = "(comp (mu (comp S mul)) (P I I))";

    fn run_plain(src: &str, x: u64) -> (Nat, Meter) {
        eval(&d_parse(src).unwrap(), &nat(x), &FinSet::new(), Budget::default()).unwrap()
    }

    #[test]
    fn primitive_values() {
        assert_eq!(run_plain(Z, 7).0, nat(0));
        assert_eq!(run_plain("E", 3).0, nat(8));
        let h = format!("(comp D (P {Z} I))");
        assert_eq!(run_plain(&h, 5).0, nat(1));
        let (v, m) = run_plain("(comp S S)", 5);
        assert_eq!((v, m.steps), (nat(7), 3));
        assert_eq!(run_plain("smash", 3).0, nat(16));
        // D on (0,(4,9)) and (2,(4,9)); the tail-0 default.
        let x0 = tuple(&[nat(0), nat(4), nat(9)]).unwrap();
        let x1 = tuple(&[nat(2), nat(4), nat(9)]).unwrap();
        let d = d_parse("D").unwrap();
        assert_eq!(apply(&d, &x0).unwrap(), nat(4));
        assert_eq!(apply(&d, &x1).unwrap(), nat(9));
        assert_eq!(apply(&d, &pair(&nat(3), &nat(0))).unwrap(), nat(0));
    }

    #[test]
    fn oracle_membership() {
        let o: FinSet = [2u64, 5].into_iter().collect();
        let d = d_parse("X").unwrap();
        assert_eq!(eval(&d, &nat(5), &o, Budget::default()).unwrap().0, nat(1));
        assert_eq!(eval(&d, &nat(4), &o, Budget::default()).unwrap().0, nat(0));
    }

    #[test]
    fn mu_matches_linear_search() {
        // g(z,p) = [2z + 1 < p]
        let g = d_parse("(comp lt (P (comp S (comp add (P (comp D (P (comp (mu (comp S mul)) (P I I)) I)) (comp D (P (comp (mu (comp S mul)) (P I I)) I))))) (comp D (P (comp S (comp (mu (comp S mul)) (P I I))) I))))").unwrap();
        let mu = Derivation::mu(g.clone());
        for bnd in 0..=20u64 {
            for p in 0..6u64 {
                let x = pair(&nat(bnd), &nat(p));
                let mut want = nat(bnd);
                for z in 0..bnd {
                    if apply(&g, &pair(&nat(z), &nat(p))).unwrap() == nat(1) {
                        want = nat(z);
                        break;
                    }
                }
                assert_eq!(apply(&mu, &x).unwrap(), want);
            }
        }
    }

    #[test]
    fn pr_and_bpr() {
        // f(v,p) = p + v via h((w,z),p) = S(z).
        let t = "(comp D (P (comp S (comp (mu (comp S mul)) (P I I))) I))";
        let h = format!("(comp S (comp {t} (comp D (P {Z} I))))");
        let pr = d_parse(&format!("(pr I {h})")).unwrap();
        let bpr = d_parse(&format!("(bpr I {h})")).unwrap();
        for v in 0..8u64 {
            for p in 0..8u64 {
                let x = pair(&nat(v), &nat(p));
                assert_eq!(apply(&pr, &x).unwrap(), nat(v + p));
                // Counting up from p, the clamp sends p+1 back to 0.
                let mut want = p;
                for _ in 0..v {
                    want = if want + 1 > p { 0 } else { want + 1 };
                }
                assert_eq!(apply(&bpr, &x).unwrap(), nat(want));
                let plain = eval(&bpr, &x, &FinSet::new(), Budget::default()).unwrap().0;
                assert_eq!(plain, nat(want));
            }
        }
        assert_eq!(apply(&pr, &nat(0)).unwrap(), nat(0));
    }

    /// The degenerate definition: g(v,p) = (1,0) at v = 0, else (0, v-1); h = 0.
    fn degenerate_snr() -> Derivation {
        let h_ = format!("(comp D (P {Z} I))");
        let t_ = format!("(comp D (P (comp S {Z}) I))");
        // pred v = least z < v with v < z + 2
        let pred = format!("(comp (mu (comp lt (P {t_} (comp S (comp S {h_}))))) (P I I))");
        let one0 = format!("(P (comp S {Z}) {Z})");
        let zero_pred = format!("(P {Z} (comp {pred} {h_}))");
        let g = format!("(comp D (P {h_} (P {one0} {zero_pred})))");
        d_parse(&format!("(snr {g} {Z})")).unwrap()
    }

    #[test]
    fn snr_course_of_values() {
        let d = degenerate_snr();
        for v in 0..=12u64 {
            let x = pair(&nat(v), &nat(3));
            let r = eval_report(&d, &x, &FinSet::new(), Budget::default()).unwrap();
            assert_eq!(r.value, nat(0));
            assert!(r.snr.iter().all(SnrTrace::within_bound));
            if v == 9 {
                assert!(r.snr[0].expanded <= 10);
            }
            let plain = eval(&d, &x, &FinSet::new(), Budget::default()).unwrap().0;
            assert_eq!(plain, nat(0));
        }
    }

    #[test]
    fn memo_is_transparent() {
        let (v, m) = eval_memo(&d_parse("E").unwrap(), &nat(3), &FinSet::new(), Budget::default()).unwrap();
        assert_eq!((v, m.memo_hits), (nat(8), 0));
    }

    #[test]
    fn budgets_are_errors() {
        let tight = Budget {
            max_steps: 2,
            max_bits: 64,
        };
        let d = d_parse("(comp S (comp S S))").unwrap();
        assert_eq!(eval(&d, &nat(1), &FinSet::new(), tight), Err(EvalError::StepBudget(2)));
        let e = d_parse("E").unwrap();
        assert!(matches!(
            eval(&e, &nat(100), &FinSet::new(), tight),
            Err(EvalError::BitBudget { .. })
        ));
    }

    #[test]
    fn deep_recursion_is_heap_bound() {
        let pr = d_parse("(pr I (comp S (comp D (P (comp S (comp (mu (comp S mul)) (P I I))) I))))").unwrap();
        let x = pair(&nat(20_000), &nat(0));
        assert!(eval(&pr, &x, &FinSet::new(), Budget::default()).is_ok());
    }
}
