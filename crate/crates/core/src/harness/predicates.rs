//! A small library of predicates with direct reference implementations.

use crate::algebra::{AlgebraClass, Derivation};
use crate::clausal::Term;
use crate::codec::{nat, Nat};
use crate::compile::prims::{after, bin, head, konst, pred, tail, zero};
use crate::compile::{compile_formula, Formula, Funcs, VarCtx};

use super::{CharInput, CharMode};

pub struct Predicate {
    pub name: &'static str,
    pub class: AlgebraClass,
    pub mode: CharMode,
    pub derivation: Derivation,
    /// What the derivation should decide.
    pub reference: fn(&CharInput) -> bool,
}

impl Predicate {
    pub fn decide(&self, input: &CharInput) -> bool {
        (self.reference)(input)
    }
}

fn number(input: &CharInput) -> Nat {
    input.arg_and_oracle().0
}

fn x() -> Term {
    Term::var("x")
}

fn add(a: Term, b: Term) -> Term {
    Term::Add(Box::new(a), Box::new(b))
}

fn formula(phi: &Formula, funcs: &Funcs) -> Derivation {
    let ctx = VarCtx::new(&["x"]).expect("one variable");
    compile_formula(phi, &ctx, funcs).expect("library formulas compile")
}

/// `∃y < S(x). y + y = x`
pub fn parity() -> Predicate {
    let y = Term::var("y");
    let phi = Formula::exists_below("y", Term::succ(x()), Formula::eq(add(y.clone(), y), x()));
    Predicate {
        name: "parity",
        class: AlgebraClass::DA,
        mode: CharMode::Zero,
        derivation: formula(&phi, &Funcs::new()),
        reference: |i| !number(i).bit(0),
    }
}

/// `‖X‖ - 1 ∈ X`, i.e. `X` is not empty.
pub fn top_member() -> Predicate {
    Predicate {
        name: "top-member",
        class: AlgebraClass::DA,
        mode: CharMode::One,
        derivation: Derivation::comp(Derivation::oracle(), pred()),
        reference: |i| match i {
            CharInput::Set(s) => !s.is_empty(),
            CharInput::Number(_) => false,
        },
    }
}

/// `∃y < x. y ∈ X ∧ S(y) ∈ X`: a scan of the oracle for two neighbours.
pub fn neighbours() -> Predicate {
    let y = Term::var("y");
    let body = Formula::OracleMem(y.clone()).and(Formula::OracleMem(Term::succ(y)));
    Predicate {
        name: "neighbours",
        class: AlgebraClass::DA,
        mode: CharMode::One,
        derivation: formula(&Formula::exists_below("y", x(), body), &Funcs::new()),
        reference: |i| match i {
            CharInput::Set(s) => s.elements().windows(2).any(|w| &w[0] + 1u32 == w[1]),
            CharInput::Number(_) => false,
        },
    }
}

/// `dbl(k, p) = 2^k`, clamped to 0 once it passes `p`.
pub fn clamped_doubling() -> Derivation {
    let w = after(tail(), Some(head()));
    Derivation::bpr(konst(1), bin(Derivation::add(), w.clone(), w))
}

/// `∃k < x. dbl(k, x) = x`: `x` is a power of two.
pub fn power_of_two() -> Predicate {
    let funcs = Funcs::from([("dbl".to_string(), clamped_doubling())]);
    let (k, w) = (Term::var("k"), Term::var("w"));
    let inner = Formula::exists_eq("w", "dbl", Term::pair(k, x()), Formula::eq(w, x()));
    Predicate {
        name: "power-of-two",
        class: AlgebraClass::SA,
        mode: CharMode::Zero,
        derivation: formula(&Formula::exists_below("k", x(), inner), &funcs),
        reference: |i| {
            let n = number(i);
            n.count_ones() == 1
        },
    }
}

/// Parity by nested recursion: `f(0) = 1` and `f(v) = f(f(v - 1))` read
/// through the guards, which send `f(1)` to the default 0.
pub fn nested_parity() -> Derivation {
    let v = head();
    let one_one = Derivation::pair(konst(1), konst(1));
    let request = Derivation::pair(zero(), Derivation::comp(pred(), v.clone()));
    let g = bin(Derivation::case(), v, Derivation::pair(one_one, request));
    let h = after(tail(), Some(head()));
    Derivation::comp(Derivation::snr(g, h), Derivation::pair(Derivation::id(), Derivation::succ()))
}

pub fn snr_parity() -> Predicate {
    Predicate {
        name: "snr-parity",
        class: AlgebraClass::TA,
        mode: CharMode::Zero,
        derivation: nested_parity(),
        reference: |i| !number(i).bit(0),
    }
}

/// `∃w = 2^x. ∃y < w. S(y) = w`: always true, and the scan costs `2^x`.
pub fn exp_scan() -> Predicate {
    let funcs = Funcs::from([("exp".to_string(), Derivation::exp())]);
    let (y, w) = (Term::var("y"), Term::var("w"));
    let scan = Formula::exists_below("y", w.clone(), Formula::eq(Term::succ(y), w));
    Predicate {
        name: "exp-scan",
        class: AlgebraClass::DEA,
        mode: CharMode::Zero,
        derivation: formula(&Formula::exists_eq("w", "exp", x(), scan), &funcs),
        reference: |_| true,
    }
}

pub fn constant() -> Predicate {
    Predicate {
        name: "constant",
        class: AlgebraClass::DA,
        mode: CharMode::Zero,
        derivation: konst(1),
        reference: |_| true,
    }
}

pub fn library() -> Vec<Predicate> {
    vec![
        parity(),
        top_member(),
        neighbours(),
        power_of_two(),
        snr_parity(),
        exp_scan(),
        constant(),
    ]
}

pub fn by_name(name: &str) -> Option<Predicate> {
    library().into_iter().find(|p| p.name == name)
}

/// Zero-mode inputs `0..=upto`.
pub fn numbers(upto: u64) -> impl Iterator<Item = CharInput> {
    (0..=upto).map(|n| CharInput::Number(nat(n)))
}
