//! Compiling terms and bounded formulas to derivations.

use std::collections::HashMap;

use funalg::algebra::{classify, Derivation};
use funalg::clausal::{parse_term, Term};
use funalg::codec::{nat, FinSet, Nat};
use funalg::compile::{compile_formula, compile_term, Formula, Funcs, VarCtx};
use funalg::eval::{eval, Budget};

pub fn run_example() {
    let ctx = VarCtx::new(&["x", "y"]).unwrap();
    let t = parse_term("x * y + (x, 3)", &[]).unwrap();
    let d = compile_term(&t, &ctx, &Funcs::new()).unwrap();
    let arg = ctx.pack(&[nat(4), nat(5)]);
    let (v, _) = eval(&d, &arg, &FinSet::new(), Budget::default()).unwrap();
    println!("{t} at (4, 5) = {v}, derivation of {} nodes", d.size());

    // x is a sum of two members of X.
    let (x, a, b) = (Term::var("x"), Term::var("a"), Term::var("b"));
    let phi = Formula::exists_below(
        "a",
        Term::succ(x.clone()),
        Formula::exists_below(
            "b",
            Term::succ(x.clone()),
            Formula::OracleMem(a.clone())
                .and(Formula::OracleMem(b.clone()))
                .and(Formula::eq(Term::Add(Box::new(a), Box::new(b)), x)),
        ),
    );
    let one = VarCtx::new(&["x"]).unwrap();
    let d = compile_formula(&phi, &one, &Funcs::new()).unwrap();
    println!("{phi}\nclasses: {:?}", classify(&d));
    let oracle: FinSet = [1u64, 4, 6].into_iter().map(nat).collect();
    let mut none = |_: &str, _: &Nat| -> Nat { unreachable!("no functions") };
    let mut hits = Vec::new();
    for n in 0..=14u64 {
        let (v, _) = eval(&d, &nat(n), &oracle, Budget::default()).unwrap();
        let vals = HashMap::from([("x".to_string(), nat(n))]);
        assert_eq!(v == nat(1), phi.holds(&vals, &oracle, &mut none));
        if v == nat(1) {
            hits.push(n);
        }
    }
    println!("sums of two elements of {{1, 4, 6}} up to 14: {hits:?}");

    let funcs = Funcs::from([("E".to_string(), Derivation::exp())]);
    let w = Term::var("w");
    let psi = Formula::exists_eq("w", "E", Term::var("x"), Formula::lt(Term::numeral(100), w));
    let d = compile_formula(&psi, &one, &funcs).unwrap();
    let mut pow = |_: &str, a: &Nat| Nat::from(1u32) << usize::try_from(a).unwrap();
    for n in [5u64, 7] {
        let vals = HashMap::from([("x".to_string(), nat(n))]);
        let (v, _) = eval(&d, &nat(n), &FinSet::new(), Budget::default()).unwrap();
        println!("{psi} at {n}: {v} (direct: {})", psi.holds(&vals, &FinSet::new(), &mut pow));
    }
}

#[allow(dead_code)]
fn main() {
    run_example();
}
