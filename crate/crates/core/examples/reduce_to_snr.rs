//! Reducing a polynomially bounded nested recursion to special nested
//! recursion, and watching memoized evaluation keep expansions linear.

use funalg::algebra::{validate, AlgebraClass, PolyBound};
use funalg::clausal::{run_clausal, Env};
use funalg::codec::{list_encode, nat, FinSet};
use funalg::compile::{reduce_bounded_nested_to_snr, Funcs, SnrOptions};
use funalg::corpus;
use funalg::eval::{eval_report, Budget};

pub fn run_example() {
    let env = Env::parse(corpus::LISTS).unwrap();
    let r = reduce_bounded_nested_to_snr(&env, "L", &PolyBound::N, &Funcs::new(), SnrOptions::default()).unwrap();
    println!("J = {}, bound = {}, in TA: {}", r.j, r.bound, validate(&r.result, AlgebraClass::TA));
    let inputs = [nat(0), nat(7), list_encode(&[nat(1), nat(0)]), nat(30)];
    for x in inputs {
        let rep = eval_report(&r.result, &x, &FinSet::new(), Budget::default()).unwrap();
        assert_eq!(rep.value, run_clausal(&env, "L", &x).unwrap());
        let most = rep.snr.iter().map(|t| t.expanded).max().unwrap_or(0);
        println!("L({x}) = {}: {} steps, at most {most} expansions per call", rep.value, rep.meter.steps);
        assert!(rep.snr.iter().all(|t| t.within_bound()));
    }
}

#[allow(dead_code)]
fn main() {
    run_example();
}
