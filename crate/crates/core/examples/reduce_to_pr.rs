//! Reducing a recursive definition to a single primitive recursion.

use funalg::algebra::{validate, AlgebraClass};
use funalg::clausal::{run_clausal, Env};
use funalg::codec::nat;
use funalg::compile::{reduce_recursive_to_pr, Funcs};
use funalg::corpus;
use funalg::eval::{eval_memo, Budget};
use funalg::codec::FinSet;

pub fn run_example() {
    let env = Env::parse(corpus::NESTED).unwrap();
    let a = reduce_recursive_to_pr(&env, "f", &Funcs::new()).unwrap();
    print!("{}", a.h_def);
    print!("{}", a.f1_def);
    println!("J = {}, iterations = {}", a.j, a.mu_desc);
    println!("result: {} nodes, in PRA: {}", a.result.size(), validate(&a.result, AlgebraClass::PRA));
    for x in 0..=5u64 {
        let (v, m) = eval_memo(&a.result, &nat(x), &FinSet::new(), Budget::default()).unwrap();
        assert_eq!(v, run_clausal(&env, "f", &nat(x)).unwrap());
        println!("f({x}) = {v} in {} steps", m.steps);
    }
}

#[allow(dead_code)]
fn main() {
    run_example();
}
