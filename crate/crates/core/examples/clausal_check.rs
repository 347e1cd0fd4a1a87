//! Parsing clausal definitions, checking them and running them directly.

use funalg::clausal::{check_recursive_restrictions, eval_clausal, Env};
use funalg::codec::{list_encode, nat, FinSet};
use funalg::corpus;
use funalg::eval::Budget;

pub fn run_example() {
    let env = Env::parse(corpus::LISTS).unwrap();
    let l = env.get("L").unwrap();
    println!("{}", l.strict);
    for step in &l.trace {
        println!("{step}");
    }
    print!("{}", check_recursive_restrictions(l).unwrap());

    let list = list_encode(&[nat(4), nat(1), nat(9)]);
    let (len, m) = eval_clausal(&env, "L", &list, &FinSet::new(), Budget::default()).unwrap();
    println!("L([4, 1, 9]) = {len} after {} steps", m.steps);
    assert_eq!(len, nat(3));

    let relaxed = Env::parse("def f { f(0) = 1; }").unwrap();
    let f = relaxed.get("f").unwrap();
    println!("completed: {}\n{}", f.completed, f.strict);
    if let Err(e) = Env::parse("def f { x = 0 -> f(x) = 1; x = (a, b) & a < b -> f(x) = b; }") {
        println!("rejected: {e}");
    }

    // The argument does not decrease, which only shows while evaluating.
    let looping = Env::parse("def g { g(0) = 0; g(S(u)) = g(S(u)); }").unwrap();
    print!("{}", check_recursive_restrictions(looping.get("g").unwrap()).unwrap());
    let e = eval_clausal(&looping, "g", &nat(3), &FinSet::new(), Budget::default()).unwrap_err();
    println!("g(3): {e}");
}

#[allow(dead_code)]
fn main() {
    run_example();
}
