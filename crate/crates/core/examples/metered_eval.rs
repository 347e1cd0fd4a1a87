//! Evaluation with step and size accounting, with and without memoization.

use funalg::algebra::{d_parse, d_print, Derivation};
use funalg::compile::prims::{after, head, tail};
use funalg::codec::{nat, pair, FinSet};
use funalg::eval::{eval, eval_memo, Budget};

pub fn run_example() {
    // Addition by recursion on the first component: f(k+1, p) = S(f(k, p)).
    let plus = Derivation::pr(Derivation::id(), Derivation::comp(Derivation::succ(), after(tail(), Some(head()))));
    let x = pair(&nat(20), &nat(7));
    let empty = FinSet::new();
    println!("{}", d_print(&plus));
    println!("value\tsteps\tpeak_bits\tmemo_hits\tmax_depth");
    let (v, m) = eval(&plus, &x, &empty, Budget::default()).unwrap();
    println!("{}", m.report_line(&v));
    let (v, m) = eval_memo(&plus, &x, &empty, Budget::default()).unwrap();
    println!("{}", m.report_line(&v));
    assert_eq!(v, nat(27));

    let tight = Budget { max_steps: 50, ..Budget::default() };
    match eval(&plus, &x, &empty, tight) {
        Ok(_) => println!("finished within 50 steps"),
        Err(e) => println!("with 50 steps: {e}"),
    }

    let oracle: FinSet = [3u64, 4].into_iter().map(nat).collect();
    let (v, _) = eval(&d_parse("X").unwrap(), &nat(4), &oracle, Budget::default()).unwrap();
    println!("X at 4 with X = {{3, 4}}: {v}");
}

#[allow(dead_code)]
fn main() {
    run_example();
}
