//! Every example runs to completion.

#[allow(dead_code)]
#[path = "../examples/pairing_codes.rs"]
mod pairing_codes;

#[allow(dead_code)]
#[path = "../examples/enumerate_derivations.rs"]
mod enumerate_derivations;

#[allow(dead_code)]
#[path = "../examples/metered_eval.rs"]
mod metered_eval;

#[allow(dead_code)]
#[path = "../examples/clausal_check.rs"]
mod clausal_check;

#[allow(dead_code)]
#[path = "../examples/compile_formulas.rs"]
mod compile_formulas;

#[allow(dead_code)]
#[path = "../examples/reduce_to_pr.rs"]
mod reduce_to_pr;

#[allow(dead_code)]
#[path = "../examples/reduce_to_snr.rs"]
mod reduce_to_snr;

#[allow(dead_code)]
#[path = "../examples/characterize.rs"]
mod characterize;

#[test]
fn pairing_codes() {
    pairing_codes::run_example();
}

#[test]
fn enumerate_derivations() {
    enumerate_derivations::run_example();
}

#[test]
fn metered_eval() {
    metered_eval::run_example();
}

#[test]
fn clausal_check() {
    clausal_check::run_example();
}

#[test]
fn compile_formulas() {
    compile_formulas::run_example();
}

#[test]
fn reduce_to_pr() {
    reduce_to_pr::run_example();
}

#[test]
fn reduce_to_snr() {
    reduce_to_snr::run_example();
}

#[test]
fn characterize() {
    characterize::run_example();
}
