//! Predicates under both input conventions, and how their cost grows.

use funalg::codec::{nat, FinSet};
use funalg::eval::Budget;
use funalg::harness::predicates::library;
use funalg::harness::{char_run, scaling_study, CharInput, CharMode};

pub fn run_example() {
    let set: FinSet = [2u64, 3, 7].into_iter().map(nat).collect();
    for p in library() {
        let input = match p.mode {
            CharMode::Zero => CharInput::Number(nat(12)),
            CharMode::One => CharInput::Set(set.clone()),
        };
        let (yes, m) = char_run(&p.derivation, p.mode, &input, Budget::default()).unwrap();
        assert_eq!(yes, p.decide(&input));
        println!("{:<13} {:<4} {:?} mode: {yes} ({} steps)", p.name, p.class, p.mode, m.steps);
    }

    for p in library() {
        let sizes: &[u64] = if p.name == "exp-scan" { &[4, 8, 12] } else { &[8, 16, 32, 64] };
        let report = scaling_study(&p.derivation, p.mode, sizes, 3, 1, Budget::default()).unwrap();
        let exp = report.fitted_exponent.map_or("none".to_string(), |e| format!("{e:.2}"));
        println!("{:<13} exponent {exp}, superpolynomial: {}", p.name, report.superpolynomial());
        if p.name == "neighbours" {
            print!("{report}");
        }
    }
}

#[allow(dead_code)]
fn main() {
    run_example();
}
