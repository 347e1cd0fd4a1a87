//! Walking the derivations of a class in their standard order.

use funalg::algebra::{d_parse, d_print, enumerate, AlgebraClass, Enumerator};

pub fn run_example() {
    for (i, d) in enumerate(AlgebraClass::DA, 12).iter().enumerate() {
        println!("{i:>3}  {}", d_print(d));
    }

    let mut e = Enumerator::new(AlgebraClass::TA);
    for n in 1..=5 {
        println!("TA derivations with {n} nodes: {}", e.count(n));
    }

    let d = d_parse("(snr (P S I) (comp lt (P I I)))").unwrap();
    let i = e.index_of(&d).unwrap();
    println!("{} sits at index {i}", d_print(&d));
    assert_eq!(e.derivation_at(&i).unwrap(), d);
}

#[allow(dead_code)]
fn main() {
    run_example();
}
