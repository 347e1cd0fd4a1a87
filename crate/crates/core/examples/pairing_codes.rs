//! Pairs, tuples, lists, bit sequences and finite sets as numbers.

use funalg::codec::{
    ack_decode, ack_encode, list_decode, list_encode, nat, pair, seq_decode, seq_encode, tuple, unpair, FinSet,
};

pub fn run_example() {
    let z = pair(&nat(3), &nat(4));
    let (x, y) = unpair(&z).unwrap();
    println!("pair(3, 4) = {z}, unpacks to ({x}, {y})");
    assert_eq!((x, y), (nat(3), nat(4)));

    let t = tuple(&[nat(1), nat(2), nat(3)]).unwrap();
    println!("(1, 2, 3) = {t}");

    let l = list_encode(&[nat(5), nat(0), nat(2)]);
    println!("list [5, 0, 2] = {l}, decodes to {:?}", list_decode(&l));

    let bits = [true, false, true, true];
    let s = seq_encode(&bits);
    println!("sequence 1011 = {s}");
    assert_eq!(seq_decode(&s).unwrap(), bits);

    let set: FinSet = [0u64, 2, 5].into_iter().map(nat).collect();
    let code = ack_encode(&set).unwrap();
    println!("set {{0, 2, 5}} = {code}, size {}", set.size());
    assert_eq!(ack_decode(&code), set);
}

#[allow(dead_code)]
fn main() {
    run_example();
}
