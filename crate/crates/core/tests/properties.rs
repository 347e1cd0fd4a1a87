//! Invariants checked on generated inputs.

use std::collections::HashMap;

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use funalg::algebra::{d_parse, d_print, poly_bound, AlgebraClass, Derivation, Enumerator};
use funalg::clausal::Term;
use funalg::codec::{
    ack_decode, ack_encode, head, list_decode, list_encode, nat, pair, seq_decode, seq_encode, tail, unpair, FinSet,
    Nat,
};
use funalg::compile::{compile_term, eval_term, Funcs, VarCtx};
use funalg::eval::{eval, eval_memo, Budget};
use funalg::harness::{scaling_study, CharMode};
use funalg::selftest::random_derivation;

fn big(hi: u64, lo: u64) -> Nat {
    (BigUint::from(hi) << 64u32) + lo
}

fn class() -> impl Strategy<Value = AlgebraClass> {
    prop::sample::select(AlgebraClass::ALL.to_vec())
}

fn derivation(depth: usize) -> impl Strategy<Value = (AlgebraClass, Derivation)> {
    (class(), any::<u64>()).prop_map(move |(c, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (c, random_derivation(c, depth, &mut rng))
    })
}

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::Zero),
        Just(Term::var("x")),
        Just(Term::var("y")),
        (0u64..5).prop_map(Term::numeral),
    ];
    leaf.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Term::succ),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::pair(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Term::Mul(Box::new(a), Box::new(b))),
        ]
    })
}

fn small_budget() -> Budget {
    Budget {
        max_steps: 20_000,
        max_bits: 4_096,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pairs_invert(x in any::<u64>(), y in any::<u64>(), hi in any::<u64>()) {
        for (a, b) in [(nat(x), nat(y)), (big(hi, x), nat(y)), (nat(x), big(hi, y))] {
            let z = pair(&a, &b);
            prop_assert_eq!(unpair(&z).unwrap(), (a, b));
        }
    }

    #[test]
    fn codes_decompose(z in 1u64.., hi in any::<u64>()) {
        for z in [nat(z), big(hi, z)] {
            let (x, y) = unpair(&z).unwrap();
            prop_assert_eq!(pair(&x, &y), z.clone());
            prop_assert!(head(&z) < z && tail(&z) < z);
        }
    }

    #[test]
    fn sequences_lists_and_sets(bits in prop::collection::vec(any::<bool>(), 0..80),
                                items in prop::collection::vec(0u64..1000, 0..6),
                                elems in prop::collection::btree_set(0u64..200, 0..20)) {
        prop_assert_eq!(seq_decode(&seq_encode(&bits)).unwrap(), bits);
        let xs: Vec<Nat> = items.iter().map(|&v| nat(v)).collect();
        prop_assert_eq!(list_decode(&list_encode(&xs)), xs);
        let s: FinSet = elems.iter().map(|&v| nat(v)).collect();
        prop_assert_eq!(ack_decode(&ack_encode(&s).unwrap()), s.clone());
        let want = elems.iter().next_back().map_or(0, |m| m + 1);
        prop_assert_eq!(s.size(), nat(want));
    }

    #[test]
    fn printing_and_indexing_round_trip((c, d) in derivation(5)) {
        prop_assert_eq!(d_parse(&d_print(&d)).unwrap(), d.clone());
        let mut e = Enumerator::new(c);
        let i = e.index_of(&d).unwrap();
        prop_assert_eq!(e.derivation_at(&i).unwrap(), d.clone());
        for child in d.children() {
            prop_assert!(e.index_of(child).unwrap() < i);
        }
    }

    #[test]
    fn memoization_keeps_values((_, d) in derivation(4), x in 0u64..300) {
        let oracle: FinSet = [1u64, 3, 8].into_iter().map(nat).collect();
        let plain = eval(&d, &nat(x), &oracle, small_budget());
        let memo = eval_memo(&d, &nat(x), &oracle, small_budget());
        if let (Ok((a, _)), Ok((b, _))) = (plain, memo) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn values_stay_under_the_bound((_, d) in derivation(4), x in 0u64..5000) {
        if let Ok(b) = poly_bound(&d) {
            if let Ok((v, _)) = eval_memo(&d, &nat(x), &FinSet::new(), small_budget()) {
                prop_assert!(v <= b.eval(&nat(x)), "{} at {}", d_print(&d), x);
            }
        }
    }

    #[test]
    fn mu_is_least_search((_, g) in derivation(3), bnd in 0u64..40, p in 0u64..40) {
        let b = small_budget();
        let mut want = Some(nat(bnd));
        for z in 0..bnd {
            match eval(&g, &pair(&nat(z), &nat(p)), &FinSet::new(), b) {
                Ok((v, _)) if v == nat(1) => { want = Some(nat(z)); break; }
                Ok(_) => {}
                Err(_) => { want = None; break; }
            }
        }
        if let Some(want) = want {
            let big_budget = Budget { max_steps: 2_000_000, ..b };
            let got = eval(&Derivation::mu(g), &pair(&nat(bnd), &nat(p)), &FinSet::new(), big_budget).unwrap().0;
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn compiled_terms_agree(t in term(), x in 0u64..20, y in 0u64..20) {
        let ctx = VarCtx::new(&["x", "y"]).unwrap();
        let d = compile_term(&t, &ctx, &Funcs::new()).unwrap();
        let vals = HashMap::from([("x".to_string(), nat(x)), ("y".to_string(), nat(y))]);
        let mut no_apps = |_: &str, _: &Nat| -> Nat { unreachable!() };
        let want = eval_term(&t, &vals, &mut no_apps);
        let got = eval(&d, &ctx.pack(&[nat(x), nat(y)]), &FinSet::new(), Budget::default()).unwrap().0;
        prop_assert_eq!(got, want);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn studies_repeat((_, d) in derivation(3), seed in any::<u64>()) {
        let run = || scaling_study(&d, CharMode::One, &[4, 8, 16], 2, seed, small_budget()).unwrap();
        prop_assert_eq!(run(), run());
    }
}
