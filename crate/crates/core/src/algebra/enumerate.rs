//! Standard enumeration of a class: by node count, then operator order, then
//! lexicographically by the indices of the sub-derivations.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use super::{validate, AlgebraClass, Derivation, OpSym};

/// Derivations larger than this many nodes are outside the enumeration horizon.
pub const SIZE_HORIZON: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("derivation uses an operator outside {0}")]
    NotInClass(AlgebraClass),
    #[error("derivation has {0} nodes, beyond the enumeration horizon of {SIZE_HORIZON}")]
    TooLarge(u64),
    #[error("index lies beyond the enumeration horizon")]
    IndexTooLarge,
}

/// Counting tables for one class, grown on demand.
pub struct Enumerator {
    class: AlgebraClass,
    leaves: Vec<OpSym>,
    /// Non-leaf operators in enumeration order.
    inner: Vec<OpSym>,
    /// `counts[n]` = number of derivations with exactly `n` nodes.
    counts: Vec<BigUint>,
    /// `binary[n]` = number of ordered child pairs with total size `n - 1`.
    binary: Vec<BigUint>,
}

impl Enumerator {
    pub fn new(class: AlgebraClass) -> Self {
        let ops = class.allowed();
        let leaves: Vec<OpSym> = ops.iter().copied().filter(|o| o.arity() == 0).collect();
        let inner = ops.iter().copied().filter(|o| o.arity() > 0).collect();
        let counts = vec![BigUint::zero(), BigUint::from(leaves.len())];
        Enumerator {
            class,
            leaves,
            inner,
            counts,
            binary: vec![BigUint::zero(), BigUint::zero()],
        }
    }

    pub fn class(&self) -> AlgebraClass {
        self.class
    }

    fn grow(&mut self, n: usize) {
        while self.counts.len() <= n {
            let m = self.counts.len();
            let mut b = BigUint::zero();
            for a in 1..m.saturating_sub(1) {
                b += &self.counts[a] * &self.counts[m - 1 - a];
            }
            let mut total = BigUint::zero();
            for op in &self.inner {
                if op.arity() == 1 {
                    total += &self.counts[m - 1];
                } else {
                    total += &b;
                }
            }
            self.binary.push(b);
            self.counts.push(total);
        }
    }

    /// Number of derivations with exactly `n` nodes.
    pub fn count(&mut self, n: usize) -> BigUint {
        self.grow(n);
        self.counts[n].clone()
    }

    fn block(&self, op: OpSym, n: usize) -> &BigUint {
        if op.arity() == 1 {
            &self.counts[n - 1]
        } else {
            &self.binary[n]
        }
    }

    /// Position of `d` among the derivations of the same size.
    fn rank(&mut self, d: &Derivation) -> BigUint {
        let n = d.size() as usize;
        self.grow(n);
        if n == 1 {
            let i = self.leaves.iter().position(|&o| o == d.op()).expect("validated");
            return BigUint::from(i);
        }
        let mut r = BigUint::zero();
        for &op in &self.inner {
            if op == d.op() {
                break;
            }
            r += self.block(op, n);
        }
        match d.children() {
            [c] => r + self.rank(c),
            [c1, c2] => {
                let a = c1.size() as usize;
                let b = n - 1 - a;
                for a2 in 1..a {
                    r += &self.counts[a2] * &self.counts[n - 1 - a2];
                }
                let r1 = self.rank(c1);
                let r2 = self.rank(c2);
                r + r1 * &self.counts[b] + r2
            }
            _ => unreachable!("leaves handled above"),
        }
    }

    pub fn index_of(&mut self, d: &Derivation) -> Result<BigUint, EnumError> {
        if !validate(d, self.class) {
            return Err(EnumError::NotInClass(self.class));
        }
        if d.size() > SIZE_HORIZON {
            return Err(EnumError::TooLarge(d.size()));
        }
        let n = d.size() as usize;
        self.grow(n);
        let offset: BigUint = self.counts[1..n].iter().sum();
        Ok(offset + self.rank(d))
    }

    fn unrank(&mut self, n: usize, mut r: BigUint) -> Derivation {
        if n == 1 {
            let i = r.to_usize().expect("rank below leaf count");
            return Derivation::leaf(self.leaves[i]);
        }
        let mut chosen = None;
        for &op in &self.inner {
            let blk = self.block(op, n).clone();
            if r < blk {
                chosen = Some(op);
                break;
            }
            r -= blk;
        }
        let op = chosen.expect("rank below count");
        if op.arity() == 1 {
            let c = self.unrank(n - 1, r);
            return Derivation::new(op, vec![c]).expect("unary");
        }
        let mut a = 1;
        loop {
            let blk = &self.counts[a] * &self.counts[n - 1 - a];
            if r < blk {
                break;
            }
            r -= blk;
            a += 1;
        }
        let nb = self.counts[n - 1 - a].clone();
        let c1 = self.unrank(a, &r / &nb);
        let c2 = self.unrank(n - 1 - a, &r % &nb);
        Derivation::new(op, vec![c1, c2]).expect("binary")
    }

    pub fn derivation_at(&mut self, index: &BigUint) -> Result<Derivation, EnumError> {
        let mut r = index.clone();
        for n in 1..=SIZE_HORIZON as usize {
            let c = self.count(n);
            if r < c {
                return Ok(self.unrank(n, r));
            }
            r -= c;
        }
        Err(EnumError::IndexTooLarge)
    }
}

pub fn index_of(d: &Derivation, class: AlgebraClass) -> Result<BigUint, EnumError> {
    Enumerator::new(class).index_of(d)
}

pub fn derivation_at(index: &BigUint, class: AlgebraClass) -> Result<Derivation, EnumError> {
    Enumerator::new(class).derivation_at(index)
}

/// The first `count` derivations of `class` in enumeration order.
pub fn enumerate(class: AlgebraClass, count: usize) -> Vec<Derivation> {
    let mut e = Enumerator::new(class);
    let mut out = Vec::with_capacity(count);
    let mut i = BigUint::zero();
    while out.len() < count {
        match e.derivation_at(&i) {
            Ok(d) => out.push(d),
            Err(_) => break,
        }
        i += BigUint::one();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::d_print;
    use std::collections::HashSet;

    /// Brute-force generation of every derivation with exactly `n` nodes.
    fn brute(class: AlgebraClass, n: usize) -> Vec<Derivation> {
        let ops = class.allowed();
        if n == 1 {
            return ops.into_iter().filter(|o| o.arity() == 0).map(Derivation::leaf).collect();
        }
        let mut out = Vec::new();
        for op in ops {
            match op.arity() {
                1 => {
                    for c in brute(class, n - 1) {
                        out.push(Derivation::new(op, vec![c]).unwrap());
                    }
                }
                2 => {
                    for a in 1..n - 1 {
                        for c1 in brute(class, a) {
                            for c2 in brute(class, n - 1 - a) {
                                out.push(Derivation::new(op, vec![c1.clone(), c2]).unwrap());
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        out
    }

    #[test]
    fn counts_match_brute_force() {
        for class in [AlgebraClass::DA, AlgebraClass::TA, AlgebraClass::SSA] {
            let mut e = Enumerator::new(class);
            for n in 1..=5 {
                assert_eq!(e.count(n), BigUint::from(brute(class, n).len()), "{class} n={n}");
            }
        }
    }

    #[test]
    fn first_entries_of_da() {
        let first: Vec<String> = enumerate(AlgebraClass::DA, 8).iter().map(d_print).collect();
        assert_eq!(first, ["X", "S", "add", "mul", "lt", "I", "D", "(mu X)"]);
    }

    #[test]
    fn bijective_on_prefix() {
        let ds = enumerate(AlgebraClass::SA, 3000);
        let texts: HashSet<String> = ds.iter().map(d_print).collect();
        assert_eq!(texts.len(), ds.len());
        let mut e = Enumerator::new(AlgebraClass::SA);
        for (i, d) in ds.iter().enumerate() {
            assert_eq!(e.index_of(d).unwrap(), BigUint::from(i));
        }
        for w in ds.windows(2) {
            assert!(w[0].size() <= w[1].size());
        }
    }

    #[test]
    fn rejects_foreign_operators() {
        let d = Derivation::pr(Derivation::id(), Derivation::id());
        assert_eq!(index_of(&d, AlgebraClass::DA), Err(EnumError::NotInClass(AlgebraClass::DA)));
        assert!(index_of(&d, AlgebraClass::PRA).is_ok());
    }
}
