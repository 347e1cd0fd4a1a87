//! Number codes built on the modified Cantor pairing.
//!
//! `pair(x, y)` is the unique `z` with `2z = (x+y)(x+y+1) + 2x + 2`. It is a
//! bijection from ℕ² onto ℕ∖{0}, so `0` is never a pair and every number is a
//! right-nested list `(x1, (x2, ... (xn, 0)))`.
//!
//! On top of that this module provides 0–1 sequence codes (the number with
//! binary digits `1x0…x(n-1)`), Ackermann set codes and base-`b` digit pairs.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// Natural numbers of unbounded size.
pub type Nat = BigUint;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("0 is not a pair")]
    NotAPair,
    #[error("tuple needs at least one component")]
    EmptyTuple,
    #[error("base must be positive")]
    ZeroBase,
    #[error("bit index {0} is too large")]
    BitIndex(Nat),
}

pub fn nat(n: u64) -> Nat {
    Nat::from(n)
}

/// Number of binary digits of `x`; `bit_len(0) = 0`.
pub fn bit_len(x: &Nat) -> u64 {
    x.bits()
}

fn triangle(s: &Nat) -> Nat {
    (s * (s + 1u32)) >> 1
}

pub fn pair(x: &Nat, y: &Nat) -> Nat {
    if let (Some(a), Some(b)) = (x.to_u64(), y.to_u64()) {
        if a < 1 << 30 && b < 1 << 30 {
            let s = a + b;
            return Nat::from(s * (s + 1) / 2 + a + 1);
        }
    }
    let s = x + y;
    triangle(&s) + x + 1u32
}

/// Inverse of [`pair`] via the integer square root of the diagonal.
pub fn unpair(z: &Nat) -> Result<(Nat, Nat), CodecError> {
    if z.is_zero() {
        return Err(CodecError::NotAPair);
    }
    if let Some(small) = z.to_u64().filter(|&v| v < 1 << 52) {
        let z1 = small - 1;
        let mut s = (((8 * z1 + 1) as f64).sqrt() as u64).saturating_sub(1) / 2;
        // Correct the float estimate to the largest s with s(s+1)/2 <= z1.
        while s * (s + 1) / 2 > z1 {
            s -= 1;
        }
        while (s + 1) * (s + 2) / 2 <= z1 {
            s += 1;
        }
        let x = z1 - s * (s + 1) / 2;
        return Ok((Nat::from(x), Nat::from(s - x)));
    }
    let z1 = z - 1u32;
    let disc: Nat = (&z1 << 3u32) + 1u32;
    let root = disc.sqrt();
    let s = (root - 1u32) >> 1;
    let x = &z1 - triangle(&s);
    let y = &s - &x;
    Ok((x, y))
}

/// `H`: first projection, totalized by `H(0) = 0`.
pub fn head(z: &Nat) -> Nat {
    unpair(z).map(|(x, _)| x).unwrap_or_default()
}

/// `T`: second projection, totalized by `T(0) = 0`.
pub fn tail(z: &Nat) -> Nat {
    unpair(z).map(|(_, y)| y).unwrap_or_default()
}

/// Right-associated tuple `(x1, (x2, ... xn))`; a single component is itself.
pub fn tuple(xs: &[Nat]) -> Result<Nat, CodecError> {
    let (last, init) = xs.split_last().ok_or(CodecError::EmptyTuple)?;
    Ok(init.iter().rev().fold(last.clone(), |acc, x| pair(x, &acc)))
}

/// Splits `z` into `n` right-associated components (the inverse of [`tuple`]).
/// Components past a `0` are `0`, matching the totalized projections.
pub fn untuple(z: &Nat, n: usize) -> Result<Vec<Nat>, CodecError> {
    if n == 0 {
        return Err(CodecError::EmptyTuple);
    }
    let mut out = Vec::with_capacity(n);
    let mut rest = z.clone();
    for _ in 1..n {
        out.push(head(&rest));
        rest = tail(&rest);
    }
    out.push(rest);
    Ok(out)
}

/// Code of the list `xs` as `(x1, ..., xn, 0)`.
pub fn list_encode(xs: &[Nat]) -> Nat {
    xs.iter().rev().fold(Nat::zero(), |acc, x| pair(x, &acc))
}

pub fn list_decode(x: &Nat) -> Vec<Nat> {
    let mut out = Vec::new();
    let mut rest = x.clone();
    while let Ok((h, t)) = unpair(&rest) {
        out.push(h);
        rest = t;
    }
    out
}

/// `L(0) = 0`, `L((v, w)) = L(w) + 1`.
pub fn list_len(x: &Nat) -> Nat {
    let mut n = 0u64;
    let mut rest = x.clone();
    while !rest.is_zero() {
        rest = tail(&rest);
        n += 1;
    }
    nat(n)
}

/// `0 ⊕ y = y`, `(v, x) ⊕ y = (v, x ⊕ y)`.
pub fn list_concat(x: &Nat, y: &Nat) -> Nat {
    list_decode(x)
        .iter()
        .rev()
        .fold(y.clone(), |acc, v| pair(v, &acc))
}

/// Code of a 0–1 sequence: the number with binary digits `1 b0 b1 … b(n-1)`.
pub fn seq_encode(bits: &[bool]) -> Nat {
    let mut code = Nat::one();
    for &b in bits {
        code <<= 1u32;
        if b {
            code += 1u32;
        }
    }
    code
}

/// Inverse of [`seq_encode`]; `None` for `0`, which codes no sequence.
pub fn seq_decode(code: &Nat) -> Option<Vec<bool>> {
    if code.is_zero() {
        return None;
    }
    let n = bit_len(code) - 1;
    Some((0..n).rev().map(|i| code.bit(i)).collect())
}

/// `|τ|`: length of the coded sequence, `|0| = 0`.
pub fn seq_len(t: &Nat) -> Nat {
    nat(bit_len(t).saturating_sub(1))
}

/// `σ ⋆ τ`: appends the bits of `τ` to `σ`; `0` when either code is `0`.
pub fn seq_concat(s: &Nat, t: &Nat) -> Nat {
    if s.is_zero() || t.is_zero() {
        return Nat::zero();
    }
    let n = bit_len(t) - 1;
    let low = t - (Nat::one() << n);
    (s << n) + low
}

/// `σ ⪯ τ`: `σ ⋆ ρ = τ` for some `ρ`, with `τ > 0`.
pub fn seq_prefix(s: &Nat, t: &Nat) -> bool {
    if s.is_zero() || t.is_zero() {
        return false;
    }
    let (ls, lt) = (bit_len(s), bit_len(t));
    ls <= lt && (t >> (lt - ls)) == *s
}

/// `σ ≺ τ`: a prefix that is also smaller.
pub fn seq_proper_prefix(s: &Nat, t: &Nat) -> bool {
    s < t && seq_prefix(s, t)
}

/// Finite set of naturals kept as a strictly ascending list.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinSet {
    elems: Vec<Nat>,
}

impl FinSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn elements(&self) -> &[Nat] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, x: &Nat) -> bool {
        self.elems.binary_search(x).is_ok()
    }

    pub fn insert(&mut self, x: Nat) {
        if let Err(i) = self.elems.binary_search(&x) {
            self.elems.insert(i, x);
        }
    }

    /// `‖X‖`: the least strict upper bound of the elements (0 when empty).
    pub fn size(&self) -> Nat {
        self.elems.last().map(|m| m + 1u32).unwrap_or_default()
    }
}

impl FromIterator<Nat> for FinSet {
    fn from_iter<I: IntoIterator<Item = Nat>>(iter: I) -> Self {
        let mut elems: Vec<Nat> = iter.into_iter().collect();
        elems.sort();
        elems.dedup();
        FinSet { elems }
    }
}

impl FromIterator<u64> for FinSet {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        iter.into_iter().map(Nat::from).collect()
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elems.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// `x ∈_Ack y`: bit `x` of `y` is set.
pub fn ack_member(x: &Nat, y: &Nat) -> bool {
    match x.to_u64() {
        Some(i) => y.bit(i),
        None => false,
    }
}

/// `Σ_{i ∈ s} 2^i`.
pub fn ack_encode(s: &FinSet) -> Result<Nat, CodecError> {
    let mut code = Nat::zero();
    for e in s.elements() {
        let i = e.to_u64().ok_or_else(|| CodecError::BitIndex(e.clone()))?;
        code.set_bit(i, true);
    }
    Ok(code)
}

pub fn ack_decode(y: &Nat) -> FinSet {
    (0..bit_len(y)).filter(|&i| y.bit(i)).collect()
}

/// `0 ∉ T` and every proper prefix of a member is a member.
pub fn is_tree(s: &FinSet) -> bool {
    if s.contains(&Nat::zero()) {
        return false;
    }
    s.elements().iter().all(|t| {
        let mut p = t >> 1u32;
        while !p.is_zero() {
            if !s.contains(&p) {
                return false;
            }
            p >>= 1u32;
        }
        true
    })
}

/// `[x, y]_b = x·b + y`.
pub fn base_pair(x: &Nat, y: &Nat, b: &Nat) -> Nat {
    x * b + y
}

pub fn base_unpair(v: &Nat, b: &Nat) -> Result<(Nat, Nat), CodecError> {
    if b.is_zero() {
        return Err(CodecError::ZeroBase);
    }
    Ok(v.div_rem(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: u64) -> Nat {
        nat(v)
    }

    #[test]
    fn word_path_matches_big_path() {
        for z in [(1u64 << 52) - 3, (1 << 52) - 1, 1 << 52, (1 << 52) + 5, 1 << 60] {
            let z = nat(z);
            let (x, y) = unpair(&z).unwrap();
            assert_eq!(pair(&x, &y), z);
        }
        for (x, y) in [((1u64 << 30) - 1, 0u64), (1 << 30, 1 << 30), (0, (1 << 30) - 1)] {
            let want: Nat = triangle(&(nat(x) + nat(y))) + nat(x) + 1u32;
            assert_eq!(pair(&nat(x), &nat(y)), want);
        }
    }

    #[test]
    fn pair_small_values() {
        assert_eq!(pair(&n(0), &n(0)), n(1));
        assert_eq!(pair(&n(0), &n(1)), n(2));
        assert_eq!(pair(&n(1), &n(0)), n(3));
        assert_eq!(pair(&n(1), &n(1)), n(5));
        assert_eq!(pair(&n(2), &n(0)), n(6));
    }

    #[test]
    fn unpair_rejects_zero() {
        assert_eq!(unpair(&n(0)), Err(CodecError::NotAPair));
        assert_eq!(unpair(&n(1)).unwrap(), (n(0), n(0)));
        assert_eq!(unpair(&n(5)).unwrap(), (n(1), n(1)));
    }

    #[test]
    fn projections_are_total() {
        assert_eq!(head(&n(0)), n(0));
        assert_eq!(tail(&n(0)), n(0));
        assert_eq!((head(&n(3)), tail(&n(3))), (n(1), n(0)));
        assert_eq!((head(&n(5)), tail(&n(5))), (n(1), n(1)));
    }

    #[test]
    fn unpair_huge_values() {
        let x = Nat::one() << 300u32;
        let y = (Nat::one() << 257u32) + 12345u32;
        assert_eq!(unpair(&pair(&x, &y)).unwrap(), (x, y));
    }

    #[test]
    fn tuples_fold_right() {
        assert_eq!(tuple(&[n(7)]).unwrap(), n(7));
        assert_eq!(tuple(&[n(0), n(0), n(0)]).unwrap(), n(2));
        assert_eq!(tuple(&[n(1), n(0)]).unwrap(), n(3));
        assert_eq!(tuple(&[]), Err(CodecError::EmptyTuple));
        assert_eq!(untuple(&n(2), 3).unwrap(), vec![n(0), n(0), n(0)]);
    }

    #[test]
    fn list_length_and_concat() {
        assert_eq!(list_len(&n(0)), n(0));
        assert_eq!(pair(&n(5), &n(0)), n(21));
        assert_eq!(list_len(&n(21)), n(1));
        let l12 = pair(&n(1), &pair(&n(2), &n(0)));
        assert_eq!(list_len(&l12), n(2));
        assert_eq!(list_concat(&n(0), &n(21)), n(21));
        assert_eq!(list_concat(&n(21), &n(0)), n(21));
        assert_eq!(list_concat(&pair(&n(1), &n(0)), &pair(&n(2), &n(0))), l12);
    }

    #[test]
    fn sequence_examples() {
        assert_eq!(seq_len(&n(1)), n(0));
        assert_eq!(seq_len(&n(20)), n(4));
        assert_eq!(seq_decode(&n(20)).unwrap(), vec![false, true, false, false]);
        assert_eq!(seq_concat(&n(2), &n(3)), n(5));
        assert_eq!(seq_concat(&n(0), &n(3)), n(0));
        assert!(seq_prefix(&n(2), &n(5)));
        assert!(seq_prefix(&n(5), &n(5)));
        assert!(!seq_proper_prefix(&n(5), &n(5)));
        assert!(!seq_prefix(&n(3), &n(5)));
        assert!(!seq_prefix(&n(0), &n(5)));
    }

    #[test]
    fn ackermann_codes() {
        assert_eq!(ack_encode(&FinSet::new()).unwrap(), n(0));
        let s: FinSet = [0u64, 2].into_iter().collect();
        assert_eq!(ack_encode(&s).unwrap(), n(5));
        assert!(!ack_member(&n(1), &n(5)));
        assert!(ack_member(&n(2), &n(5)));
        assert_eq!(s.size(), n(3));
        assert_eq!(FinSet::new().size(), n(0));
    }

    #[test]
    fn trees() {
        assert!(is_tree(&FinSet::new()));
        assert!(is_tree(&[1u64, 2, 5].into_iter().collect()));
        assert!(!is_tree(&[5u64].into_iter().collect()));
        assert!(!is_tree(&[0u64, 1].into_iter().collect()));
    }

    #[test]
    fn base_digits() {
        assert_eq!(base_pair(&n(3), &n(4), &n(10)), n(34));
        assert_eq!(base_pair(&n(0), &n(0), &n(17)), n(0));
        assert_eq!(base_unpair(&n(34), &n(10)).unwrap(), (n(3), n(4)));
        assert_eq!(base_unpair(&n(34), &n(0)), Err(CodecError::ZeroBase));
    }
}
