//! Small derivations every compiler needs.

use num_traits::ToPrimitive;

use crate::algebra::{Derivation, PolyBound};
use crate::codec::Nat;

/// `Z := μ(S ∘ mul) ∘ P(I, I)`, constantly 0.
pub fn zero() -> Derivation {
    let g = Derivation::comp(Derivation::succ(), Derivation::mul());
    Derivation::comp(Derivation::mu(g), Derivation::pair(Derivation::id(), Derivation::id()))
}

/// `H := D ∘ P(Z, I)`: head of a pair, 0 at 0.
pub fn head() -> Derivation {
    Derivation::comp(Derivation::case(), Derivation::pair(zero(), Derivation::id()))
}

/// `T := D ∘ P(S ∘ Z, I)`: tail of a pair, 0 at 0.
pub fn tail() -> Derivation {
    Derivation::comp(
        Derivation::case(),
        Derivation::pair(Derivation::comp(Derivation::succ(), zero()), Derivation::id()),
    )
}

/// The constant function `n`.
pub fn konst(n: u64) -> Derivation {
    let mut d = zero();
    for _ in 0..n {
        d = Derivation::comp(Derivation::succ(), d);
    }
    d
}

/// The constant `n`, by doubling for large values.
pub fn konst_nat(n: &Nat) -> Derivation {
    if let Some(small) = n.to_u64().filter(|&v| v < 16) {
        return konst(small);
    }
    let half = konst_nat(&(n >> 1u32));
    let twice = bin(Derivation::add(), half.clone(), half);
    if n.bit(0) {
        Derivation::comp(Derivation::succ(), twice)
    } else {
        twice
    }
}

/// A derivation computing the polynomial `p`.
pub fn poly(p: &PolyBound) -> Derivation {
    match p {
        PolyBound::Const(c) => konst_nat(c),
        PolyBound::N => Derivation::id(),
        PolyBound::Add(a, b) => bin(Derivation::add(), poly(a), poly(b)),
        PolyBound::Mul(a, b) => bin(Derivation::mul(), poly(a), poly(b)),
        PolyBound::Compose(o, i) => Derivation::comp(poly(o), poly(i)),
    }
}

/// `g ∘ f`, treating `None` as the identity.
pub fn after(g: Derivation, f: Option<Derivation>) -> Derivation {
    match f {
        Some(f) => Derivation::comp(g, f),
        None => g,
    }
}

/// Projection of `x_i` from the right-associated tuple of `n + 1` values:
/// `T^n` for the last one, `H ∘ T^i` otherwise.
pub fn proj(i: usize, n: usize) -> Derivation {
    let steps = if i == n { n } else { i };
    let mut d: Option<Derivation> = None;
    for _ in 0..steps {
        d = Some(after(tail(), d));
    }
    if i == n {
        d.unwrap_or_else(Derivation::id)
    } else {
        after(head(), d)
    }
}

/// Binary operator `op` applied to the values of `a` and `b`.
pub fn bin(op: Derivation, a: Derivation, b: Derivation) -> Derivation {
    Derivation::comp(op, Derivation::pair(a, b))
}

/// `c ? yes : no` for a 0-1 valued `c`.
pub fn ite(c: Derivation, yes: Derivation, no: Derivation) -> Derivation {
    bin(Derivation::case(), c, Derivation::pair(no, yes))
}

/// `1 ∸ c` on 0-1 values.
pub fn not(c: Derivation) -> Derivation {
    bin(Derivation::case(), c, Derivation::pair(konst(1), zero()))
}

/// `Pr := μ_{z<x}[x < S(S(z))] ∘ P(I, I)`, the predecessor.
pub fn pred() -> Derivation {
    let test = bin(
        Derivation::lt(),
        tail(),
        Derivation::comp(Derivation::succ(), Derivation::comp(Derivation::succ(), head())),
    );
    Derivation::comp(Derivation::mu(test), Derivation::pair(Derivation::id(), Derivation::id()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{nat, pair, tuple};
    use crate::eval::apply;

    #[test]
    fn basics() {
        for x in 0..40u64 {
            assert_eq!(apply(&zero(), &nat(x)).unwrap(), nat(0));
            assert_eq!(apply(&konst(3), &nat(x)).unwrap(), nat(3));
            assert_eq!(apply(&pred(), &nat(x)).unwrap(), nat(x.saturating_sub(1)));
        }
        let p = pair(&nat(4), &nat(9));
        assert_eq!(apply(&head(), &p).unwrap(), nat(4));
        assert_eq!(apply(&tail(), &p).unwrap(), nat(9));
    }

    #[test]
    fn constants_and_polynomials() {
        for c in [0u64, 15, 16, 17, 1000, 123457] {
            assert_eq!(apply(&konst_nat(&nat(c)), &nat(3)).unwrap(), nat(c));
        }
        let p: PolyBound = "n^2 + 3*n + 7".parse().unwrap();
        for x in 0..20u64 {
            assert_eq!(apply(&poly(&p), &nat(x)).unwrap(), nat(x * x + 3 * x + 7));
        }
    }

    #[test]
    fn projections() {
        let vals = [nat(3), nat(0), nat(7), nat(2)];
        let packed = tuple(&vals).unwrap();
        for (i, v) in vals.iter().enumerate() {
            assert_eq!(apply(&proj(i, 3), &packed).unwrap(), *v);
        }
        assert_eq!(apply(&proj(0, 0), &nat(11)).unwrap(), nat(11));
    }

    #[test]
    fn conditional() {
        for c in 0..2u64 {
            let d = ite(konst(c), konst(5), konst(9));
            assert_eq!(apply(&d, &nat(1)).unwrap(), nat(if c == 1 { 5 } else { 9 }));
            assert_eq!(apply(&not(konst(c)), &nat(1)).unwrap(), nat(1 - c));
        }
    }
}
