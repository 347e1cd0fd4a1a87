//! Syntactic polynomial bounds `B_d` with `|d(x)| ≤ B_d(x)` for derivations
//! built without unbounded operators.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use super::{Derivation, OpSym};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyBound {
    Const(BigUint),
    N,
    Add(Arc<PolyBound>, Arc<PolyBound>),
    Mul(Arc<PolyBound>, Arc<PolyBound>),
    /// `outer(inner(n))`.
    Compose(Arc<PolyBound>, Arc<PolyBound>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("unbounded operator `{0}` has no polynomial bound")]
    Unbounded(&'static str),
    #[error("bad bound expression at byte {0}: {1}")]
    Parse(usize, String),
}

impl PolyBound {
    pub fn konst(c: u64) -> Self {
        PolyBound::Const(BigUint::from(c))
    }

    pub fn add(a: PolyBound, b: PolyBound) -> Self {
        PolyBound::Add(Arc::new(a), Arc::new(b))
    }

    pub fn mul(a: PolyBound, b: PolyBound) -> Self {
        PolyBound::Mul(Arc::new(a), Arc::new(b))
    }

    pub fn compose(outer: PolyBound, inner: PolyBound) -> Self {
        PolyBound::Compose(Arc::new(outer), Arc::new(inner))
    }

    pub fn eval(&self, n: &BigUint) -> BigUint {
        match self {
            PolyBound::Const(c) => c.clone(),
            PolyBound::N => n.clone(),
            PolyBound::Add(a, b) => a.eval(n) + b.eval(n),
            PolyBound::Mul(a, b) => a.eval(n) * b.eval(n),
            PolyBound::Compose(o, i) => o.eval(&i.eval(n)),
        }
    }

    /// Degree as a polynomial in `n`.
    pub fn degree(&self) -> u64 {
        match self {
            PolyBound::Const(_) => 0,
            PolyBound::N => 1,
            PolyBound::Add(a, b) => a.degree().max(b.degree()),
            PolyBound::Mul(a, b) => a.degree() + b.degree(),
            PolyBound::Compose(o, i) => o.degree() * i.degree(),
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, subst: &dyn Fn(&mut fmt::Formatter<'_>) -> fmt::Result) -> fmt::Result {
        match self {
            PolyBound::Const(c) => write!(f, "{c}"),
            PolyBound::N => subst(f),
            PolyBound::Add(a, b) => {
                f.write_str("(")?;
                a.write(f, subst)?;
                f.write_str(" + ")?;
                b.write(f, subst)?;
                f.write_str(")")
            }
            PolyBound::Mul(a, b) => {
                a.write(f, subst)?;
                f.write_str("*")?;
                b.write(f, subst)
            }
            PolyBound::Compose(o, i) => {
                // Sums print their own parentheses and products associate.
                let inner = |f: &mut fmt::Formatter<'_>| i.write(f, subst);
                o.write(f, &inner)
            }
        }
    }
}

impl fmt::Display for PolyBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, &|f| f.write_str("n"))
    }
}

struct BoundParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl BoundParser<'_> {
    fn skip(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn fail<T>(&self, msg: &str) -> Result<T, BoundError> {
        Err(BoundError::Parse(self.pos, msg.to_string()))
    }

    fn number(&mut self) -> Option<BigUint> {
        self.skip();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| {
            std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .unwrap()
        })
    }

    fn expr(&mut self) -> Result<PolyBound, BoundError> {
        let mut acc = self.term()?;
        while self.eat(b'+') {
            acc = PolyBound::add(acc, self.term()?);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<PolyBound, BoundError> {
        let mut acc = self.power()?;
        while self.eat(b'*') {
            acc = PolyBound::mul(acc, self.power()?);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<PolyBound, BoundError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let Some(k) = self.number() else {
            return self.fail("expected exponent");
        };
        let mut acc = PolyBound::Const(BigUint::one());
        let mut i = BigUint::zero();
        while i < k {
            acc = if i.is_zero() { base.clone() } else { PolyBound::mul(acc, base.clone()) };
            i += 1u32;
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<PolyBound, BoundError> {
        if self.eat(b'(') {
            let e = self.expr()?;
            if !self.eat(b')') {
                return self.fail("expected `)`");
            }
            return Ok(e);
        }
        if self.eat(b'n') {
            return Ok(PolyBound::N);
        }
        match self.number() {
            Some(c) => Ok(PolyBound::Const(c)),
            None => self.fail("expected `n`, a number or `(`"),
        }
    }
}

impl FromStr for PolyBound {
    type Err = BoundError;

    /// Accepts `+`, `*`, `^k`, parentheses, `n` and decimal constants.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = BoundParser { src: s.as_bytes(), pos: 0 };
        let e = p.expr()?;
        p.skip();
        if p.pos != p.src.len() {
            return p.fail("trailing input");
        }
        Ok(e)
    }
}

pub fn poly_bound(d: &Derivation) -> Result<PolyBound, BoundError> {
    let mut memo = HashMap::new();
    bound_of(d, &mut memo)
}

fn bound_of(d: &Derivation, memo: &mut HashMap<usize, PolyBound>) -> Result<PolyBound, BoundError> {
    if let Some(b) = memo.get(&d.node_id()) {
        return Ok(b.clone());
    }
    use OpSym::*;
    let n = PolyBound::N;
    let b = match d.op() {
        S => PolyBound::add(n, PolyBound::konst(1)),
        Add => PolyBound::mul(PolyBound::konst(2), n),
        Mul => PolyBound::mul(n.clone(), n),
        Lt | OracleChar => PolyBound::konst(1),
        I | D | Mu | BPR | SNR => {
            for c in d.children() {
                bound_of(c, memo)?;
            }
            n
        }
        P => {
            let bg = bound_of(&d.children()[0], memo)?;
            let bh = bound_of(&d.children()[1], memo)?;
            let s = PolyBound::add(PolyBound::add(bg, bh), PolyBound::konst(2));
            PolyBound::mul(s.clone(), s)
        }
        Comp => {
            let bg = bound_of(&d.children()[0], memo)?;
            let bh = bound_of(&d.children()[1], memo)?;
            PolyBound::compose(bg, bh)
        }
        PR | E | Smash => return Err(BoundError::Unbounded(d.op().keyword())),
    };
    memo.insert(d.node_id(), b.clone());
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::d_parse;

    #[test]
    fn rules() {
        let b = poly_bound(&d_parse("(comp S S)").unwrap()).unwrap();
        assert_eq!(b.eval(&BigUint::from(5u32)), BigUint::from(7u32));
        assert_eq!(b.to_string(), "((n + 1) + 1)");
        let p = poly_bound(&d_parse("(P I I)").unwrap()).unwrap();
        assert_eq!(p.eval(&BigUint::from(3u32)), BigUint::from(64u32));
        assert_eq!(p.degree(), 2);
        assert_eq!(
            poly_bound(&d_parse("(comp E S)").unwrap()),
            Err(BoundError::Unbounded("E"))
        );
        assert!(poly_bound(&d_parse("(pr I I)").unwrap()).is_err());
    }

    #[test]
    fn parse_bounds() {
        let b: PolyBound = "n^2 + 3*n + 1".parse().unwrap();
        assert_eq!(b.eval(&BigUint::from(4u32)), BigUint::from(29u32));
        assert_eq!(b.degree(), 2);
        assert!("n +".parse::<PolyBound>().is_err());
        assert!("(n".parse::<PolyBound>().is_err());
    }
}
