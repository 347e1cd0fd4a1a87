//! Derivation terms over the operators of a function algebra.

mod bound;
mod enumerate;
mod sexpr;

use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

pub use bound::{poly_bound, BoundError, PolyBound};
pub use enumerate::{derivation_at, enumerate, index_of, EnumError, Enumerator};
pub use sexpr::{d_parse, d_print, SexprError};

/// Operator symbols. The declaration order is the tie-break order of the
/// standard enumeration, with the oracle symbol first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpSym {
    /// `X*`, the characteristic function of the oracle.
    OracleChar,
    S,
    Add,
    Mul,
    Lt,
    I,
    /// Case analysis: `D(0,y,z) = y`, `D(S(x),y,z) = z`.
    D,
    /// `P(g,h)(x) = (g(x), h(x))`.
    P,
    /// `Comp(g,h) = g ∘ h`.
    Comp,
    Mu,
    PR,
    BPR,
    SNR,
    E,
    Smash,
}

impl OpSym {
    pub const ALL: [OpSym; 15] = [
        OpSym::OracleChar,
        OpSym::S,
        OpSym::Add,
        OpSym::Mul,
        OpSym::Lt,
        OpSym::I,
        OpSym::D,
        OpSym::P,
        OpSym::Comp,
        OpSym::Mu,
        OpSym::PR,
        OpSym::BPR,
        OpSym::SNR,
        OpSym::E,
        OpSym::Smash,
    ];

    pub fn arity(self) -> usize {
        use OpSym::*;
        match self {
            OracleChar | S | Add | Mul | Lt | I | D | E | Smash => 0,
            Mu => 1,
            P | Comp | PR | BPR | SNR => 2,
        }
    }

    /// Atom or head keyword in the S-expression format.
    pub fn keyword(self) -> &'static str {
        use OpSym::*;
        match self {
            OracleChar => "X",
            S => "S",
            Add => "add",
            Mul => "mul",
            Lt => "lt",
            I => "I",
            D => "D",
            P => "P",
            Comp => "comp",
            Mu => "mu",
            PR => "pr",
            BPR => "bpr",
            SNR => "snr",
            E => "E",
            Smash => "smash",
        }
    }

    pub fn from_keyword(s: &str) -> Option<OpSym> {
        OpSym::ALL.into_iter().find(|op| op.keyword() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgebraClass {
    DA,
    SA,
    TA,
    DEA,
    DSA,
    SSA,
    PRA,
}

impl AlgebraClass {
    pub const ALL: [AlgebraClass; 7] = [
        AlgebraClass::DA,
        AlgebraClass::SA,
        AlgebraClass::TA,
        AlgebraClass::DEA,
        AlgebraClass::DSA,
        AlgebraClass::SSA,
        AlgebraClass::PRA,
    ];

    pub fn allows(self, op: OpSym) -> bool {
        use OpSym::*;
        let base = matches!(op, S | Add | Mul | Lt | I | D | P | Comp | Mu | OracleChar);
        base || match self {
            AlgebraClass::DA => false,
            AlgebraClass::SA => op == BPR,
            AlgebraClass::TA => op == SNR,
            AlgebraClass::DEA => op == E,
            AlgebraClass::DSA => op == Smash,
            AlgebraClass::SSA => matches!(op, BPR | Smash),
            AlgebraClass::PRA => op == PR,
        }
    }

    pub fn allowed(self) -> Vec<OpSym> {
        OpSym::ALL.into_iter().filter(|&op| self.allows(op)).collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            AlgebraClass::DA => "DA",
            AlgebraClass::SA => "SA",
            AlgebraClass::TA => "TA",
            AlgebraClass::DEA => "DEA",
            AlgebraClass::DSA => "DSA",
            AlgebraClass::SSA => "SSA",
            AlgebraClass::PRA => "PRA",
        }
    }
}

impl fmt::Display for AlgebraClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgebraClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AlgebraClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown algebra class `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("operator `{op}` takes {expected} sub-derivations, got {got}")]
pub struct ArityError {
    pub op: &'static str,
    pub expected: usize,
    pub got: usize,
}

#[derive(Debug)]
struct Node {
    op: OpSym,
    children: Vec<Derivation>,
    size: u64,
}

/// An immutable, cheaply clonable derivation term. Sub-terms may be shared.
#[derive(Clone)]
pub struct Derivation(Arc<Node>);

impl Derivation {
    pub fn new(op: OpSym, children: Vec<Derivation>) -> Result<Self, ArityError> {
        if children.len() != op.arity() {
            return Err(ArityError {
                op: op.keyword(),
                expected: op.arity(),
                got: children.len(),
            });
        }
        let size = children
            .iter()
            .fold(1u64, |acc, c| acc.saturating_add(c.size()));
        Ok(Derivation(Arc::new(Node { op, children, size })))
    }

    fn build(op: OpSym, children: Vec<Derivation>) -> Self {
        Self::new(op, children).expect("arity checked by constructor")
    }

    pub fn leaf(op: OpSym) -> Self {
        assert_eq!(op.arity(), 0, "`{}` is not nullary", op.keyword());
        Self::build(op, Vec::new())
    }

    pub fn oracle() -> Self {
        Self::leaf(OpSym::OracleChar)
    }
    pub fn succ() -> Self {
        Self::leaf(OpSym::S)
    }
    pub fn add() -> Self {
        Self::leaf(OpSym::Add)
    }
    pub fn mul() -> Self {
        Self::leaf(OpSym::Mul)
    }
    pub fn lt() -> Self {
        Self::leaf(OpSym::Lt)
    }
    pub fn id() -> Self {
        Self::leaf(OpSym::I)
    }
    pub fn case() -> Self {
        Self::leaf(OpSym::D)
    }
    pub fn exp() -> Self {
        Self::leaf(OpSym::E)
    }
    pub fn smash() -> Self {
        Self::leaf(OpSym::Smash)
    }

    pub fn pair(g: Derivation, h: Derivation) -> Self {
        Self::build(OpSym::P, vec![g, h])
    }

    /// `g ∘ h`.
    pub fn comp(g: Derivation, h: Derivation) -> Self {
        Self::build(OpSym::Comp, vec![g, h])
    }

    pub fn mu(g: Derivation) -> Self {
        Self::build(OpSym::Mu, vec![g])
    }

    pub fn pr(g: Derivation, h: Derivation) -> Self {
        Self::build(OpSym::PR, vec![g, h])
    }

    pub fn bpr(g: Derivation, h: Derivation) -> Self {
        Self::build(OpSym::BPR, vec![g, h])
    }

    pub fn snr(g: Derivation, h: Derivation) -> Self {
        Self::build(OpSym::SNR, vec![g, h])
    }

    pub fn op(&self) -> OpSym {
        self.0.op
    }

    pub fn children(&self) -> &[Derivation] {
        &self.0.children
    }

    /// Node count of the tree (saturating; shared sub-terms count each time).
    pub fn size(&self) -> u64 {
        self.0.size
    }

    /// Identity of this node, stable while the derivation is alive.
    pub fn node_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn ptr_eq(&self, other: &Derivation) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Distinct nodes, each visited once even when shared.
    pub fn distinct_nodes(&self) -> Vec<Derivation> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut stack = vec![self.clone()];
        while let Some(d) = stack.pop() {
            if seen.insert(d.node_id()) {
                stack.extend(d.children().iter().cloned());
                out.push(d);
            }
        }
        out
    }

    pub fn contains_op(&self, op: OpSym) -> bool {
        self.distinct_nodes().iter().any(|d| d.op() == op)
    }
}

impl PartialEq for Derivation {
    fn eq(&self, other: &Self) -> bool {
        if self.ptr_eq(other) {
            return true;
        }
        let mut stack = vec![(self.clone(), other.clone())];
        while let Some((a, b)) = stack.pop() {
            if a.ptr_eq(&b) {
                continue;
            }
            if a.op() != b.op() || a.size() != b.size() {
                return false;
            }
            stack.extend(a.children().iter().cloned().zip(b.children().iter().cloned()));
        }
        true
    }
}

impl Eq for Derivation {}

impl Hash for Derivation {
    fn hash<H: Hasher>(&self, state: &mut H) {
        // Shallow: operator, size and child operators keep equal terms equal.
        self.op().hash(state);
        self.size().hash(state);
        for c in self.children() {
            c.op().hash(state);
        }
    }
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&d_print(self))
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&d_print(self))
    }
}

/// True iff every operator of `d` belongs to `class`. Arity is guaranteed by
/// construction.
pub fn validate(d: &Derivation, class: AlgebraClass) -> bool {
    d.distinct_nodes().iter().all(|n| class.allows(n.op()))
}

/// The smallest class among `candidates` that contains `d`, if any.
pub fn classify(d: &Derivation) -> Vec<AlgebraClass> {
    AlgebraClass::ALL
        .into_iter()
        .filter(|&c| validate(d, c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arities() {
        assert!(Derivation::new(OpSym::PR, vec![Derivation::id()]).is_err());
        assert!(Derivation::new(OpSym::Mu, vec![Derivation::lt()]).is_ok());
        assert!(Derivation::new(OpSym::S, vec![Derivation::id()]).is_err());
    }

    #[test]
    fn class_membership() {
        let mu_lt = Derivation::mu(Derivation::lt());
        assert!(validate(&mu_lt, AlgebraClass::DA));
        let pr = Derivation::pr(Derivation::id(), Derivation::id());
        assert!(!validate(&pr, AlgebraClass::DA));
        assert!(validate(&pr, AlgebraClass::PRA));
        let snr = Derivation::snr(Derivation::id(), Derivation::id());
        assert!(validate(&snr, AlgebraClass::TA));
        assert!(!validate(&snr, AlgebraClass::SA));
        assert!(validate(&Derivation::smash(), AlgebraClass::SSA));
        assert!(validate(&Derivation::bpr(Derivation::id(), Derivation::id()), AlgebraClass::SSA));
    }

    #[test]
    fn every_class_contains_da() {
        let da = AlgebraClass::DA.allowed();
        for c in AlgebraClass::ALL {
            assert!(da.iter().all(|&op| c.allows(op)), "{c}");
        }
    }

    #[test]
    fn structural_equality_ignores_sharing() {
        let a = Derivation::comp(Derivation::succ(), Derivation::succ());
        let s = Derivation::succ();
        let b = Derivation::comp(s.clone(), s);
        assert_eq!(a, b);
        assert_ne!(a, Derivation::comp(Derivation::succ(), Derivation::id()));
    }
}
