//! Bounded nested recursion as special nested recursion.
//!
//! The state of a pending call is `v = [x, t, z1, .., zJ]_b`: the argument,
//! the number `t` of recursive results still missing and the results found
//! so far, as base-`b` digits with `b` above every value involved. The
//! parameter of the recursion is `b` itself. The base
//! case of the recursion is the tagged dispatcher of `f`: a request `(0, y)`
//! becomes the fresh state `[y, J, 0, ..]_b`, and an answer `(1, y)` is
//! returned. Storing a result lowers `t`, so both moves decrease `v`.

use std::fmt;

use super::explicit::compile_explicit;
use super::formula::{compile_formula, compile_formula_in, compile_term_in, Formula, Funcs, VarCtx};
use super::prims::{after, bin, head, ite, konst, poly, pred, tail};
use super::reduce_pr::{dispatcher, max_calls};
use super::CompileError;
use crate::algebra::{Derivation, PolyBound};
use crate::clausal::{check_recursive_restrictions, check_refinement, eval_clausal, ClausalDef, Env, Term};
use crate::codec::{FinSet, Nat};
use crate::eval::Budget;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SnrOptions {
    /// Largest supported number of recursive applications on one path.
    pub unroll_limit: usize,
    /// The bound is checked against the interpreter on `0..=validate_upto`.
    pub validate_upto: u64,
}

impl Default for SnrOptions {
    fn default() -> Self {
        SnrOptions {
            unroll_limit: 8,
            validate_upto: 64,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SnrReduction {
    pub h_def: ClausalDef,
    pub j: usize,
    pub bound: PolyBound,
    pub result: Derivation,
}

impl fmt::Display for SnrReduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# dispatcher")?;
        writeln!(f, "{}", self.h_def)?;
        writeln!(f, "J = {}", self.j)?;
        writeln!(f, "bound = {}", self.bound)?;
        writeln!(f, "base = max(x, bound(x), J) + 1")?;
        write!(f, "result = {}", self.result)
    }
}

/// How named values are packed: a binary tree of pairs.
#[derive(Debug, Clone)]
enum Shape {
    Leaf(String),
    Node(Box<Shape>, Box<Shape>),
}

impl Shape {
    fn leaf(name: &str) -> Shape {
        Shape::Leaf(name.to_string())
    }

    fn node(a: Shape, b: Shape) -> Shape {
        Shape::Node(Box::new(a), Box::new(b))
    }

    /// A balanced tree over `names`, in order.
    fn balanced(names: &[&str]) -> Result<Shape, CompileError> {
        match names {
            [] => Err(CompileError::EmptyContext),
            [n] => Ok(Shape::leaf(n)),
            _ => {
                let (a, b) = names.split_at(names.len() / 2);
                Ok(Shape::node(Shape::balanced(a)?, Shape::balanced(b)?))
            }
        }
    }

    /// Steps from the root to `name`; `false` is the head side.
    fn path(&self, name: &str) -> Option<Vec<bool>> {
        match self {
            Shape::Leaf(n) => (n == name).then(Vec::new),
            Shape::Node(a, b) => {
                let (side, mut p) = match a.path(name) {
                    Some(p) => (false, p),
                    None => (true, b.path(name)?),
                };
                p.insert(0, side);
                Some(p)
            }
        }
    }

    /// Path to the leftmost leaf of least depth.
    fn shallowest(&self) -> Vec<bool> {
        match self {
            Shape::Leaf(_) => Vec::new(),
            Shape::Node(a, b) => {
                let (pa, pb) = (a.shallowest(), b.shallowest());
                let (side, mut p) = if pb.len() < pa.len() { (true, pb) } else { (false, pa) };
                p.insert(0, side);
                p
            }
        }
    }
}

fn select(path: &[bool]) -> Derivation {
    let mut d: Option<Derivation> = None;
    for &side in path {
        d = Some(after(if side { tail() } else { head() }, d));
    }
    d.unwrap_or_else(Derivation::id)
}

/// Straight-line code over named values. The values live in a balanced
/// tree of pairs: a right-nested tuple would double its bit length with
/// every value added, while a balanced tree grows linearly.
struct Lets<'a> {
    shape: Shape,
    chain: Option<Derivation>,
    funcs: &'a Funcs,
}

impl<'a> Lets<'a> {
    fn new(shape: Shape, funcs: &'a Funcs) -> Self {
        Lets {
            shape,
            chain: None,
            funcs,
        }
    }

    fn get(&self, name: &str) -> Result<Derivation, CompileError> {
        let p = self.shape.path(name).ok_or_else(|| CompileError::Unbound(name.to_string()))?;
        Ok(select(&p))
    }

    fn term(&self, t: &Term) -> Result<Derivation, CompileError> {
        compile_term_in(t, &|v| self.get(v), self.funcs)
    }

    fn test(&self, phi: &Formula) -> Result<Derivation, CompileError> {
        compile_formula_in(phi, &|v| self.get(v), self.funcs)
    }

    fn push(&mut self, step: Derivation, shape: Shape) {
        self.chain = Some(after(step, self.chain.take()));
        self.shape = shape;
    }

    /// Adds `name`, splitting the shallowest leaf into the old value and
    /// the new one. Only the pairs on the way to that leaf are rebuilt.
    fn bind(&mut self, name: &str, value: Derivation) {
        debug_assert!(self.shape.path(name).is_none(), "`{name}` is bound twice");
        fn rebuild(s: &Shape, at: &mut Vec<bool>, rest: &[bool], name: &str, value: &Derivation) -> (Derivation, Shape) {
            match (s, rest.split_first()) {
                (Shape::Node(a, b), Some((&side, rest))) => {
                    at.push(side);
                    let (d, sh) = rebuild(if side { b } else { a }, at, rest, name, value);
                    at.pop();
                    at.push(!side);
                    let other = select(at);
                    at.pop();
                    let keep = if side { a } else { b };
                    if side {
                        (Derivation::pair(other, d), Shape::node((**keep).clone(), sh))
                    } else {
                        (Derivation::pair(d, other), Shape::node(sh, (**keep).clone()))
                    }
                }
                _ => (
                    Derivation::pair(select(at), value.clone()),
                    Shape::node(s.clone(), Shape::leaf(name)),
                ),
            }
        }
        let target = self.shape.shallowest();
        let (step, shape) = rebuild(&self.shape, &mut Vec::new(), &target, name, &value);
        self.push(step, shape);
    }

    /// Keeps exactly `names`, in a balanced tree.
    fn repack(&mut self, names: &[&str]) -> Result<(), CompileError> {
        fn build(l: &Lets, s: &Shape) -> Result<Derivation, CompileError> {
            match s {
                Shape::Leaf(n) => l.get(n),
                Shape::Node(a, b) => Ok(Derivation::pair(build(l, a)?, build(l, b)?)),
            }
        }
        let shape = Shape::balanced(names)?;
        let step = build(self, &shape)?;
        self.push(step, shape);
        Ok(())
    }

    fn finish(self, body: Derivation) -> Derivation {
        after(body, self.chain)
    }
}

fn var(s: &str) -> Term {
    Term::var(s)
}

fn mul(a: Term, b: Term) -> Term {
    Term::Mul(Box::new(a), Box::new(b))
}

fn add(a: Term, b: Term) -> Term {
    Term::Add(Box::new(a), Box::new(b))
}

fn sum(ts: Vec<Term>) -> Term {
    ts.into_iter().reduce(add).unwrap_or(Term::Zero)
}

fn digit(k: usize) -> String {
    format!("d{k}")
}

/// `b^k` as a product.
fn power(k: usize) -> Term {
    (1..k).fold(if k == 0 { Term::numeral(1) } else { var("b") }, |acc, _| mul(acc, var("b")))
}

/// Binds the digits `d(J+1)..d0` of `v` in base `b`, most significant
/// first. Digit `k` is the least `e < b` with `v < prefix + (e+1)·b^k`.
fn decode(l: &mut Lets, j: usize) -> Result<(), CompileError> {
    // The search runs in the small context [e, v, step, pre].
    let inner = VarCtx::new(&["e", "v", "step", "pre"])?;
    let body = Formula::lt(var("v"), add(var("pre"), mul(Term::succ(var("e")), var("step"))));
    let test = Derivation::mu(compile_formula(&body, &inner, l.funcs)?);
    let mut prefix: Vec<Term> = Vec::new();
    for k in (0..=j + 1).rev() {
        let args = Derivation::pair(l.get("v")?, Derivation::pair(l.term(&power(k))?, l.term(&sum(prefix.clone()))?));
        let d = bin(test.clone(), l.get("b")?, args);
        l.bind(&digit(k), d);
        prefix.push(mul(var(&digit(k)), power(k)));
    }
    Ok(())
}

/// `cases[k]` when `t = k`, for `k = 0..cases.len()`; 0 otherwise.
fn by_t(l: &Lets, t: &str, cases: Vec<Term>) -> Result<Derivation, CompileError> {
    let mut acc = konst(0);
    for (k, c) in cases.into_iter().enumerate().rev() {
        let is_k = l.test(&Formula::eq(var(t), Term::numeral(k as u64)))?;
        acc = ite(is_k, l.term(&c)?, acc);
    }
    Ok(acc)
}

/// `g1((v, b))`: decode, run the dispatcher on `(x, c)` and translate its answer.
fn base_step(h: &str, j: usize, funcs: &Funcs) -> Result<Derivation, CompileError> {
    let mut l = Lets::new(Shape::node(Shape::leaf("v"), Shape::leaf("b")), funcs);
    decode(&mut l, j)?;
    // With t = d(J) results missing, c lists z1..z(J-t), where zi = d(J-i).
    let lists = (0..=j)
        .map(|t| {
            (1..=j - t)
                .rev()
                .fold(Term::Zero, |acc, i| Term::pair(var(&digit(j - i)), acc))
        })
        .collect();
    l.bind("c", by_t(&l, &digit(j), lists)?);
    l.bind("r", l.term(&Term::app(h, Term::pair(var(&digit(j + 1)), var("c"))))?);
    l.repack(&["r", "b"])?;
    l.bind("tag", Derivation::comp(head(), l.get("r")?));
    l.bind("y", Derivation::comp(tail(), l.get("r")?));
    let fresh = add(mul(var("y"), power(j + 1)), mul(Term::numeral(j as u64), power(j)));
    let body = ite(
        l.test(&Formula::eq(var("tag"), Term::Zero))?,
        l.term(&Term::pair(Term::Zero, fresh))?,
        l.term(&Term::pair(Term::numeral(1), var("y")))?,
    );
    Ok(l.finish(body))
}

/// `h1(((v, u), b))`: store the result `u` in the first free slot, digit
/// `t - 1`, and lower `t`.
fn store_step(j: usize, funcs: &Funcs) -> Result<Derivation, CompileError> {
    let vu = Shape::node(Shape::leaf("v"), Shape::leaf("u"));
    let mut l = Lets::new(Shape::node(vu, Shape::leaf("b")), funcs);
    decode(&mut l, j)?;
    l.bind("tp", Derivation::comp(pred(), l.get(&digit(j))?));
    let slots = std::iter::once(Term::Zero)
        .chain((1..=j).map(|k| mul(var("u"), power(k - 1))))
        .collect();
    l.bind("slot", by_t(&l, &digit(j), slots)?);
    let mut parts = vec![mul(var(&digit(j + 1)), power(j + 1)), mul(var("tp"), power(j))];
    parts.extend((0..j).map(|k| mul(var(&digit(k)), power(k))));
    parts.push(var("slot"));
    let body = l.term(&sum(parts))?;
    Ok(l.finish(body))
}

/// Reduces the recursive definition `fname`, whose values satisfy
/// `f(x) ≤ bound(x)`, to a TA derivation with a single SNR node. The base
/// `b = max(x, bound(x), J) + 1` and the initial state are computed from
/// `x` before the recursion starts. The bound is checked against the
/// interpreter on a range of inputs first.
pub fn reduce_bounded_nested_to_snr(
    env: &Env,
    fname: &str,
    bound: &PolyBound,
    funcs: &Funcs,
    opts: SnrOptions,
) -> Result<SnrReduction, CompileError> {
    let f = env.get(fname).ok_or_else(|| CompileError::UnknownFunction(fname.to_string()))?;
    check_recursive_restrictions(f)?;
    let j = max_calls(&f.tree, fname);
    if j > opts.unroll_limit {
        return Err(CompileError::TooManyCalls {
            def: fname.to_string(),
            calls: j,
            limit: opts.unroll_limit,
        });
    }
    for x in 0..=opts.validate_upto {
        let x = Nat::from(x);
        let (value, _) = eval_clausal(env, fname, &x, &FinSet::new(), Budget::default())?;
        let b = bound.eval(&x);
        if value > b {
            return Err(CompileError::BoundViolated {
                def: fname.to_string(),
                x,
                value,
                bound: b,
            });
        }
    }

    let hname = format!("{fname}_h");
    let h_def = dispatcher(f, &hname);
    let mut funcs = funcs.clone();
    let hd = compile_explicit(&check_refinement(&h_def)?, &funcs)?;
    funcs.insert(hname.clone(), hd);
    let g1 = base_step(&hname, j, &funcs)?;
    let h1 = store_step(j, &funcs)?;

    let mut l = Lets::new(Shape::leaf("x"), &funcs);
    l.bind("B", Derivation::comp(poly(bound), l.get("x")?));
    let max = |a: Derivation, b: Derivation| ite(bin(Derivation::lt(), a.clone(), b.clone()), b, a);
    let m = max(max(l.get("x")?, l.get("B")?), konst(j as u64));
    l.bind("b", Derivation::comp(Derivation::succ(), m));
    let start = add(mul(var("x"), power(j + 1)), mul(Term::numeral(j as u64), power(j)));
    let body = Derivation::comp(Derivation::snr(g1, h1), l.term(&Term::pair(start, var("b")))?);
    let result = l.finish(body);

    Ok(SnrReduction {
        h_def,
        j,
        bound: bound.clone(),
        result,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{validate, AlgebraClass};
    use crate::clausal::run_clausal;
    use crate::codec::{list_encode, nat};
    use crate::eval::{eval_memo, eval_report};

    const NESTED: &str = "def f { f(0) = 0; f(S(u)) = f(f(u)); }";
    const L: &str = "def L { L(0) = 0; L((v,w)) = S(L(w)); }";

    fn reduce(src: &str, name: &str) -> (Env, SnrReduction) {
        let env = Env::parse(src).unwrap();
        let r = reduce_bounded_nested_to_snr(&env, name, &PolyBound::N, &Funcs::new(), SnrOptions::default()).unwrap();
        (env, r)
    }

    #[test]
    fn nested_example_is_zero() {
        let (_, r) = reduce(NESTED, "f");
        assert!(validate(&r.result, AlgebraClass::TA));
        assert_eq!(r.j, 2);
        for x in [0u64, 1, 2, 7, 30, 64] {
            let got = eval_memo(&r.result, &nat(x), &FinSet::new(), Budget::default()).unwrap().0;
            assert_eq!(got, nat(0), "x = {x}");
        }
    }

    #[test]
    fn list_length_matches() {
        let (env, r) = reduce(L, "L");
        let mut inputs: Vec<Nat> = (0..=40u64).map(nat).collect();
        inputs.push(list_encode(&[nat(1), nat(0), nat(2)]));
        for x in inputs {
            let want = run_clausal(&env, "L", &x).unwrap();
            let rep = eval_report(&r.result, &x, &FinSet::new(), Budget::default()).unwrap();
            assert_eq!(rep.value, want, "x = {x}");
            for t in &rep.snr {
                assert!(t.within_bound());
            }
        }
    }

    #[test]
    fn bound_and_limit_are_checked() {
        let env = Env::parse("def f { f(0) = 0; f(S(u)) = S(S(f(u))); }").unwrap();
        let e = reduce_bounded_nested_to_snr(&env, "f", &PolyBound::N, &Funcs::new(), SnrOptions::default()).unwrap_err();
        assert!(matches!(e, CompileError::BoundViolated { .. }), "{e}");
        let env = Env::parse(NESTED).unwrap();
        let opts = SnrOptions {
            unroll_limit: 1,
            ..SnrOptions::default()
        };
        let e = reduce_bounded_nested_to_snr(&env, "f", &PolyBound::N, &Funcs::new(), opts).unwrap_err();
        assert!(matches!(e, CompileError::TooManyCalls { calls: 2, .. }));
    }

    #[test]
    fn contexts_keep_every_binding() {
        let funcs = Funcs::new();
        let mut l = Lets::new(Shape::node(Shape::leaf("v"), Shape::leaf("b")), &funcs);
        for (i, n) in ["a1", "a2", "a3", "a4", "a5"].iter().enumerate() {
            l.bind(n, l.term(&add(var("v"), Term::numeral(i as u64))).unwrap());
        }
        let body = l.term(&Term::pair(var("a5"), Term::pair(var("b"), var("a1")))).unwrap();
        let d = l.finish(body);
        let got = crate::eval::apply(&d, &crate::codec::pair(&nat(10), &nat(3))).unwrap();
        assert_eq!(got, crate::codec::pair(&nat(14), &crate::codec::pair(&nat(3), &nat(10))));
    }

    #[test]
    fn digits_decode_most_significant_first() {
        let funcs = Funcs::new();
        let mut l = Lets::new(Shape::node(Shape::leaf("v"), Shape::leaf("b")), &funcs);
        decode(&mut l, 2).unwrap();
        let body = l.term(&Term::pair(var("d3"), Term::pair(var("d2"), Term::pair(var("d1"), var("d0"))))).unwrap();
        let d = l.finish(body);
        let v = 7u64 * 25 * 25 * 25 + 2 * 25 * 25 + 24 * 25 + 13;
        let got = crate::eval::apply(&d, &crate::codec::pair(&nat(v), &nat(25))).unwrap();
        assert_eq!(got, crate::codec::tuple(&[nat(7), nat(2), nat(24), nat(13)]).unwrap());
    }
}
