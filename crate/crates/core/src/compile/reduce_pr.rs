//! Recursive clausal definitions as primitive recursion.
//!
//! A tagged dispatcher `h` runs one clause of `f` on `(x, c)`, where `c`
//! lists the recursive results obtained so far. It answers `(0, t)` to
//! request `f(t)` and `(1, y)` when `f(x) = y`. The stepper `f1` manipulates
//! a stack of such pairs: it pushes requests, pops answers into the list of
//! the entry below, and idles once the bottom entry is answered. Iterating
//! `f1` often enough from `((x, 0), 0)` leaves the answer at the bottom.

use std::collections::BTreeSet;
use std::fmt;

use super::explicit::compile_explicit;
use super::formula::Funcs;
use super::prims::{bin, head, konst, tail, zero};
use super::CompileError;
use crate::algebra::Derivation;
use crate::clausal::{
    check_recursive_restrictions, check_refinement, parse_cl, tree_to_def, ClausalDef, Env, RefineError, Refined,
    Term, Test, Tree,
};

#[derive(Debug, Clone)]
pub struct ReductionArtifacts {
    /// The explicit tagged dispatcher.
    pub h_def: ClausalDef,
    /// Appends one element to a list of fewer than `J` elements.
    pub app_def: ClausalDef,
    /// The stack stepper.
    pub f1_def: ClausalDef,
    /// Most recursive applications on one path of the definition.
    pub j: usize,
    pub mu_desc: String,
    pub result: Derivation,
}

impl ReductionArtifacts {
    /// `base` extended by the generated definitions.
    pub fn env(&self, base: &Env) -> Result<Env, RefineError> {
        let mut env = base.clone();
        env.push(self.h_def.clone())?;
        env.push(self.app_def.clone())?;
        env.push(self.f1_def.clone())?;
        Ok(env)
    }
}

impl fmt::Display for ReductionArtifacts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# dispatcher")?;
        writeln!(f, "{}", self.h_def)?;
        writeln!(f, "# append")?;
        writeln!(f, "{}", self.app_def)?;
        writeln!(f, "# stepper")?;
        writeln!(f, "{}", self.f1_def)?;
        writeln!(f, "J = {}", self.j)?;
        writeln!(f, "iterations = {}", self.mu_desc)?;
        write!(f, "result = {}", self.result)
    }
}

fn tree_names(t: &Tree, out: &mut BTreeSet<String>) {
    match t {
        Tree::Leaf(t) => t.vars(out),
        Tree::Apply { arg, var, next, .. } => {
            arg.vars(out);
            out.insert(var.clone());
            tree_names(next, out);
        }
        Tree::Split { test, yes, no } => {
            match test {
                Test::ZeroSucc { v, w } => {
                    out.insert(v.clone());
                    out.insert(w.clone());
                }
                Test::ZeroPair { v, w1, w2 } => {
                    out.extend([v.clone(), w1.clone(), w2.clone()]);
                }
                Test::Rel { lhs, rhs, .. } => {
                    lhs.vars(out);
                    rhs.vars(out);
                }
                Test::Oracle(t) => t.vars(out),
            }
            tree_names(yes, out);
            tree_names(no, out);
        }
    }
}

fn fresh(used: &mut BTreeSet<String>, base: &str) -> String {
    let mut k = 0;
    loop {
        let name = format!("{base}{k}");
        if used.insert(name.clone()) {
            return name;
        }
        k += 1;
    }
}

/// Most self-applications on one path.
pub(crate) fn max_calls(t: &Tree, name: &str) -> usize {
    match t {
        Tree::Leaf(_) => 0,
        Tree::Apply { func, next, .. } => usize::from(func == name) + max_calls(next, name),
        Tree::Split { yes, no, .. } => max_calls(yes, name).max(max_calls(no, name)),
    }
}

struct Dispatch<'a> {
    name: &'a str,
    used: BTreeSet<String>,
    lists: Vec<String>,
}

impl Dispatch<'_> {
    fn list(&mut self, i: usize) -> String {
        while self.lists.len() <= i {
            let c = fresh(&mut self.used, "c");
            self.lists.push(c);
        }
        self.lists[i].clone()
    }

    fn transform(&mut self, t: &Tree, i: usize) -> Tree {
        match t {
            Tree::Leaf(y) => Tree::Leaf(Term::pair(Term::numeral(1), y.clone())),
            Tree::Apply { func, arg, var, next } if func == self.name => {
                // The i-th application reads the i-th entry of the result list.
                let v = self.list(i);
                let rest = self.list(i + 1);
                Tree::Split {
                    test: Test::ZeroPair {
                        v,
                        w1: var.clone(),
                        w2: rest,
                    },
                    yes: Box::new(Tree::Leaf(Term::pair(Term::Zero, arg.clone()))),
                    no: Box::new(self.transform(next, i + 1)),
                }
            }
            Tree::Apply { func, arg, var, next } => Tree::Apply {
                func: func.clone(),
                arg: arg.clone(),
                var: var.clone(),
                next: Box::new(self.transform(next, i)),
            },
            Tree::Split { test, yes, no } => Tree::Split {
                test: test.clone(),
                yes: Box::new(self.transform(yes, i)),
                no: Box::new(self.transform(no, i)),
            },
        }
    }
}

/// The tagged dispatcher of `f` as an explicit definition named `hname`.
pub(crate) fn dispatcher(f: &Refined, hname: &str) -> ClausalDef {
    let mut used = BTreeSet::from([f.param.clone()]);
    tree_names(&f.tree, &mut used);
    let hv = fresh(&mut used, "v");
    let mut d = Dispatch {
        name: &f.name,
        used,
        lists: Vec::new(),
    };
    let c0 = d.list(0);
    let body = d.transform(&f.tree, 0);
    let tree = Tree::Split {
        test: Test::ZeroPair {
            v: hv.clone(),
            w1: f.param.clone(),
            w2: c0,
        },
        yes: Box::new(Tree::Leaf(Term::Zero)),
        no: Box::new(body),
    };
    tree_to_def(hname, &hv, &tree)
}

/// `app((d, y))` replaces the terminating 0 of the list `d` by `y`, for
/// lists of fewer than `j` elements.
pub(crate) fn append_def(name: &str, j: usize) -> ClausalDef {
    let mut src = format!("def {name} {{\n  {name}((0, y)) = y;\n");
    for n in 1..j {
        let mut pat = "0".to_string();
        let mut res = "y".to_string();
        for k in (1..=n).rev() {
            pat = format!("(a{k}, {pat})");
            res = format!("(a{k}, {res})");
        }
        src.push_str(&format!("  {name}(({pat}, y)) = {res};\n"));
    }
    src.push_str("}\n");
    let def = parse_cl(&src).expect("generated append parses").remove(0);
    check_refinement(&def).expect("generated append refines").strict
}

pub(crate) fn stepper_def(name: &str, h: &str, app: &str) -> ClausalDef {
    let pre = format!("s = (top, s1) & top = (x, c) & {h}(top) = r");
    let src = format!(
        "def {name} {{
  s = 0 -> {name}(s) = 0;
  s = (top, s1) & top = 0 -> {name}(s) = s;
  {pre} & r = 0 -> {name}(s) = s;
  {pre} & r = (tag, z) & tag = 0 -> {name}(s) = ((z, 0), s);
  {pre} & r = (tag, z) & tag = (t1, t2) & s1 = 0 -> {name}(s) = s;
  {pre} & r = (tag, z) & tag = (t1, t2) & s1 = (e, s2) & e = 0 -> {name}(s) = s;
  {pre} & r = (tag, z) & tag = (t1, t2) & s1 = (e, s2) & e = (w, d) & {app}((d, (z, 0))) = d2 -> {name}(s) = ((w, d2), s2);
}}
"
    );
    // The parser only needs the applied names to be declared.
    let decl = format!("def {h} {{ {h}(x) = 0; }}\ndef {app} {{ {app}(x) = 0; }}\n{src}");
    parse_cl(&decl).expect("generated stepper parses").remove(2)
}

/// Reduces the recursive definition `fname` of `env` to a PRA derivation
/// `T ∘ h ∘ H ∘ f1^μ(x)((x, 0), 0)` with `μ(x) = 2·J^(x+1) + 2x`.
/// Functions applied by `fname` must already be compiled into `funcs`.
pub fn reduce_recursive_to_pr(env: &Env, fname: &str, funcs: &Funcs) -> Result<ReductionArtifacts, CompileError> {
    let f = env.get(fname).ok_or_else(|| CompileError::UnknownFunction(fname.to_string()))?;
    check_recursive_restrictions(f)?;
    let j = max_calls(&f.tree, fname);

    let (hname, aname, f1name) = (format!("{fname}_h"), format!("{fname}_app"), format!("{fname}_f1"));
    let h_def = dispatcher(f, &hname);
    let app_def = append_def(&aname, j);
    let f1_def = stepper_def(&f1name, &hname, &aname);

    let mut funcs = funcs.clone();
    let hd = compile_explicit(&check_refinement(&h_def)?, &funcs)?;
    funcs.insert(hname, hd.clone());
    let ad = compile_explicit(&check_refinement(&app_def)?, &funcs)?;
    funcs.insert(aname, ad);
    let f1 = compile_explicit(&check_refinement(&f1_def)?, &funcs)?;

    let c = || Derivation::comp;
    let id = Derivation::id;
    // iter((n, s)) = f1^n(s); the step function reads f(k) from ((k, f(k)), s).
    let iter = Derivation::pr(id(), c()(f1, c()(tail(), head())));
    // pow((x, _)) = J^(x+1).
    let jk = konst(j as u64);
    let pow = Derivation::pr(jk.clone(), bin(Derivation::mul(), jk, c()(tail(), head())));
    let pow_x = c()(pow, Derivation::pair(id(), zero()));
    let mu = bin(
        Derivation::add(),
        bin(Derivation::mul(), konst(2), pow_x),
        bin(Derivation::add(), id(), id()),
    );
    let start = Derivation::pair(Derivation::pair(id(), zero()), zero());
    let run = c()(iter, Derivation::pair(mu, start));
    let result = c()(tail(), c()(hd, c()(head(), run)));

    Ok(ReductionArtifacts {
        h_def,
        app_def,
        f1_def,
        j,
        mu_desc: format!("2*{j}^(x+1) + 2*x"),
        result,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{validate, AlgebraClass};
    use crate::clausal::{eval_clausal, run_clausal};
    use crate::codec::{list_encode, nat, pair, FinSet, Nat};
    use crate::eval::{eval_memo, Budget};

    const NESTED: &str = "def f { f(0) = 0; f(S(u)) = f(f(u)); }";
    const L: &str = "def L { L(0) = 0; L((v,w)) = S(L(w)); }";

    #[test]
    fn dispatcher_shape() {
        let env = Env::parse(NESTED).unwrap();
        let h = dispatcher(env.get("f").unwrap(), "h");
        assert_eq!(h.clauses.len(), 5);
        let r = check_refinement(&h).unwrap();
        assert_eq!(max_calls(&r.tree, "f"), 0);
        let henv = Env::new(&[h]).unwrap();
        // No results yet: request f(u) for x = S(u).
        let req = run_clausal(&henv, "h", &pair(&nat(4), &nat(0))).unwrap();
        assert_eq!(req, pair(&nat(0), &nat(3)));
        // One result z1: request f(z1).
        let c = list_encode(&[nat(2)]);
        assert_eq!(run_clausal(&henv, "h", &pair(&nat(4), &c)).unwrap(), pair(&nat(0), &nat(2)));
        // Base case answers with tag 1.
        assert_eq!(run_clausal(&henv, "h", &pair(&nat(0), &nat(0))).unwrap(), pair(&nat(1), &nat(0)));
    }

    #[test]
    fn append_lists() {
        let env = Env::new(&[append_def("app", 3)]).unwrap();
        for len in 0..3 {
            let d: Vec<Nat> = (0..len).map(|k| nat(k as u64 + 4)).collect();
            let x = pair(&list_encode(&d), &pair(&nat(9), &nat(0)));
            let mut want = d.clone();
            want.push(nat(9));
            assert_eq!(run_clausal(&env, "app", &x).unwrap(), list_encode(&want));
        }
    }

    fn check(src: &str, name: &str, inputs: impl IntoIterator<Item = Nat>) {
        let env = Env::parse(src).unwrap();
        let a = reduce_recursive_to_pr(&env, name, &Funcs::new()).unwrap();
        assert!(validate(&a.result, AlgebraClass::PRA));
        for x in inputs {
            let want = run_clausal(&env, name, &x).unwrap();
            let got = eval_memo(&a.result, &x, &FinSet::new(), Budget::default()).unwrap().0;
            assert_eq!(got, want, "{name} at {x}");
        }
    }

    #[test]
    fn nested_example() {
        check(NESTED, "f", (0..=5u64).map(nat));
    }

    #[test]
    fn list_length() {
        let lists = [vec![], vec![0u64], vec![1], vec![0, 0]];
        check(L, "L", (0..=6u64).map(nat).chain(lists.iter().map(|l| list_encode(&l.iter().map(|&v| nat(v)).collect::<Vec<_>>()))));
    }

    #[test]
    fn stepper_idles_after_the_answer() {
        let env = Env::parse(L).unwrap();
        let a = reduce_recursive_to_pr(&env, "L", &Funcs::new()).unwrap();
        let full = a.env(&env).unwrap();
        let mut s = pair(&pair(&nat(2), &nat(0)), &nat(0));
        let mut seen = Vec::new();
        for _ in 0..12 {
            seen.push(s.clone());
            s = eval_clausal(&full, "L_f1", &s, &FinSet::new(), Budget::default()).unwrap().0;
        }
        let last = seen.last().unwrap().clone();
        assert_eq!(s, last);
        let top = crate::codec::head(&last);
        let answer = run_clausal(&full, "L_h", &top).unwrap();
        assert_eq!(crate::codec::tail(&answer), run_clausal(&env, "L", &nat(2)).unwrap());
    }
}
