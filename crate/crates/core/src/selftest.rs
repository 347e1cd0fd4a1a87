//! Acceptance checks 1 to 12, each against an oracle that does not share
//! code with the part it checks. Used by `funalg selftest` and the
//! acceptance test target.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AlgebraClass, Derivation, Enumerator, OpSym};
use crate::clausal::{eval_clausal, parse_term, Env, Term};
use crate::codec::{head, nat, pair, seq_decode, seq_encode, seq_len, tail, unpair, FinSet, Nat};
use crate::compile::{
    compile_explicit, compile_formula, compile_term, eval_term, reduce_bounded_nested_to_snr, reduce_recursive_to_pr,
    Formula, Funcs, SnrOptions, VarCtx,
};
use crate::corpus;
use crate::eval::{eval, eval_memo, eval_report, Budget, SnrTrace};
use crate::harness::predicates::{neighbours, parity, top_member};
use crate::harness::{certify_bound, char_run, scaling_study, CharInput, CharMode, Certificate};

pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} {:<22} {verdict}  {}", self.id, self.name, self.detail)
    }
}

type Check = fn() -> Result<String, String>;

pub const CRITERIA: [(u8, &str, Check); 12] = [
    (1, "pairing", pairing),
    (2, "sequences", sequences),
    (3, "term-compiler", terms),
    (4, "formula-compiler", formulas),
    (5, "mu-semantics", mu_semantics),
    (6, "explicit-clauses", explicit_clauses),
    (7, "reduction-to-pr", reduction_to_pr),
    (8, "reduction-to-snr", reduction_to_snr),
    (9, "course-of-values", course_of_values),
    (10, "polynomial-bounds", polynomial_bounds),
    (11, "enumeration", enumeration),
    (12, "characterization", characterization),
];

pub fn run(id: u8) -> Option<Outcome> {
    let &(id, name, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let (passed, detail) = match check() {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Some(Outcome { id, name, passed, detail })
}

/// Runs every criterion, reporting each as it finishes. True when all pass.
pub fn run_all(mut report: impl FnMut(&Outcome)) -> bool {
    let mut ok = true;
    for c in CRITERIA {
        let o = run(c.0).expect("listed");
        ok &= o.passed;
        report(&o);
    }
    ok
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn value(d: &Derivation, x: &Nat, oracle: &FinSet) -> Result<Nat, String> {
    eval(d, x, oracle, Budget::default()).map(|r| r.0).map_err(|e| e.to_string())
}

fn clausal(env: &Env, f: &str, x: &Nat, oracle: &FinSet) -> Result<Nat, String> {
    eval_clausal(env, f, x, oracle, Budget::default())
        .map(|r| r.0)
        .map_err(|e| format!("{f}({x}): {e}"))
}

fn pairing() -> Result<String, String> {
    // Walk the diagonals: z = 1, 2, ... visits (0,0), (0,1), (1,0), (0,2), ...
    let (mut x, mut y) = (0u64, 0u64);
    for z in 1..=10_000u64 {
        let z = nat(z);
        let (a, b) = unpair(&z).map_err(|e| e.to_string())?;
        ensure(a == nat(x) && b == nat(y), || format!("unpair({z}) = ({a}, {b}), walk gives ({x}, {y})"))?;
        ensure(pair(&a, &b) == z, || format!("pair(unpair({z})) != {z}"))?;
        ensure(head(&z) < z && tail(&z) < z, || format!("head or tail of {z} not smaller"))?;
        if y == 0 {
            (x, y) = (0, x + 1);
        } else {
            (x, y) = (x + 1, y - 1);
        }
    }
    for x in 0..=80u64 {
        for y in 0..=80u64 {
            let s = x + y;
            let z = pair(&nat(x), &nat(y));
            ensure(z == nat(s * (s + 1) / 2 + x + 1), || format!("pair({x}, {y}) = {z}"))?;
            ensure(unpair(&z) == Ok((nat(x), nat(y))), || format!("unpair(pair({x}, {y}))"))?;
        }
    }
    Ok("z in [1, 10^4] and x, y <= 80".into())
}

fn sequences() -> Result<String, String> {
    let mut count = 0;
    for n in 0..=12u32 {
        for bits in 0..(1u32 << n) {
            let v: Vec<bool> = (0..n).map(|i| bits >> (n - 1 - i) & 1 == 1).collect();
            let code = seq_encode(&v);
            ensure(code == nat(((1u64 << n) | bits as u64) as u64), || format!("code of {v:?}"))?;
            ensure(seq_decode(&code).as_ref() == Some(&v), || format!("decode of {code}"))?;
            count += 1;
        }
    }
    ensure(seq_len(&nat(1)) == nat(0) && seq_len(&nat(20)) == nat(4), || "seq_len of 1 or 20".into())?;
    for i in 0..=20usize {
        let zeros = seq_encode(&vec![false; i]);
        let ones = seq_encode(&vec![true; i]);
        ensure(zeros == Nat::one() << i, || format!("0^{i} -> {zeros}"))?;
        ensure(ones == (Nat::one() << (i + 1)) - 1u32, || format!("1^{i} -> {ones}"))?;
    }
    Ok(format!("{count} sequences round-trip"))
}

struct Explicit {
    env: Env,
    funcs: Funcs,
}

fn explicit() -> &'static Result<Explicit, String> {
    static CELL: OnceLock<Result<Explicit, String>> = OnceLock::new();
    CELL.get_or_init(|| {
        let env = Env::parse(corpus::EXPLICIT).map_err(|e| e.to_string())?;
        let mut funcs = Funcs::new();
        for r in env.defs() {
            let d = compile_explicit(r, &funcs).map_err(|e| e.to_string())?;
            funcs.insert(r.name.clone(), d);
        }
        Ok(Explicit { env, funcs })
    })
}

fn test_oracle() -> FinSet {
    [1u64, 4, 5, 9, 12, 13].into_iter().map(nat).collect()
}

/// Every assignment of `[0, 15]` to `vars`.
fn grid(vars: &[String]) -> Vec<HashMap<String, Nat>> {
    let mut out = vec![HashMap::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|m| {
                (0..16u64).map(move |k| {
                    let mut m = m.clone();
                    m.insert(v.clone(), nat(k));
                    m
                })
            })
            .collect();
    }
    out
}

fn grid_check(
    label: &str,
    vars: &[String],
    d: &Derivation,
    oracle: &FinSet,
    mut want: impl FnMut(&HashMap<String, Nat>) -> Nat,
) -> Result<usize, String> {
    let ctx = VarCtx::new(vars).map_err(|e| e.to_string())?;
    let points = grid(vars);
    for vals in &points {
        let packed: Vec<Nat> = vars.iter().map(|v| vals[v].clone()).collect();
        let got = value(d, &ctx.pack(&packed), oracle)?;
        let w = want(vals);
        ensure(got == w, || format!("{label} at {vals:?}: compiled {got}, direct {w}"))?;
    }
    Ok(points.len())
}

fn term_vars(t: &Term) -> Vec<String> {
    let mut s = std::collections::BTreeSet::new();
    t.vars(&mut s);
    if s.is_empty() {
        s.insert("x".to_string());
    }
    s.into_iter().collect()
}

fn terms() -> Result<String, String> {
    let ex = explicit().as_ref()?;
    let oracle = FinSet::new();
    let mut app = |f: &str, a: &Nat| clausal(&ex.env, f, a, &oracle).expect("corpus functions are total");
    let (mut n, mut points) = (0, 0);
    for line in corpus::term_lines() {
        let t = parse_term(line, &["double", "square", "fst"]).map_err(|e| format!("{line}: {e}"))?;
        let vars = term_vars(&t);
        let ctx = VarCtx::new(&vars).map_err(|e| e.to_string())?;
        let d = compile_term(&t, &ctx, &ex.funcs).map_err(|e| format!("{line}: {e}"))?;
        points += grid_check(line, &vars, &d, &oracle, |vals| eval_term(&t, vals, &mut app))?;
        n += 1;
    }
    ensure(n >= 20, || format!("only {n} terms"))?;
    Ok(format!("{n} terms, {points} assignments"))
}

fn formula_corpus() -> Vec<Formula> {
    let (x, y, z, w) = (Term::var("x"), Term::var("y"), Term::var("z"), Term::var("w"));
    let add = |a: Term, b: Term| Term::Add(Box::new(a), Box::new(b));
    let mul = |a: Term, b: Term| Term::Mul(Box::new(a), Box::new(b));
    vec![
        Formula::lt(x.clone(), y.clone()),
        Formula::eq(x.clone(), y.clone()),
        Formula::OracleMem(x.clone()),
        Formula::lt(x.clone(), y.clone()).negate(),
        Formula::OracleMem(x.clone()).or(Formula::eq(y.clone(), Term::numeral(3))),
        Formula::lt(x.clone(), y.clone()).and(Formula::OracleMem(y.clone())),
        Formula::exists_below("z", y.clone(), Formula::eq(add(z.clone(), z.clone()), x.clone())),
        Formula::exists_below(
            "z",
            Term::succ(x.clone()),
            Formula::OracleMem(z.clone()).and(Formula::lt(y.clone(), z.clone())),
        ),
        Formula::exists_eq("w", "double", x.clone(), Formula::lt(w.clone(), add(y.clone(), Term::numeral(3)))),
        Formula::exists_eq(
            "w",
            "square",
            y.clone(),
            Formula::exists_below("z", w.clone(), Formula::eq(mul(z.clone(), x.clone()), add(w.clone(), Term::numeral(1)))),
        ),
        Formula::exists_below("z", x.clone(), Formula::eq(mul(z.clone(), z.clone()), y.clone()))
            .negate()
            .or(Formula::eq(x.clone(), Term::numeral(0))),
        Formula::exists_eq("w", "fst", Term::pair(x.clone(), y.clone()), Formula::OracleMem(w.clone())),
        Formula::OracleMem(add(x.clone(), y.clone())).negate().and(Formula::lt(y, Term::succ(x)).negate()),
    ]
}

fn formulas() -> Result<String, String> {
    let ex = explicit().as_ref()?;
    let oracle = test_oracle();
    let empty = FinSet::new();
    let mut app = |f: &str, a: &Nat| clausal(&ex.env, f, a, &empty).expect("corpus functions are total");
    let vars = ["x".to_string(), "y".to_string()];
    let ctx = VarCtx::new(&vars).map_err(|e| e.to_string())?;
    let corpus = formula_corpus();
    let mut points = 0;
    for phi in &corpus {
        let d = compile_formula(phi, &ctx, &ex.funcs).map_err(|e| format!("{phi}: {e}"))?;
        points += grid_check(&phi.to_string(), &vars, &d, &oracle, |vals| {
            if phi.holds(vals, &oracle, &mut app) {
                nat(1)
            } else {
                nat(0)
            }
        })?;
    }
    Ok(format!("{} formulas, {points} assignments", corpus.len()))
}

/// A random derivation of `class` with depth at most `depth`.
pub fn random_derivation(class: AlgebraClass, depth: usize, rng: &mut impl Rng) -> Derivation {
    let ops = class.allowed();
    let leaves: Vec<OpSym> = ops.iter().copied().filter(|o| o.arity() == 0).collect();
    let inner: Vec<OpSym> = ops.iter().copied().filter(|o| o.arity() > 0).collect();
    if depth <= 1 || rng.gen_bool(0.3) {
        return Derivation::leaf(*leaves.choose(rng).expect("leaves"));
    }
    let op = *inner.choose(rng).expect("inner operators");
    let children = (0..op.arity()).map(|_| random_derivation(class, depth - 1, rng)).collect();
    Derivation::new(op, children).expect("arity respected")
}

fn mu_semantics() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let budget = Budget {
        max_steps: 100_000,
        ..Budget::default()
    };
    let oracle = test_oracle();
    let (mut tested, mut found) = (0, 0);
    while tested < 50 {
        let g = random_derivation(AlgebraClass::DA, 3, &mut rng);
        let bnd = rng.gen_range(0..=50u64);
        let p = nat(rng.gen_range(0..=50u64));
        // Brute-force linear search with g evaluated point by point.
        let mut want = Some(nat(bnd));
        for z in 0..bnd {
            match eval(&g, &pair(&nat(z), &p), &oracle, budget) {
                Ok((v, _)) if v.is_one() => {
                    want = Some(nat(z));
                    break;
                }
                Ok(_) => {}
                Err(_) => {
                    want = None;
                    break;
                }
            }
        }
        let Some(want) = want else { continue };
        let got = value(&Derivation::mu(g.clone()), &pair(&nat(bnd), &p), &oracle)?;
        ensure(got == want, || format!("mu({}) at ({bnd}, {p}): {got}, search gives {want}", crate::algebra::d_print(&g)))?;
        found += usize::from(want != nat(bnd));
        tested += 1;
    }
    Ok(format!("{tested} derivations, {found} with a witness below the bound"))
}

fn explicit_clauses() -> Result<String, String> {
    let ex = explicit().as_ref()?;
    let oracle = test_oracle();
    for r in ex.env.defs() {
        let d = &ex.funcs[&r.name];
        for x in 0..=200u64 {
            let x = nat(x);
            let want = clausal(&ex.env, &r.name, &x, &oracle)?;
            let got = value(d, &x, &oracle)?;
            ensure(got == want, || format!("{} at {x}: compiled {got}, clauses {want}", r.name))?;
        }
    }
    Ok(format!("{} definitions on [0, 200]", ex.env.defs().len()))
}

fn lists_upto(max_code: u64) -> Vec<Nat> {
    (0..=max_code).map(nat).collect()
}

fn reduction_to_pr() -> Result<String, String> {
    let mut checked = 0;
    for (src, f) in [(corpus::NESTED, "f"), (corpus::LISTS, "L")] {
        let env = Env::parse(src).map_err(|e| e.to_string())?;
        let a = reduce_recursive_to_pr(&env, f, &Funcs::new()).map_err(|e| e.to_string())?;
        ensure(crate::algebra::validate(&a.result, AlgebraClass::PRA), || format!("{f} result not in PRA"))?;
        for x in lists_upto(6) {
            let want = clausal(&env, f, &x, &FinSet::new())?;
            let got = eval_memo(&a.result, &x, &FinSet::new(), Budget::default())
                .map_err(|e| format!("{f}({x}): {e}"))?
                .0;
            ensure(got == want, || format!("{f}({x}): reduced {got}, clauses {want}"))?;
            checked += 1;
        }
    }
    Ok(format!("f and L on x <= 6 ({checked} runs)"))
}

struct SnrRuns {
    runs: usize,
    mismatch: Option<String>,
    traces: Vec<SnrTrace>,
}

/// Both recursive corpus programs reduced to special nested recursion and
/// run on `x <= 64`, with their expansion traces.
fn snr_runs() -> &'static Result<SnrRuns, String> {
    static CELL: OnceLock<Result<SnrRuns, String>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut out = SnrRuns {
            runs: 0,
            mismatch: None,
            traces: Vec::new(),
        };
        let bound = crate::algebra::PolyBound::N;
        for (src, f) in [(corpus::NESTED, "f"), (corpus::LISTS, "L")] {
            let env = Env::parse(src).map_err(|e| e.to_string())?;
            let r = reduce_bounded_nested_to_snr(&env, f, &bound, &Funcs::new(), SnrOptions::default())
                .map_err(|e| e.to_string())?;
            if !crate::algebra::validate(&r.result, AlgebraClass::TA) {
                return Err(format!("{f} result not in TA"));
            }
            let budget = Budget {
                max_steps: 50_000_000,
                ..Budget::default()
            };
            for x in lists_upto(64) {
                let rep = eval_report(&r.result, &x, &FinSet::new(), budget).map_err(|e| format!("{f}({x}): {e}"))?;
                let want = clausal(&env, f, &x, &FinSet::new())?;
                if rep.value != want && out.mismatch.is_none() {
                    out.mismatch = Some(format!("{f}({x}): reduced {}, clauses {want}", rep.value));
                }
                out.traces.extend(rep.snr);
                out.runs += 1;
            }
        }
        Ok(out)
    })
}

fn reduction_to_snr() -> Result<String, String> {
    let r = snr_runs().as_ref()?;
    match &r.mismatch {
        Some(m) => Err(m.clone()),
        None => Ok(format!("f and L on x <= 64 ({} runs)", r.runs)),
    }
}

fn course_of_values() -> Result<String, String> {
    let r = snr_runs().as_ref()?;
    let mut traces = r.traces.clone();
    // Nested-recursion predicates from the harness add their own runs.
    let nested = crate::harness::predicates::nested_parity();
    for x in 0..=200u64 {
        let rep = eval_report(&nested, &nat(x), &FinSet::new(), Budget::default()).map_err(|e| e.to_string())?;
        traces.extend(rep.snr);
    }
    let worst = traces.iter().find(|t| !t.within_bound());
    if let Some(t) = worst {
        return Err(format!("{} expansions with top {} at parameter {}", t.expanded, t.top, t.param));
    }
    let most = traces.iter().map(|t| t.expanded).max().unwrap_or(0);
    Ok(format!("{} traces, at most {most} expansions each", traces.len()))
}

fn polynomial_bounds() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let samples: Vec<Nat> = (0..=1000u64).map(nat).collect();
    let budget = Budget {
        max_steps: 200_000,
        max_bits: 100_000,
    };
    let (mut derivs, mut checked, mut skipped) = (0, 0, 0);
    for class in [AlgebraClass::DA, AlgebraClass::SA, AlgebraClass::TA] {
        for _ in 0..70 {
            let d = random_derivation(class, 4, &mut rng);
            match certify_bound(&d, &samples, budget).map_err(|e| e.to_string())? {
                Certificate::Holds { checked: c, skipped: s } => {
                    checked += c;
                    skipped += s;
                }
                Certificate::Counterexample { x, value, bound } => {
                    return Err(format!("{} at {x}: {value} > {bound}", crate::algebra::d_print(&d)));
                }
            }
            derivs += 1;
        }
    }
    ensure(skipped * 20 <= checked, || format!("{skipped} samples ran out of budget, {checked} checked"))?;
    Ok(format!("{derivs} derivations, {checked} samples checked, {skipped} over budget"))
}

fn indices_descend(e: &mut Enumerator, d: &Derivation, index: &BigUint) -> Result<(), String> {
    for c in d.children() {
        let ci = e.index_of(c).map_err(|e| e.to_string())?;
        ensure(&ci < index, || format!("child index {ci} not below {index}"))?;
        indices_descend(e, c, &ci)?;
    }
    Ok(())
}

fn enumeration() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut enums: Vec<Enumerator> = AlgebraClass::ALL.into_iter().map(Enumerator::new).collect();
    for _ in 0..500 {
        let e = enums.choose_mut(&mut rng).expect("classes");
        let d = random_derivation(e.class(), 5, &mut rng);
        let i = e.index_of(&d).map_err(|e| e.to_string())?;
        let back = e.derivation_at(&i).map_err(|e| e.to_string())?;
        ensure(back == d, || format!("index {i} of {} decodes differently", crate::algebra::d_print(&d)))?;
        indices_descend(e, &d, &i)?;
    }
    let first = Enumerator::new(AlgebraClass::DA).derivation_at(&BigUint::zero()).map_err(|e| e.to_string())?;
    ensure(first.op() == OpSym::OracleChar, || "index 0 is not X".into())?;
    Ok("500 random derivations".into())
}

fn random_set(rng: &mut impl Rng) -> FinSet {
    let density = rng.gen_range(0.05..0.95);
    (0..64u64).filter(|_| rng.gen_bool(density)).map(nat).collect()
}

fn characterization() -> Result<String, String> {
    let b = Budget::default();
    let p = parity();
    for x in 0..=256u64 {
        let input = CharInput::Number(nat(x));
        let (got, _) = char_run(&p.derivation, CharMode::Zero, &input, b).map_err(|e| e.to_string())?;
        ensure(got == (x % 2 == 0), || format!("parity at {x}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (scan, top) = (neighbours(), top_member());
    for _ in 0..100 {
        let s = random_set(&mut rng);
        let want = s.elements().windows(2).any(|w| &w[0] + 1u32 == w[1]);
        let input = CharInput::Set(s.clone());
        let (got, _) = char_run(&scan.derivation, CharMode::One, &input, b).map_err(|e| e.to_string())?;
        ensure(got == want, || format!("neighbours on {:?}", s.elements()))?;
        let (got, _) = char_run(&top.derivation, CharMode::One, &input, b).map_err(|e| e.to_string())?;
        ensure(got == !s.is_empty(), || format!("top member on {:?}", s.elements()))?;
    }
    let report = scaling_study(&scan.derivation, CharMode::One, &[8, 16, 32, 64], 5, 12, b).map_err(|e| e.to_string())?;
    let e = report.fitted_exponent.ok_or("no exponent fitted")?;
    ensure(report.truncated_at.is_none() && e <= 2.0, || format!("fitted exponent {e:.3}"))?;
    Ok(format!("parity on [0, 256], 100 sets, fitted exponent {e:.3}"))
}
