//! Running 0-1 valued derivations as predicates, checking polynomial bounds
//! on samples, and measuring how evaluation cost grows with input size.

pub mod predicates;

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{poly_bound, BoundError, Derivation};
use crate::codec::{nat, FinSet, Nat};
use crate::eval::{eval_memo, Budget, EvalError, Meter};

/// How a predicate receives its input: a number with the empty oracle, or a
/// finite set as oracle with the argument fixed to `‖X‖`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharMode {
    Zero,
    One,
}

impl FromStr for CharMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zero" => Ok(CharMode::Zero),
            "one" => Ok(CharMode::One),
            _ => Err(format!("unknown mode `{s}` (expected zero or one)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CharInput {
    Number(Nat),
    Set(FinSet),
}

impl CharInput {
    /// The argument and oracle the derivation is run on.
    pub fn arg_and_oracle(&self) -> (Nat, FinSet) {
        match self {
            CharInput::Number(x) => (x.clone(), FinSet::new()),
            CharInput::Set(s) => (s.size(), s.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("predicate returned {0}, not 0 or 1")]
    NotZeroOne(Nat),
    #[error("{mode:?} mode needs a {wanted} input")]
    ModeMismatch { mode: CharMode, wanted: &'static str },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Unbounded(#[from] BoundError),
    #[error("sizes must be ascending")]
    SizesNotAscending,
}

/// Decides `input` with `d`: true when the value is 1.
pub fn char_run(d: &Derivation, mode: CharMode, input: &CharInput, budget: Budget) -> Result<(bool, Meter), HarnessError> {
    match (mode, input) {
        (CharMode::Zero, CharInput::Number(_)) | (CharMode::One, CharInput::Set(_)) => {}
        (CharMode::Zero, _) => return Err(HarnessError::ModeMismatch { mode, wanted: "number" }),
        (CharMode::One, _) => return Err(HarnessError::ModeMismatch { mode, wanted: "set" }),
    }
    let (x, oracle) = input.arg_and_oracle();
    let (v, meter) = eval_memo(d, &x, &oracle, budget)?;
    if v.is_zero() {
        Ok((false, meter))
    } else if v.is_one() {
        Ok((true, meter))
    } else {
        Err(HarnessError::NotZeroOne(v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// Every sample that finished within the budget respected the bound.
    Holds { checked: usize, skipped: usize },
    Counterexample { x: Nat, value: Nat, bound: Nat },
}

/// Checks `d(x) ≤ bound(x)` for the samples, where `bound` is the structural
/// polynomial bound of `d`. Samples whose evaluation runs out of budget are
/// counted as skipped.
pub fn certify_bound(d: &Derivation, xs: &[Nat], budget: Budget) -> Result<Certificate, HarnessError> {
    let bound = poly_bound(d)?;
    let (mut checked, mut skipped) = (0, 0);
    for x in xs {
        let value = match eval_memo(d, x, &FinSet::new(), budget) {
            Ok((v, _)) => v,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        let b = bound.eval(x);
        if value > b {
            return Ok(Certificate::Counterexample {
                x: x.clone(),
                value,
                bound: b,
            });
        }
        checked += 1;
    }
    Ok(Certificate::Holds { checked, skipped })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalingRow {
    pub size: u64,
    pub steps: u64,
    pub peak_bits: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of `ln steps` against `ln size`.
    pub fitted_exponent: Option<f64>,
    /// The first size whose evaluation ran out of budget.
    pub truncated_at: Option<u64>,
}

impl ScalingReport {
    fn new(rows: Vec<ScalingRow>, truncated_at: Option<u64>) -> Self {
        let points: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.size > 0 && r.steps > 0)
            .map(|r| ((r.size as f64).ln(), (r.steps as f64).ln()))
            .collect();
        ScalingReport {
            fitted_exponent: slope(&points),
            rows,
            truncated_at,
        }
    }

    /// Mean steps per distinct size, in order.
    pub fn mean_steps(&self) -> Vec<(u64, f64)> {
        let mut out: Vec<(u64, f64, usize)> = Vec::new();
        for r in &self.rows {
            match out.last_mut() {
                Some((s, sum, n)) if *s == r.size => {
                    *sum += r.steps as f64;
                    *n += 1;
                }
                _ => out.push((r.size, r.steps as f64, 1)),
            }
        }
        out.into_iter().map(|(s, sum, n)| (s, sum / n as f64)).collect()
    }

    /// Log-log slopes between consecutive sizes.
    pub fn window_exponents(&self) -> Vec<f64> {
        let means: Vec<(u64, f64)> = self.mean_steps().into_iter().filter(|&(s, m)| s > 0 && m > 0.0).collect();
        means
            .windows(2)
            .map(|w| (w[1].1.ln() - w[0].1.ln()) / ((w[1].0 as f64).ln() - (w[0].0 as f64).ln()))
            .collect()
    }

    /// The local exponent grows by more than one from window to window, as
    /// it does for `2^n` and never for a fixed polynomial with small
    /// lower-order terms.
    pub fn superpolynomial(&self) -> bool {
        let w = self.window_exponents();
        w.len() >= 2 && w.windows(2).all(|p| p[1] > p[0] + 1.0)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("size,steps,peak_bits\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", r.size, r.steps, r.peak_bits));
        }
        if let Some(s) = self.truncated_at {
            out.push_str(&format!("# truncated_at={s}\n"));
        }
        match self.fitted_exponent {
            // Keeps a flat fit from printing as `-0.0000`.
            Some(e) if e.abs() < 5e-5 => out.push_str("# fitted_exponent=0.0000\n"),
            Some(e) => out.push_str(&format!("# fitted_exponent={e:.4}\n")),
            None => out.push_str("# fitted_exponent=nan\n"),
        }
        out
    }
}

impl fmt::Display for ScalingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_csv())
    }
}

fn slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// A random input of the given size: in zero mode a number in
/// `[size - size/4, size]`, in one mode a set with `‖X‖ = size` whose other
/// elements are fair coin flips.
pub fn random_input(mode: CharMode, size: u64, rng: &mut impl Rng) -> CharInput {
    match mode {
        CharMode::Zero => CharInput::Number(nat(rng.gen_range(size - size / 4..=size))),
        CharMode::One => {
            let mut s = FinSet::new();
            if size > 0 {
                s.insert(nat(size - 1));
                for y in 0..size - 1 {
                    if rng.gen_bool(0.5) {
                        s.insert(nat(y));
                    }
                }
            }
            CharInput::Set(s)
        }
    }
}

/// Measures memoized evaluation of `d` on `trials` random inputs per size.
/// The first size whose evaluation exceeds the budget ends the study.
pub fn scaling_study(
    d: &Derivation,
    mode: CharMode,
    sizes: &[u64],
    trials: usize,
    seed: u64,
    budget: Budget,
) -> Result<ScalingReport, HarnessError> {
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HarnessError::SizesNotAscending);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for &size in sizes {
        let inputs: Vec<CharInput> = (0..trials).map(|_| random_input(mode, size, &mut rng)).collect();
        let mut batch = Vec::new();
        for input in &inputs {
            let (x, oracle) = input.arg_and_oracle();
            match eval_memo(d, &x, &oracle, budget) {
                Ok((_, m)) => batch.push(ScalingRow {
                    size,
                    steps: m.steps,
                    peak_bits: m.peak_bits,
                }),
                Err(EvalError::StepBudget(_) | EvalError::BitBudget { .. }) => {
                    return Ok(ScalingReport::new(rows, Some(size)));
                }
            }
        }
        batch.sort_by_key(|r| (r.steps, r.peak_bits));
        rows.extend(batch);
    }
    Ok(ScalingReport::new(rows, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::prims::{konst, zero};

    #[test]
    fn modes_must_match_inputs() {
        let e = char_run(&konst(1), CharMode::One, &CharInput::Number(nat(3)), Budget::default()).unwrap_err();
        assert!(matches!(e, HarnessError::ModeMismatch { .. }));
        let e = char_run(&konst(2), CharMode::Zero, &CharInput::Number(nat(3)), Budget::default()).unwrap_err();
        assert_eq!(e, HarnessError::NotZeroOne(nat(2)));
    }

    #[test]
    fn empty_set_runs_at_zero() {
        let (yes, _) = char_run(&Derivation::id(), CharMode::One, &CharInput::Set(FinSet::new()), Budget::default()).unwrap();
        assert!(!yes);
    }

    #[test]
    fn certify_examples() {
        let xs: Vec<Nat> = (0..=1000u64).map(nat).collect();
        let c = certify_bound(&Derivation::id(), &xs, Budget::default()).unwrap();
        assert_eq!(c, Certificate::Holds { checked: 1001, skipped: 0 });
        let pp = Derivation::pair(Derivation::id(), Derivation::id());
        let c = certify_bound(&pp, &xs[..=100], Budget::default()).unwrap();
        assert!(matches!(c, Certificate::Holds { checked: 101, .. }));
        assert!(matches!(
            certify_bound(&Derivation::exp(), &xs, Budget::default()),
            Err(HarnessError::Unbounded(_))
        ));
    }

    #[test]
    fn slope_of_exact_powers() {
        let pts: Vec<(f64, f64)> = [2.0f64, 4.0, 8.0].iter().map(|&n: &f64| (n.ln(), (n * n * n).ln())).collect();
        assert!((slope(&pts).unwrap() - 3.0).abs() < 1e-9);
        assert_eq!(slope(&pts[..1]), None);
    }

    #[test]
    fn constant_cost_is_flat() {
        let r = scaling_study(&konst(1), CharMode::Zero, &[8, 16, 32, 64], 3, 7, Budget::default()).unwrap();
        assert_eq!(r.rows.len(), 12);
        assert!(r.fitted_exponent.unwrap().abs() < 0.2);
        assert!(!r.superpolynomial());
        assert!(r.to_csv().starts_with("size,steps,peak_bits\n8,"));
        assert!(r.to_csv().ends_with("# fitted_exponent=0.0000\n"));
    }

    #[test]
    fn study_is_deterministic_and_truncates() {
        let d = Derivation::comp(Derivation::mu(zero()), Derivation::pair(Derivation::id(), Derivation::id()));
        let a = scaling_study(&d, CharMode::One, &[4, 8, 16], 4, 11, Budget::default()).unwrap();
        let b = scaling_study(&d, CharMode::One, &[4, 8, 16], 4, 11, Budget::default()).unwrap();
        assert_eq!(a, b);
        let tight = Budget { max_steps: 200, ..Budget::default() };
        let t = scaling_study(&d, CharMode::Zero, &[4, 8, 1000], 2, 1, tight).unwrap();
        assert_eq!(t.truncated_at, Some(1000));
        assert!(t.to_csv().contains("# truncated_at=1000\n"));
        assert!(scaling_study(&d, CharMode::Zero, &[4, 4], 1, 1, tight).is_err());
    }
}
