//! The `funalg` command line.

use std::fs;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};

use crate::algebra::{d_parse, d_print, enumerate, AlgebraClass, PolyBound};
use crate::clausal::{check_recursive_restrictions, parse_cl, print_program, DefKind, Env};
use crate::codec::{FinSet, Nat};
use crate::compile::{compile_program, reduce_bounded_nested_to_snr, reduce_recursive_to_pr, Funcs, SnrOptions};
use crate::eval::{eval, eval_memo, Budget};
use crate::harness::{scaling_study, CharMode};
use crate::selftest;

#[derive(Parser, Debug)]
#[command(name = "funalg", version, about = "Function algebras over the naturals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Target {
    Pr,
    Snr,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Zero,
    One,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a clausal program in canonical form.
    Parse { file: String },
    /// Check every definition and print its refinement steps.
    Check { file: String },
    /// Compile a definition and print its derivation.
    Compile {
        file: String,
        #[arg(long = "fn")]
        name: String,
        #[arg(long, value_parser = parse_class)]
        class: AlgebraClass,
    },
    /// Reduce a recursive definition to primitive or special nested recursion.
    Reduce {
        file: String,
        #[arg(long = "fn")]
        name: String,
        #[arg(long, value_enum)]
        to: Target,
        /// Polynomial bound on the values, e.g. `n^2 + 1` (only for snr).
        #[arg(long, default_value = "n")]
        bound: String,
    },
    /// Evaluate a derivation and print `value steps peak_bits memo_hits max_depth`.
    Eval {
        #[arg(long)]
        d: String,
        #[arg(long)]
        arg: Nat,
        /// Oracle elements, comma separated.
        #[arg(long, default_value = "")]
        oracle: String,
        #[arg(long)]
        max_steps: Option<u64>,
        #[arg(long)]
        max_bits: Option<u64>,
        /// Cache recursion results within the call.
        #[arg(long)]
        memo: bool,
    },
    /// Print the first derivations of a class, one per line.
    Enum {
        #[arg(long, value_parser = parse_class)]
        class: AlgebraClass,
        #[arg(long)]
        count: usize,
    },
    /// Measure evaluation cost over input sizes and print CSV.
    Meter {
        #[arg(long)]
        d: String,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Ascending sizes, comma separated.
        #[arg(long)]
        sizes: String,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long)]
        max_steps: Option<u64>,
        #[arg(long)]
        max_bits: Option<u64>,
    },
    /// Run the acceptance checks.
    Selftest,
}

fn parse_class(s: &str) -> Result<AlgebraClass, String> {
    s.parse()
}

fn read(file: &str) -> Result<String, String> {
    fs::read_to_string(file).map_err(|e| format!("{file}: {e}"))
}

fn load(file: &str) -> Result<Env, String> {
    Env::parse(&read(file)?).map_err(|e| format!("{file}: {e}"))
}

fn numbers(list: &str) -> Result<Vec<Nat>, String> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Nat>().map_err(|_| format!("`{s}` is not a decimal number")))
        .collect()
}

fn budget(max_steps: Option<u64>, max_bits: Option<u64>) -> Budget {
    let d = Budget::default();
    Budget {
        max_steps: max_steps.unwrap_or(d.max_steps),
        max_bits: max_bits.unwrap_or(d.max_bits),
    }
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<bool, String> {
    let io = |e: std::io::Error| e.to_string();
    match cmd {
        Command::Parse { file } => {
            let defs = parse_cl(&read(&file)?).map_err(|e| format!("{file}: {e}"))?;
            write!(out, "{}", print_program(&defs)).map_err(io)?;
        }
        Command::Check { file } => {
            let env = load(&file)?;
            for r in env.defs() {
                let kind = match r.strict.kind() {
                    DefKind::Explicit => "explicit",
                    DefKind::Recursive => "recursive",
                };
                let completed = if r.completed { ", completed" } else { "" };
                writeln!(out, "{}: {kind}{completed}", r.name).map_err(io)?;
                for step in &r.trace {
                    writeln!(out, "  {step}").map_err(io)?;
                }
                if r.strict.kind() == DefKind::Recursive {
                    let report = check_recursive_restrictions(r).map_err(|e| e.to_string())?;
                    for line in report.to_string().lines() {
                        writeln!(out, "  {line}").map_err(io)?;
                    }
                }
            }
        }
        Command::Compile { file, name, class } => {
            let env = load(&file)?;
            let funcs = compile_program(&env, &name, class).map_err(|e| e.to_string())?;
            writeln!(out, "{}", d_print(&funcs[&name])).map_err(io)?;
        }
        Command::Reduce { file, name, to, bound } => {
            let env = load(&file)?;
            let prefix = compile_program(&env, &name, AlgebraClass::DA);
            // Helpers before `name` must be explicit; `name` itself is reduced.
            let funcs = match prefix {
                Ok(f) => f,
                Err(crate::compile::CompileError::NeedsRecursion(n)) if n == name => {
                    let mut f = Funcs::new();
                    for r in env.defs().iter().take_while(|r| r.name != name) {
                        let d = crate::compile::compile_explicit(r, &f).map_err(|e| e.to_string())?;
                        f.insert(r.name.clone(), d);
                    }
                    f
                }
                Err(e) => return Err(e.to_string()),
            };
            let text = match to {
                Target::Pr => reduce_recursive_to_pr(&env, &name, &funcs).map_err(|e| e.to_string())?.to_string(),
                Target::Snr => {
                    let bound: PolyBound = bound.parse().map_err(|e: crate::algebra::BoundError| e.to_string())?;
                    reduce_bounded_nested_to_snr(&env, &name, &bound, &funcs, SnrOptions::default())
                        .map_err(|e| e.to_string())?
                        .to_string()
                }
            };
            write!(out, "{text}").map_err(io)?;
        }
        Command::Eval {
            d,
            arg,
            oracle,
            max_steps,
            max_bits,
            memo,
        } => {
            let d = d_parse(&d).map_err(|e| e.to_string())?;
            let oracle: FinSet = numbers(&oracle)?.into_iter().collect();
            let run = if memo { eval_memo } else { eval };
            let (v, m) = run(&d, &arg, &oracle, budget(max_steps, max_bits)).map_err(|e| e.to_string())?;
            writeln!(out, "{}", m.report_line(&v)).map_err(io)?;
        }
        Command::Enum { class, count } => {
            for d in enumerate(class, count) {
                writeln!(out, "{}", d_print(&d)).map_err(io)?;
            }
        }
        Command::Meter {
            d,
            mode,
            sizes,
            seed,
            trials,
            max_steps,
            max_bits,
        } => {
            let d = d_parse(&d).map_err(|e| e.to_string())?;
            let sizes = numbers(&sizes)?
                .iter()
                .map(|s| u64::try_from(s).map_err(|_| format!("size {s} is too large")))
                .collect::<Result<Vec<u64>, String>>()?;
            let mode = match mode {
                Mode::Zero => CharMode::Zero,
                Mode::One => CharMode::One,
            };
            let report = scaling_study(&d, mode, &sizes, trials, seed, budget(max_steps, max_bits))
                .map_err(|e| e.to_string())?;
            write!(out, "{}", report.to_csv()).map_err(io)?;
        }
        Command::Selftest => {
            let ok = selftest::run_all(|o| {
                let _ = writeln!(out, "{o}");
                let _ = out.flush();
            });
            return Ok(ok);
        }
    }
    Ok(true)
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code: 0 on success, 1 on a domain error, 2 on a usage error.
pub fn run<S: AsRef<str>>(argv: &[S], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv.iter().map(|s| s.as_ref())) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let help = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let text = e.render().to_string();
            if help {
                let _ = write!(out, "{text}");
                return 0;
            }
            let _ = write!(err, "{text}");
            return 2;
        }
    };
    match execute(cli.command, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut argv = vec!["funalg"];
        argv.extend_from_slice(args);
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(&argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn eval_and_enum() {
        let (code, out, _) = call(&["eval", "--d", "(comp S S)", "--arg", "5"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("7\t3\t"), "{out}");
        let (code, out, _) = call(&["enum", "--class", "DA", "--count", "1"]);
        assert_eq!((code, out.as_str()), (0, "X\n"));
        let (_, out, _) = call(&["eval", "--d", "X", "--arg", "4", "--oracle", "4, 2,4"]);
        assert!(out.starts_with("1\t"));
    }

    #[test]
    fn exit_codes() {
        let (code, _, err) = call(&["compile", "/nonexistent/missing.cl", "--fn", "f", "--class", "DA"]);
        assert_eq!(code, 1);
        assert!(err.contains("missing.cl"));
        assert_eq!(call(&["eval", "--d", "(comp S", "--arg", "5"]).0, 1);
        assert_eq!(call(&["eval", "--d", "S", "--arg", "5", "--max-steps", "0"]).0, 1);
        assert_eq!(call(&["eval", "--d", "S"]).0, 2);
        assert_eq!(call(&["eval", "--d", "S", "--arg", "-1"]).0, 2);
        assert_eq!(call(&["enum", "--class", "XYZ", "--count", "1"]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["eval", "--d", "S", "--arg", "1", "--bogus"]).0, 2);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn meter_prints_csv() {
        let args = ["meter", "--d", "(comp S S)", "--mode", "zero", "--sizes", "4,8,16", "--seed", "3"];
        let (code, out, _) = call(&args);
        assert_eq!(code, 0);
        assert!(out.starts_with("size,steps,peak_bits\n4,3,"));
        assert!(out.ends_with("# fitted_exponent=0.0000\n"));
        assert_eq!(call(&args).1, out);
        assert_eq!(call(&["meter", "--d", "S", "--mode", "one", "--sizes", "8,4", "--seed", "1"]).0, 1);
    }
}
