//! Acceptance criteria 1 to 13, one line each. Criteria 1 to 12 live in the
//! library so that `funalg selftest` runs the same checks; 13 drives the
//! binary.

use std::process::{Command, ExitCode, Output};
use std::time::Instant;

use funalg::clausal::parse_cl;
use funalg::corpus;
use funalg::selftest::{self, Outcome};

fn funalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_funalg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn cli_round_trip() -> Result<String, String> {
    let dir = std::env::temp_dir().join(format!("funalg-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    for (name, src) in corpus::programs() {
        let first = dir.join(name);
        std::fs::write(&first, src).map_err(|e| e.to_string())?;
        let out = funalg(&["parse", first.to_str().unwrap()]);
        if !out.status.success() {
            return Err(format!("parse {name} failed"));
        }
        let printed = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
        let second = dir.join(format!("again-{name}"));
        std::fs::write(&second, &printed).map_err(|e| e.to_string())?;
        let again = funalg(&["parse", second.to_str().unwrap()]);
        if again.stdout != printed.as_bytes() {
            return Err(format!("{name}: printing is not a fixpoint"));
        }
        if parse_cl(&printed).map_err(|e| e.to_string())? != parse_cl(src).map_err(|e| e.to_string())? {
            return Err(format!("{name}: reprinted program differs"));
        }
    }
    let _ = std::fs::remove_dir_all(&dir);

    let repeatable = [
        vec!["enum", "--class", "TA", "--count", "40"],
        vec!["meter", "--d", "(comp (mu X) (P I I))", "--mode", "one", "--sizes", "8,16,32", "--seed", "9"],
        vec!["eval", "--d", "(comp S S)", "--arg", "5"],
    ];
    for args in &repeatable {
        let (a, b) = (funalg(args), funalg(args));
        if !a.status.success() || a.stdout != b.stdout {
            return Err(format!("`{}` is not deterministic", args.join(" ")));
        }
    }
    if funalg(&["enum", "--class", "DA", "--count", "1"]).stdout != b"X\n" {
        return Err("first DA derivation is not X".into());
    }
    if funalg(&["compile", "missing.cl", "--fn", "f", "--class", "DA"]).status.code() != Some(1) {
        return Err("missing file does not exit with 1".into());
    }
    if funalg(&["eval", "--d", "S"]).status.code() != Some(2) {
        return Err("usage error does not exit with 2".into());
    }

    let st = funalg(&["selftest"]);
    let log = String::from_utf8_lossy(&st.stdout);
    let passes = log.lines().filter(|l| l.contains(" PASS ")).count();
    if st.status.code() != Some(0) || passes != 12 {
        return Err(format!("selftest exited with {:?}, {passes} of 12 passed", st.status.code()));
    }
    Ok("corpus reprints to a fixpoint, output repeats, selftest exits 0".into())
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut show = |o: &Outcome, secs: f64| {
        println!("{o}  [{secs:.1}s]");
        failed += usize::from(!o.passed);
    };
    for (id, _, _) in selftest::CRITERIA {
        let t = Instant::now();
        let o = selftest::run(id).expect("listed criterion");
        show(&o, t.elapsed().as_secs_f64());
    }
    let t = Instant::now();
    let (passed, detail) = match cli_round_trip() {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    let o = Outcome {
        id: 13,
        name: "cli",
        passed,
        detail,
    };
    show(&o, t.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
