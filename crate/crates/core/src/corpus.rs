//! The shipped clausal programs and term list.

pub const EXPLICIT: &str = include_str!("../corpus/explicit.cl");
pub const NESTED: &str = include_str!("../corpus/nested.cl");
pub const LISTS: &str = include_str!("../corpus/lists.cl");
pub const TERMS: &str = include_str!("../corpus/terms.txt");

/// `(file name, contents)` of every program.
pub fn programs() -> [(&'static str, &'static str); 3] {
    [("explicit.cl", EXPLICIT), ("nested.cl", NESTED), ("lists.cl", LISTS)]
}

/// Non-comment lines of the term list.
pub fn term_lines() -> impl Iterator<Item = &'static str> {
    TERMS.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clausal::{parse_cl, print_program, Env};

    #[test]
    fn programs_check_and_reprint() {
        let mut defs = 0;
        for (name, src) in programs() {
            let parsed = parse_cl(src).unwrap_or_else(|e| panic!("{name}: {e}"));
            let printed = print_program(&parsed);
            assert_eq!(parse_cl(&printed).unwrap(), parsed, "{name}");
            Env::new(&parsed).unwrap_or_else(|e| panic!("{name}: {e}"));
            defs += parsed.len();
        }
        assert!(defs >= 20);
        assert!(term_lines().count() >= 20);
    }
}
