//! S-expression syntax for derivations: atoms `S add mul lt I D E smash X`,
//! compounds `(P d d)`, `(comp d d)`, `(mu d)`, `(pr d d)`, `(bpr d d)`,
//! `(snr d d)`. Both directions use explicit stacks so deep terms are safe.

use thiserror::Error;

use super::{Derivation, OpSym};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: {msg}")]
pub struct SexprError {
    pub offset: usize,
    pub msg: String,
}

fn err<T>(offset: usize, msg: impl Into<String>) -> Result<T, SexprError> {
    Err(SexprError {
        offset,
        msg: msg.into(),
    })
}

pub fn d_print(d: &Derivation) -> String {
    enum Item {
        Node(Derivation),
        Text(&'static str),
    }
    let mut out = String::new();
    let mut stack = vec![Item::Node(d.clone())];
    while let Some(item) = stack.pop() {
        match item {
            Item::Text(t) => out.push_str(t),
            Item::Node(n) => {
                if n.children().is_empty() {
                    out.push_str(n.op().keyword());
                    continue;
                }
                out.push('(');
                out.push_str(n.op().keyword());
                stack.push(Item::Text(")"));
                for c in n.children().iter().rev() {
                    stack.push(Item::Node(c.clone()));
                    stack.push(Item::Text(" "));
                }
            }
        }
    }
    out
}

enum Tok<'a> {
    Open,
    Close,
    Word(&'a str),
}

fn tokenize(src: &str) -> Vec<(usize, Tok<'_>)> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => {
                toks.push((i, Tok::Open));
                i += 1;
            }
            b')' => {
                toks.push((i, Tok::Close));
                i += 1;
            }
            c if c.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len()
                    && !bytes[i].is_ascii_whitespace()
                    && bytes[i] != b'('
                    && bytes[i] != b')'
                {
                    i += 1;
                }
                toks.push((start, Tok::Word(&src[start..i])));
            }
        }
    }
    toks
}

pub fn d_parse(src: &str) -> Result<Derivation, SexprError> {
    struct Frame {
        op: OpSym,
        offset: usize,
        args: Vec<Derivation>,
    }
    let toks = tokenize(src);
    let mut frames: Vec<Frame> = Vec::new();
    let mut result: Option<Derivation> = None;
    let mut iter = toks.into_iter().peekable();
    while let Some((off, tok)) = iter.next() {
        if result.is_some() {
            return err(off, "trailing input after derivation");
        }
        let finished = match tok {
            Tok::Open => {
                let Some((hoff, Tok::Word(w))) = iter.next() else {
                    return err(off + 1, "expected operator after `(`");
                };
                match OpSym::from_keyword(w) {
                    Some(op) if op.arity() > 0 => {
                        frames.push(Frame {
                            op,
                            offset: hoff,
                            args: Vec::new(),
                        });
                        None
                    }
                    Some(_) => return err(hoff, format!("`{w}` is an atom and takes no arguments")),
                    None => return err(hoff, format!("unknown operator `{w}`")),
                }
            }
            Tok::Close => {
                let Some(frame) = frames.pop() else {
                    return err(off, "unbalanced `)`");
                };
                match Derivation::new(frame.op, frame.args) {
                    Ok(d) => Some(d),
                    Err(e) => return err(frame.offset, e.to_string()),
                }
            }
            Tok::Word(w) => match OpSym::from_keyword(w) {
                Some(op) if op.arity() == 0 => Some(Derivation::leaf(op)),
                Some(_) => return err(off, format!("`{w}` needs arguments: write `({w} ...)`")),
                None => return err(off, format!("unknown atom `{w}`")),
            },
        };
        if let Some(d) = finished {
            match frames.last_mut() {
                Some(f) => {
                    if f.args.len() == f.op.arity() {
                        return err(off, format!("too many arguments for `{}`", f.op.keyword()));
                    }
                    f.args.push(d);
                }
                None => result = Some(d),
            }
        }
    }
    if !frames.is_empty() {
        return err(src.len(), "unexpected end of input: missing `)`");
    }
    result.map_or_else(|| err(src.len(), "empty input"), Ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for s in ["S", "(comp S S)", "(mu (comp lt (P I S)))", "(snr (pr X E) (bpr smash D))"] {
            assert_eq!(d_print(&d_parse(s).unwrap()), s);
        }
    }

    #[test]
    fn whitespace_is_flexible() {
        let d = d_parse("  ( comp\n S   S ) ").unwrap();
        assert_eq!(d_print(&d), "(comp S S)");
    }

    #[test]
    fn errors_carry_offsets() {
        assert_eq!(d_parse("(comp S").unwrap_err().offset, 7);
        assert_eq!(d_parse("(foo S)").unwrap_err().offset, 1);
        assert_eq!(d_parse("S S").unwrap_err().offset, 2);
        assert_eq!(d_parse("(mu S S)").unwrap_err().offset, 6);
        assert_eq!(d_parse("(comp S)").unwrap_err().offset, 1);
        assert!(d_parse("").is_err());
        assert!(d_parse(")").is_err());
        assert!(d_parse("(S)").is_err());
        assert!(d_parse("mu").is_err());
    }

    #[test]
    fn deep_terms_do_not_overflow() {
        let mut d = Derivation::succ();
        for _ in 0..100_000 {
            d = Derivation::comp(Derivation::succ(), d);
        }
        let text = d_print(&d);
        let back = d_parse(&text).unwrap();
        assert_eq!(back.size(), d.size());
        std::mem::forget(back);
        std::mem::forget(d);
    }
}
