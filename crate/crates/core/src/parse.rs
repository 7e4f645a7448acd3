//! Recursive-descent reader for the textual term syntax:
//!
//! ```text
//! term := var | sym | sym '(' term (',' term)* ')'
//! var  := ('x' | 'y') [1-9][0-9]*
//! ```
//!
//! Whitespace between tokens is ignored and constants may be written as
//! `e` or `e()`.

use crate::error::{Error, Result};
use crate::term::{variable_name, Signature, Term, Var};

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    sig: &'a Signature,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn ident(&mut self) -> Result<(usize, &'a str)> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let len = rest
            .char_indices()
            .find(|&(i, c)| {
                !(c.is_ascii_alphanumeric() || c == '_') || (i == 0 && c.is_ascii_digit())
            })
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(match rest.chars().next() {
                Some(c) => Error::syntax(start, format!("expected a symbol or variable, found `{c}`")),
                None => Error::syntax(start, "expected a symbol or variable, found end of input"),
            });
        }
        self.pos += len;
        Ok((start, &rest[..len]))
    }

    fn term(&mut self) -> Result<Term> {
        let (start, name) = self.ident()?;
        if let Some((kind, digits)) = variable_name(name) {
            let index: u32 = digits
                .parse()
                .map_err(|_| Error::syntax(start, format!("variable index of `{name}` is too large")))?;
            if self.peek() == Some('(') {
                return Err(Error::syntax(self.pos, format!("variable `{name}` cannot take arguments")));
            }
            return Ok(Term::Var(Var { kind, index }));
        }
        let (_, arity) = self
            .sig
            .lookup(name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
        let mut args = Vec::new();
        if self.peek() == Some('(') {
            self.pos += 1;
            if self.peek() == Some(')') {
                self.pos += 1;
            } else {
                loop {
                    args.push(self.term()?);
                    match self.peek() {
                        Some(',') => self.pos += 1,
                        Some(')') => {
                            self.pos += 1;
                            break;
                        }
                        Some(c) => {
                            return Err(Error::syntax(self.pos, format!("expected `,` or `)`, found `{c}`")))
                        }
                        None => return Err(Error::syntax(self.pos, "unclosed `(`")),
                    }
                }
            }
        }
        if args.len() != arity {
            return Err(Error::ArityMismatch {
                symbol: name.to_string(),
                expected: arity,
                found: args.len(),
            });
        }
        Ok(Term::App(name.to_string(), args))
    }
}

pub fn parse_term(text: &str, sig: &Signature) -> Result<Term> {
    let mut p = Parser { src: text, pos: 0, sig };
    let t = p.term()?;
    match p.peek() {
        None => Ok(t),
        Some(c) => Err(Error::syntax(p.pos, format!("unexpected trailing `{c}`"))),
    }
}

/// Parses a term and checks that it only uses `x` variables with index at most `max_x`.
pub(crate) fn parse_operation_term(text: &str, sig: &Signature, max_x: u32) -> Result<Term> {
    let t = parse_term(text, sig)?;
    let vars = crate::term::vars_of(&t);
    if let Some(&y) = vars.yvars.iter().next() {
        return Err(Error::Witness(format!("`{text}` uses slot variable y{y}")));
    }
    if let Some(&x) = vars.xvars.iter().find(|&&i| i > max_x) {
        return Err(Error::Witness(format!(
            "`{text}` uses x{x}, only x1..x{max_x} are allowed"
        )));
    }
    Ok(t)
}
